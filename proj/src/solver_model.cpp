#include "flex/solver.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace flex {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

int OptModel::add_var(double lo, double hi, double c, std::string name) {
    lb.push_back(lo);
    ub.push_back(hi);
    cost.push_back(c);
    var_names.push_back(name.empty() ? "x" + std::to_string(num_vars) : std::move(name));
    return num_vars++;
}

int OptModel::add_row(std::vector<std::pair<int, double>> terms, double lo, double hi,
                      std::string name) {
    Row r;
    r.terms = std::move(terms);
    r.lo = lo;
    r.hi = hi;
    rows.push_back(std::move(r));
    row_names.push_back(name.empty() ? "r" + std::to_string(rows.size() - 1) : std::move(name));
    return static_cast<int>(rows.size()) - 1;
}

void OptModel::validate() const {
    if (static_cast<int>(lb.size()) != num_vars || static_cast<int>(ub.size()) != num_vars ||
        static_cast<int>(cost.size()) != num_vars)
        throw std::invalid_argument("OptModel: inconsistent variable arrays");
    for (int j = 0; j < num_vars; ++j) {
        if (lb[static_cast<size_t>(j)] > ub[static_cast<size_t>(j)])
            throw std::invalid_argument("OptModel: lb > ub for variable " +
                                        var_names[static_cast<size_t>(j)]);
    }
    auto check_index = [this](int j, const char* what) {
        if (j < 0 || j >= num_vars)
            throw std::invalid_argument(std::string("OptModel: ") + what + " references variable " +
                                        std::to_string(j) + " out of range");
    };
    for (const Row& r : rows) {
        for (const auto& [j, v] : r.terms) {
            check_index(j, "row");
            if (!std::isfinite(v)) throw std::invalid_argument("OptModel: non-finite coefficient");
        }
        if (r.lo > r.hi) throw std::invalid_argument("OptModel: row with lo > hi");
    }
    for (const Cone& c : cones) {
        check_index(c.tail, "cone tail");
        for (int j : c.head) check_index(j, "cone head");
    }
    std::unordered_set<int> in_sos;
    for (const Sos2& g : sos2_groups) {
        if (g.vars.size() < 2) throw std::invalid_argument("OptModel: SOS2 group needs >= 2 vars");
        for (int j : g.vars) {
            check_index(j, "sos2");
            if (!in_sos.insert(j).second)
                throw std::invalid_argument("OptModel: variable in two SOS2 groups");
        }
    }
    for (int j : binaries) check_index(j, "binary");
    if (nonlinear) {
        if (!nonlinear->eval) throw std::invalid_argument("OptModel: nonlinear block without eval");
        if (static_cast<int>(nonlinear->kinds.size()) != nonlinear->count)
            throw std::invalid_argument("OptModel: nonlinear kinds size mismatch");
    }
}

namespace {

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string dump_model(const OptModel& m) {
    std::string out;
    out += "\\ pqflex model dump: " + std::to_string(m.num_vars) + " vars, " +
           std::to_string(m.rows.size()) + " rows\n";
    out += "Minimize\n obj:";
    for (int j = 0; j < m.num_vars; ++j) {
        const double c = m.cost[static_cast<size_t>(j)];
        if (c == 0.0) continue;
        out += (c >= 0 ? " + " : " - ") + fmt_num(std::abs(c)) + " " +
               m.var_names[static_cast<size_t>(j)];
    }
    out += "\nSubject To\n";
    for (size_t i = 0; i < m.rows.size(); ++i) {
        const OptModel::Row& r = m.rows[i];
        std::string expr;
        for (const auto& [j, v] : r.terms)
            expr += (v >= 0 ? " + " : " - ") + fmt_num(std::abs(v)) + " " +
                    m.var_names[static_cast<size_t>(j)];
        if (r.lo == r.hi) {
            out += " " + m.row_names[i] + ":" + expr + " = " + fmt_num(r.lo) + "\n";
        } else {
            if (r.hi != kInf) out += " " + m.row_names[i] + "_u:" + expr + " <= " + fmt_num(r.hi) + "\n";
            if (r.lo != -kInf) out += " " + m.row_names[i] + "_l:" + expr + " >= " + fmt_num(r.lo) + "\n";
        }
    }
    out += "Bounds\n";
    for (int j = 0; j < m.num_vars; ++j) {
        const double lo = m.lb[static_cast<size_t>(j)], hi = m.ub[static_cast<size_t>(j)];
        const std::string& name = m.var_names[static_cast<size_t>(j)];
        if (lo == -kInf && hi == kInf)
            out += " " + name + " free\n";
        else if (lo == hi)
            out += " " + name + " = " + fmt_num(lo) + "\n";
        else {
            out += " " + (lo == -kInf ? std::string("-inf") : fmt_num(lo)) + " <= " + name +
                   " <= " + (hi == kInf ? std::string("+inf") : fmt_num(hi)) + "\n";
        }
    }
    if (!m.binaries.empty()) {
        out += "Binary\n";
        for (int j : m.binaries) out += " " + m.var_names[static_cast<size_t>(j)] + "\n";
    }
    for (const OptModel::Cone& c : m.cones) {
        out += "\\ cone: ||(";
        for (size_t k = 0; k < c.head.size(); ++k)
            out += (k ? "," : "") + m.var_names[static_cast<size_t>(c.head[k])];
        out += ")|| <= " + m.var_names[static_cast<size_t>(c.tail)] + "\n";
    }
    for (const OptModel::Sos2& g : m.sos2_groups) {
        out += "\\ sos2:";
        for (int j : g.vars) out += " " + m.var_names[static_cast<size_t>(j)];
        out += "\n";
    }
    out += "End\n";
    return out;
}

}  // namespace flex
