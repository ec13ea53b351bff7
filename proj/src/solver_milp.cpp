#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "simplex_core.hpp"

namespace flex {

namespace {

using detail::Basis;
using detail::Simplex;

struct BoundFix {
    int var;
    double lo, hi;
};

struct Node {
    std::vector<BoundFix> fixes;  // cumulative from root
    std::shared_ptr<const Basis> warm;
    double bound = -kInf;  // parent LP objective (valid lower bound)
    int depth = 0;
    long id = 0;
};

struct Violation {
    int sos_group = -1;   // branching SOS2 group
    int binary = -1;      // or branching binary
    int split = 0;        // SOS2 split index
    double score = 0.0;
};

// Finds the most violated SOS2 adjacency / most fractional binary.
Violation find_violation(const OptModel& model, const std::vector<double>& x, double tol) {
    Violation best;
    for (size_t g = 0; g < model.sos2_groups.size(); ++g) {
        const auto& vars = model.sos2_groups[g].vars;
        int lo = -1, hi = -1, count = 0;
        double wsum = 0.0, centroid = 0.0;
        for (size_t k = 0; k < vars.size(); ++k) {
            const double v = std::abs(x[static_cast<size_t>(vars[k])]);
            if (v > tol) {
                if (lo < 0) lo = static_cast<int>(k);
                hi = static_cast<int>(k);
                ++count;
                wsum += v;
                centroid += v * static_cast<double>(k);
            }
        }
        if (count <= 1) continue;
        const int spread = hi - lo - 1;
        if (spread <= 0) continue;  // two adjacent nonzeros
        const double score = static_cast<double>(spread) + wsum;
        if (score > best.score) {
            best = Violation{};
            best.sos_group = static_cast<int>(g);
            best.score = score;
            int split = static_cast<int>(std::floor(centroid / wsum + 0.5));
            split = std::clamp(split, lo + 1, hi - 1);
            best.split = split;
        }
    }
    // SOS2 adjacency violations branch first; otherwise the most fractional binary.
    if (best.sos_group < 0) {
        for (int j : model.binaries) {
            const double v = x[static_cast<size_t>(j)];
            const double frac = std::abs(v - std::round(v));
            if (frac > tol && frac > best.score) {
                best.score = frac;
                best.binary = j;
            }
        }
    }
    return best;
}

}  // namespace

SolveResult solve_milp(const OptModel& model, const SolverConfig& cfg) {
    model.validate();
    if (!model.cones.empty() || model.nonlinear)
        throw std::invalid_argument("solve_milp: cones/nonlinear blocks not supported");

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;

    Simplex sx(model, cfg);

    // Root relaxation.
    SolveStatus st = sx.solve_primal();
    res.iterations = sx.iterations();
    if (st != SolveStatus::Optimal) {
        res.status = st;
        res.message = std::string("root relaxation ") + to_string(st);
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    // Track which variables branching may touch, to reset between nodes.
    std::vector<int> branchable;
    for (const auto& g : model.sos2_groups)
        branchable.insert(branchable.end(), g.vars.begin(), g.vars.end());
    branchable.insert(branchable.end(), model.binaries.begin(), model.binaries.end());
    std::sort(branchable.begin(), branchable.end());
    branchable.erase(std::unique(branchable.begin(), branchable.end()), branchable.end());

    bool have_incumbent = false;
    std::vector<double> incumbent;
    double incumbent_obj = kInf;
    std::vector<double> incumbent_duals;
    double incumbent_dual_obj = 0.0;

    auto accept_if_feasible = [&](const std::vector<double>& x, double obj) {
        const Violation v = find_violation(model, x, cfg.milp_int_tol);
        if (v.sos_group >= 0 || v.binary >= 0) return false;
        if (obj < incumbent_obj - 1e-12) {
            incumbent = x;
            incumbent_obj = obj;
            incumbent_duals = sx.row_duals();
            incumbent_dual_obj = sx.dual_objective();
            have_incumbent = true;
        }
        return true;
    };

    long next_id = 0;
    std::map<std::pair<double, long>, Node> queue;  // best-first, id tie-break
    std::vector<Node> dive_stack;                   // used until an incumbent exists

    {
        const std::vector<double> x = sx.structural_solution();
        const double obj = sx.objective();
        if (accept_if_feasible(x, obj)) {
            res.status = SolveStatus::Optimal;
            res.x = incumbent;
            res.objective = incumbent_obj;
            res.duals = incumbent_duals;
            res.dual_objective = incumbent_dual_obj;
            res.nodes = 0;
            res.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return res;
        }
        const Violation v = find_violation(model, x, cfg.milp_int_tol);
        auto warm = std::make_shared<Basis>(sx.basis());
        // Two children of the root.
        for (int side = 0; side < 2; ++side) {
            Node child;
            child.warm = warm;
            child.bound = obj;
            child.depth = 1;
            child.id = next_id++;
            if (v.sos_group >= 0) {
                const auto& vars = model.sos2_groups[static_cast<size_t>(v.sos_group)].vars;
                if (side == 0) {
                    for (size_t k = static_cast<size_t>(v.split) + 1; k < vars.size(); ++k)
                        child.fixes.push_back({vars[k], 0.0, 0.0});
                } else {
                    for (size_t k = 0; k < static_cast<size_t>(v.split); ++k)
                        child.fixes.push_back({vars[k], 0.0, 0.0});
                }
            } else {
                child.fixes.push_back({v.binary, side == 0 ? 0.0 : 1.0, side == 0 ? 0.0 : 1.0});
            }
            queue.emplace(std::make_pair(child.bound, child.id), child);
            dive_stack.push_back(child);
        }
    }

    int explored = 0;
    bool hit_node_limit = false;
    while (!queue.empty()) {
        if (explored >= cfg.milp_node_limit) {
            hit_node_limit = true;
            break;
        }
        Node node;
        if (!have_incumbent && !dive_stack.empty()) {
            node = dive_stack.back();
            dive_stack.pop_back();
            queue.erase({node.bound, node.id});
        } else {
            dive_stack.clear();
            node = queue.begin()->second;
            queue.erase(queue.begin());
        }
        if (have_incumbent && node.bound >= incumbent_obj - cfg.milp_abs_gap) continue;

        // Restore root bounds on branchable vars, then apply this node's fixes.
        for (int j : branchable)
            sx.set_bounds(j, model.lb[static_cast<size_t>(j)], model.ub[static_cast<size_t>(j)]);
        for (const BoundFix& f : node.fixes) sx.set_bounds(f.var, f.lo, f.hi);
        sx.load_basis(*node.warm);
        st = sx.solve_dual();
        ++explored;
        res.iterations = sx.iterations();

        if (st == SolveStatus::Infeasible) continue;
        if (st != SolveStatus::Optimal) continue;  // numerical trouble: drop node

        const double obj = sx.objective();
        if (have_incumbent && obj >= incumbent_obj - cfg.milp_abs_gap) continue;

        const std::vector<double> x = sx.structural_solution();
        if (accept_if_feasible(x, obj)) continue;

        const Violation v = find_violation(model, x, cfg.milp_int_tol);
        auto warm = std::make_shared<Basis>(sx.basis());
        for (int side = 0; side < 2; ++side) {
            Node child;
            child.fixes = node.fixes;
            child.warm = warm;
            child.bound = obj;
            child.depth = node.depth + 1;
            child.id = next_id++;
            if (v.sos_group >= 0) {
                const auto& vars = model.sos2_groups[static_cast<size_t>(v.sos_group)].vars;
                if (side == 0) {
                    for (size_t k = static_cast<size_t>(v.split) + 1; k < vars.size(); ++k)
                        child.fixes.push_back({vars[k], 0.0, 0.0});
                } else {
                    for (size_t k = 0; k < static_cast<size_t>(v.split); ++k)
                        child.fixes.push_back({vars[k], 0.0, 0.0});
                }
            } else if (v.binary >= 0) {
                child.fixes.push_back({v.binary, side == 0 ? 0.0 : 1.0, side == 0 ? 0.0 : 1.0});
            } else {
                continue;  // feasible within tolerance was handled above
            }
            queue.emplace(std::make_pair(child.bound, child.id), child);
            if (!have_incumbent) dive_stack.push_back(child);
        }
    }

    res.nodes = explored;
    res.status = hit_node_limit ? SolveStatus::IterationLimit : SolveStatus::Optimal;
    if (hit_node_limit) res.message = "node limit reached";
    if (have_incumbent) {
        res.x = incumbent;
        res.objective = incumbent_obj;
        res.duals = incumbent_duals;
        res.dual_objective = incumbent_dual_obj;
    } else if (!hit_node_limit) {
        res.status = SolveStatus::Infeasible;
        res.message = "no integer-feasible point";
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace flex
