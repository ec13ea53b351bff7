#include "simplex_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace flex::detail {

namespace {
constexpr double kPivotTol = 1e-10;
constexpr double kZero = 1e-11;
}  // namespace

Simplex::Simplex(const OptModel& model, const SolverConfig& cfg) : cfg_(cfg) {
    n_ = model.num_vars;
    m_ = static_cast<int>(model.rows.size());
    build_columns(model);
    default_basis();
}

void Simplex::build_columns(const OptModel& model) {
    cols_.assign(static_cast<size_t>(n_ + m_), Col{});
    lb_.resize(static_cast<size_t>(n_ + m_));
    ub_.resize(static_cast<size_t>(n_ + m_));
    cost_.assign(static_cast<size_t>(n_ + m_), 0.0);
    for (int j = 0; j < n_; ++j) {
        lb_[static_cast<size_t>(j)] = model.lb[static_cast<size_t>(j)];
        ub_[static_cast<size_t>(j)] = model.ub[static_cast<size_t>(j)];
        cost_[static_cast<size_t>(j)] = model.cost[static_cast<size_t>(j)];
    }
    for (int i = 0; i < m_; ++i) {
        for (const auto& [j, v] : model.rows[static_cast<size_t>(i)].terms)
            if (v != 0.0) cols_[static_cast<size_t>(j)].entries.push_back({i, v});
        Col& slack = cols_[static_cast<size_t>(n_ + i)];
        slack.slack_row = i;
        lb_[static_cast<size_t>(n_ + i)] = model.rows[static_cast<size_t>(i)].lo;
        ub_[static_cast<size_t>(n_ + i)] = model.rows[static_cast<size_t>(i)].hi;
    }
    // Merge duplicate indices within a column (rows may repeat a variable).
    for (int j = 0; j < n_; ++j) {
        auto& e = cols_[static_cast<size_t>(j)].entries;
        std::sort(e.begin(), e.end());
        size_t w = 0;
        for (size_t r = 0; r < e.size(); ++r) {
            if (w > 0 && e[w - 1].first == e[r].first)
                e[w - 1].second += e[r].second;
            else
                e[w++] = e[r];
        }
        e.resize(w);
    }
}

void Simplex::set_bounds(int col, double lo, double hi) {
    lb_[static_cast<size_t>(col)] = lo;
    ub_[static_cast<size_t>(col)] = hi;
}

void Simplex::set_costs(const std::vector<double>& structural_costs) {
    for (int j = 0; j < n_; ++j) cost_[static_cast<size_t>(j)] = structural_costs[static_cast<size_t>(j)];
}

void Simplex::default_basis() {
    basic_.resize(static_cast<size_t>(m_));
    basic_pos_.assign(static_cast<size_t>(n_ + m_), -1);
    stat_.assign(static_cast<size_t>(n_ + m_), VStat::AtLower);
    value_.assign(static_cast<size_t>(n_ + m_), 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
        const double lo = lb_[static_cast<size_t>(j)], hi = ub_[static_cast<size_t>(j)];
        if (lo == -kInf && hi == kInf) {
            stat_[static_cast<size_t>(j)] = VStat::NonbasicFree;
            value_[static_cast<size_t>(j)] = 0.0;
        } else if (std::abs(lo) <= std::abs(hi)) {
            stat_[static_cast<size_t>(j)] = lo == -kInf ? VStat::AtUpper : VStat::AtLower;
            value_[static_cast<size_t>(j)] = lo == -kInf ? hi : lo;
        } else {
            stat_[static_cast<size_t>(j)] = VStat::AtUpper;
            value_[static_cast<size_t>(j)] = hi;
        }
    }
    for (int i = 0; i < m_; ++i) {
        basic_[static_cast<size_t>(i)] = n_ + i;
        basic_pos_[static_cast<size_t>(n_ + i)] = i;
        stat_[static_cast<size_t>(n_ + i)] = VStat::Basic;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_) * -1.0;  // slack columns are -I
    basis_loaded_ = true;
    recompute_basics();
}

bool Simplex::factorize() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
        const int col = basic_[static_cast<size_t>(i)];
        const Col& c = cols_[static_cast<size_t>(col)];
        if (c.slack_row >= 0)
            b(c.slack_row, i) = -1.0;
        else
            for (const auto& [r, v] : c.entries) b(r, i) = v;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    lu.setThreshold(1e-10);
    if (lu.rank() < m_) {
        // Degenerate basis from a warm start; fall back to the slack basis.
        default_basis();
        return false;
    }
    binv_ = lu.inverse();
    pivots_since_factor_ = 0;
    return true;
}

void Simplex::recompute_basics() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_ + m_; ++j) {
        if (stat_[static_cast<size_t>(j)] == VStat::Basic) continue;
        double v = value_[static_cast<size_t>(j)];
        // Nonbasic values sit exactly on their (possibly updated) bound.
        if (stat_[static_cast<size_t>(j)] == VStat::AtLower) v = lb_[static_cast<size_t>(j)];
        if (stat_[static_cast<size_t>(j)] == VStat::AtUpper) v = ub_[static_cast<size_t>(j)];
        value_[static_cast<size_t>(j)] = v;
        if (v == 0.0) continue;
        const Col& c = cols_[static_cast<size_t>(j)];
        if (c.slack_row >= 0)
            rhs(c.slack_row) += v;  // -(-1)*v
        else
            for (const auto& [r, coef] : c.entries) rhs(r) -= coef * v;
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (int i = 0; i < m_; ++i) value_[static_cast<size_t>(basic_[static_cast<size_t>(i)])] = xb(i);
}

void Simplex::compute_duals(const std::vector<double>& basic_costs, Eigen::VectorXd& y) const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = basic_costs[static_cast<size_t>(i)];
    y = binv_.transpose() * cb;
}

double Simplex::reduced_cost(int col, const Eigen::VectorXd& y) const {
    const Col& c = cols_[static_cast<size_t>(col)];
    if (c.slack_row >= 0) return y(c.slack_row);
    double d = cost_[static_cast<size_t>(col)];
    for (const auto& [r, v] : c.entries) d -= y(r) * v;
    return d;
}

Eigen::VectorXd Simplex::ftran(int col) const {
    const Col& c = cols_[static_cast<size_t>(col)];
    if (c.slack_row >= 0) return -binv_.col(c.slack_row);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for (const auto& [r, v] : c.entries) w += binv_.col(r) * v;
    return w;
}

void Simplex::pivot(int row_pos, int entering, const Eigen::VectorXd& w) {
    const int leaving = basic_[static_cast<size_t>(row_pos)];
    // binv <- E binv with E the elementary transform replacing column row_pos.
    const double piv = w(row_pos);
    Eigen::RowVectorXd br = binv_.row(row_pos) / piv;
    for (int i = 0; i < m_; ++i) {
        if (i == row_pos) continue;
        if (std::abs(w(i)) > 1e-14) binv_.row(i) -= w(i) * br;
    }
    binv_.row(row_pos) = br;

    basic_[static_cast<size_t>(row_pos)] = entering;
    basic_pos_[static_cast<size_t>(entering)] = row_pos;
    basic_pos_[static_cast<size_t>(leaving)] = -1;
    stat_[static_cast<size_t>(entering)] = VStat::Basic;
    ++pivots_since_factor_;
}

double Simplex::primal_infeasibility() const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
        const int col = basic_[static_cast<size_t>(i)];
        const double v = value_[static_cast<size_t>(col)];
        worst = std::max(worst, lb_[static_cast<size_t>(col)] - v);
        worst = std::max(worst, v - ub_[static_cast<size_t>(col)]);
    }
    return std::max(worst, 0.0);
}

// Returns 0 = done (phase goal reached), 1 = infeasible, 2 = unbounded,
// 3 = iteration limit / numerical trouble.
int Simplex::phase_loop(bool phase_one) {
    const double ftol = cfg_.feas_tol;
    const double dtol = cfg_.opt_tol;
    bool bland = false;
    int stall = 0;
    double last_obj = kInf;
    std::vector<double> basic_costs(static_cast<size_t>(m_));
    Eigen::VectorXd y;

    for (int iter = 0; iter < cfg_.lp_max_iter; ++iter, ++total_iters_) {
        if (pivots_since_factor_ >= 120) {
            if (!factorize()) return 3;
            recompute_basics();
        }

        // Phase objective and basic costs.
        double obj = 0.0;
        bool any_infeas = false;
        for (int i = 0; i < m_; ++i) {
            const int col = basic_[static_cast<size_t>(i)];
            const double v = value_[static_cast<size_t>(col)];
            double c = 0.0;
            if (phase_one) {
                if (v < lb_[static_cast<size_t>(col)] - ftol) {
                    c = -1.0;
                    obj += lb_[static_cast<size_t>(col)] - v;
                    any_infeas = true;
                } else if (v > ub_[static_cast<size_t>(col)] + ftol) {
                    c = 1.0;
                    obj += v - ub_[static_cast<size_t>(col)];
                    any_infeas = true;
                }
            } else {
                c = cost_[static_cast<size_t>(col)];
                obj += c * v;
            }
            basic_costs[static_cast<size_t>(i)] = c;
        }
        if (phase_one && !any_infeas) return 0;

        if (obj < last_obj - 1e-12) {
            last_obj = obj;
            stall = 0;
        } else if (++stall > 300) {
            bland = true;
        }

        compute_duals(basic_costs, y);

        // Pricing.
        int entering = -1;
        double best_score = dtol;
        bool increase = true;
        for (int j = 0; j < n_ + m_; ++j) {
            const VStat st = stat_[static_cast<size_t>(j)];
            if (st == VStat::Basic) continue;
            if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;  // fixed
            // Nonbasic costs are zero in phase one.
            double d = reduced_cost(j, y);
            if (phase_one) d -= cost_[static_cast<size_t>(j)];
            bool ok = false;
            bool dir_up = true;
            if (st == VStat::AtLower && d < -dtol) {
                ok = true;
                dir_up = true;
            } else if (st == VStat::AtUpper && d > dtol) {
                ok = true;
                dir_up = false;
            } else if (st == VStat::NonbasicFree && std::abs(d) > dtol) {
                ok = true;
                dir_up = d < 0.0;
            }
            if (!ok) continue;
            if (bland) {
                entering = j;
                increase = dir_up;
                break;
            }
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                entering = j;
                increase = dir_up;
            }
        }
        if (entering < 0) {
            if (phase_one) return 1;  // residual infeasibility and no improving column
            return 0;                 // optimal
        }

        const double t = increase ? 1.0 : -1.0;
        const Eigen::VectorXd w = ftran(entering);

        // Ratio test: how far can the entering variable move.
        double flip_step = ub_[static_cast<size_t>(entering)] - lb_[static_cast<size_t>(entering)];
        if (std::isnan(flip_step) || stat_[static_cast<size_t>(entering)] == VStat::NonbasicFree)
            flip_step = kInf;
        double best_step = flip_step;
        int block_row = -1;
        double block_piv = 0.0;
        bool block_at_upper = false;
        for (int i = 0; i < m_; ++i) {
            const double wi = w(i);
            if (std::abs(wi) < kZero) continue;
            const double delta = -t * wi;  // basic change per unit of entering move
            const int col = basic_[static_cast<size_t>(i)];
            const double v = value_[static_cast<size_t>(col)];
            const double lo = lb_[static_cast<size_t>(col)], hi = ub_[static_cast<size_t>(col)];
            double step = kInf;
            bool at_upper = false;
            if (phase_one && v < lo - ftol) {
                if (delta > 0) {
                    step = (lo - v) / delta;
                    at_upper = false;
                }
            } else if (phase_one && v > hi + ftol) {
                if (delta < 0) {
                    step = (hi - v) / delta;
                    at_upper = true;
                }
            } else if (delta > 0) {
                if (hi < kInf) {
                    step = (hi - v) / delta;
                    at_upper = true;
                }
            } else {
                if (lo > -kInf) {
                    step = (lo - v) / delta;
                    at_upper = false;
                }
            }
            if (step == kInf) continue;
            step = std::max(step, 0.0);
            if (step < best_step - 1e-12 ||
                (step < best_step + 1e-12 && block_row >= 0 && std::abs(wi) > std::abs(block_piv)) ||
                (step < best_step + 1e-12 && block_row < 0)) {
                best_step = step;
                block_row = i;
                block_piv = wi;
                block_at_upper = at_upper;
            }
        }

        if (best_step == kInf) return phase_one ? 3 : 2;  // unbounded direction

        if (block_row >= 0 && std::abs(block_piv) < kPivotTol) {
            // Numerically tiny pivot: refactorize and retry once, else give up.
            if (pivots_since_factor_ > 0) {
                if (!factorize()) return 3;
                recompute_basics();
                continue;
            }
            return 3;
        }

        // Apply the move.
        for (int i = 0; i < m_; ++i) {
            const double wi = w(i);
            if (std::abs(wi) < kZero) continue;
            value_[static_cast<size_t>(basic_[static_cast<size_t>(i)])] += -t * wi * best_step;
        }
        value_[static_cast<size_t>(entering)] += t * best_step;

        if (block_row < 0) {
            // Bound flip of the entering variable.
            stat_[static_cast<size_t>(entering)] =
                increase ? VStat::AtUpper : VStat::AtLower;
            value_[static_cast<size_t>(entering)] =
                increase ? ub_[static_cast<size_t>(entering)] : lb_[static_cast<size_t>(entering)];
            continue;
        }

        const int leaving = basic_[static_cast<size_t>(block_row)];
        pivot(block_row, entering, w);
        stat_[static_cast<size_t>(leaving)] = block_at_upper ? VStat::AtUpper : VStat::AtLower;
        value_[static_cast<size_t>(leaving)] =
            block_at_upper ? ub_[static_cast<size_t>(leaving)] : lb_[static_cast<size_t>(leaving)];
    }
    return 3;
}

SolveStatus Simplex::solve_primal() {
    if (!basis_loaded_) default_basis();
    if (!factorize()) factorize();  // default_basis() path always factorizes cleanly
    recompute_basics();

    if (primal_infeasibility() > cfg_.feas_tol) {
        const int r1 = phase_loop(true);
        if (r1 == 1) return SolveStatus::Infeasible;
        if (r1 != 0) return SolveStatus::IterationLimit;
    }
    const int r2 = phase_loop(false);
    if (r2 == 0) return SolveStatus::Optimal;
    if (r2 == 2) return SolveStatus::Unbounded;
    return SolveStatus::IterationLimit;
}

SolveStatus Simplex::solve_dual() {
    if (!basis_loaded_) return solve_primal();
    if (!factorize()) return solve_primal();  // basis became singular after edits
    recompute_basics();

    const double ftol = cfg_.feas_tol;
    Eigen::VectorXd y;
    std::vector<double> basic_costs(static_cast<size_t>(m_));

    for (int iter = 0; iter < cfg_.lp_max_iter; ++iter, ++total_iters_) {
        if (pivots_since_factor_ >= 120) {
            if (!factorize()) return solve_primal();
            recompute_basics();
        }
        // Most-violated basic variable leaves.
        int row_pos = -1;
        double worst = ftol;
        bool below = true;
        for (int i = 0; i < m_; ++i) {
            const int col = basic_[static_cast<size_t>(i)];
            const double v = value_[static_cast<size_t>(col)];
            const double lo = lb_[static_cast<size_t>(col)], hi = ub_[static_cast<size_t>(col)];
            if (lo - v > worst) {
                worst = lo - v;
                row_pos = i;
                below = true;
            }
            if (v - hi > worst) {
                worst = v - hi;
                row_pos = i;
                below = false;
            }
        }
        if (row_pos < 0) {
            // Primal feasible; polish reduced costs (usually a no-op).
            const int r2 = phase_loop(false);
            if (r2 == 0) return SolveStatus::Optimal;
            if (r2 == 2) return SolveStatus::Unbounded;
            return SolveStatus::IterationLimit;
        }

        for (int i = 0; i < m_; ++i)
            basic_costs[static_cast<size_t>(i)] =
                cost_[static_cast<size_t>(basic_[static_cast<size_t>(i)])];
        compute_duals(basic_costs, y);

        // Row of B^{-1}A for the leaving position.
        const Eigen::RowVectorXd brow = binv_.row(row_pos);
        const double sigma = below ? 1.0 : -1.0;  // required movement of x_r

        int entering = -1;
        double best_ratio = kInf;
        double best_rho = 0.0;
        for (int j = 0; j < n_ + m_; ++j) {
            const VStat st = stat_[static_cast<size_t>(j)];
            if (st == VStat::Basic) continue;
            if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;
            const Col& c = cols_[static_cast<size_t>(j)];
            double rho = 0.0;
            if (c.slack_row >= 0)
                rho = -brow(c.slack_row);
            else
                for (const auto& [r, v] : c.entries) rho += brow(r) * v;
            if (std::abs(rho) < kPivotTol) continue;
            // x_r changes by -rho per unit increase of x_j.
            bool ok = false;
            if (st == VStat::AtLower || st == VStat::NonbasicFree)
                ok = ok || (-rho * sigma > 0);
            if (st == VStat::AtUpper || st == VStat::NonbasicFree)
                ok = ok || (rho * sigma > 0);
            if (!ok) continue;
            const double d = reduced_cost(j, y);
            const double ratio = std::abs(d) / std::abs(rho);
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 &&
                 (entering < 0 || std::abs(rho) > std::abs(best_rho)))) {
                best_ratio = ratio;
                entering = j;
                best_rho = rho;
            }
        }
        if (entering < 0) return SolveStatus::Infeasible;  // dual unbounded

        const int leaving = basic_[static_cast<size_t>(row_pos)];
        const double target =
            below ? lb_[static_cast<size_t>(leaving)] : ub_[static_cast<size_t>(leaving)];
        const double xr = value_[static_cast<size_t>(leaving)];
        const double delta_e = (xr - target) / best_rho;  // change of entering value

        const Eigen::VectorXd w = ftran(entering);
        for (int i = 0; i < m_; ++i) {
            if (std::abs(w(i)) < kZero) continue;
            value_[static_cast<size_t>(basic_[static_cast<size_t>(i)])] -= delta_e * w(i);
        }
        value_[static_cast<size_t>(entering)] += delta_e;

        pivot(row_pos, entering, w);
        stat_[static_cast<size_t>(leaving)] = below ? VStat::AtLower : VStat::AtUpper;
        value_[static_cast<size_t>(leaving)] = target;
    }
    return SolveStatus::IterationLimit;
}

Basis Simplex::basis() const {
    Basis b;
    b.basic = basic_;
    b.status = stat_;
    b.valid = true;
    return b;
}

void Simplex::load_basis(const Basis& b) {
    if (!b.valid || static_cast<int>(b.basic.size()) != m_ ||
        b.status.size() != static_cast<size_t>(n_ + m_)) {
        default_basis();
        return;
    }
    basic_ = b.basic;
    stat_ = b.status;
    basic_pos_.assign(static_cast<size_t>(n_ + m_), -1);
    for (int i = 0; i < m_; ++i) basic_pos_[static_cast<size_t>(basic_[static_cast<size_t>(i)])] = i;
    value_.assign(static_cast<size_t>(n_ + m_), 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
        switch (stat_[static_cast<size_t>(j)]) {
            case VStat::AtLower: value_[static_cast<size_t>(j)] = lb_[static_cast<size_t>(j)]; break;
            case VStat::AtUpper: value_[static_cast<size_t>(j)] = ub_[static_cast<size_t>(j)]; break;
            default: break;
        }
    }
    basis_loaded_ = true;
}

double Simplex::objective() const {
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[static_cast<size_t>(j)] * value_[static_cast<size_t>(j)];
    return obj;
}

std::vector<double> Simplex::structural_solution() const {
    return std::vector<double>(value_.begin(), value_.begin() + n_);
}

std::vector<double> Simplex::row_duals() {
    std::vector<double> basic_costs(static_cast<size_t>(m_));
    for (int i = 0; i < m_; ++i)
        basic_costs[static_cast<size_t>(i)] = cost_[static_cast<size_t>(basic_[static_cast<size_t>(i)])];
    Eigen::VectorXd y;
    compute_duals(basic_costs, y);
    return std::vector<double>(y.data(), y.data() + m_);
}

double Simplex::dual_objective() {
    const std::vector<double> y = row_duals();
    double obj = 0.0;
    for (int i = 0; i < m_; ++i) {
        const double lo = lb_[static_cast<size_t>(n_ + i)], hi = ub_[static_cast<size_t>(n_ + i)];
        const double yi = y[static_cast<size_t>(i)];
        if (yi > 0 && lo > -kInf)
            obj += yi * lo;
        else if (yi < 0 && hi < kInf)
            obj += yi * hi;
    }
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), m_);
    for (int j = 0; j < n_; ++j) {
        const double z = reduced_cost(j, yv);
        const double lo = lb_[static_cast<size_t>(j)], hi = ub_[static_cast<size_t>(j)];
        if (z > 0 && lo > -kInf)
            obj += z * lo;
        else if (z < 0 && hi < kInf)
            obj += z * hi;
    }
    return obj;
}

}  // namespace flex::detail

namespace flex {

SolveResult solve_lp(const OptModel& model, const SolverConfig& cfg) {
    model.validate();
    if (!model.cones.empty() || !model.sos2_groups.empty() || !model.binaries.empty() ||
        model.nonlinear)
        throw std::invalid_argument("solve_lp: model is not a pure LP");

    const auto t0 = std::chrono::steady_clock::now();
    detail::Simplex sx(model, cfg);
    SolveResult res;
    res.status = sx.solve_primal();
    res.iterations = sx.iterations();
    if (res.status == SolveStatus::Optimal) {
        res.x = sx.structural_solution();
        res.objective = sx.objective();
        res.duals = sx.row_duals();
        res.dual_objective = sx.dual_objective();
    } else {
        res.message = std::string("LP ") + to_string(res.status);
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace flex
