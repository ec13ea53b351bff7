#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "flex/solver.hpp"

// Primal-dual interior-point method for
//     min c'x   s.t.  A x = b,   x in K
// with K a product of free lines, the nonnegative orthant and second-order
// cones, after transforming the general OptModel form (bounds, two-sided
// rows) into that shape. Nesterov-Todd scaling, Mehrotra-style predictor-
// corrector, quasi-definite augmented KKT solved by sparse LDLT with static
// regularization and iterative refinement.

namespace flex {

namespace {

struct VarMap {
    int internal = -1;   // -1 marks an eliminated (fixed) variable
    double shift = 0.0;  // x_orig = shift + sign * x_internal
    double sign = 1.0;
};

enum class Tag : char { Free, Nonneg, Soc };

struct Conic {
    Eigen::SparseMatrix<double> a;
    Eigen::VectorXd b, c;
    std::vector<Tag> tag;                 // per internal variable
    std::vector<std::vector<int>> socs;   // index lists, tail first
    std::vector<VarMap> varmap;           // original var -> internal
    std::vector<int> row_of;              // original row -> internal row
    double obj_offset = 0.0;
    int n = 0, m = 0;
};

Conic build_conic(const OptModel& model) {
    Conic pr;
    std::vector<int> cone_of(static_cast<size_t>(model.num_vars), -1);
    for (size_t k = 0; k < model.cones.size(); ++k) {
        const OptModel::Cone& c = model.cones[k];
        auto mark = [&](int j) {
            if (cone_of[static_cast<size_t>(j)] >= 0)
                throw std::invalid_argument("solve_socp: variable in two cones");
            if (model.lb[static_cast<size_t>(j)] != -kInf ||
                model.ub[static_cast<size_t>(j)] != kInf)
                throw std::invalid_argument(
                    "solve_socp: cone member variables must be free (use rows for bounds)");
            cone_of[static_cast<size_t>(j)] = static_cast<int>(k);
        };
        mark(c.tail);
        for (int j : c.head) mark(j);
    }

    pr.varmap.resize(static_cast<size_t>(model.num_vars));
    int next = 0;
    // Cone members first, block by block (tail leading).
    pr.socs.resize(model.cones.size());
    for (size_t k = 0; k < model.cones.size(); ++k) {
        const OptModel::Cone& c = model.cones[k];
        auto place = [&](int j) {
            pr.varmap[static_cast<size_t>(j)] = {next, 0.0, 1.0};
            pr.tag.push_back(Tag::Soc);
            pr.socs[k].push_back(next);
            ++next;
        };
        place(c.tail);
        for (int j : c.head) place(j);
    }

    struct PendingUpper {
        int internal;
        double range;
    };
    std::vector<PendingUpper> uppers;

    for (int j = 0; j < model.num_vars; ++j) {
        if (cone_of[static_cast<size_t>(j)] >= 0) continue;
        const double lo = model.lb[static_cast<size_t>(j)], hi = model.ub[static_cast<size_t>(j)];
        VarMap& vm = pr.varmap[static_cast<size_t>(j)];
        if (lo == hi) {
            vm = {-1, lo, 1.0};  // substituted constant
        } else if (lo == -kInf && hi == kInf) {
            vm = {next++, 0.0, 1.0};
            pr.tag.push_back(Tag::Free);
        } else if (hi == kInf) {
            vm = {next++, lo, 1.0};
            pr.tag.push_back(Tag::Nonneg);
        } else if (lo == -kInf) {
            vm = {next++, hi, -1.0};
            pr.tag.push_back(Tag::Nonneg);
        } else {
            vm = {next++, lo, 1.0};
            pr.tag.push_back(Tag::Nonneg);
            uppers.push_back({vm.internal, hi - lo});
        }
    }

    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> rhs;
    auto new_nonneg = [&]() {
        pr.tag.push_back(Tag::Nonneg);
        return next++;
    };

    pr.row_of.assign(model.rows.size(), -1);
    for (size_t i = 0; i < model.rows.size(); ++i) {
        const OptModel::Row& row = model.rows[i];
        double shift = 0.0;
        std::vector<std::pair<int, double>> terms;
        for (const auto& [j, v] : row.terms) {
            const VarMap& vm = pr.varmap[static_cast<size_t>(j)];
            shift += v * vm.shift;
            if (vm.internal >= 0) terms.push_back({vm.internal, v * vm.sign});
        }
        const int r = static_cast<int>(rhs.size());
        pr.row_of[i] = r;
        for (const auto& [jj, vv] : terms) trip.emplace_back(r, jj, vv);
        if (row.lo == row.hi) {
            rhs.push_back(row.lo - shift);
        } else if (row.lo == -kInf) {
            trip.emplace_back(r, new_nonneg(), 1.0);  // ax + s = hi
            rhs.push_back(row.hi - shift);
        } else if (row.hi == kInf) {
            trip.emplace_back(r, new_nonneg(), -1.0);  // ax - s = lo
            rhs.push_back(row.lo - shift);
        } else {
            const int s = new_nonneg();
            trip.emplace_back(r, s, 1.0);  // ax + s = hi, s in [0, hi-lo]
            rhs.push_back(row.hi - shift);
            uppers.push_back({s, row.hi - row.lo});
        }
    }
    for (const PendingUpper& u : uppers) {
        const int r = static_cast<int>(rhs.size());
        trip.emplace_back(r, u.internal, 1.0);
        trip.emplace_back(r, new_nonneg(), 1.0);
        rhs.push_back(u.range);
    }

    pr.n = next;
    pr.m = static_cast<int>(rhs.size());
    pr.a.resize(pr.m, pr.n);
    pr.a.setFromTriplets(trip.begin(), trip.end());
    pr.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), pr.m);
    pr.c = Eigen::VectorXd::Zero(pr.n);
    for (int j = 0; j < model.num_vars; ++j) {
        const VarMap& vm = pr.varmap[static_cast<size_t>(j)];
        pr.obj_offset += model.cost[static_cast<size_t>(j)] * vm.shift;
        if (vm.internal >= 0) pr.c(vm.internal) += model.cost[static_cast<size_t>(j)] * vm.sign;
    }
    return pr;
}

// --- Jordan-algebra helpers on index lists -----------------------------------

double soc_det(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    double head = 0.0;
    for (size_t k = 1; k < idx.size(); ++k) head += v(idx[k]) * v(idx[k]);
    return v(idx[0]) * v(idx[0]) - head;
}

double soc_margin(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    double head = 0.0;
    for (size_t k = 1; k < idx.size(); ++k) head += v(idx[k]) * v(idx[k]);
    return v(idx[0]) - std::sqrt(head);
}

/// Largest step alpha in [0, cap] with v + alpha*dv staying in the cone.
double soc_max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                    const std::vector<int>& idx, double cap) {
    // q(a) = det(v + a dv) >= 0 and tail positive.
    double vv = 0.0, vd = 0.0, dd = 0.0;
    for (size_t k = 1; k < idx.size(); ++k) {
        vv += v(idx[k]) * v(idx[k]);
        vd += v(idx[k]) * dv(idx[k]);
        dd += dv(idx[k]) * dv(idx[k]);
    }
    const double v0 = v(idx[0]), d0 = dv(idx[0]);
    const double qa = d0 * d0 - dd;
    const double qb = 2.0 * (v0 * d0 - vd);
    const double qc = v0 * v0 - vv;
    double alpha = cap;
    auto consider = [&](double root) {
        if (root > 1e-14 && root < alpha) alpha = root;
    };
    if (std::abs(qa) > 1e-14) {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            consider((-qb - sq) / (2.0 * qa));
            consider((-qb + sq) / (2.0 * qa));
        }
    } else if (qb < -1e-14) {
        consider(-qc / qb);
    }
    if (d0 < -1e-14) consider(-v0 / d0);
    return alpha;
}

struct Scaling {
    // Orthant: diagonal h_i = z_i / x_i and lambda_i = sqrt(x_i z_i).
    // SOC blocks: eta, wbar, lambda = W x.
    Eigen::VectorXd h_diag;
    std::vector<Eigen::MatrixXd> soc_h;   // eta^2 (2 wbar wbar' - J)
    std::vector<Eigen::MatrixXd> soc_w;   // W itself (hyperbolic form)
    Eigen::VectorXd lambda;
};

void apply_w(const Scaling& sc, const Conic& pr, const Eigen::VectorXd& v, Eigen::VectorXd& out,
             bool inverse) {
    out = v;
    for (int j = 0; j < pr.n; ++j) {
        if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg) {
            const double w = std::sqrt(sc.h_diag(j));
            out(j) = inverse ? v(j) / w : v(j) * w;
        } else if (pr.tag[static_cast<size_t>(j)] == Tag::Free) {
            out(j) = v(j);
        }
    }
    for (size_t k = 0; k < pr.socs.size(); ++k) {
        const auto& idx = pr.socs[k];
        Eigen::VectorXd sub(idx.size());
        for (size_t t = 0; t < idx.size(); ++t) sub(static_cast<long>(t)) = v(idx[t]);
        Eigen::VectorXd res = inverse ? sc.soc_w[k].ldlt().solve(sub)
                                      : Eigen::VectorXd(sc.soc_w[k] * sub);
        for (size_t t = 0; t < idx.size(); ++t) out(idx[t]) = res(static_cast<long>(t));
    }
}

}  // namespace

SolveResult solve_socp(const OptModel& model, const SolverConfig& cfg) {
    model.validate();
    if (!model.sos2_groups.empty() || !model.binaries.empty() || model.nonlinear)
        throw std::invalid_argument("solve_socp: SOS2/binaries/nonlinear not supported");

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;

    const Conic pr = build_conic(model);
    const int n = pr.n, m = pr.m;

    auto finish = [&](SolveStatus st, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& z, int iters, const std::string& msg) {
        res.status = st;
        res.iterations = iters;
        res.message = msg;
        if (st == SolveStatus::Optimal || st == SolveStatus::IterationLimit) {
            res.x.assign(static_cast<size_t>(model.num_vars), 0.0);
            for (int j = 0; j < model.num_vars; ++j) {
                const VarMap& vm = pr.varmap[static_cast<size_t>(j)];
                res.x[static_cast<size_t>(j)] =
                    vm.shift + (vm.internal >= 0 ? vm.sign * x(vm.internal) : 0.0);
            }
            res.objective = pr.c.dot(x) + pr.obj_offset;
            res.dual_objective = pr.b.dot(y) + pr.obj_offset;
            res.duals.assign(model.rows.size(), 0.0);
            for (size_t i = 0; i < model.rows.size(); ++i)
                res.duals[i] = -y(pr.row_of[i]);
            res.cone_gaps.clear();
            for (const auto& idx : pr.socs) {
                double g = 0.0;
                for (int jj : idx) g += x(jj) * z(jj);
                res.cone_gaps.push_back(g);
            }
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    };

    // Number of cone "degrees": orthant vars + one per SOC block.
    double nu = 0.0;
    for (Tag t : pr.tag)
        if (t == Tag::Nonneg) nu += 1.0;
    nu += static_cast<double>(pr.socs.size());
    if (nu == 0.0) nu = 1.0;

    // KKT skeleton: [ -(H + dp I)  A' ; A  dd I ].
    const double reg = 1e-8;
    Eigen::SparseMatrix<double> kkt(n + m, n + m);
    std::vector<Eigen::Triplet<double>> ktrip;
    auto assemble = [&](const Scaling* sc) {
        ktrip.clear();
        for (int j = 0; j < n; ++j) {
            double hjj = reg;
            if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg && sc) hjj += sc->h_diag(j);
            if (!sc && pr.tag[static_cast<size_t>(j)] != Tag::Free) hjj += 1.0;
            ktrip.emplace_back(j, j, -hjj);
        }
        if (sc) {
            for (size_t k = 0; k < pr.socs.size(); ++k) {
                const auto& idx = pr.socs[k];
                const Eigen::MatrixXd& hb = sc->soc_h[k];
                for (size_t a = 0; a < idx.size(); ++a)
                    for (size_t bb = 0; bb < idx.size(); ++bb)
                        if (hb(static_cast<long>(a), static_cast<long>(bb)) != 0.0)
                            ktrip.emplace_back(idx[a], idx[bb],
                                               -hb(static_cast<long>(a), static_cast<long>(bb)) -
                                                   (a == bb ? 0.0 : 0.0));
            }
        }
        for (int k = 0; k < pr.a.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(pr.a, k); it; ++it) {
                ktrip.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
                ktrip.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()),
                                   it.value());
            }
        for (int i = 0; i < m; ++i) ktrip.emplace_back(n + i, n + i, reg);
        kkt.setFromTriplets(ktrip.begin(), ktrip.end());
    };

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    assemble(nullptr);
    ldlt.analyzePattern(kkt);
    ldlt.factorize(kkt);
    if (ldlt.info() != Eigen::Success)
        return finish(SolveStatus::IterationLimit, Eigen::VectorXd::Zero(n),
                      Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(n), 0,
                      "initial KKT factorization failed");

    auto solve_kkt = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx,
                         Eigen::VectorXd& dy) {
        Eigen::VectorXd rhs(n + m);
        rhs.head(n) = r1;
        rhs.tail(m) = r2;
        Eigen::VectorXd sol = ldlt.solve(rhs);
        // One refinement pass against the regularized residual.
        Eigen::VectorXd resid = rhs - kkt * sol;
        sol += ldlt.solve(resid);
        dx = sol.head(n);
        dy = sol.tail(m);
    };

    // Initial point from least-norm heuristics.
    Eigen::VectorXd x(n), y(m), z(n), dx(n), dy(m);
    solve_kkt(Eigen::VectorXd::Zero(n), pr.b, x, y);
    solve_kkt(pr.c, Eigen::VectorXd::Zero(m), dx, dy);
    y = dy;
    z = pr.c - Eigen::VectorXd(pr.a.transpose() * y);
    for (int j = 0; j < n; ++j)
        if (pr.tag[static_cast<size_t>(j)] == Tag::Free) z(j) = 0.0;

    auto cone_min_margin = [&](const Eigen::VectorXd& v) {
        double mmin = kInf;
        for (int j = 0; j < n; ++j)
            if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg) mmin = std::min(mmin, v(j));
        for (const auto& idx : pr.socs) mmin = std::min(mmin, soc_margin(v, idx));
        return mmin == kInf ? 1.0 : mmin;
    };
    auto push_interior = [&](Eigen::VectorXd& v) {
        const double mmin = cone_min_margin(v);
        if (mmin < 1e-3) {
            const double bump = -1.5 * mmin + 1.0;
            for (int j = 0; j < n; ++j)
                if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg) v(j) += bump;
            for (const auto& idx : pr.socs) v(idx[0]) += bump;
        }
    };
    push_interior(x);
    push_interior(z);

    Scaling sc;
    sc.h_diag.resize(n);
    sc.soc_h.resize(pr.socs.size());
    sc.soc_w.resize(pr.socs.size());
    sc.lambda.resize(n);

    Eigen::VectorXd rx(n), ry(m), dz(n), dxa(n), dya(m), dza(n), ds(n), tmp(n), wdx(n), widz(n);
    double mu = 0.0;
    int iter = 0;
    double best_mu = kInf;
    int stall = 0;

    for (iter = 0; iter < cfg.socp_max_iter; ++iter) {
        rx = pr.c - Eigen::VectorXd(pr.a.transpose() * y) - z;
        ry = pr.b - pr.a * x;

        double xz = 0.0;
        for (int j = 0; j < n; ++j)
            if (pr.tag[static_cast<size_t>(j)] != Tag::Free) xz += x(j) * z(j);
        mu = xz / nu;

        const double pres = ry.norm() / (1.0 + pr.b.norm());
        const double dres = rx.norm() / (1.0 + pr.c.norm());
        const double pobj = pr.c.dot(x), dobj = pr.b.dot(y);
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
        if (pres < cfg.socp_tol && dres < cfg.socp_tol &&
            (mu < cfg.socp_tol || relgap < cfg.socp_tol))
            return finish(SolveStatus::Optimal, x, y, z, iter, "");

        if (mu < best_mu * 0.9999) {
            best_mu = mu;
            stall = 0;
        } else if (++stall > 15) {
            return finish(SolveStatus::IterationLimit, x, y, z, iter,
                          "no progress (possibly infeasible or ill-conditioned)");
        }

        // Nesterov-Todd scaling.
        for (int j = 0; j < n; ++j) {
            if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg) {
                sc.h_diag(j) = z(j) / x(j);
                sc.lambda(j) = std::sqrt(x(j) * z(j));
            } else {
                sc.h_diag(j) = 0.0;
            }
        }
        for (size_t k = 0; k < pr.socs.size(); ++k) {
            const auto& idx = pr.socs[k];
            const long d = static_cast<long>(idx.size());
            const double detx = soc_det(x, idx), detz = soc_det(z, idx);
            Eigen::VectorXd xh(d), zh(d);
            for (long t = 0; t < d; ++t) {
                xh(t) = x(idx[static_cast<size_t>(t)]) / std::sqrt(detx);
                zh(t) = z(idx[static_cast<size_t>(t)]) / std::sqrt(detz);
            }
            double dot = xh(0) * zh(0);
            for (long t = 1; t < d; ++t) dot += xh(t) * zh(t);
            const double gamma = std::sqrt((1.0 + dot) / 2.0);
            // wbar = (zh + J xh) / (2 gamma); J flips the sign of the head.
            Eigen::VectorXd wbar(d);
            wbar(0) = (zh(0) + xh(0)) / (2.0 * gamma);
            for (long t = 1; t < d; ++t) wbar(t) = (zh(t) - xh(t)) / (2.0 * gamma);
            const double eta = std::pow(detz / detx, 0.25);

            Eigen::MatrixXd w(d, d);
            w(0, 0) = wbar(0);
            for (long t = 1; t < d; ++t) {
                w(0, t) = w(t, 0) = wbar(t);
                for (long u = 1; u < d; ++u)
                    w(t, u) = (t == u ? 1.0 : 0.0) + wbar(t) * wbar(u) / (1.0 + wbar(0));
            }
            w *= eta;
            sc.soc_w[k] = w;

            Eigen::MatrixXd h = 2.0 * wbar * wbar.transpose();
            h(0, 0) -= 1.0;
            for (long t = 1; t < d; ++t) h(t, t) += 1.0;
            h *= eta * eta;
            sc.soc_h[k] = h;

            Eigen::VectorXd sub(d);
            for (long t = 0; t < d; ++t) sub(t) = x(idx[static_cast<size_t>(t)]);
            const Eigen::VectorXd lam = w * sub;
            for (long t = 0; t < d; ++t) sc.lambda(idx[static_cast<size_t>(t)]) = lam(t);
        }

        assemble(&sc);
        ldlt.factorize(kkt);
        if (ldlt.info() != Eigen::Success)
            return finish(SolveStatus::IterationLimit, x, y, z, iter, "KKT factorization failed");

        // Jordan division u = lambda \ d per cone, then dz = W(u) - H dx.
        auto lambda_div = [&](const Eigen::VectorXd& dvec, Eigen::VectorXd& out) {
            out = dvec;
            for (int j = 0; j < n; ++j) {
                if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg) out(j) = dvec(j) / sc.lambda(j);
                if (pr.tag[static_cast<size_t>(j)] == Tag::Free) out(j) = 0.0;
            }
            for (const auto& idx : pr.socs) {
                const double l0 = sc.lambda(idx[0]);
                double lbar2 = 0.0, lbar_d = 0.0;
                for (size_t t = 1; t < idx.size(); ++t) {
                    lbar2 += sc.lambda(idx[t]) * sc.lambda(idx[t]);
                    lbar_d += sc.lambda(idx[t]) * dvec(idx[t]);
                }
                const double den = l0 * l0 - lbar2;
                const double u0 = (l0 * dvec(idx[0]) - lbar_d) / den;
                out(idx[0]) = u0;
                for (size_t t = 1; t < idx.size(); ++t)
                    out(idx[t]) = (dvec(idx[t]) - u0 * sc.lambda(idx[t])) / l0;
            }
        };

        auto direction = [&](const Eigen::VectorXd& dsvec, Eigen::VectorXd& ox, Eigen::VectorXd& oy,
                             Eigen::VectorXd& oz) {
            lambda_div(dsvec, tmp);
            Eigen::VectorXd wls;
            apply_w(sc, pr, tmp, wls, false);  // W (lambda \ ds)
            solve_kkt(rx - wls, ry, ox, oy);
            oz = rx - Eigen::VectorXd(pr.a.transpose() * oy);
            for (int j = 0; j < n; ++j)
                if (pr.tag[static_cast<size_t>(j)] == Tag::Free) oz(j) = 0.0;
        };

        auto max_step = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
            double alpha = 1.0;
            for (int j = 0; j < n; ++j)
                if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg && dv(j) < 0.0)
                    alpha = std::min(alpha, -v(j) / dv(j));
            for (const auto& idx : pr.socs) alpha = std::min(alpha, soc_max_step(v, dv, idx, 1.0));
            return alpha;
        };

        // Affine (predictor) direction: ds = -lambda o lambda.
        for (int j = 0; j < n; ++j)
            ds(j) = pr.tag[static_cast<size_t>(j)] == Tag::Nonneg
                        ? -sc.lambda(j) * sc.lambda(j)
                        : 0.0;
        for (const auto& idx : pr.socs) {
            double dot = 0.0;
            for (int jj : idx) dot += sc.lambda(jj) * sc.lambda(jj);
            ds(idx[0]) = -dot;
            for (size_t t = 1; t < idx.size(); ++t)
                ds(idx[t]) = -2.0 * sc.lambda(idx[0]) * sc.lambda(idx[t]);
        }
        direction(ds, dxa, dya, dza);
        const double alpha_aff = std::min(max_step(x, dxa), max_step(z, dza));

        double xz_aff = 0.0;
        for (int j = 0; j < n; ++j)
            if (pr.tag[static_cast<size_t>(j)] != Tag::Free)
                xz_aff += (x(j) + alpha_aff * dxa(j)) * (z(j) + alpha_aff * dza(j));
        const double sigma = std::pow(std::max(0.0, std::min(1.0, (xz_aff / nu) / mu)), 3.0);

        // Combined direction with Mehrotra correction (W dxa) o (W^-T dza).
        apply_w(sc, pr, dxa, wdx, false);
        apply_w(sc, pr, dza, widz, true);
        for (int j = 0; j < n; ++j) {
            if (pr.tag[static_cast<size_t>(j)] == Tag::Nonneg)
                ds(j) = sigma * mu - sc.lambda(j) * sc.lambda(j) - wdx(j) * widz(j);
            else
                ds(j) = 0.0;
        }
        for (const auto& idx : pr.socs) {
            double lam2 = 0.0, corr0 = 0.0;
            for (int jj : idx) lam2 += sc.lambda(jj) * sc.lambda(jj);
            for (int jj : idx) corr0 += wdx(jj) * widz(jj);
            ds(idx[0]) = sigma * mu - lam2 - corr0;
            for (size_t t = 1; t < idx.size(); ++t)
                ds(idx[t]) = -2.0 * sc.lambda(idx[0]) * sc.lambda(idx[t]) -
                             (wdx(idx[0]) * widz(idx[t]) + widz(idx[0]) * wdx(idx[t]));
        }
        direction(ds, dx, dy, dz);

        const double alpha = 0.99 * std::min(max_step(x, dx), max_step(z, dz));
        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
    }

    return finish(SolveStatus::IterationLimit, x, y, z, iter, "iteration limit");
}

}  // namespace flex
