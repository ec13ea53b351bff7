#include "flex/powerflow.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace flex {

void injections(const PFState& state, const AdmittanceMatrix& y, std::vector<double>& p_out,
                std::vector<double>& q_out) {
    const int n = y.size();
    p_out.assign(static_cast<size_t>(n), 0.0);
    q_out.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double pi = 0.0, qi = 0.0;
        for (int j = 0; j < n; ++j) {
            const std::complex<double> yij = y.y(i, j);
            if (yij == std::complex<double>(0.0, 0.0)) continue;
            const double th = state.v_ang[static_cast<size_t>(i)] - state.v_ang[static_cast<size_t>(j)];
            const double vv = state.v_mag[static_cast<size_t>(i)] * state.v_mag[static_cast<size_t>(j)];
            pi += vv * (yij.real() * std::cos(th) + yij.imag() * std::sin(th));
            qi += vv * (yij.real() * std::sin(th) - yij.imag() * std::cos(th));
        }
        p_out[static_cast<size_t>(i)] = pi;
        q_out[static_cast<size_t>(i)] = qi;
    }
}

Injections net_injections(const Scenario& scenario, const std::vector<PqPoint>& fpu_setpoints,
                          const std::vector<double>* load_scale) {
    const Network& net = scenario.network;
    Injections inj;
    inj.p.resize(net.buses.size());
    inj.q.resize(net.buses.size());
    for (size_t i = 0; i < net.buses.size(); ++i) {
        const double scale = load_scale ? (*load_scale)[i] : 1.0;
        inj.p[i] = -net.buses[i].p_load * scale;
        inj.q[i] = -net.buses[i].q_load * scale;
    }
    if (fpu_setpoints.size() != scenario.fpus.size())
        throw InvalidScenario("setpoint count does not match fpu count");
    for (size_t k = 0; k < scenario.fpus.size(); ++k) {
        const size_t i = static_cast<size_t>(net.index_of(scenario.fpus[k].bus));
        inj.p[i] += fpu_setpoints[k].p;
        inj.q[i] += fpu_setpoints[k].q;
    }
    return inj;
}

PFState newton_solve(const Network& network, const AdmittanceMatrix& y, const Injections& spec,
                     const NewtonOptions& opts) {
    const int n = network.size();
    const int slack = network.slack_index();
    PFState st;
    st.v_mag.assign(static_cast<size_t>(n), 1.0);
    st.v_ang.assign(static_cast<size_t>(n), 0.0);
    st.v_mag[static_cast<size_t>(slack)] = network.slack_vm;

    // Index map: unknowns are theta and |V| of non-slack buses.
    std::vector<int> pos;  // bus index -> unknown slot, slack -> -1
    pos.assign(static_cast<size_t>(n), -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
        if (i != slack) pos[static_cast<size_t>(i)] = m++;

    std::vector<double> p_calc, q_calc;
    Eigen::VectorXd rhs(2 * m);
    Eigen::MatrixXd jac(2 * m, 2 * m);

    double norm = 0.0;
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        injections(st, y, p_calc, q_calc);
        norm = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == slack) continue;
            const int k = pos[static_cast<size_t>(i)];
            rhs(k) = spec.p[static_cast<size_t>(i)] - p_calc[static_cast<size_t>(i)];
            rhs(m + k) = spec.q[static_cast<size_t>(i)] - q_calc[static_cast<size_t>(i)];
            norm = std::max({norm, std::abs(rhs(k)), std::abs(rhs(m + k))});
        }
        if (norm <= opts.tol) return st;
        if (iter == opts.max_iter) break;

        jac.setZero();
        for (int i = 0; i < n; ++i) {
            if (i == slack) continue;
            const int ki = pos[static_cast<size_t>(i)];
            const double vi = st.v_mag[static_cast<size_t>(i)];
            const double pi = p_calc[static_cast<size_t>(i)];
            const double qi = q_calc[static_cast<size_t>(i)];
            const double gii = y.y(i, i).real();
            const double bii = y.y(i, i).imag();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const std::complex<double> yij = y.y(i, j);
                if (yij == std::complex<double>(0.0, 0.0)) continue;
                const double vj = st.v_mag[static_cast<size_t>(j)];
                const double th =
                    st.v_ang[static_cast<size_t>(i)] - st.v_ang[static_cast<size_t>(j)];
                const double gc = yij.real() * std::cos(th) + yij.imag() * std::sin(th);
                const double gs = yij.real() * std::sin(th) - yij.imag() * std::cos(th);
                const int kj = pos[static_cast<size_t>(j)];
                if (kj >= 0) {
                    jac(ki, kj) = vi * vj * gs;         // dP_i/dtheta_j
                    jac(ki, m + kj) = vi * gc;          // dP_i/dV_j
                    jac(m + ki, kj) = -vi * vj * gc;    // dQ_i/dtheta_j
                    jac(m + ki, m + kj) = vi * gs;      // dQ_i/dV_j
                }
            }
            jac(ki, ki) = -qi - bii * vi * vi;          // dP_i/dtheta_i
            jac(ki, m + ki) = pi / vi + gii * vi;       // dP_i/dV_i
            jac(m + ki, ki) = pi - gii * vi * vi;       // dQ_i/dtheta_i
            jac(m + ki, m + ki) = qi / vi - bii * vi;   // dQ_i/dV_i
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        // PartialPivLU has no rank query; probe the diagonal of U instead.
        const Eigen::MatrixXd& lumat = lu.matrixLU();
        double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
        for (int k = 0; k < 2 * m; ++k) {
            dmin = std::min(dmin, std::abs(lumat(k, k)));
            dmax = std::max(dmax, std::abs(lumat(k, k)));
        }
        if (!(dmax > 0.0) || dmin < 1e-12 * dmax)
            throw SingularJacobianError("power-flow Jacobian is singular");

        const Eigen::VectorXd dx = lu.solve(rhs);
        for (int i = 0; i < n; ++i) {
            if (i == slack) continue;
            const int k = pos[static_cast<size_t>(i)];
            st.v_ang[static_cast<size_t>(i)] += dx(k);
            st.v_mag[static_cast<size_t>(i)] += dx(m + k);
            if (st.v_mag[static_cast<size_t>(i)] < 1e-4)
                st.v_mag[static_cast<size_t>(i)] = 1e-4;  // keep magnitudes positive
        }
    }
    throw DivergenceError("power flow did not converge in " + std::to_string(opts.max_iter) +
                              " iterations (mismatch " + std::to_string(norm) + " pu)",
                          norm);
}

PFState newton_solve(const Scenario& scenario, const std::vector<PqPoint>& fpu_setpoints,
                     const NewtonOptions& opts) {
    const AdmittanceMatrix y = build_admittance(scenario.network);
    return newton_solve(scenario.network, y, net_injections(scenario, fpu_setpoints), opts);
}

std::vector<LineFlow> line_flows(const PFState& state, const Network& network,
                                 const AdmittanceMatrix& y) {
    std::vector<LineFlow> flows;
    flows.reserve(network.lines.size());
    for (size_t l = 0; l < network.lines.size(); ++l) {
        const Line& ln = network.lines[l];
        const int i = network.index_of(ln.from);
        const int j = network.index_of(ln.to);
        const double g = y.g_series[l];
        const double b = y.b_series[l];
        const double vi = state.v_mag[static_cast<size_t>(i)];
        const double vj = state.v_mag[static_cast<size_t>(j)];
        const double th = state.v_ang[static_cast<size_t>(i)] - state.v_ang[static_cast<size_t>(j)];
        LineFlow f;
        f.p_from = g * (vi * vi - vi * vj * std::cos(th)) - b * vi * vj * std::sin(th);
        f.q_from = -b * (vi * vi - vi * vj * std::cos(th)) - g * vi * vj * std::sin(th);
        f.p_to = g * (vj * vj - vi * vj * std::cos(th)) + b * vi * vj * std::sin(th);
        f.q_to = -b * (vj * vj - vi * vj * std::cos(th)) + g * vi * vj * std::sin(th);
        flows.push_back(f);
    }
    return flows;
}

PqPoint slack_injection(const PFState& state, const Network& network, const AdmittanceMatrix& y) {
    const std::vector<LineFlow> flows = line_flows(state, network, y);
    PqPoint out{0.0, 0.0};
    for (size_t l = 0; l < network.lines.size(); ++l) {
        const Line& ln = network.lines[l];
        if (ln.from == network.slack_id) {
            out.p += flows[l].p_from;
            out.q += flows[l].q_from;
        }
        if (ln.to == network.slack_id) {
            out.p += flows[l].p_to;
            out.q += flows[l].q_to;
        }
    }
    return out;
}

LimitReport check_limits(const PFState& state, const std::vector<LineFlow>& flows,
                         const Network& network) {
    constexpr double kTol = 1e-7;
    LimitReport rep;
    for (size_t l = 0; l < network.lines.size(); ++l) {
        const Line& ln = network.lines[l];
        const double s_from = std::hypot(flows[l].p_from, flows[l].q_from);
        const double s_to = std::hypot(flows[l].p_to, flows[l].q_to);
        const double s = std::max(s_from, s_to);
        if (s > ln.s_max + kTol) {
            rep.feasible = false;
            rep.violations.push_back({LimitViolation::Kind::LineRating, static_cast<int>(l),
                                      s - ln.s_max,
                                      "line " + std::to_string(ln.from) + "-" +
                                          std::to_string(ln.to) + " loaded " + std::to_string(s) +
                                          " pu above rating " + std::to_string(ln.s_max)});
            rep.worst = std::max(rep.worst, s - ln.s_max);
        }
    }
    for (size_t i = 0; i < network.buses.size(); ++i) {
        const Bus& b = network.buses[i];
        const double v = state.v_mag[i];
        if (v < b.v_min - kTol) {
            rep.feasible = false;
            rep.violations.push_back({LimitViolation::Kind::VoltageLow, b.id, b.v_min - v,
                                      "bus " + std::to_string(b.id) + " at " + std::to_string(v) +
                                          " pu under " + std::to_string(b.v_min)});
            rep.worst = std::max(rep.worst, b.v_min - v);
        } else if (v > b.v_max + kTol) {
            rep.feasible = false;
            rep.violations.push_back({LimitViolation::Kind::VoltageHigh, b.id, v - b.v_max,
                                      "bus " + std::to_string(b.id) + " at " + std::to_string(v) +
                                          " pu over " + std::to_string(b.v_max)});
            rep.worst = std::max(rep.worst, v - b.v_max);
        }
    }
    return rep;
}

}  // namespace flex
