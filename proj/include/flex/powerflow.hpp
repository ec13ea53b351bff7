#pragma once

#include <string>
#include <vector>

#include "flex/grid.hpp"
#include "flex/scenario.hpp"

namespace flex {

/// Newton-Raphson failed to reach the mismatch tolerance.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double last_norm)
        : std::runtime_error(what), mismatch_norm(last_norm) {}
    double mismatch_norm;
};

class SingularJacobianError : public std::runtime_error {
public:
    explicit SingularJacobianError(const std::string& what) : std::runtime_error(what) {}
};

/// Voltage solution: magnitudes (pu) and angles (rad) indexed like
/// Network::buses.
struct PFState {
    std::vector<double> v_mag;
    std::vector<double> v_ang;
};

/// Per-bus power mismatch, pu. Slack entries are excluded from convergence.
struct Mismatch {
    std::vector<double> dp;
    std::vector<double> dq;
};

/// Directed flows of one line, pu. `p_from` is the injection at the from-end
/// into the line; `p_from + p_to` equals the series loss.
struct LineFlow {
    double p_from = 0.0, q_from = 0.0;
    double p_to = 0.0, q_to = 0.0;
};

struct LimitViolation {
    enum class Kind { LineRating, VoltageLow, VoltageHigh } kind;
    int element_id;     // line index for ratings, bus id for voltages
    double magnitude;   // pu overshoot
    std::string detail;
};

struct LimitReport {
    bool feasible = true;
    double worst = 0.0;  // largest violation magnitude, pu
    std::vector<LimitViolation> violations;
};

struct NewtonOptions {
    double tol = 1e-8;  // pu, max |dp|,|dq| over non-slack buses
    int max_iter = 30;
};

/// Net injected power per bus, pu (generation positive, consumption negative).
struct Injections {
    std::vector<double> p;
    std::vector<double> q;
};

/// Evaluates the nodal power fed into the network at every bus from the
/// admittance matrix: p_i = |V_i| sum_j |Y_ij||V_j| cos(theta_ij - delta_ij)
/// and the sine counterpart.
void injections(const PFState& state, const AdmittanceMatrix& y, std::vector<double>& p_out,
                std::vector<double>& q_out);

/// Newton-Raphson solve of the mismatch equations from a flat start. All
/// non-slack buses are PQ. Throws DivergenceError / SingularJacobianError.
PFState newton_solve(const Network& network, const AdmittanceMatrix& y, const Injections& spec,
                     const NewtonOptions& opts = {});

/// Convenience wrapper: loads from the scenario network, FPU setpoints (pu,
/// injection convention) added at their buses.
PFState newton_solve(const Scenario& scenario, const std::vector<PqPoint>& fpu_setpoints,
                     const NewtonOptions& opts = {});

/// Builds the per-bus net injection vector from scenario loads, optional load
/// scaling and FPU setpoints.
Injections net_injections(const Scenario& scenario, const std::vector<PqPoint>& fpu_setpoints,
                          const std::vector<double>* load_scale = nullptr);

std::vector<LineFlow> line_flows(const PFState& state, const Network& network,
                                 const AdmittanceMatrix& y);

/// Aggregate net injection at the slack bus: positive means the upstream grid
/// feeds the network (import).
PqPoint slack_injection(const PFState& state, const Network& network, const AdmittanceMatrix& y);

LimitReport check_limits(const PFState& state, const std::vector<LineFlow>& flows,
                         const Network& network);

}  // namespace flex
