#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flex {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

/// Central tolerance record shared by every kernel.
struct SolverConfig {
    double feas_tol = 1e-8;
    double opt_tol = 1e-8;
    int lp_max_iter = 50000;

    double milp_abs_gap = 1e-6;
    double milp_int_tol = 1e-7;
    int milp_node_limit = 200000;

    double socp_tol = 1e-9;
    int socp_max_iter = 200;

    double slp_step_tol = 1e-7;
    double slp_resid_tol = 1e-7;
    int slp_max_iter = 400;
    double slp_trust_initial = 0.1;
    double slp_trust_max = 1.0;
    double slp_penalty_initial = 1e2;
    double slp_penalty_max = 1e9;
};

/// Backend-agnostic problem container: bounded variables, sparse two-sided
/// linear rows, a linear objective, optional second-order-cone blocks, SOS2
/// groups, binaries, and an optional nonlinear residual callback for the SLP
/// kernel.
struct OptModel {
    struct Row {
        std::vector<std::pair<int, double>> terms;
        double lo = -kInf;
        double hi = kInf;
    };
    /// ||x[head]||_2 <= x[tail]
    struct Cone {
        std::vector<int> head;
        int tail = -1;
    };
    struct Sos2 {
        std::vector<int> vars;  // ordered weights; at most two adjacent nonzero
    };
    /// Residuals r(x) with sparse Jacobian; kind[i] selects r_i == 0 or r_i <= 0.
    struct Nonlinear {
        enum class Kind : char { Equality, Inequality };
        int count = 0;
        std::vector<Kind> kinds;
        std::function<void(const std::vector<double>& x, std::vector<double>& r,
                           std::vector<std::vector<std::pair<int, double>>>& jac)>
            eval;
    };

    int num_vars = 0;
    std::vector<double> lb, ub, cost;
    std::vector<std::string> var_names;
    std::vector<Row> rows;
    std::vector<std::string> row_names;
    std::vector<Cone> cones;
    std::vector<Sos2> sos2_groups;
    std::vector<int> binaries;
    std::optional<Nonlinear> nonlinear;

    int add_var(double lo, double hi, double c, std::string name = "");
    int add_row(std::vector<std::pair<int, double>> terms, double lo, double hi,
                std::string name = "");
    int add_row_eq(std::vector<std::pair<int, double>> terms, double rhs, std::string name = "") {
        return add_row(std::move(terms), rhs, rhs, std::move(name));
    }
    int add_row_le(std::vector<std::pair<int, double>> terms, double hi, std::string name = "") {
        return add_row(std::move(terms), -kInf, hi, std::move(name));
    }

    /// Structural consistency (index ranges, bound order, cone/SOS2 overlap).
    void validate() const;
};

struct SolveResult {
    SolveStatus status = SolveStatus::IterationLimit;
    std::vector<double> x;
    double objective = 0.0;
    double dual_objective = 0.0;
    std::vector<double> duals;      // one per linear row
    std::vector<double> cone_gaps;  // complementarity per cone block
    int iterations = 0;
    int nodes = 0;  // branch-and-bound only
    double seconds = 0.0;
    std::string message;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Pure LP (no cones, SOS2, binaries, nonlinear block). Deterministic.
SolveResult solve_lp(const OptModel& model, const SolverConfig& cfg = {});

/// Mixed-integer LP: best-first branch and bound over LP relaxations,
/// branching on the most violated SOS2 adjacency or most fractional binary.
SolveResult solve_milp(const OptModel& model, const SolverConfig& cfg = {});

/// Second-order cone program via a primal-dual interior-point method with
/// Nesterov-Todd scaling.
SolveResult solve_socp(const OptModel& model, const SolverConfig& cfg = {});

/// Nonlinear program via trust-region sequential linear programming with an
/// l1 merit function (residuals elasticized in every subproblem).
SolveResult solve_nlp_slp(const OptModel& model, const std::vector<double>& start,
                          const SolverConfig& cfg = {});

/// Plain-text dump of the linear part of a model (LP-file style) for
/// external cross-checking; cones and SOS2 groups appear as comments.
std::string dump_model(const OptModel& model);

}  // namespace flex
