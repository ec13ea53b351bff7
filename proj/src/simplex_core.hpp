#pragma once

// Bounded-variable revised simplex with an explicit basis inverse.
// Computational form: structural columns x plus one slack per row with
//   A x - s = 0,  s in [row.lo, row.hi],  x in [lb, ub].
// Used directly by solve_lp and re-entered with modified bounds by the
// branch-and-bound and SLP drivers (warm starts keep the basis).

#include <vector>

#include <Eigen/Dense>

#include "flex/solver.hpp"

namespace flex::detail {

enum class VStat : char { Basic, AtLower, AtUpper, NonbasicFree };

struct Basis {
    std::vector<int> basic;      // column index occupying each row position
    std::vector<VStat> status;   // per column
    bool valid = false;
};

class Simplex {
public:
    Simplex(const OptModel& model, const SolverConfig& cfg);

    int num_structural() const { return n_; }
    int num_rows() const { return m_; }

    // Bound edits (structural j in [0,n), slack j in [n, n+m)).
    void set_bounds(int col, double lo, double hi);
    double lower(int col) const { return lb_[static_cast<size_t>(col)]; }
    double upper(int col) const { return ub_[static_cast<size_t>(col)]; }

    // Replaces the objective (structural part only), e.g. for phased drivers.
    void set_costs(const std::vector<double>& structural_costs);

    /// Cold or warm primal solve (two phases as needed).
    SolveStatus solve_primal();
    /// Dual simplex after bound tightenings from a primal-optimal basis.
    /// Falls back to a cold primal solve if it cannot make progress.
    SolveStatus solve_dual();

    Basis basis() const;
    void load_basis(const Basis& b);
    bool has_valid_basis() const { return basis_loaded_; }

    // Results of the last successful solve.
    double objective() const;
    std::vector<double> structural_solution() const;
    std::vector<double> row_duals();        // y = c_B B^{-1}
    double dual_objective();
    int iterations() const { return total_iters_; }
    double primal_infeasibility() const;

private:
    void build_columns(const OptModel& model);
    void default_basis();
    bool factorize();
    void recompute_basics();
    double col_value(int col) const { return value_[static_cast<size_t>(col)]; }
    void compute_duals(const std::vector<double>& basic_costs, Eigen::VectorXd& y) const;
    double reduced_cost(int col, const Eigen::VectorXd& y) const;
    Eigen::VectorXd ftran(int col) const;  // B^{-1} A_col
    void pivot(int row_pos, int entering, const Eigen::VectorXd& w);
    int phase_loop(bool phase_one);

    struct Col {
        std::vector<std::pair<int, double>> entries;  // (row, coef); slack handled separately
        int slack_row = -1;                           // >= 0 marks a slack column
    };

    int n_ = 0, m_ = 0;
    std::vector<Col> cols_;
    std::vector<double> lb_, ub_, cost_, value_;
    std::vector<VStat> stat_;
    std::vector<int> basic_;      // row position -> column
    std::vector<int> basic_pos_;  // column -> row position or -1
    Eigen::MatrixXd binv_;
    bool basis_loaded_ = false;
    int total_iters_ = 0;
    int pivots_since_factor_ = 0;
    SolverConfig cfg_;
};

}  // namespace flex::detail
