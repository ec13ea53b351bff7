#include <doctest.h>

#include <cmath>
#include <random>

#include "flex/solver.hpp"

using namespace flex;

namespace {

// SOS2 toy: pick a point on the piecewise-linear graph of f over {0,1,2}
// with values {1, 0, 1}; minimizing the interpolated value must land on the
// middle breakpoint with exactly two adjacent nonzero weights allowed.
OptModel sos2_vee() {
    OptModel m;
    const int w0 = m.add_var(0.0, 1.0, 1.0, "w0");
    const int w1 = m.add_var(0.0, 1.0, 0.0, "w1");
    const int w2 = m.add_var(0.0, 1.0, 1.0, "w2");
    m.add_row_eq({{w0, 1.0}, {w1, 1.0}, {w2, 1.0}}, 1.0, "convex");
    m.sos2_groups.push_back({{w0, w1, w2}});
    return m;
}

}  // namespace

TEST_CASE("SOS2 group resolves to adjacent weights") {
    OptModel m = sos2_vee();
    // Force the combination to represent coordinate 1.2 on the x-axis:
    // sum s*w_s = 1.2 makes w = (0, .8, .2) the only adjacent choice.
    m.add_row_eq({{1, 1.0}, {2, 2.0}}, 1.2, "coord");
    const SolveResult r = solve_milp(m);
    REQUIRE(r.optimal());
    int nonzero = 0;
    for (double v : r.x)
        if (std::abs(v) > 1e-7) ++nonzero;
    CHECK(nonzero == 2);
    CHECK(r.x[1] == doctest::Approx(0.8));
    CHECK(r.x[2] == doctest::Approx(0.2));
}

TEST_CASE("an LP-integral instance needs zero extra nodes") {
    OptModel m = sos2_vee();
    const SolveResult r = solve_milp(m);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(0.0));
    CHECK(r.nodes == 0);  // relaxation optimum is already SOS2-feasible
}

TEST_CASE("knapsack optimum equals exhaustive enumeration") {
    const double value[5] = {6.0, 5.0, 4.8, 3.2, 1.1};
    const double weight[5] = {3.0, 2.6, 2.5, 1.7, 0.6};
    const double cap = 5.0;

    OptModel m;
    for (int i = 0; i < 5; ++i) {
        m.add_var(0.0, 1.0, -value[i], "z" + std::to_string(i));
        m.binaries.push_back(i);
    }
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < 5; ++i) terms.push_back({i, weight[i]});
    m.add_row_le(std::move(terms), cap);

    const SolveResult r = solve_milp(m);
    REQUIRE(r.optimal());

    double best = 0.0;
    for (int mask = 0; mask < 32; ++mask) {
        double v = 0.0, w = 0.0;
        for (int i = 0; i < 5; ++i)
            if (mask & (1 << i)) {
                v += value[i];
                w += weight[i];
            }
        if (w <= cap) best = std::max(best, v);
    }
    CHECK(-r.objective == doctest::Approx(best).epsilon(1e-9));
    for (double v : r.x) CHECK(std::abs(v - std::round(v)) < 1e-7);
}

TEST_CASE("random knapsacks agree with brute force") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int inst = 0; inst < 25; ++inst) {
        double value[6], weight[6];
        for (int i = 0; i < 6; ++i) {
            value[i] = u(rng);
            weight[i] = u(rng);
        }
        const double cap = 1.8;
        OptModel m;
        for (int i = 0; i < 6; ++i) {
            m.add_var(0.0, 1.0, -value[i]);
            m.binaries.push_back(i);
        }
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < 6; ++i) terms.push_back({i, weight[i]});
        m.add_row_le(std::move(terms), cap);
        const SolveResult r = solve_milp(m);
        REQUIRE(r.optimal());
        double best = 0.0;
        for (int mask = 0; mask < 64; ++mask) {
            double v = 0.0, w = 0.0;
            for (int i = 0; i < 6; ++i)
                if (mask & (1 << i)) {
                    v += value[i];
                    w += weight[i];
                }
            if (w <= cap) best = std::max(best, v);
        }
        CHECK(-r.objective == doctest::Approx(best).epsilon(1e-7));
    }
}

TEST_CASE("incumbent respects the LP relaxation bound") {
    OptModel m;
    for (int i = 0; i < 4; ++i) {
        m.add_var(0.0, 1.0, -1.0 - 0.1 * i);
        m.binaries.push_back(i);
    }
    m.add_row_le({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 2.5);
    const SolveResult relaxed = [&] {
        OptModel lp = m;
        lp.binaries.clear();
        return solve_lp(lp);
    }();
    const SolveResult r = solve_milp(m);
    REQUIRE(r.optimal());
    REQUIRE(relaxed.optimal());
    CHECK(r.objective >= relaxed.objective - 1e-6);
}

TEST_CASE("infeasible MILP is reported") {
    OptModel m;
    m.add_var(0.0, 1.0, 1.0);
    m.binaries.push_back(0);
    m.add_row_eq({{0, 1.0}}, 0.5);  // no binary can satisfy this
    const SolveResult r = solve_milp(m);
    CHECK(r.status == SolveStatus::Infeasible);
}
