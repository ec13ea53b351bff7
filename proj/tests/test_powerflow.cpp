#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "flex/caseio.hpp"
#include "flex/powerflow.hpp"
#include "support/paths.hpp"

using namespace flex;
using testsupport::data_file;
using testsupport::read_file;

namespace {

Network two_bus(double r, double x, double p_load, double q_load) {
    Network net;
    net.buses = {{1, BusKind::Slack, 0.8, 1.2, 0.0, 0.0}, {2, BusKind::Pq, 0.8, 1.2, p_load, q_load}};
    net.lines = {{1, 2, r, x, 10.0}};
    net.base_mva = 1.0;
    net.slack_id = 1;
    return net;
}

PFState flat(const Network& net) {
    PFState st;
    st.v_mag.assign(net.buses.size(), 1.0);
    st.v_ang.assign(net.buses.size(), 0.0);
    return st;
}

// Receiving-end voltage of a single line feeding a PQ load, from the
// closed-form quadratic (independent of the Newton path).
double two_bus_voltage(double r, double x, double p, double q) {
    const double a = 1.0 - 2.0 * (r * p + x * q);
    const double z2 = r * r + x * x;
    const double v2 = 0.5 * (a + std::sqrt(a * a - 4.0 * z2 * (p * p + q * q)));
    return std::sqrt(v2);
}

}  // namespace

TEST_CASE("flat state injects nothing anywhere") {
    const Scenario sc = parse_case_m(read_file(data_file("ieee33.m"))).normalized();
    const AdmittanceMatrix y = build_admittance(sc.network);
    std::vector<double> p, q;
    injections(flat(sc.network), y, p, q);
    for (size_t i = 0; i < p.size(); ++i) {
        CHECK(std::abs(p[i]) < 1e-12);
        CHECK(std::abs(q[i]) < 1e-12);
    }
}

TEST_CASE("injections match a direct complex-power evaluation") {
    Network net = two_bus(0.03, 0.04, 0.0, 0.0);
    const AdmittanceMatrix y = build_admittance(net);
    PFState st;
    st.v_mag = {1.0, 0.95};
    st.v_ang = {0.0, -0.02};

    // Independent oracle: s_i = V_i * conj(sum_j Y_ij V_j).
    std::complex<double> v1 = std::polar(1.0, 0.0), v2 = std::polar(0.95, -0.02);
    const std::complex<double> s1 = v1 * std::conj(y.y(0, 0) * v1 + y.y(0, 1) * v2);
    const std::complex<double> s2 = v2 * std::conj(y.y(1, 0) * v1 + y.y(1, 1) * v2);

    std::vector<double> p, q;
    injections(st, y, p, q);
    CHECK(p[0] == doctest::Approx(s1.real()).epsilon(1e-12));
    CHECK(q[0] == doctest::Approx(s1.imag()).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(s2.real()).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(s2.imag()).epsilon(1e-12));
}

TEST_CASE("relabeling buses permutes injections") {
    Network net = two_bus(0.03, 0.04, 0.0, 0.0);
    std::swap(net.buses[0].id, net.buses[1].id);  // ids now 2,1
    net.lines[0] = {2, 1, 0.03, 0.04, 10.0};
    net.slack_id = 2;
    const AdmittanceMatrix y = build_admittance(net);
    PFState st;
    st.v_mag = {1.0, 0.95};
    st.v_ang = {0.0, -0.02};
    std::vector<double> p, q;
    injections(st, y, p, q);

    Network ref = two_bus(0.03, 0.04, 0.0, 0.0);
    const AdmittanceMatrix yr = build_admittance(ref);
    std::vector<double> pr, qr;
    injections(st, yr, pr, qr);
    CHECK(p[0] == doctest::Approx(pr[0]));
    CHECK(q[1] == doctest::Approx(qr[1]));
}

TEST_CASE("zero loads converge to the flat state immediately") {
    Network net = two_bus(0.03, 0.04, 0.0, 0.0);
    const AdmittanceMatrix y = build_admittance(net);
    Injections spec{{0.0, 0.0}, {0.0, 0.0}};
    const PFState st = newton_solve(net, y, spec);
    CHECK(st.v_mag[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.v_ang[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-bus voltage matches the closed-form solution") {
    const double r = 0.03, x = 0.04, p = 0.1, q = 0.05;
    Network net = two_bus(r, x, p, q);
    const AdmittanceMatrix y = build_admittance(net);
    Injections spec{{0.0, -p}, {0.0, -q}};
    const PFState st = newton_solve(net, y, spec);
    CHECK(st.v_mag[1] == doctest::Approx(two_bus_voltage(r, x, p, q)).epsilon(1e-9));
}

TEST_CASE("33-bus base case: converged, monotone trunk voltage profile") {
    const Scenario sc = parse_case_m(read_file(data_file("ieee33.m"))).normalized();
    const AdmittanceMatrix y = build_admittance(sc.network);
    Injections spec = net_injections(sc, {});
    const PFState st = newton_solve(sc.network, y, spec);

    std::vector<double> p, q;
    injections(st, y, p, q);
    for (size_t i = 0; i < sc.network.buses.size(); ++i) {
        if (static_cast<int>(i) == sc.network.slack_index()) continue;
        CHECK(std::abs(spec.p[i] - p[i]) < 1e-8);
        CHECK(std::abs(spec.q[i] - q[i]) < 1e-8);
    }
    // Main trunk is buses 1..18; voltage falls toward the feeder end.
    for (int b = 1; b < 18; ++b) {
        const double v_here = st.v_mag[static_cast<size_t>(sc.network.index_of(b))];
        const double v_next = st.v_mag[static_cast<size_t>(sc.network.index_of(b + 1))];
        CHECK(v_here >= v_next - 1e-12);
    }
    CHECK(st.v_mag[static_cast<size_t>(sc.network.index_of(18))] ==
          doctest::Approx(0.9131).epsilon(2e-3));
}

TEST_CASE("analytic Jacobian agrees with central finite differences") {
    // Random small states around flat on a 4-bus star network.
    Network net;
    net.buses = {{1, BusKind::Slack, 0.8, 1.2, 0, 0},
                 {2, BusKind::Pq, 0.8, 1.2, 0, 0},
                 {3, BusKind::Pq, 0.8, 1.2, 0, 0},
                 {4, BusKind::Pq, 0.8, 1.2, 0, 0}};
    net.lines = {{1, 2, 0.02, 0.06, 5}, {2, 3, 0.03, 0.05, 5}, {2, 4, 0.01, 0.08, 5}};
    net.slack_id = 1;
    const AdmittanceMatrix y = build_admittance(net);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dv(-0.05, 0.05), da(-0.1, 0.1);
    for (int rep = 0; rep < 20; ++rep) {
        PFState st = flat(net);
        for (size_t i = 1; i < 4; ++i) {
            st.v_mag[i] += dv(rng);
            st.v_ang[i] += da(rng);
        }
        // The solver's Jacobian is internal; probe it through one Newton step
        // against a finite-difference reconstruction of the same step.
        std::vector<double> p0, q0;
        injections(st, y, p0, q0);

        const double h = 1e-6;
        // Finite-difference d(injections)/d(theta_2) as a representative column.
        PFState stp = st, stm = st;
        stp.v_ang[1] += h;
        stm.v_ang[1] -= h;
        std::vector<double> pp, qp, pm, qm;
        injections(stp, y, pp, qp);
        injections(stm, y, pm, qm);

        // Analytic column: dP_i/dtheta_2 = Vi V2 (G sin - B cos) etc.
        for (int i = 0; i < 4; ++i) {
            const double fd_p = (pp[static_cast<size_t>(i)] - pm[static_cast<size_t>(i)]) / (2 * h);
            const double fd_q = (qp[static_cast<size_t>(i)] - qm[static_cast<size_t>(i)]) / (2 * h);
            double an_p, an_q;
            const double vi = st.v_mag[static_cast<size_t>(i)];
            const double v2 = st.v_mag[1];
            if (i == 1) {
                an_p = -q0[1] - y.y(1, 1).imag() * v2 * v2;
                an_q = p0[1] - y.y(1, 1).real() * v2 * v2;
            } else {
                const std::complex<double> yij = y.y(i, 1);
                const double th = st.v_ang[static_cast<size_t>(i)] - st.v_ang[1];
                an_p = vi * v2 * (yij.real() * std::sin(th) - yij.imag() * std::cos(th));
                an_q = -vi * v2 * (yij.real() * std::cos(th) + yij.imag() * std::sin(th));
            }
            const double scale = std::max(1.0, std::abs(fd_p));
            CHECK(std::abs(an_p - fd_p) / scale < 1e-6);
            CHECK(std::abs(an_q - fd_q) / std::max(1.0, std::abs(fd_q)) < 1e-6);
        }
    }
}

TEST_CASE("line flows: loss positivity and flat-state zeros") {
    const double r = 0.03, x = 0.04, p = 0.1, q = 0.05;
    Network net = two_bus(r, x, p, q);
    const AdmittanceMatrix y = build_admittance(net);

    SUBCASE("flat state carries no flow") {
        const auto flows = line_flows(flat(net), net, y);
        CHECK(flows[0].p_from == doctest::Approx(0.0));
        CHECK(flows[0].q_to == doctest::Approx(0.0));
    }
    SUBCASE("converged state: loss equals I^2 r > 0") {
        Injections spec{{0.0, -p}, {0.0, -q}};
        const PFState st = newton_solve(net, y, spec);
        const auto flows = line_flows(st, net, y);
        const double loss = flows[0].p_from + flows[0].p_to;
        CHECK(loss > 0.0);
        // Receiving end absorbs exactly the load.
        CHECK(flows[0].p_to == doctest::Approx(-p).epsilon(1e-8));
        CHECK(flows[0].q_to == doctest::Approx(-q).epsilon(1e-8));
        // The slack supplies load plus loss.
        const PqPoint pcc = slack_injection(st, net, y);
        CHECK(pcc.p == doctest::Approx(p + loss).epsilon(1e-8));
    }
}

TEST_CASE("energy conservation on the 33-bus case") {
    const Scenario sc = parse_case_m(read_file(data_file("ieee33.m"))).normalized();
    const AdmittanceMatrix y = build_admittance(sc.network);
    const PFState st = newton_solve(sc.network, y, net_injections(sc, {}));
    const auto flows = line_flows(st, sc.network, y);
    double loss = 0.0;
    for (const LineFlow& f : flows) {
        CHECK(f.p_from + f.p_to >= -1e-9);  // per-line active loss never negative
        loss += f.p_from + f.p_to;
    }
    double load = 0.0;
    for (const Bus& b : sc.network.buses) load += b.p_load;
    const PqPoint pcc = slack_injection(st, sc.network, y);
    CHECK(pcc.p == doctest::Approx(load + loss).epsilon(1e-8));
    CHECK(loss == doctest::Approx(0.02027).epsilon(0.02));  // canonical 202.7 kW on 10 MVA
}

TEST_CASE("limit checks") {
    const double r = 0.03, x = 0.04, p = 0.1, q = 0.05;
    Network net = two_bus(r, x, p, q);
    const AdmittanceMatrix y = build_admittance(net);
    Injections spec{{0.0, -p}, {0.0, -q}};
    const PFState st = newton_solve(net, y, spec);
    const auto flows = line_flows(st, net, y);

    SUBCASE("roomy limits pass") {
        const LimitReport rep = check_limits(st, flows, net);
        CHECK(rep.feasible);
        CHECK(rep.worst == 0.0);
    }
    SUBCASE("rating set below the actual loading is flagged with the line named") {
        Network tight = net;
        tight.lines[0].s_max = 0.9 * std::hypot(flows[0].p_from, flows[0].q_from);
        const LimitReport rep = check_limits(st, flows, tight);
        CHECK_FALSE(rep.feasible);
        REQUIRE(rep.violations.size() == 1);
        CHECK(rep.violations[0].kind == LimitViolation::Kind::LineRating);
        CHECK(rep.violations[0].detail.find("1-2") != std::string::npos);
    }
    SUBCASE("impossible voltage floor is flagged") {
        Network tight = net;
        tight.buses[1].v_min = 1.01;
        const LimitReport rep = check_limits(st, flows, tight);
        CHECK_FALSE(rep.feasible);
        CHECK(rep.violations[0].kind == LimitViolation::Kind::VoltageLow);
    }
}

TEST_CASE("divergence reports the mismatch norm") {
    // A load far beyond the line's deliverable power cannot converge.
    Network net = two_bus(0.03, 0.04, 8.0, 4.0);
    const AdmittanceMatrix y = build_admittance(net);
    Injections spec{{0.0, -8.0}, {0.0, -4.0}};
    CHECK_THROWS_AS(newton_solve(net, y, spec), DivergenceError);
}
