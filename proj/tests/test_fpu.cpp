#include <doctest.h>

#include <cmath>
#include <random>

#include "flex/fpu.hpp"

using namespace flex;

namespace {

FpuSpec battery() {
    FpuSpec f;
    f.id = "bess";
    f.bus = 2;
    f.kind = FpuKind::Type1;
    f.params.p_min = -1.0;
    f.params.p_max = 1.0;
    f.params.q_min = -0.5;
    f.params.q_max = 0.5;
    return f;
}

FpuSpec pv(double s = 1.0, double p_max = 1.0) {
    FpuSpec f;
    f.id = "pv";
    f.bus = 3;
    f.kind = FpuKind::Type4;
    f.params.s_rated = s;
    f.params.p_max = p_max;
    return f;
}

FpuSpec wind() {
    FpuSpec f;
    f.id = "wind";
    f.bus = 4;
    f.kind = FpuKind::Type3;
    f.params.p_max = 1.5;
    f.params.s_rated = 1.5;
    f.params.q_share = 0.4;
    return f;
}

FpuSpec load_cosphi(double cp = 0.95) {
    FpuSpec f;
    f.id = "cload";
    f.bus = 5;
    f.kind = FpuKind::Type2;
    f.params.p_min = -0.8;
    f.params.p_max = 0.0;
    f.params.cos_phi = cp;
    return f;
}

FpuSpec genset() {
    FpuSpec f;
    f.id = "chp";
    f.bus = 6;
    f.kind = FpuKind::Type5;
    f.params.s_rated = 1.2;
    f.params.p_min = 0.0;
    f.params.p_max = 1.0;
    f.params.q_min = -0.4;
    return f;
}

// Uniform sample from the shape's bounding box, rejected into the shape.
// Type2 segments are sampled along their parameter instead.
PqPoint sample_shape(const ForShape& s, std::mt19937_64& rng) {
    double plo, phi, qlo, qhi;
    s.bounds(plo, phi, qlo, qhi);
    std::uniform_real_distribution<double> up(plo, phi), uq(qlo, qhi);
    if (auto ratio = s.q_over_p_ratio()) {
        const double p = up(rng);
        return {p, *ratio * p};
    }
    for (int k = 0; k < 200; ++k) {
        const double p = up(rng), q = uq(rng);
        if (s.contains(p, q)) return {p, q};
    }
    return {plo, qlo};
}

}  // namespace

TEST_CASE("battery rectangle membership") {
    const ForShape s = for_shape(battery());
    CHECK(s.contains(0.0, 0.0));
    CHECK(s.contains(1.0, 0.5));
    CHECK_FALSE(s.contains(1.1, 0.0));
    CHECK_FALSE(s.contains(0.0, 0.6));
}

TEST_CASE("unity power factor load is a segment on the P axis") {
    const ForShape s = for_shape(load_cosphi(1.0));
    CHECK(s.contains(-0.5, 0.0));
    CHECK_FALSE(s.contains(-0.5, 0.05));
    CHECK(s.q_over_p_ratio().has_value());
    CHECK(*s.q_over_p_ratio() == doctest::Approx(0.0));
}

TEST_CASE("half-disc support point straight up is (0, s_rated)") {
    const ForShape s = for_shape(pv());
    const PqPoint top = support_point(s, 0.0, 1.0);
    CHECK(top.p == doctest::Approx(0.0));
    CHECK(top.q == doctest::Approx(1.0));
}

TEST_CASE("rectangle support on a flat face returns the face midpoint") {
    const ForShape s = for_shape(battery());
    const PqPoint right = support_point(s, 1.0, 0.0);
    CHECK(right.p == doctest::Approx(1.0));
    CHECK(right.q == doctest::Approx(0.0));  // midpoint of [-0.5, 0.5]
}

TEST_CASE("disc support equals radius times direction") {
    FpuSpec f = pv(2.0, 2.0);
    const ForShape s = for_shape(f);
    const double inv = 1.0 / std::sqrt(5.0);
    const PqPoint pt = support_point(s, 1.0 * inv, 2.0 * inv);
    CHECK(pt.p == doctest::Approx(2.0 * inv));
    CHECK(pt.q == doctest::Approx(4.0 * inv));
}

TEST_CASE("D-shape support straight down lands on the q_min edge") {
    const ForShape s = for_shape(genset());
    const PqPoint bot = support_point(s, 0.0, -1.0);
    CHECK(bot.q == doctest::Approx(-0.4));
    CHECK(s.contains(bot.p, bot.q));
}

TEST_CASE("availability scales the active-power ceiling of weather-driven kinds") {
    SUBCASE("identity at availability one") {
        const ForShape a = for_shape(pv());
        const ForShape b = fr_shape(pv(), 1.0);
        double pl1, ph1, ql1, qh1, pl2, ph2, ql2, qh2;
        a.bounds(pl1, ph1, ql1, qh1);
        b.bounds(pl2, ph2, ql2, qh2);
        CHECK(ph1 == ph2);
        CHECK(qh1 == qh2);
    }
    SUBCASE("zero irradiation leaves the reactive segment") {
        const ForShape s = fr_shape(pv(), 0.0);
        CHECK(s.contains(0.0, 1.0));
        CHECK(s.contains(0.0, -1.0));
        CHECK_FALSE(s.contains(0.05, 0.0));
    }
    SUBCASE("half availability halves p_max") {
        const ForShape s = fr_shape(pv(), 0.5);
        CHECK(s.contains(0.5, 0.0));
        CHECK_FALSE(s.contains(0.6, 0.0));
    }
    SUBCASE("battery is unaffected") {
        const ForShape s = fr_shape(battery(), 0.3);
        CHECK(s.contains(1.0, 0.5));
    }
}

TEST_CASE("availability outside [0,1] is rejected") {
    CHECK_THROWS_AS(fr_shape(pv(), -0.1), InvalidFpu);
    CHECK_THROWS_AS(fr_shape(pv(), 1.1), InvalidFpu);
}

TEST_CASE("inconsistent Type4 parameters are rejected") {
    FpuSpec f = pv(1.0, 1.2);  // p_max > s_rated
    CHECK_THROWS_AS(for_shape(f), InvalidFpu);
}

TEST_CASE("FR is contained in FOR for random availabilities, all kinds") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    for (const FpuSpec& f : {battery(), load_cosphi(), wind(), pv(), genset()}) {
        const ForShape full = for_shape(f);
        for (int rep = 0; rep < 10; ++rep) {
            const double a = ua(rng);
            const ForShape fr = fr_shape(f, a);
            for (int k = 0; k < 100; ++k) {
                const PqPoint pt = sample_shape(fr, rng);
                CAPTURE(f.id);
                CAPTURE(a);
                REQUIRE(full.contains(pt.p, pt.q, 1e-7));
            }
        }
    }
}

TEST_CASE("FR shapes grow monotonically with availability") {
    std::mt19937_64 rng(11);
    for (const FpuSpec& f : {wind(), pv(), genset()}) {
        for (int rep = 0; rep < 20; ++rep) {
            std::uniform_real_distribution<double> ua(0.0, 1.0);
            double a1 = ua(rng), a2 = ua(rng);
            if (a1 > a2) std::swap(a1, a2);
            const ForShape small = fr_shape(f, a1);
            const ForShape big = fr_shape(f, a2);
            for (int k = 0; k < 50; ++k) {
                const PqPoint pt = sample_shape(small, rng);
                REQUIRE(big.contains(pt.p, pt.q, 1e-7));
            }
        }
    }
}

TEST_CASE("shapes are convex: midpoints of members are members") {
    std::mt19937_64 rng(13);
    for (const FpuSpec& f : {battery(), load_cosphi(), wind(), pv(), genset()}) {
        const ForShape s = for_shape(f);
        for (int k = 0; k < 1000; ++k) {
            const PqPoint a = sample_shape(s, rng);
            const PqPoint b = sample_shape(s, rng);
            REQUIRE(s.contains(0.5 * (a.p + b.p), 0.5 * (a.q + b.q), 1e-7));
        }
    }
}

TEST_CASE("membership of support points holds in every direction") {
    for (const FpuSpec& f : {battery(), load_cosphi(), wind(), pv(), genset()}) {
        const ForShape s = for_shape(f);
        for (int k = 0; k < 64; ++k) {
            const double th = 2.0 * M_PI * k / 64.0;
            const PqPoint pt = support_point(s, std::cos(th), std::sin(th));
            CAPTURE(f.id);
            CAPTURE(th);
            REQUIRE(s.contains(pt.p, pt.q, 1e-9));
        }
    }
}

TEST_CASE("half planes are an outer description") {
    std::mt19937_64 rng(17);
    for (const FpuSpec& f : {battery(), wind(), pv(), genset()}) {
        const ForShape s = for_shape(f);
        const auto planes = s.half_planes(16);
        for (int k = 0; k < 300; ++k) {
            const PqPoint pt = sample_shape(s, rng);
            for (const HalfPlane& h : planes)
                REQUIRE(h.a * pt.p + h.b * pt.q <= h.c + 1e-9);
        }
    }
}
