#include <doctest.h>

#include "flex/caseio.hpp"
#include "flex/grid.hpp"
#include "support/paths.hpp"

using namespace flex;
using testsupport::data_file;
using testsupport::read_file;

namespace {

const char* kTinyCase = R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
    1  3  0    0    0 0 1 1 0 20 1 1.1 0.9;
    2  1  1.0  0.5  0 0 1 1 0 20 1 1.1 0.9;
];
mpc.gen = [
    1  0  0  10 -10 1 100 1 10 0;
    2  0  0  2  -2  1 100 1 3  -1;
];
mpc.branch = [
    1  2  0.01  0.03  0  5  5  5  0 0 1 -360 360;
];
)";

}  // namespace

TEST_CASE("tiny MATPOWER case parses") {
    const Scenario sc = parse_case_m(kTinyCase);
    CHECK(sc.network.buses.size() == 2);
    CHECK(sc.network.lines.size() == 1);
    CHECK(sc.network.base_mva == 100.0);
    CHECK(sc.network.slack_id == 1);
    CHECK(sc.network.units == Units::Physical);
    // gen on the slack bus is the grid connection, not an FPU
    REQUIRE(sc.fpus.size() == 1);
    CHECK(sc.fpus[0].bus == 2);
    CHECK(sc.fpus[0].kind == FpuKind::Type1);
    CHECK(sc.fpus[0].params.p_max == 3.0);
    CHECK(sc.fpus[0].params.p_min == -1.0);
    CHECK(sc.fpus[0].params.q_max == 2.0);
}

TEST_CASE("bundled 33-bus feeder: 33 buses, 32 lines, radial") {
    const Scenario sc = parse_case_m(read_file(data_file("ieee33.m")));
    CHECK(sc.network.buses.size() == 33);
    CHECK(sc.network.lines.size() == 32);
    CHECK(validate_radial(sc.network));
    double total_p = 0.0;
    for (const Bus& b : sc.network.buses) total_p += b.p_load;
    CHECK(total_p == doctest::Approx(3.715));
}

TEST_CASE("two slack buses are rejected") {
    std::string text = kTinyCase;
    const size_t pos = text.find("2  1  1.0");
    text.replace(pos, 4, "2  3 ");
    CHECK_THROWS_WITH_AS(parse_case_m(text), doctest::Contains("multiple slack"), ParseError);
}

TEST_CASE("empty gen table yields zero FPUs") {
    std::string text = kTinyCase;
    const size_t a = text.find("mpc.gen = [");
    const size_t b = text.find("];", a);
    text.replace(a, b - a + 2, "mpc.gen = [\n];");
    const Scenario sc = parse_case_m(text);
    CHECK(sc.fpus.empty());
    CHECK(sc.network.buses.size() == 2);
}

TEST_CASE("zero branch rating becomes the unlimited sentinel") {
    std::string text = kTinyCase;
    const size_t pos = text.find("0.03  0  5");
    text.replace(pos, 10, "0.03  0  0");
    const Scenario sc = parse_case_m(text);
    CHECK(sc.network.lines[0].s_max == doctest::Approx(1e4 * 100.0));
    CHECK(to_per_unit(sc.network).lines[0].s_max == doctest::Approx(1e4));
}

TEST_CASE("native format parses the bundled CIGRE scenario") {
    const Scenario sc = parse_native(read_file(data_file("cigre_mv_der.json")));
    CHECK(sc.network.buses.size() == 15);
    CHECK(sc.network.lines.size() == 14);
    CHECK(validate_radial(sc.network));
    CHECK(sc.fpus.size() == 7);
    int pv = 0, wind = 0, bess = 0;
    for (const FpuSpec& f : sc.fpus) {
        if (f.kind == FpuKind::Type4) ++pv;
        if (f.kind == FpuKind::Type3) ++wind;
        if (f.kind == FpuKind::Type1) ++bess;
    }
    CHECK(pv == 4);
    CHECK(wind == 1);
    CHECK(bess == 2);
}

TEST_CASE("native format round-trips and is byte-stable") {
    const std::string text = read_file(data_file("ieee33_der.json"));
    const Scenario sc = parse_native(text);
    const std::string once = serialize_native(sc);
    const Scenario back = parse_native(once);
    CHECK(back.network.buses.size() == sc.network.buses.size());
    CHECK(back.fpus.size() == sc.fpus.size());
    CHECK(serialize_native(back) == once);
}

TEST_CASE("minimal native two-bus document") {
    const char* doc = R"({
      "network": {
        "base_mva": 10.0, "slack_id": 1,
        "buses": [{"id": 1, "kind": "slack"}, {"id": 2, "p_load": 0.5}],
        "lines": [{"from": 1, "to": 2, "r": 0.01, "x": 0.05, "s_max": 5.0}]
      }
    })";
    const Scenario sc = parse_native(doc);
    CHECK(sc.network.buses.size() == 2);
    CHECK(sc.fpus.empty());
}

TEST_CASE("fpu on an unknown bus names the bus") {
    const char* doc = R"({
      "network": {
        "base_mva": 10.0, "slack_id": 1,
        "buses": [{"id": 1, "kind": "slack"}, {"id": 2}],
        "lines": [{"from": 1, "to": 2, "r": 0.01, "x": 0.05, "s_max": 5.0}]
      },
      "fpus": [{"id": "pv", "bus": 99, "kind": "type4", "params": {"p_max": 1, "s_rated": 1}}]
    })";
    CHECK_THROWS_WITH_AS(parse_native(doc), doctest::Contains("99"), ParseError);
}

TEST_CASE("bundled daily profile loads against the CIGRE scenario") {
    const Scenario sc = parse_native(read_file(data_file("cigre_mv_der.json")));
    const TimeSeriesProfile pr = load_timeseries(read_file(data_file("cigre_day96.csv")), sc);
    CHECK(pr.intervals == 96);
    CHECK(pr.interval_minutes == 15);
    // PV dark at midnight, bright at interval 52; wind never fully calm.
    const size_t pv3 = 0;
    CHECK(pr.availability[0][pv3] == 0.0);
    CHECK(pr.availability[52][pv3] > 0.95);
    // Missing columns default to 1 (batteries unrestricted).
    CHECK(pr.availability[0][5] == 1.0);
    CHECK(pr.load_scale[0][sc.network.index_of(1)] < 1.0);
}

TEST_CASE("profile errors") {
    const Scenario sc = parse_native(read_file(data_file("cigre_mv_der.json")));
    SUBCASE("interval count mismatch") {
        std::string text = "# interval_minutes=15\ninterval,pv3:availability\n";
        for (int t = 0; t < 95; ++t) text += std::to_string(t) + ",0.5\n";
        CHECK_THROWS_WITH_AS(load_timeseries(text, sc), doctest::Contains("interval count"),
                             ParseError);
    }
    SUBCASE("availability outside [0,1]") {
        std::string text = "# interval_minutes=1440\ninterval,pv3:availability\n0,1.4\n";
        CHECK_THROWS_AS(load_timeseries(text, sc), ParseError);
    }
    SUBCASE("ragged row") {
        std::string text = "# interval_minutes=1440\ninterval,pv3:availability\n0\n";
        CHECK_THROWS_WITH_AS(load_timeseries(text, sc), doctest::Contains("ragged"), ParseError);
    }
    SUBCASE("unknown fpu column") {
        std::string text = "# interval_minutes=1440\ninterval,pvX:availability\n0,1.0\n";
        CHECK_THROWS_AS(load_timeseries(text, sc), ParseError);
    }
}
