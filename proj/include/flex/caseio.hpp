#pragma once

#include <string>
#include <vector>

#include "flex/scenario.hpp"

namespace flex {

/// Parse failure with position information (line number for tabular input,
/// JSON-pointer-ish path for structured input).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    int line_number;
};

struct CaseOptions {
    /// Branch ratings of 0 in case files mean "unlimited"; they are replaced
    /// by this sentinel (pu) so quadratic limits stay well posed.
    double unlimited_rating_pu = 1e4;
};

/// Parses the MATPOWER-style steady-state case subset: baseMVA, bus, branch
/// and gen tables. Gen rows become Type1 rectangle FPUs (rows on the slack
/// bus describe the grid connection and are skipped). Out-of-service branches
/// are dropped. Quantities stay in MW/MVAr; call Scenario::normalized().
Scenario parse_case_m(const std::string& text, const CaseOptions& opts = {});

/// Parses the native scenario document (JSON; schema in docs/).
Scenario parse_native(const std::string& text);

/// Canonical serialization of a scenario; parse_native(serialize_native(s))
/// reproduces s, and the output is byte-stable under re-serialization.
std::string serialize_native(const Scenario& scenario);

/// One day of per-FPU availability factors and per-bus load scalings.
struct TimeSeriesProfile {
    int interval_minutes = 15;
    int intervals = 0;
    /// availability[t] is aligned with Scenario::fpus; missing columns are 1.
    std::vector<std::vector<double>> availability;
    /// load_scale[t] is aligned with Network::buses; missing columns are 1.
    std::vector<std::vector<double>> load_scale;
};

struct TimeSeriesOptions {
    int interval_minutes = 15;    // overridden by an "# interval_minutes=" directive
    int horizon_minutes = 1440;   // profiles must span exactly this horizon
};

/// Loads a comma-separated profile. First column is the interval index;
/// remaining headers are "<fpu_id>:availability" or "<bus_id>:load_scale".
TimeSeriesProfile load_timeseries(const std::string& text, const Scenario& scenario,
                                  const TimeSeriesOptions& opts = {});

}  // namespace flex
