#pragma once

#include <string>
#include <vector>

#include "flex/fpu.hpp"
#include "flex/grid.hpp"

namespace flex {

class InvalidScenario : public std::runtime_error {
public:
    explicit InvalidScenario(const std::string& what) : std::runtime_error(what) {}
};

/// A network plus the controllable units attached to it. The unit of record
/// for everything downstream; quantities are per unit once normalized().
struct Scenario {
    std::string name;
    Network network;
    std::vector<FpuSpec> fpus;

    /// Validates network invariants plus FPU attachment (existing, non-slack
    /// buses) and per-kind parameters.
    void validate() const;

    /// Returns a copy with the network and all FPU parameters in per unit.
    Scenario normalized() const;

    const FpuSpec* find_fpu(const std::string& id) const;
};

}  // namespace flex
