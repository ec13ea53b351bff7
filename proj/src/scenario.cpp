#include "flex/scenario.hpp"

#include <unordered_set>

namespace flex {

void Scenario::validate() const {
    network.validate();
    std::unordered_set<std::string> ids;
    for (const FpuSpec& f : fpus) {
        f.validate();
        if (!ids.insert(f.id).second)
            throw InvalidScenario("duplicate fpu id '" + f.id + "'");
        int idx;
        try {
            idx = network.index_of(f.bus);
        } catch (const InvalidNetwork&) {
            throw InvalidScenario("fpu '" + f.id + "' attached to unknown bus " +
                                  std::to_string(f.bus));
        }
        if (network.buses[static_cast<size_t>(idx)].kind == BusKind::Slack)
            throw InvalidScenario("fpu '" + f.id + "' may not sit on the slack bus");
    }
}

Scenario Scenario::normalized() const {
    if (network.units == Units::PerUnit) return *this;
    Scenario out = *this;
    out.network = to_per_unit(network);
    for (FpuSpec& f : out.fpus) {
        f.params.p_min /= network.base_mva;
        f.params.p_max /= network.base_mva;
        f.params.q_min /= network.base_mva;
        f.params.q_max /= network.base_mva;
        f.params.s_rated /= network.base_mva;
    }
    return out;
}

const FpuSpec* Scenario::find_fpu(const std::string& id) const {
    for (const FpuSpec& f : fpus)
        if (f.id == id) return &f;
    return nullptr;
}

}  // namespace flex
