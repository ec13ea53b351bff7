#include "flex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace flex {

int Network::index_of(int bus_id) const {
    for (size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == bus_id) return static_cast<int>(i);
    }
    throw InvalidNetwork("unknown bus id " + std::to_string(bus_id));
}

void Network::validate() const {
    if (buses.empty()) throw InvalidNetwork("network has no buses");
    if (base_mva <= 0.0) throw InvalidNetwork("base_mva must be positive");

    std::unordered_set<int> ids;
    int slack_count = 0;
    for (const Bus& b : buses) {
        if (!ids.insert(b.id).second)
            throw InvalidNetwork("duplicate bus id " + std::to_string(b.id));
        if (b.kind == BusKind::Slack) ++slack_count;
        if (!(b.v_min < b.v_max))
            throw InvalidNetwork("bus " + std::to_string(b.id) + ": v_min must be below v_max");
        if (b.v_min <= 0.0)
            throw InvalidNetwork("bus " + std::to_string(b.id) + ": v_min must be positive");
        if (!std::isfinite(b.p_load) || !std::isfinite(b.q_load))
            throw InvalidNetwork("bus " + std::to_string(b.id) + ": load is not finite");
    }
    if (slack_count != 1)
        throw InvalidNetwork("expected exactly one slack bus, found " + std::to_string(slack_count));
    if (!ids.count(slack_id))
        throw InvalidNetwork("slack_id " + std::to_string(slack_id) + " is not a bus");
    if (bus(slack_id).kind != BusKind::Slack)
        throw InvalidNetwork("slack_id does not point at the slack bus");

    for (const Line& l : lines) {
        if (l.from == l.to)
            throw InvalidNetwork("line " + std::to_string(l.from) + "-" + std::to_string(l.to) +
                                 " connects a bus to itself");
        if (!ids.count(l.from) || !ids.count(l.to))
            throw InvalidNetwork("line " + std::to_string(l.from) + "-" + std::to_string(l.to) +
                                 " references an unknown bus");
        if (l.r < 0.0)
            throw InvalidNetwork("line " + std::to_string(l.from) + "-" + std::to_string(l.to) +
                                 " has negative resistance");
        if (l.r == 0.0 && l.x == 0.0)
            throw InvalidNetwork("line " + std::to_string(l.from) + "-" + std::to_string(l.to) +
                                 " has zero impedance");
        if (l.s_max <= 0.0)
            throw InvalidNetwork("line " + std::to_string(l.from) + "-" + std::to_string(l.to) +
                                 " has non-positive rating");
    }

    // Connectivity over the undirected line set.
    if (size() > 1) {
        std::vector<std::vector<int>> adj(static_cast<size_t>(size()));
        for (const Line& l : lines) {
            int a = index_of(l.from), b = index_of(l.to);
            adj[static_cast<size_t>(a)].push_back(b);
            adj[static_cast<size_t>(b)].push_back(a);
        }
        std::vector<char> seen(static_cast<size_t>(size()), 0);
        std::vector<int> stack{slack_index()};
        seen[static_cast<size_t>(slack_index())] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<size_t>(v)]) {
                if (!seen[static_cast<size_t>(w)]) {
                    seen[static_cast<size_t>(w)] = 1;
                    stack.push_back(w);
                }
            }
        }
        if (std::count(seen.begin(), seen.end(), 1) != size())
            throw InvalidNetwork("network graph is not connected");
    }
}

AdmittanceMatrix build_admittance(const Network& network) {
    const int n = network.size();
    AdmittanceMatrix out;
    out.y = Eigen::MatrixXcd::Zero(n, n);
    out.g_series.reserve(network.lines.size());
    out.b_series.reserve(network.lines.size());

    for (const Line& l : network.lines) {
        if (l.r == 0.0 && l.x == 0.0)
            throw InvalidNetwork("line " + std::to_string(l.from) + "-" + std::to_string(l.to) +
                                 " has zero impedance");
        const std::complex<double> y_series = 1.0 / std::complex<double>(l.r, l.x);
        const int i = network.index_of(l.from);
        const int j = network.index_of(l.to);
        out.y(i, j) -= y_series;
        out.y(j, i) -= y_series;
        out.y(i, i) += y_series;
        out.y(j, j) += y_series;
        out.g_series.push_back(y_series.real());
        out.b_series.push_back(y_series.imag());
    }
    return out;
}

bool validate_radial(const Network& network) {
    const int n = network.size();
    if (n == 0) return false;
    if (static_cast<int>(network.lines.size()) != n - 1) return false;
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const Line& l : network.lines) {
        int a = network.index_of(l.from), b = network.index_of(l.to);
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<size_t>(v)]) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    return reached == n;
}

Network to_per_unit(const Network& network) {
    if (network.units == Units::PerUnit) return network;
    if (network.base_mva <= 0.0) throw InvalidNetwork("base_mva must be positive");
    Network out = network;
    for (Bus& b : out.buses) {
        b.p_load /= out.base_mva;
        b.q_load /= out.base_mva;
    }
    for (Line& l : out.lines) l.s_max /= out.base_mva;
    out.units = Units::PerUnit;
    return out;
}

}  // namespace flex
