#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace flex {

/// Error carrying a human-readable diagnostic about bad input data.
class InvalidNetwork : public std::runtime_error {
public:
    explicit InvalidNetwork(const std::string& what) : std::runtime_error(what) {}
};

enum class BusKind { Slack, Pq };

/// Whether power quantities of a Network are expressed in MW/MVAr or per unit.
enum class Units { Physical, PerUnit };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::Pq;
    double v_min = 0.9;   // pu
    double v_max = 1.1;   // pu
    double p_load = 0.0;  // MW (Physical) or pu (PerUnit)
    double q_load = 0.0;  // MVAr or pu
};

struct Line {
    int from = 0;
    int to = 0;
    double r = 0.0;      // pu series resistance
    double x = 0.0;      // pu series reactance
    double s_max = 0.0;  // MVA or pu rating
};

/// Electrical network: bus set, line set, slack designation, MVA base.
/// Immutable after construction by convention; all solvers share it read-only.
struct Network {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    double base_mva = 100.0;
    int slack_id = 0;
    double slack_vm = 1.0;  // reference voltage magnitude at the slack bus, pu
    Units units = Units::PerUnit;

    int size() const { return static_cast<int>(buses.size()); }

    /// Dense index (0..n-1) of a bus id; throws if unknown.
    int index_of(int bus_id) const;
    int slack_index() const { return index_of(slack_id); }
    const Bus& bus(int bus_id) const { return buses[static_cast<size_t>(index_of(bus_id))]; }

    /// Checks all structural invariants (unique ids, one slack, endpoints
    /// exist, connectivity, voltage bands, finite loads). Throws InvalidNetwork.
    void validate() const;
};

/// Bus admittance matrix plus the per-line series quantities used by the
/// line-flow equations. No shunt elements are modeled, so every row sums to
/// zero and the matrix is symmetric.
struct AdmittanceMatrix {
    Eigen::MatrixXcd y;            // n x n complex entries
    std::vector<double> g_series;  // per line, Re(1/(r+jx))
    std::vector<double> b_series;  // per line, Im(1/(r+jx))

    int size() const { return static_cast<int>(y.rows()); }
    double magnitude(int i, int j) const { return std::abs(y(i, j)); }
    double angle(int i, int j) const { return std::arg(y(i, j)); }
};

/// Assembles the bus admittance matrix. Off-diagonal entries are -1/(r+jx)
/// for each line, diagonals the negated sum of incident off-diagonals.
AdmittanceMatrix build_admittance(const Network& network);

/// True iff the network is a spanning tree: connected with exactly n-1 lines.
bool validate_radial(const Network& network);

/// Converts MW/MVAr quantities to per unit by dividing by base_mva.
/// Idempotent: a network already in per unit is returned unchanged.
Network to_per_unit(const Network& network);

}  // namespace flex
