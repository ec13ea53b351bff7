#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flex {

class InvalidFpu : public std::runtime_error {
public:
    explicit InvalidFpu(const std::string& what) : std::runtime_error(what) {}
};

/// The five P-Q capability classes:
///   Type1  rectangle            (battery, STATCOM, controllable load with free Q)
///   Type2  constant-cos(phi)    (controllable load; segment through the origin)
///   Type3  rectangle, p >= 0    (wind with limited converter Q share)
///   Type4  half disc            (photovoltaic / full-converter wind)
///   Type5  capability D-shape   (synchronous generator)
enum class FpuKind : std::uint8_t { Type1 = 1, Type2, Type3, Type4, Type5 };

const char* to_string(FpuKind kind);

/// Per-kind parameter record. Unused fields are ignored; units follow the
/// owning scenario (MW/MVAr/MVA physical, or pu after conversion).
struct FpuParams {
    double p_min = 0.0;
    double p_max = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    double s_rated = 0.0;
    double cos_phi = 1.0;
    double q_share = 0.0;
    bool weather_dependent = false;  // Type5 only: availability scales p_max
};

struct FpuSpec {
    std::string id;
    int bus = 0;
    FpuKind kind = FpuKind::Type1;
    FpuParams params;

    /// Checks per-kind parameter consistency, throws InvalidFpu with the
    /// offending field named.
    void validate() const;
};

struct PqPoint {
    double p = 0.0;
    double q = 0.0;
};

/// A linear face a*p + b*q <= c of a capability set.
struct HalfPlane {
    double a = 0.0, b = 0.0, c = 0.0;
};

/// Convex, bounded P-Q capability region of one unit. Value object.
///
/// Supports membership tests, support-point queries (farthest point in a
/// direction, deterministic on flat faces), outer polygonal approximation of
/// circular arcs, and the constraint views the optimization backends consume.
class ForShape {
public:
    static ForShape make(const FpuSpec& fpu);                       // FOR
    static ForShape make(const FpuSpec& fpu, double availability);  // FR

    FpuKind kind() const { return kind_; }

    bool contains(double p, double q, double tol = 1e-9) const;

    /// argmax over the shape of dir_p*p + dir_q*q. Flat maximizing faces
    /// resolve to the face midpoint so the result is deterministic.
    PqPoint support(double dir_p, double dir_q) const;

    /// Axis-aligned bounding box.
    void bounds(double& p_lo, double& p_hi, double& q_lo, double& q_hi) const;

    /// Outer linear description: every point of the shape satisfies all
    /// returned half-planes, and circular arcs are replaced by `arc_edges`
    /// tangent lines (so the polyhedron contains the true shape).
    std::vector<HalfPlane> half_planes(int arc_edges = 16) const;

    /// Equality face q = tan_phi * p for Type2 segments; empty otherwise.
    std::optional<double> q_over_p_ratio() const;

    /// Radius of the apparent-power circle if the shape has one (Type4/5).
    std::optional<double> circle_radius() const;

    /// Vertices of an outer polygon approximation, counter-clockwise.
    std::vector<PqPoint> polygon(int arc_edges = 16) const;

private:
    ForShape() = default;

    FpuKind kind_ = FpuKind::Type1;
    double p_min_ = 0.0, p_max_ = 0.0;
    double q_min_ = 0.0, q_max_ = 0.0;
    double s_rated_ = 0.0;   // 0 when no circle applies
    double tan_phi_ = 0.0;   // Type2 only
};

/// Capability region with no external restriction applied.
ForShape for_shape(const FpuSpec& fpu);

/// Availability-restricted region: the active-power ceiling of weather-driven
/// kinds (Type3, Type4, and Type5 when flagged) scales with `availability`.
/// Always a subset of for_shape(fpu).
ForShape fr_shape(const FpuSpec& fpu, double availability);

/// Farthest point of `shape` along `direction` (need not be normalized,
/// must be nonzero).
PqPoint support_point(const ForShape& shape, double dir_p, double dir_q);

}  // namespace flex
