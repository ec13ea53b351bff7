#include "flex/fpu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flex/geometry.hpp"

namespace flex {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& id, const char* msg) {
    if (!ok) throw InvalidFpu("fpu '" + id + "': " + msg);
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

const char* to_string(FpuKind kind) {
    switch (kind) {
        case FpuKind::Type1: return "type1";
        case FpuKind::Type2: return "type2";
        case FpuKind::Type3: return "type3";
        case FpuKind::Type4: return "type4";
        case FpuKind::Type5: return "type5";
    }
    return "?";
}

void FpuSpec::validate() const {
    const FpuParams& pr = params;
    for (double v : {pr.p_min, pr.p_max, pr.q_min, pr.q_max, pr.s_rated, pr.cos_phi, pr.q_share})
        require(std::isfinite(v), id, "parameter is not finite");
    switch (kind) {
        case FpuKind::Type1:
            require(pr.p_min <= pr.p_max, id, "p_min must not exceed p_max");
            require(pr.q_min <= pr.q_max, id, "q_min must not exceed q_max");
            break;
        case FpuKind::Type2:
            require(pr.p_min <= pr.p_max, id, "p_min must not exceed p_max");
            require(pr.cos_phi > 0.0 && pr.cos_phi <= 1.0, id, "cos_phi must be in (0, 1]");
            break;
        case FpuKind::Type3:
            require(pr.p_max >= 0.0, id, "p_max must be non-negative");
            require(pr.s_rated > 0.0, id, "s_rated must be positive");
            require(pr.q_share >= 0.0 && pr.q_share <= 1.0, id, "q_share must be in [0, 1]");
            break;
        case FpuKind::Type4:
            require(pr.s_rated > 0.0, id, "s_rated must be positive");
            require(pr.p_max >= 0.0, id, "p_max must be non-negative");
            require(pr.p_max <= pr.s_rated, id, "p_max must not exceed s_rated");
            break;
        case FpuKind::Type5: {
            require(pr.s_rated > 0.0, id, "s_rated must be positive");
            require(pr.p_min <= pr.p_max, id, "p_min must not exceed p_max");
            require(std::abs(pr.p_min) <= pr.s_rated && std::abs(pr.p_max) <= pr.s_rated, id,
                    "active-power range must lie within the s_rated circle");
            require(pr.q_min >= -pr.s_rated && pr.q_min <= pr.s_rated, id,
                    "q_min must lie within the s_rated circle");
            const double p0 = clamp(0.0, pr.p_min, pr.p_max);
            const double qm = std::max(pr.q_min, 0.0);
            require(p0 * p0 + qm * qm <= pr.s_rated * pr.s_rated + 1e-12, id,
                    "capability region is empty");
            break;
        }
    }
}

ForShape ForShape::make(const FpuSpec& fpu) { return make(fpu, 1.0); }

ForShape ForShape::make(const FpuSpec& fpu, double availability) {
    if (!(availability >= 0.0 && availability <= 1.0))
        throw InvalidFpu("fpu '" + fpu.id + "': availability must be in [0, 1]");
    fpu.validate();

    const FpuParams& pr = fpu.params;
    ForShape s;
    s.kind_ = fpu.kind;
    switch (fpu.kind) {
        case FpuKind::Type1:
            s.p_min_ = pr.p_min;
            s.p_max_ = pr.p_max;
            s.q_min_ = pr.q_min;
            s.q_max_ = pr.q_max;
            break;
        case FpuKind::Type2: {
            s.p_min_ = pr.p_min;
            s.p_max_ = pr.p_max;
            s.tan_phi_ = std::tan(std::acos(pr.cos_phi));
            const double qa = s.tan_phi_ * pr.p_min;
            const double qb = s.tan_phi_ * pr.p_max;
            s.q_min_ = std::min(qa, qb);
            s.q_max_ = std::max(qa, qb);
            break;
        }
        case FpuKind::Type3:
            s.p_min_ = 0.0;
            s.p_max_ = availability * pr.p_max;
            s.q_min_ = -pr.q_share * pr.s_rated;
            s.q_max_ = pr.q_share * pr.s_rated;
            break;
        case FpuKind::Type4:
            s.p_min_ = 0.0;
            s.p_max_ = availability * pr.p_max;
            s.s_rated_ = pr.s_rated;
            s.q_min_ = -pr.s_rated;
            s.q_max_ = pr.s_rated;
            break;
        case FpuKind::Type5: {
            double p_hi = pr.p_max;
            if (pr.weather_dependent) p_hi = availability * pr.p_max;
            const double p_lo = std::min(pr.p_min, p_hi);
            s.s_rated_ = pr.s_rated;
            // Bounding box clipped to the circle given q >= q_min.
            const double qm = std::max(pr.q_min, 0.0);
            const double pr_max = std::sqrt(std::max(0.0, pr.s_rated * pr.s_rated - qm * qm));
            s.p_min_ = std::max(p_lo, -pr_max);
            s.p_max_ = std::min(p_hi, pr_max);
            const double p0 = clamp(0.0, s.p_min_, s.p_max_);
            s.q_min_ = pr.q_min;
            s.q_max_ = std::sqrt(std::max(0.0, pr.s_rated * pr.s_rated - p0 * p0));
            break;
        }
    }
    return s;
}

bool ForShape::contains(double p, double q, double tol) const {
    const double scale = 1.0 + std::max({std::abs(p_min_), std::abs(p_max_), std::abs(q_min_),
                                         std::abs(q_max_), s_rated_});
    const double eps = tol * scale;
    if (p < p_min_ - eps || p > p_max_ + eps) return false;
    switch (kind_) {
        case FpuKind::Type1:
        case FpuKind::Type3:
            return q >= q_min_ - eps && q <= q_max_ + eps;
        case FpuKind::Type2:
            return std::abs(q - tan_phi_ * p) <= eps;
        case FpuKind::Type4:
            return std::hypot(p, q) <= s_rated_ + eps;
        case FpuKind::Type5:
            return q >= q_min_ - eps && std::hypot(p, q) <= s_rated_ + eps;
    }
    return false;
}

namespace {

// Picks the maximizer of a linear objective from a candidate list; ties
// (flat faces) resolve to the midpoint of the extreme tied candidates.
PqPoint pick_support(const std::vector<PqPoint>& candidates, double a, double b) {
    double best = -std::numeric_limits<double>::infinity();
    for (const PqPoint& c : candidates) best = std::max(best, a * c.p + b * c.q);
    const double span = 1.0 + std::abs(best);
    PqPoint lo{0, 0}, hi{0, 0};
    bool first = true;
    for (const PqPoint& c : candidates) {
        if (a * c.p + b * c.q < best - 1e-12 * span) continue;
        if (first) {
            lo = hi = c;
            first = false;
            continue;
        }
        if (c.p < lo.p || (c.p == lo.p && c.q < lo.q)) lo = c;
        if (c.p > hi.p || (c.p == hi.p && c.q > hi.q)) hi = c;
    }
    return {0.5 * (lo.p + hi.p), 0.5 * (lo.q + hi.q)};
}

}  // namespace

PqPoint ForShape::support(double a, double b) const {
    const double nrm = std::hypot(a, b);
    if (nrm == 0.0) throw InvalidFpu("support direction must be nonzero");
    a /= nrm;
    b /= nrm;

    switch (kind_) {
        case FpuKind::Type1:
        case FpuKind::Type3: {
            PqPoint out;
            out.p = a > 0.0 ? p_max_ : (a < 0.0 ? p_min_ : 0.5 * (p_min_ + p_max_));
            out.q = b > 0.0 ? q_max_ : (b < 0.0 ? q_min_ : 0.5 * (q_min_ + q_max_));
            return out;
        }
        case FpuKind::Type2: {
            const double slope = a + b * tan_phi_;
            if (slope > 0.0) return {p_max_, tan_phi_ * p_max_};
            if (slope < 0.0) return {p_min_, tan_phi_ * p_min_};
            return {0.5 * (p_min_ + p_max_), tan_phi_ * 0.5 * (p_min_ + p_max_)};
        }
        case FpuKind::Type4:
        case FpuKind::Type5: {
            const double s = s_rated_;
            const double q_floor = (kind_ == FpuKind::Type5) ? q_min_ : -s;
            // Unconstrained circle maximizer.
            const PqPoint disc{s * a, s * b};
            if (disc.p >= p_min_ && disc.p <= p_max_ && disc.q >= q_floor) return disc;

            std::vector<PqPoint> cand;
            auto arc_q = [&](double p) { return std::sqrt(std::max(0.0, s * s - p * p)); };
            for (double pc : {p_min_, p_max_}) {
                const double qa = arc_q(pc);
                if (qa >= q_floor) cand.push_back({pc, qa});
                cand.push_back({pc, std::max(-qa, q_floor)});
            }
            // Arc maximizer restricted to the feasible p interval.
            {
                const double pa = clamp(disc.p, p_min_, p_max_);
                const double qa = (b >= 0.0 ? 1.0 : -1.0) * arc_q(pa);
                if (qa >= q_floor) cand.push_back({pa, qa});
            }
            // q = q_floor edge endpoints.
            {
                const double pr = std::sqrt(std::max(0.0, s * s - q_floor * q_floor));
                const double lo = std::max(p_min_, -pr);
                const double hi = std::min(p_max_, pr);
                if (lo <= hi) {
                    cand.push_back({lo, q_floor});
                    cand.push_back({hi, q_floor});
                }
            }
            return pick_support(cand, a, b);
        }
    }
    return {0.0, 0.0};
}

void ForShape::bounds(double& p_lo, double& p_hi, double& q_lo, double& q_hi) const {
    p_lo = p_min_;
    p_hi = p_max_;
    q_lo = q_min_;
    q_hi = q_max_;
}

std::optional<double> ForShape::q_over_p_ratio() const {
    if (kind_ == FpuKind::Type2) return tan_phi_;
    return std::nullopt;
}

std::optional<double> ForShape::circle_radius() const {
    if (kind_ == FpuKind::Type4 || kind_ == FpuKind::Type5) return s_rated_;
    return std::nullopt;
}

std::vector<HalfPlane> ForShape::half_planes(int arc_edges) const {
    std::vector<HalfPlane> hp;
    hp.push_back({1.0, 0.0, p_max_});
    hp.push_back({-1.0, 0.0, -p_min_});
    if (kind_ == FpuKind::Type2) {
        hp.push_back({-tan_phi_, 1.0, 0.0});
        hp.push_back({tan_phi_, -1.0, 0.0});
        return hp;
    }
    hp.push_back({0.0, 1.0, q_max_});
    hp.push_back({0.0, -1.0, -q_min_});
    if (s_rated_ > 0.0) {
        for (int k = 0; k < arc_edges; ++k) {
            const double th = 2.0 * kPi * (k + 0.5) / arc_edges;
            hp.push_back({std::cos(th), std::sin(th), s_rated_});
        }
    }
    return hp;
}

std::vector<PqPoint> ForShape::polygon(int arc_edges) const {
    if (kind_ == FpuKind::Type2 || p_min_ == p_max_) {
        // Degenerate: a segment (or point).
        if (kind_ == FpuKind::Type2)
            return {{p_min_, tan_phi_ * p_min_}, {p_max_, tan_phi_ * p_max_}};
        return {{p_min_, q_min_}, {p_min_, q_max_}};
    }
    const double pad = std::max({std::abs(p_min_), std::abs(p_max_), std::abs(q_min_),
                                 std::abs(q_max_), s_rated_}) * 2.0 + 1.0;
    std::vector<Point2> poly{{-pad, -pad}, {pad, -pad}, {pad, pad}, {-pad, pad}};
    for (const HalfPlane& h : half_planes(arc_edges)) {
        poly = clip_half_plane(poly, h.a, h.b, h.c);
        if (poly.empty()) break;
    }
    std::vector<PqPoint> out;
    out.reserve(poly.size());
    for (const Point2& v : poly) out.push_back({v.x, v.y});
    return out;
}

ForShape for_shape(const FpuSpec& fpu) { return ForShape::make(fpu); }

ForShape fr_shape(const FpuSpec& fpu, double availability) {
    return ForShape::make(fpu, availability);
}

PqPoint support_point(const ForShape& shape, double dir_p, double dir_q) {
    return shape.support(dir_p, dir_q);
}

}  // namespace flex
