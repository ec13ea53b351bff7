#include "flex/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flex {

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Point2> hull;
    hull.reserve(2 * n);
    // Lower hull
    for (const Point2& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    // Upper hull
    const size_t lower = hull.size() + 1;
    for (size_t i = n - 1; i-- > 0;) {
        const Point2& p = pts[i];
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    hull.pop_back();
    return hull;
}

std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, double a, double b, double c) {
    std::vector<Point2> out;
    const size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 1);
    for (size_t i = 0; i < n; ++i) {
        const Point2& cur = poly[i];
        const Point2& nxt = poly[(i + 1) % n];
        const double fc = a * cur.x + b * cur.y - c;
        const double fn = a * nxt.x + b * nxt.y - c;
        if (fc <= 0.0) out.push_back(cur);
        if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
            const double t = fc / (fc - fn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return out;
}

bool point_in_convex(const std::vector<Point2>& poly, const Point2& pt, double tol) {
    const size_t n = poly.size();
    if (n == 0) return false;
    if (n == 1) return std::abs(pt.x - poly[0].x) <= tol && std::abs(pt.y - poly[0].y) <= tol;
    if (n == 2) return distance_to_boundary(poly, pt) <= tol;
    for (size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        if (cross(a, b, pt) < -tol) return false;
    }
    return true;
}

static double point_segment_distance(const Point2& a, const Point2& b, const Point2& p) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double px = a.x + t * dx - p.x;
    const double py = a.y + t * dy - p.y;
    return std::hypot(px, py);
}

double distance_to_boundary(const std::vector<Point2>& poly, const Point2& pt) {
    const size_t n = poly.size();
    if (n == 0) return std::numeric_limits<double>::infinity();
    if (n == 1) return std::hypot(pt.x - poly[0].x, pt.y - poly[0].y);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(poly[i], poly[(i + 1) % n], pt));
    return best;
}

double signed_distance(const std::vector<Point2>& poly, const Point2& pt) {
    const double d = distance_to_boundary(poly, pt);
    return point_in_convex(poly, pt, 0.0) ? -d : d;
}

double polygon_area(const std::vector<Point2>& poly) {
    const size_t n = poly.size();
    if (n < 3) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

double polygon_diameter(const std::vector<Point2>& poly) {
    double best = 0.0;
    for (size_t i = 0; i < poly.size(); ++i)
        for (size_t j = i + 1; j < poly.size(); ++j)
            best = std::max(best, std::hypot(poly[i].x - poly[j].x, poly[i].y - poly[j].y));
    return best;
}

static void densify(const std::vector<Point2>& poly, double step, std::vector<Point2>& out) {
    const size_t n = poly.size();
    out.clear();
    if (n == 1) {
        out.push_back(poly[0]);
        return;
    }
    for (size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int segs = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 0; k < segs; ++k) {
            const double t = static_cast<double>(k) / segs;
            out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
        if (n == 2 && i == 1) break;  // a segment has two directed edges; one pass suffices
    }
}

double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b, double step) {
    std::vector<Point2> da, db;
    densify(a, step, da);
    densify(b, step, db);
    double worst = 0.0;
    for (const Point2& p : da) worst = std::max(worst, distance_to_boundary(b, p));
    for (const Point2& p : db) worst = std::max(worst, distance_to_boundary(a, p));
    return worst;
}

}  // namespace flex
