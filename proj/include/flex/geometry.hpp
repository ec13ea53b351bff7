#pragma once

#include <vector>

namespace flex {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Monotone-chain convex hull, counter-clockwise, collinear points dropped.
/// Deterministic: input order never matters, duplicates are merged.
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// Clips a convex polygon against the half-plane a*x + b*y <= c
/// (Sutherland-Hodgman step).
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, double a, double b, double c);

/// True if the point lies inside (or on the boundary of) a convex CCW polygon.
bool point_in_convex(const std::vector<Point2>& poly, const Point2& pt, double tol = 1e-12);

/// Euclidean distance from a point to the polygon boundary (0 if on it).
double distance_to_boundary(const std::vector<Point2>& poly, const Point2& pt);

/// Signed distance convention used for dilation tests: negative inside,
/// positive outside.
double signed_distance(const std::vector<Point2>& poly, const Point2& pt);

double polygon_area(const std::vector<Point2>& poly);
double polygon_diameter(const std::vector<Point2>& poly);

/// Symmetric Hausdorff distance between two polygon boundaries, evaluated on
/// edges densified to at most `step` spacing.
double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b, double step);

}  // namespace flex
