#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace caplab {

/// A point of the complex plane stored as a coordinate pair.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point a, Point b) = default;
};

inline double distance_sq(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// The one distance routine used by every truncation predicate in the library.
inline double distance(Point a, Point b) { return std::sqrt(distance_sq(a, b)); }

/// Relative slack of the scale predicates (truncation radii, the smallest
/// growth radius). Regular samples put many pairs exactly at these scales;
/// the slack keeps their classification stable under rigid motions.
inline constexpr double kScaleSlack = 1e-9;

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

/// Closed disc D(center, radius). A zero radius is tolerated only as the
/// degenerate result of smallest_enclosing_disc on a single point.
struct Disc {
    Point center;
    double radius = 0.0;

    bool contains(Point p) const { return distance_sq(p, center) <= radius * radius; }
    Disc dilated(double factor) const { return {center, factor * radius}; }
};

/// Circular arc from start_angle to end_angle (counter-clockwise), 0 < sweep <= 2*pi.
class CircleArc {
public:
    CircleArc(Point center, double radius, double start_angle, double end_angle);

    static CircleArc full_circle(Point center, double radius) {
        return CircleArc(center, radius, 0.0, 2.0 * std::numbers::pi);
    }

    Point center() const { return center_; }
    double radius() const { return radius_; }
    double start_angle() const { return start_; }
    double end_angle() const { return end_; }
    double sweep() const { return end_ - start_; }
    double length() const { return radius_ * sweep(); }
    bool is_full_circle() const { return sweep() >= 2.0 * std::numbers::pi; }
    Point point_at(double angle) const {
        return {center_.x + radius_ * std::cos(angle), center_.y + radius_ * std::sin(angle)};
    }

private:
    Point center_;
    double radius_;
    double start_;
    double end_;
};

/// Straight segment [a, b].
struct Segment {
    Point a;
    Point b;
    double length() const { return distance(a, b); }
};

/// Polyline with its arc-length parametrisation.
class ChordArcCurve {
public:
    explicit ChordArcCurve(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<double>& cumulative_arclength() const { return arclength_; }
    double length() const { return arclength_.back(); }

private:
    std::vector<Point> vertices_;
    std::vector<double> arclength_;
};

/// 1/R^2 for the circle through a, b, c, evaluated as 16*Area^2/(|ab|^2|bc|^2|ca|^2).
/// Collinear triples give 0 continuously; coincident points give exactly 0.
/// The arguments are put in lexicographic order first, so the value is
/// bit-identical under all permutations.
double circumradius_inv_sq(Point a, Point b, Point c);

/// max over vertex pairs of arclength / chord. Returns +infinity when two
/// distinct parameters map to the same point.
double chord_arc_constant(const ChordArcCurve& curve);

/// True iff |c_j - c_k| > lambda (r_j + r_k) for all j != k.
bool lambda_separated(std::span<const Disc> discs, double lambda);

/// Exact length of the part of `arc` inside the closed disc `b`.
double circle_disc_intersection_length(const CircleArc& arc, const Disc& b);

/// Minimal enclosing disc (randomised incremental construction, fixed seed).
/// A single point yields a radius-0 disc.
Disc smallest_enclosing_disc(std::span<const Point> points);

struct AdRegularityEstimate {
    double lower = 0.0;  ///< min over samples of H^1(G ∩ D(x,r)) / r
    double upper = 0.0;  ///< max over samples
};

/// Two-sided Ahlfors-David ratio estimate for G = union of arcs, evaluated on
/// every (center, radius) combination.
AdRegularityEstimate ad_regularity_estimate(std::span<const CircleArc> arcs,
                                            std::span<const Point> sample_centers,
                                            std::span<const double> radii);

}  // namespace caplab
