#include "caplab/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

#include "caplab/summation.hpp"

namespace caplab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool lex_less(Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

double interval_overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

CircleArc::CircleArc(Point center, double radius, double start_angle, double end_angle)
    : center_(center), radius_(radius), start_(start_angle), end_(end_angle) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("CircleArc: radius must be positive and finite");
    const double sweep = end_angle - start_angle;
    if (!(sweep > 0.0) || sweep > kTwoPi * (1.0 + 1e-15))
        throw std::invalid_argument("CircleArc: sweep must lie in (0, 2*pi]");
}

ChordArcCurve::ChordArcCurve(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw std::invalid_argument("ChordArcCurve: need at least 2 vertices");
    arclength_.reserve(vertices_.size());
    arclength_.push_back(0.0);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const double seg = distance(vertices_[i - 1], vertices_[i]);
        if (seg == 0.0) throw std::invalid_argument("ChordArcCurve: consecutive vertices coincide");
        arclength_.push_back(arclength_.back() + seg);
    }
}

double circumradius_inv_sq(Point a, Point b, Point c) {
    // Sorting network on three elements fixes the evaluation order.
    if (lex_less(b, a)) std::swap(a, b);
    if (lex_less(c, b)) std::swap(b, c);
    if (lex_less(b, a)) std::swap(a, b);

    const double ab = distance_sq(a, b);
    const double bc = distance_sq(b, c);
    const double ca = distance_sq(c, a);
    if (ab == 0.0 || bc == 0.0 || ca == 0.0) return 0.0;
    // 16 Area^2 = 4 cross^2
    const double cr = cross(b - a, c - a);
    return 4.0 * cr * cr / (ab * bc * ca);
}

double chord_arc_constant(const ChordArcCurve& curve) {
    const auto& v = curve.vertices();
    const auto& s = curve.cumulative_arclength();
    double worst = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double chord = distance(v[i], v[j]);
            if (chord == 0.0) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, (s[j] - s[i]) / chord);
        }
    }
    return worst;
}

bool lambda_separated(std::span<const Disc> discs, double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda_separated: lambda must exceed 1");
    for (std::size_t j = 0; j < discs.size(); ++j) {
        for (std::size_t k = j + 1; k < discs.size(); ++k) {
            const double gap = distance(discs[j].center, discs[k].center);
            if (!(gap > lambda * (discs[j].radius + discs[k].radius))) return false;
        }
    }
    return true;
}

double circle_disc_intersection_length(const CircleArc& arc, const Disc& b) {
    const double rho = arc.radius();
    const double big_r = b.radius;
    if (!(big_r > 0.0)) return 0.0;
    const double d = distance(arc.center(), b.center);
    if (d + rho <= big_r) return arc.length();
    if (d >= rho + big_r || rho >= d + big_r) return 0.0;

    const double cos_half = std::clamp((rho * rho + d * d - big_r * big_r) / (2.0 * rho * d), -1.0, 1.0);
    const double half = std::acos(cos_half);
    const double phi = std::atan2(b.center.y - arc.center().y, b.center.x - arc.center().x);

    double u = std::fmod(phi - half - arc.start_angle(), kTwoPi);
    if (u < 0.0) u += kTwoPi;
    const double sweep = arc.sweep();
    const double angle = interval_overlap(0.0, sweep, u, u + 2.0 * half) +
                         interval_overlap(0.0, sweep, u - kTwoPi, u - kTwoPi + 2.0 * half);
    return rho * std::min(angle, sweep);
}

namespace {

bool in_disc(const Disc& d, Point p) {
    const double tol = 1e-12 * std::max(d.radius, 1e-300);
    return distance(p, d.center) <= d.radius + tol;
}

Disc diameter_disc(Point a, Point b) {
    return {0.5 * (a + b), 0.5 * distance(a, b)};
}

Disc circum_disc(Point a, Point b, Point c) {
    const Point ab = b - a;
    const Point ac = c - a;
    const double den = 2.0 * cross(ab, ac);
    const double ab2 = ab.x * ab.x + ab.y * ab.y;
    const double ac2 = ac.x * ac.x + ac.y * ac.y;
    if (den == 0.0 || !std::isfinite(1.0 / den)) {
        // (near-)collinear: the farthest pair spans the disc
        Disc best = diameter_disc(a, b);
        for (Disc cand : {diameter_disc(a, c), diameter_disc(b, c)})
            if (cand.radius > best.radius) best = cand;
        return best;
    }
    const Point off{(ac.y * ab2 - ab.y * ac2) / den, (ab.x * ac2 - ac.x * ab2) / den};
    const Point center = a + off;
    const double r = std::max({distance(center, a), distance(center, b), distance(center, c)});
    return {center, r};
}

}  // namespace

Disc smallest_enclosing_disc(std::span<const Point> points) {
    if (points.empty()) throw std::invalid_argument("smallest_enclosing_disc: empty point set");
    std::vector<Point> p(points.begin(), points.end());
    std::uint64_t state = 0x5eedC0FFEEULL;
    for (std::size_t i = p.size(); i > 1; --i) {
        const std::size_t j = splitmix64(state) % i;
        std::swap(p[i - 1], p[j]);
    }

    Disc d{p[0], 0.0};
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (in_disc(d, p[i])) continue;
        d = {p[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (in_disc(d, p[j])) continue;
            d = diameter_disc(p[i], p[j]);
            for (std::size_t k = 0; k < j; ++k) {
                if (in_disc(d, p[k])) continue;
                d = circum_disc(p[i], p[j], p[k]);
            }
        }
    }
    return d;
}

namespace {

bool lies_on_arc(const CircleArc& arc, Point p) {
    const double tol = 1e-9 * (1.0 + arc.radius());
    if (std::abs(distance(p, arc.center()) - arc.radius()) > tol) return false;
    if (arc.is_full_circle()) return true;
    double t = std::atan2(p.y - arc.center().y, p.x - arc.center().x) - arc.start_angle();
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    const double angle_tol = tol / arc.radius();
    return t <= arc.sweep() + angle_tol || t >= kTwoPi - angle_tol;
}

}  // namespace

AdRegularityEstimate ad_regularity_estimate(std::span<const CircleArc> arcs,
                                            std::span<const Point> sample_centers,
                                            std::span<const double> radii) {
    if (sample_centers.empty() || radii.empty())
        throw std::invalid_argument("ad_regularity_estimate: empty sample");
    if (arcs.empty()) throw std::invalid_argument("ad_regularity_estimate: no arcs");
    AdRegularityEstimate out{std::numeric_limits<double>::infinity(), 0.0};
    for (Point x : sample_centers) {
        const bool on_support = std::any_of(arcs.begin(), arcs.end(),
                                            [&](const CircleArc& a) { return lies_on_arc(a, x); });
        if (!on_support)
            throw std::invalid_argument("ad_regularity_estimate: sample center is not on the arcs");
        for (double r : radii) {
            if (!(r > 0.0)) throw std::invalid_argument("ad_regularity_estimate: radii must be positive");
            double len = 0.0;
            for (const auto& a : arcs) len += circle_disc_intersection_length(a, Disc{x, r});
            const double ratio = len / r;
            out.lower = std::min(out.lower, ratio);
            out.upper = std::max(out.upper, ratio);
        }
    }
    return out;
}

}  // namespace caplab
