#include "caplab/measures.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "caplab/summation.hpp"

namespace caplab {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, double resolution_h, std::string label)
    : atoms_(std::move(atoms)), resolution_h_(resolution_h), label_(std::move(label)) {
    if (!(resolution_h > 0.0) || !std::isfinite(resolution_h))
        throw std::invalid_argument("DiscreteMeasure: resolution_h must be positive and finite");
    for (const auto& a : atoms_) {
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("DiscreteMeasure: atom weights must be positive and finite");
        if (!std::isfinite(a.point.x) || !std::isfinite(a.point.y))
            throw std::invalid_argument("DiscreteMeasure: atom coordinates must be finite");
    }
}

std::vector<Point> DiscreteMeasure::points() const {
    std::vector<Point> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.point);
    return out;
}

std::vector<double> DiscreteMeasure::weights() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.weight);
    return out;
}

DiscreteMeasure DiscreteMeasure::with_weights(std::span<const double> weights) const {
    if (weights.size() != atoms_.size())
        throw std::invalid_argument("with_weights: weight count does not match atom count");
    std::vector<Atom> next = atoms_;
    for (std::size_t i = 0; i < next.size(); ++i) next[i].weight = weights[i];
    return DiscreteMeasure(std::move(next), resolution_h_, label_);
}

DiscreteMeasure DiscreteMeasure::with_label(std::string label) const {
    return DiscreteMeasure(atoms_, resolution_h_, std::move(label));
}

double total_mass(const DiscreteMeasure& mu) {
    const auto w = mu.weights();
    return pairwise_sum(w);
}

DiscreteMeasure restrict(const DiscreteMeasure& mu, const Disc& b) {
    std::vector<Atom> kept;
    for (const auto& a : mu.atoms())
        if (b.contains(a.point)) kept.push_back(a);
    return DiscreteMeasure(std::move(kept), mu.resolution_h(), mu.label());
}

DiscreteMeasure scale(const DiscreteMeasure& mu, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("scale: factor must be positive");
    std::vector<Atom> next = mu.atoms();
    for (auto& a : next) a.weight *= t;
    return DiscreteMeasure(std::move(next), mu.resolution_h(), mu.label());
}

DiscreteMeasure add(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (nu.empty()) return mu;
    if (mu.empty()) return nu.with_label(mu.label().empty() ? nu.label() : mu.label());
    std::vector<Atom> atoms = mu.atoms();
    atoms.insert(atoms.end(), nu.atoms().begin(), nu.atoms().end());
    return DiscreteMeasure(std::move(atoms), std::min(mu.resolution_h(), nu.resolution_h()), mu.label());
}

DiscreteMeasure transform(const DiscreteMeasure& mu, double rotation, double dilation, Point shift,
                          double weight_factor) {
    if (!(dilation > 0.0)) throw std::invalid_argument("transform: dilation must be positive");
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    std::vector<Atom> next = mu.atoms();
    for (auto& a : next) {
        const Point p = a.point;
        a.point = Point{dilation * (c * p.x - s * p.y), dilation * (s * p.x + c * p.y)} + shift;
        a.weight *= weight_factor;
    }
    return DiscreteMeasure(std::move(next), dilation * mu.resolution_h(), mu.label());
}

DiscreteMeasure arc_length_measure(const CircleArc& arc, int n_atoms, std::string label) {
    if (n_atoms < 1) throw std::invalid_argument("arc_length_measure: n_atoms must be >= 1");
    const double w = arc.length() / n_atoms;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(n_atoms));
    if (arc.is_full_circle()) {
        const double step = arc.sweep() / n_atoms;
        for (int k = 0; k < n_atoms; ++k) atoms.push_back({arc.point_at(arc.start_angle() + k * step), w});
        return DiscreteMeasure(std::move(atoms), arc.radius() * step, std::move(label));
    }
    if (n_atoms == 1) {
        atoms.push_back({arc.point_at(arc.start_angle() + arc.sweep() / 2), w});
        return DiscreteMeasure(std::move(atoms), arc.length(), std::move(label));
    }
    const double step = arc.sweep() / (n_atoms - 1);
    for (int k = 0; k < n_atoms; ++k) atoms.push_back({arc.point_at(arc.start_angle() + k * step), w});
    return DiscreteMeasure(std::move(atoms), arc.radius() * step, std::move(label));
}

DiscreteMeasure arc_length_measure(const Segment& seg, int n_atoms, std::string label) {
    if (n_atoms < 1) throw std::invalid_argument("arc_length_measure: n_atoms must be >= 1");
    const double len = seg.length();
    if (!(len > 0.0)) throw std::invalid_argument("arc_length_measure: degenerate segment");
    const double w = len / n_atoms;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(n_atoms));
    if (n_atoms == 1) {
        atoms.push_back({seg.a + 0.5 * (seg.b - seg.a), w});
        return DiscreteMeasure(std::move(atoms), len, std::move(label));
    }
    for (int k = 0; k < n_atoms; ++k) {
        const double t = static_cast<double>(k) / (n_atoms - 1);
        atoms.push_back({seg.a + t * (seg.b - seg.a), w});
    }
    return DiscreteMeasure(std::move(atoms), len / (n_atoms - 1), std::move(label));
}

namespace {

struct RowBest {
    double ratio = 0.0;
    double radius = 0.0;
};

// Scan one center's neighbours in increasing distance order.
template <class IndexAt, class DistAt>
RowBest scan_row(std::size_t n, double h, std::span<const double> weights, IndexAt index_at, DistAt dist_at) {
    double mass = 0.0;
    RowBest best{0.0, h};
    std::size_t k = 0;
    while (k < n && dist_at(k) <= h * (1.0 + kScaleSlack)) mass += weights[index_at(k++)];
    best.ratio = mass / h;
    while (k < n) {
        const double r = dist_at(k);
        while (k < n && dist_at(k) == r) mass += weights[index_at(k++)];
        if (mass / r > best.ratio) best = {mass / r, r};
    }
    return best;
}

void sorted_neighbours(std::span<const Point> pts, std::size_t p, std::uint32_t* order, double* dist) {
    const std::size_t n = pts.size();
    std::vector<double> d(n);
    for (std::size_t q = 0; q < n; ++q) d[q] = distance(pts[p], pts[q]);
    std::iota(order, order + n, 0u);
    std::stable_sort(order, order + n, [&](std::uint32_t a, std::uint32_t b) { return d[a] < d[b]; });
    for (std::size_t k = 0; k < n; ++k) dist[k] = d[order[k]];
}

GrowthReport pick_best(std::span<const Point> pts, const std::vector<RowBest>& rows) {
    std::size_t arg = 0;
    for (std::size_t p = 1; p < rows.size(); ++p)
        if (rows[p].ratio > rows[arg].ratio) arg = p;
    return {rows[arg].ratio, Disc{pts[arg], rows[arg].radius}};
}

}  // namespace

GrowthEvaluator::GrowthEvaluator(std::span<const Point> points, double resolution_h)
    : points_(points.begin(), points.end()), h_(resolution_h) {
    if (points_.empty()) throw std::invalid_argument("growth_constant: empty measure");
    const std::size_t n = points_.size();
    order_.resize(n * n);
    dist_.resize(n * n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
        const auto p = static_cast<std::size_t>(pi);
        sorted_neighbours(points_, p, order_.data() + p * n, dist_.data() + p * n);
    }
}

GrowthReport GrowthEvaluator::evaluate(std::span<const double> weights) const {
    const std::size_t n = points_.size();
    if (weights.size() != n) throw std::invalid_argument("GrowthEvaluator: weight count mismatch");
    std::vector<RowBest> rows(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
        const auto p = static_cast<std::size_t>(pi);
        const std::uint32_t* row = order_.data() + p * n;
        const double* drow = dist_.data() + p * n;
        rows[p] = scan_row(n, h_, weights, [&](std::size_t k) { return row[k]; },
                           [&](std::size_t k) { return drow[k]; });
    }
    return pick_best(points_, rows);
}

GrowthReport growth_constant(const DiscreteMeasure& mu) {
    if (mu.empty()) throw std::invalid_argument("growth_constant: empty measure");
    const auto pts = mu.points();
    const auto w = mu.weights();
    const std::size_t n = pts.size();
    std::vector<RowBest> rows(n);
#pragma omp parallel
    {
        std::vector<std::uint32_t> order(n);
        std::vector<double> dist(n);
#pragma omp for schedule(static)
        for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
            const auto p = static_cast<std::size_t>(pi);
            sorted_neighbours(pts, p, order.data(), dist.data());
            rows[p] = scan_row(n, mu.resolution_h(), w, [&](std::size_t k) { return order[k]; },
                               [&](std::size_t k) { return dist[k]; });
        }
    }
    return pick_best(pts, rows);
}

}  // namespace caplab
