#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "caplab/geometry.hpp"

namespace caplab {

struct Atom {
    Point point;
    double weight = 0.0;
};

/// Finite positive atomic measure approximating a continuum measure at mesh
/// scale `resolution_h`. Immutable after construction.
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<Atom> atoms, double resolution_h, std::string label = {});

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    double resolution_h() const { return resolution_h_; }
    const std::string& label() const { return label_; }

    std::vector<Point> points() const;
    std::vector<double> weights() const;

    /// Same support, new weights (must be positive, one per atom).
    DiscreteMeasure with_weights(std::span<const double> weights) const;
    DiscreteMeasure with_label(std::string label) const;

private:
    std::vector<Atom> atoms_;
    double resolution_h_;
    std::string label_;
};

double total_mass(const DiscreteMeasure& mu);

/// mu restricted to the closed disc b (boundary atoms kept).
DiscreteMeasure restrict(const DiscreteMeasure& mu, const Disc& b);

/// Weights multiplied by t > 0.
DiscreteMeasure scale(const DiscreteMeasure& mu, double t);

/// Union of atom lists; resolution is the finer of the two. An empty operand
/// contributes nothing.
DiscreteMeasure add(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Pushforward under z -> s z + shift combined with weights * weight_factor.
DiscreteMeasure transform(const DiscreteMeasure& mu, double rotation, double dilation, Point shift,
                          double weight_factor = 1.0);

/// n equally spaced atoms of equal weight, total mass = arc length.
/// Closed circles use nodes start + k*step (h = step); open arcs and segments
/// include both endpoints (h = length/(n-1)); a single atom sits at the middle.
DiscreteMeasure arc_length_measure(const CircleArc& arc, int n_atoms, std::string label = {});
DiscreteMeasure arc_length_measure(const Segment& seg, int n_atoms, std::string label = {});

struct GrowthReport {
    double growth_constant = 0.0;
    Disc witness_disc;
};

/// Precomputed neighbour orderings for repeated growth evaluations on a fixed
/// support with varying weights.
class GrowthEvaluator {
public:
    GrowthEvaluator(std::span<const Point> points, double resolution_h);

    /// max over centers p in the support and radii r in {max(h, |p-q|)} of
    /// mu(D(p,r)) / r.
    GrowthReport evaluate(std::span<const double> weights) const;

private:
    std::vector<Point> points_;
    double h_;
    std::vector<std::uint32_t> order_;  // row p: neighbour indices sorted by distance
    std::vector<double> dist_;          // row p: matching distances
};

/// Linear-growth constant relative to resolution_h. Throws on an empty measure.
GrowthReport growth_constant(const DiscreteMeasure& mu);

}  // namespace caplab
