#include "caplab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "caplab/cauchy.hpp"
#include "caplab/curvature.hpp"
#include "caplab/summation.hpp"

namespace caplab {

const char* to_string(LowerMethod m) {
    switch (m) {
        case LowerMethod::curvature_f61: return "curvature_f61";
        case LowerMethod::opnorm_gop: return "opnorm_gop";
        case LowerMethod::exact_model: return "exact_model";
    }
    return "unknown";
}

const char* to_string(UpperMethod m) {
    return m == UpperMethod::enclosing_disc ? "enclosing_disc" : "exact_model";
}

ModelShape ModelShape::parse(const std::string& kind, double size) {
    if (kind == "disc") return {Kind::disc, size};
    if (kind == "segment") return {Kind::segment, size};
    if (kind == "circle") return {Kind::circle, size};
    throw std::invalid_argument("exact_capacity_model: no model for shape '" + kind + "'");
}

ModelCapacity exact_capacity_model(const ModelShape& shape) {
    if (!(shape.size > 0.0)) throw std::invalid_argument("exact_capacity_model: size must be positive");
    switch (shape.kind) {
        case ModelShape::Kind::disc: return {shape.size, false};
        case ModelShape::Kind::segment: return {shape.size / 4.0, false};
        case ModelShape::Kind::circle: return {2.0 * std::numbers::pi * shape.size / 4.0, true};
    }
    throw std::invalid_argument("exact_capacity_model: unknown shape");
}

LowerBoundResult lower_bound_curvature(const DiscreteMeasure& sample, const CurvatureBoundOptions& opts) {
    if (sample.empty()) throw std::invalid_argument("lower_bound_curvature: empty sample");
    if (opts.iterations < 0) throw std::invalid_argument("lower_bound_curvature: iterations must be >= 0");
    const auto pts = sample.points();
    const std::size_t n = pts.size();
    const GrowthEvaluator growth(pts, sample.resolution_h());

    std::vector<double> w(n, 1.0);
    double best = -1.0;
    double best_t = 0.0;
    std::vector<double> best_w;
    int done = 0;
    for (int it = 0;; ++it) {
        const auto cg = c2_with_gradient(pts, w, opts.triple_budget);
        const double mass = pairwise_sum(w);
        const double g = growth.evaluate(w).growth_constant;
        double t = 1.0 / g;
        if (cg.value > 0.0) t = std::min(t, std::sqrt(mass / cg.value));
        if (t * mass > best) {
            best = t * mass;
            best_t = t;
            best_w = w;
        }
        done = it;
        if (it == opts.iterations) break;
        const double mean = pairwise_sum(cg.gradient) / static_cast<double>(n);
        if (!(mean > 0.0)) break;  // curvature-free support: updates cannot help
        for (std::size_t i = 0; i < n; ++i) w[i] *= std::exp(-opts.step * cg.gradient[i] / mean);
        // Keep the scale near 1; the rescaling step makes the functional scale-free.
        const double s = static_cast<double>(n) / pairwise_sum(w);
        for (auto& x : w) x *= s;
    }

    for (auto& x : best_w) x *= best_t;
    LowerBoundResult out{kCurvatureMethodConstant * best, best, sample.with_weights(best_w), done};
    return out;
}

LowerBoundResult lower_bound_opnorm(const DiscreteMeasure& sample, const OpnormBoundOptions& opts,
                                    std::optional<std::vector<double>> weights) {
    if (sample.empty()) throw std::invalid_argument("lower_bound_opnorm: empty sample");
    std::vector<double> w = weights ? std::move(*weights) : std::vector<double>(sample.size(), 1.0);
    const DiscreteMeasure mu = sample.with_weights(w);
    const double diam = support_diameter(mu);
    std::vector<double> grid = opts.eps_grid;
    if (grid.empty()) grid = decade_grid(mu.resolution_h(), std::max(diam, mu.resolution_h()));
    const auto profile = truncation_norm_profile(mu, grid, opts.tol, opts.max_iter, opts.seed);
    const double g = growth_constant(mu).growth_constant;
    double t = 1.0 / g;
    if (profile.sup_norm > 0.0) t = std::min(t, 1.0 / profile.sup_norm);
    const double mass = total_mass(mu);
    for (auto& x : w) x *= t;
    return {kOpnormMethodConstant * t * mass, t * mass, sample.with_weights(w), 0};
}

double upper_bound(const DiscreteMeasure& sample) {
    if (sample.empty()) throw std::invalid_argument("upper_bound: empty sample");
    const auto pts = sample.points();
    return smallest_enclosing_disc(pts).radius;
}

namespace {

struct SetBounds {
    double lower = 0.0;
    double upper = 0.0;
};

SetBounds bounds_of(const DiscreteMeasure& piece, const CurvatureBoundOptions& opts) {
    if (piece.empty()) return {};
    return {lower_bound_curvature(piece, opts).bound, upper_bound(piece)};
}

double ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace

CapacityProfile capacity_profile(std::span<const DiscreteMeasure> parts, std::span<const Disc> discs,
                                 const CurvatureBoundOptions& opts) {
    if (parts.empty()) throw std::invalid_argument("capacity_profile: no parts");
    CapacityProfile out;
    for (std::size_t b = 0; b < discs.size(); ++b) {
        DiscreteMeasure joint({}, parts.front().resolution_h());
        double sum_lower = 0.0, sum_upper = 0.0;
        std::vector<ProfileRow> part_rows;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            const DiscreteMeasure piece = restrict(parts[j], discs[b]);
            const SetBounds sb = bounds_of(piece, opts);
            part_rows.push_back({b, static_cast<int>(j), piece.size(), total_mass(piece), sb.lower, sb.upper});
            sum_lower += sb.lower;
            sum_upper += sb.upper;
            joint = add(joint, piece);
        }
        const SetBounds all = bounds_of(joint, opts);
        const double mass = total_mass(joint);
        out.rows.push_back({b, -1, joint.size(), mass, all.lower, all.upper});
        out.rows.insert(out.rows.end(), part_rows.begin(), part_rows.end());
        // Certified ratios grow the enclosing radius by h/2: each atom stands for a cell of diameter h.
        const double upper = all.upper + joint.resolution_h() / 2;
        out.summaries.push_back({b, ratio(mass, upper), ratio(mass, all.lower), ratio(sum_lower, upper),
                                 ratio(sum_upper, all.lower)});
    }
    return out;
}

void write_profile_csv(std::ostream& out, const CapacityProfile& profile) {
    out << "disc,part,atoms,mass,lower_curvature_f61,upper_enclosing_disc\n";
    out.precision(17);
    for (const auto& r : profile.rows) {
        out << r.disc_index << ',' << (r.part < 0 ? std::string("union") : std::to_string(r.part)) << ','
            << r.atoms << ',' << r.mass << ',' << r.lower << ',' << r.upper << '\n';
    }
}

}  // namespace caplab
