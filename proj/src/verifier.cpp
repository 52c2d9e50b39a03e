#include "caplab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <cstdio>
#include <stdexcept>

#include "caplab/capacity.hpp"
#include "caplab/cauchy.hpp"
#include "caplab/curvature.hpp"
#include "caplab/summation.hpp"

namespace caplab {

namespace {

/// Runs fn(i) for i in [0, n) on the OpenMP team; rethrows the exception of
/// the lowest failing index after the loop.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double log_uniform(std::uint64_t& state, double lo, double hi) {
    return lo * std::pow(hi / lo, unit_interval(splitmix64(state)));
}

double band_ratio(const std::vector<double>& v) {
    if (v.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::vector<double> part_masses(const BeadChain& chain) {
    std::vector<double> m;
    for (const auto& p : chain.parts) m.push_back(total_mass(p));
    return m;
}

std::vector<double> disc_radii(const BeadChain& chain) {
    std::vector<double> r;
    for (const auto& d : chain.discs) r.push_back(d.radius);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

MarcinkiewiczSums marcinkiewicz_sums(std::span<const double> radii, std::span<const double> masses) {
    if (radii.size() != masses.size()) throw std::invalid_argument("marcinkiewicz_sums: size mismatch");
    auto one_side = [](std::span<const double> r, std::span<const double> m) {
        std::vector<double> terms;
        for (std::size_t j = 0; j + 1 < r.size(); ++j) {
            double span_len = r[j];
            double inner = 0.0;
            for (std::size_t k = j + 1; k < r.size(); ++k) {
                span_len += r[k];
                inner += m[k] * m[k] / (span_len * span_len);
            }
            terms.push_back(m[j] * inner);
        }
        return pairwise_sum(terms);
    };
    std::vector<double> rr(radii.rbegin(), radii.rend()), mr(masses.rbegin(), masses.rend());
    return {one_side(radii, masses), one_side(rr, mr), pairwise_sum(masses)};
}

ExperimentResult marcinkiewicz_check(const BeadChain& chain) {
    if (chain.discs.size() < 2) throw std::invalid_argument("marcinkiewicz_check: need at least 2 discs");
    const auto r = disc_radii(chain);
    const auto m = part_masses(chain);
    const auto s = marcinkiewicz_sums(r, m);
    ExperimentResult out;
    out.name = "marcinkiewicz_check";
    out.columns = {"n", "s1", "s2", "total_mass"};
    out.add_row(Json::array({r.size(), s.s1, s.s2, s.total_mass}));
    out.summary["s1_over_mass"] = s.s1 / s.total_mass;
    out.summary["s2_over_mass"] = s.s2 / s.total_mass;
    out.check("s1_bound", s.s1 <= s.total_mass, fmt(s.s1) + " <= " + fmt(s.total_mass));
    out.check("s2_bound", s.s2 <= s.total_mass, fmt(s.s2) + " <= " + fmt(s.total_mass));
    return out;
}

// ---------------------------------------------------------------------------

CrossRatio cross_ratio(const BeadChain& chain, const MainLemmaOptions& opts) {
    for (std::size_t j = 0; j < chain.parts.size(); ++j) {
        const double m = total_mass(chain.parts[j]);
        if (m > chain.discs[j].radius * (1.0 + 1e-12))
            throw std::invalid_argument("cross_ratio: part " + std::to_string(j) + " has mass " + fmt(m) +
                                        " above its disc radius " + fmt(chain.discs[j].radius));
    }
    const DiscreteMeasure mu = chain.measure();
    const auto labels = chain.part_labels();
    const double n = static_cast<double>(mu.size());
    const CurvatureReport rep = n * n * n <= opts.exact_triple_budget
                                    ? c2_cross_exact(mu, labels, opts.exact_triple_budget)
                                    : c2_cross_monte_carlo(mu, labels, opts.mc_samples, opts.seed);
    const double mass = total_mass(mu);
    return {rep.value, mass, rep.value / mass, rep.estimator, rep.std_error / mass};
}

ExperimentResult main_lemma_check(const BeadChain& chain, const MainLemmaOptions& opts) {
    const CrossRatio cr = cross_ratio(chain, opts);
    ExperimentResult out;
    out.name = "main_lemma_check";
    out.columns = {"n", "cross", "mass", "rho", "estimator", "rho_std_error"};
    out.add_row(Json::array({chain.discs.size(), cr.cross, cr.mass, cr.rho, to_string(cr.estimator), cr.std_error}));
    out.summary["rho"] = cr.rho;
    out.check("rho_nonnegative", cr.rho >= 0.0, "rho = " + fmt(cr.rho));
    return out;
}

// ---------------------------------------------------------------------------

GoodIndexReport good_index_values(std::span<const Disc> discs, double lambda, std::span<const double> gamma) {
    if (discs.size() != gamma.size()) throw std::invalid_argument("good_index_values: one gamma per disc");
    const double lp = lambda_prime(lambda);
    const std::size_t n = discs.size();
    GoodIndexReport rep;
    rep.g.assign(n, 0.0);
    std::vector<double> geo(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> terms, geo_terms;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double gap =
                distance(discs[i].center, discs[j].center) - lp * (discs[i].radius + discs[j].radius);
            if (!(gap > 0.0))
                throw std::invalid_argument("good_index_values: dilated discs " + std::to_string(i) + " and " +
                                            std::to_string(j) + " overlap");
            terms.push_back(discs[j].radius * gamma[j] / (gap * gap));
            geo_terms.push_back(discs[j].radius / (gap * gap));
        }
        rep.g[i] = pairwise_sum(terms);
        geo[i] = discs[i].radius * pairwise_sum(geo_terms);
    }
    std::vector<double> weighted(n);
    for (std::size_t i = 0; i < n; ++i) weighted[i] = rep.g[i] * gamma[i];
    const double total = pairwise_sum(gamma);
    rep.fitted_a0 = total > 0.0 ? pairwise_sum(weighted) / total : 0.0;
    rep.geometric_a0 = n ? *std::max_element(geo.begin(), geo.end()) : 0.0;
    return rep;
}

std::vector<std::size_t> good_indices(const GoodIndexReport& report, double a0) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < report.g.size(); ++i)
        if (report.g[i] <= 10.0 * a0) out.push_back(i);
    return out;
}

double retention(std::span<const double> gamma, std::span<const std::size_t> indices) {
    const double total = pairwise_sum(gamma);
    if (!(total > 0.0)) return 1.0;
    std::vector<double> kept;
    for (std::size_t i : indices) kept.push_back(gamma[i]);
    return pairwise_sum(kept) / total;
}

ExperimentResult good_index_selection(const BeadChain& chain) {
    for (double g : chain.part_gamma)
        if (!std::isfinite(g)) throw std::invalid_argument("good_index_selection: capacities of the parts are unknown");
    const auto rep = good_index_values(chain.discs, chain.lambda, chain.part_gamma);
    const double fitted = retention(chain.part_gamma, good_indices(rep, rep.fitted_a0));
    const double geometric = retention(chain.part_gamma, good_indices(rep, rep.geometric_a0));
    ExperimentResult out;
    out.name = "good_index_selection";
    out.columns = {"n", "fitted_a0", "geometric_a0", "retention_fitted", "retention_geometric"};
    out.add_row(Json::array({chain.discs.size(), rep.fitted_a0, rep.geometric_a0, fitted, geometric}));
    out.check("retention_fitted", fitted >= 0.9, fmt(fitted));
    out.check("retention_geometric", geometric >= 0.9, fmt(geometric));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Point> sample_centers(const DiscreteMeasure& mu, const DiscSamplerOptions& opts) {
    const auto pts = mu.points();
    std::vector<Point> centers;
    if (pts.size() >= opts.max_centers) {
        for (std::size_t i = 0; i < opts.max_centers; ++i) centers.push_back(pts[i * pts.size() / opts.max_centers]);
        return centers;
    }
    centers = pts;
    const std::size_t n = pts.size();
    const std::size_t pairs = n * (n - 1) / 2;
    const std::size_t room = opts.max_centers - centers.size();
    if (pairs <= room) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                centers.push_back({(pts[i].x + pts[j].x) / 2, (pts[i].y + pts[j].y) / 2});
        return centers;
    }
    std::uint64_t state = opts.seed;
    while (centers.size() < opts.max_centers) {
        const std::size_t i = splitmix64(state) % n;
        const std::size_t j = splitmix64(state) % n;
        if (i == j) continue;
        centers.push_back({(pts[i].x + pts[j].x) / 2, (pts[i].y + pts[j].y) / 2});
    }
    return centers;
}

std::vector<double> sample_radii(double h, double diameter, int per_decade) {
    std::vector<double> radii;
    if (per_decade < 1) throw std::invalid_argument("sample_discs: radii_per_decade must be >= 1");
    const double top = std::max(diameter, h);
    for (int k = 0;; ++k) {
        const double r = h * std::pow(10.0, static_cast<double>(k) / per_decade);
        if (r > top * (1.0 + 1e-12)) break;
        radii.push_back(r);
    }
    if (radii.back() < top * (1.0 - 1e-12)) radii.push_back(top);
    return radii;
}

std::uint64_t mix(std::uint64_t x) { return splitmix64(x); }

struct SetBound {
    double lower = 0.0;
    double upper = 0.0;
};

/// Lower bound for the capacity of the atoms `idx` (sorted) from a stride
/// subsample. Upper bound: the enclosing disc of all of them grown by h/2,
/// which covers the cells of diameter h the atoms stand for.
SetBound subset_bounds(const std::vector<Point>& pts, double h, std::vector<std::uint32_t> idx, std::size_t subsample) {
    std::vector<Point> all;
    all.reserve(idx.size());
    for (auto i : idx) all.push_back(pts[i]);
    const double upper = smallest_enclosing_disc(all).radius + h / 2;
    std::vector<Point> sub;
    if (idx.size() <= subsample) {
        sub = all;
    } else {
        for (std::size_t k = 0; k < subsample; ++k) sub.push_back(all[k * all.size() / subsample]);
    }
    double hs = h;
    if (sub.size() > 1) {
        std::vector<double> nn(sub.size(), std::numeric_limits<double>::infinity());
        for (std::size_t a = 0; a < sub.size(); ++a)
            for (std::size_t b = 0; b < sub.size(); ++b)
                if (a != b) nn[a] = std::min(nn[a], distance(sub[a], sub[b]));
        std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
        hs = std::max(h, nn[nn.size() / 2]);
    }
    std::vector<Atom> atoms;
    for (Point p : sub) atoms.push_back({p, 1.0});
    CurvatureBoundOptions o;
    o.iterations = 0;
    return {lower_bound_curvature(DiscreteMeasure(std::move(atoms), hs), o).bound, upper};
}

}  // namespace

std::vector<Disc> sample_discs(const DiscreteMeasure& mu, const DiscSamplerOptions& opts) {
    if (mu.empty()) return {};
    const auto centers = sample_centers(mu, opts);
    const auto radii = sample_radii(mu.resolution_h(), support_diameter(mu), opts.radii_per_decade);
    std::vector<Disc> out;
    out.reserve(centers.size() * radii.size());
    for (Point c : centers)
        for (double r : radii) out.push_back({c, r});
    return out;
}

ExperimentResult mainc_check(const DiscreteMeasure& measure, const DiscSamplerOptions& opts) {
    if (measure.empty()) throw std::invalid_argument("mainc_check: empty measure");
    if (opts.subsample < 3) throw std::invalid_argument("mainc_check: subsample must be >= 3");
    const auto pts = measure.points();
    const auto w = measure.weights();
    const auto centers = sample_centers(measure, opts);
    const auto radii = sample_radii(measure.resolution_h(), support_diameter(measure), opts.radii_per_decade);

    struct DiscValue {
        double mass = 0.0;
        SetBound bound;
    };
    std::vector<DiscValue> values(centers.size() * radii.size());
    std::map<std::pair<std::uint64_t, std::uint64_t>, SetBound> memo;
    std::vector<std::uint32_t> order(pts.size());
    std::vector<double> dist(pts.size());
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < pts.size(); ++i) dist[i] = distance(pts[i], centers[c]);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });
        std::size_t taken = 0;
        double mass = 0.0;
        std::uint64_t h1 = 0, h2 = 0;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            while (taken < order.size() && dist[order[taken]] <= radii[k]) {
                const auto i = order[taken++];
                mass += w[i];
                h1 += mix(i);
                h2 += mix(i ^ 0x5bd1e995u) * 0x9e3779b97f4a7c15ull;
            }
            DiscValue& v = values[c * radii.size() + k];
            v.mass = mass;
            if (taken == 0) continue;
            const auto key = std::make_pair(h1 ^ taken, h2);
            auto it = memo.find(key);
            if (it == memo.end()) {
                std::vector<std::uint32_t> idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(taken));
                std::sort(idx.begin(), idx.end());
                it = memo.emplace(key, subset_bounds(pts, measure.resolution_h(), std::move(idx), opts.subsample)).first;
            }
            v.bound = it->second;
        }
    }

    double c0 = 0.0, eval_estimate = 0.0, eval_certified = 0.0;
    std::size_t worst = 0;
    for (std::size_t d = 0; d < values.size(); d += 2) {
        const auto& v = values[d];
        if (v.mass > 0.0 && v.bound.lower > 0.0 && v.mass / v.bound.lower > c0) {
            c0 = v.mass / v.bound.lower;
            worst = d;
        }
    }
    std::size_t violations = 0;
    for (std::size_t d = 1; d < values.size(); d += 2) {
        const auto& v = values[d];
        if (v.mass == 0.0) continue;
        if (v.bound.lower > 0.0) eval_estimate = std::max(eval_estimate, v.mass / v.bound.lower);
        const double certified = v.bound.upper > 0.0 ? v.mass / v.bound.upper : std::numeric_limits<double>::infinity();
        eval_certified = std::max(eval_certified, certified);
        if (certified > c0) ++violations;
    }

    ExperimentResult out;
    out.name = "mainc_check";
    out.columns = {"disc", "center_x", "center_y", "radius", "mass", "lower", "upper", "split"};
    for (std::size_t c = 0; c < centers.size(); ++c)
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const std::size_t d = c * radii.size() + k;
            const auto& v = values[d];
            if (v.mass == 0.0) continue;
            out.add_row(Json::array({d, centers[c].x, centers[c].y, radii[k], v.mass, v.bound.lower, v.bound.upper,
                                     d % 2 == 0 ? "calibration" : "evaluation"}));
        }
    out.summary["discs"] = values.size();
    out.summary["distinct_sets"] = memo.size();
    out.summary["c0_calibration"] = c0;
    out.summary["c0_worst_disc"] = worst;
    out.summary["evaluation_max_estimate"] = eval_estimate;
    out.summary["evaluation_max_certified"] = eval_certified;
    out.summary["certified_violations"] = violations;
    out.check("c0_finite", std::isfinite(c0) && c0 > 0.0, "C0 = " + fmt(c0));
    out.check("no_certified_violation", violations == 0,
              std::to_string(violations) + " evaluation discs with mu(B) > C0 upper(B cap E)");
    return out;
}

// ---------------------------------------------------------------------------

ExperimentResult almost_additivity_check(const BeadChain& chain, const AlmostAdditivityOptions& opts) {
    const double sum_gamma = pairwise_sum(chain.part_gamma);
    if (!std::isfinite(sum_gamma))
        throw std::invalid_argument("almost_additivity_check: parts must be segments or circle arcs");
    CurvatureBoundOptions o;
    o.iterations = opts.iterations;
    const auto lb = lower_bound_curvature(chain.measure(), o);
    const double ratio = lb.bound / sum_gamma;
    ExperimentResult out;
    out.name = "almost_additivity_check";
    out.exploratory = opts.exploratory;
    out.columns = {"n", "lambda", "shape", "lower_union", "sum_gamma", "ratio", "gamma_exact"};
    out.add_row(Json::array({chain.discs.size(), chain.lambda, to_string(chain.shape), lb.bound, sum_gamma, ratio,
                             chain.gamma_exact}));
    out.summary["ratio"] = ratio;
    out.check("ratio_positive", ratio > 0.0, fmt(ratio));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<StageEnergy> stage_energies(const CornerFamily& family, int first_stage) {
    std::vector<StageEnergy> out;
    const double h = family.measure.resolution_h();
    for (int k = std::max(0, first_stage); k + 1 < static_cast<int>(family.nk.size()); ++k) {
        const Square& q = family.chosen[static_cast<std::size_t>(k)];
        std::vector<Atom> atoms;
        for (const auto& a : family.measure.atoms())
            if (q.contains(a.point)) atoms.push_back(a);
        const DiscreteMeasure mq(std::move(atoms), h);
        StageEnergy s;
        s.k = k;
        s.gap = family.nk[static_cast<std::size_t>(k) + 1] - family.nk[static_cast<std::size_t>(k)];
        s.atoms = mq.size();
        s.mass = total_mass(mq);
        const double diam = support_diameter(mq);
        if (diam > 0.0) {
            // Unit-diameter frame: positions and weights divided by diam; the energy scales by 1/diam.
            const DiscreteMeasure unit = transform(mq, 0.0, 1.0 / diam, {}, 1.0 / diam);
            s.energy = energy_of_one(build_cauchy(unit, 0.5 * h / diam)) * diam;
        }
        s.normalized = s.energy * std::pow(4.0, family.nk[static_cast<std::size_t>(k)]) / s.gap;
        s.norm_bound = s.mass > 0.0 ? std::sqrt(s.energy / s.mass) : 0.0;
        out.push_back(s);
    }
    return out;
}

ExperimentResult opnorm_divergence_ex1(std::span<const int> nk, std::span<const int> control_nk,
                                       const CornerFamilyOptions& opts) {
    if (nk.size() < 3) throw std::invalid_argument("opnorm_divergence_ex1: need N_0, N_1 and at least one more level");
    const auto div = stage_energies(david_semmes_ex1(nk, opts), 1);
    std::vector<StageEnergy> ctl;
    if (!control_nk.empty()) ctl = stage_energies(david_semmes_ex1(control_nk, opts), 1);

    ExperimentResult out;
    out.name = "opnorm_divergence_ex1";
    out.columns = {"family", "k", "gap", "atoms", "mass", "energy", "normalized", "norm_bound"};
    auto emit = [&](const char* fam, const std::vector<StageEnergy>& v) {
        for (const auto& s : v)
            out.add_row(Json::array({fam, s.k, s.gap, s.atoms, s.mass, s.energy, s.normalized, s.norm_bound}));
    };
    emit("divergent", div);
    emit("control", ctl);

    // The energy of each stage carries a factor c^3; the floor is stated for c = 1.
    const double c3 = opts.c * opts.c * opts.c;
    std::vector<double> normalized, bounds;
    for (const auto& s : div) {
        normalized.push_back(s.normalized / c3);
        bounds.push_back(s.norm_bound);
    }
    const double floor = 0.25;
    const double min_norm = *std::min_element(normalized.begin(), normalized.end());
    bool increasing = true;
    for (std::size_t i = 1; i < bounds.size(); ++i) increasing = increasing && bounds[i] > bounds[i - 1];
    out.summary["normalized_over_c3_min"] = min_norm;
    out.summary["normalized_band_ratio"] = band_ratio(normalized);
    out.summary["norm_bounds"] = bounds;
    out.check("normalized_above_floor", min_norm >= floor, "min energy 4^N_k / (gap c^3) = " + fmt(min_norm));
    out.check("energy_band", band_ratio(normalized) <= 3.0, "max/min = " + fmt(band_ratio(normalized)));
    out.check("norm_bound_increasing", increasing && bounds.size() >= 2, "strictly increasing over k");
    if (!ctl.empty()) {
        std::vector<double> cb;
        for (const auto& s : ctl) cb.push_back(s.norm_bound);
        out.summary["control_norm_bounds"] = cb;
        out.summary["control_band_ratio"] = band_ratio(cb);
        out.check("control_bounded", band_ratio(cb) <= 1.25, "control max/min = " + fmt(band_ratio(cb)));
        out.check("control_below_divergent", cb.back() < bounds.back(),
                  fmt(cb.back()) + " < " + fmt(bounds.back()));
    }
    return out;
}

// ---------------------------------------------------------------------------

IndependenceReport independence_constant(std::span<const DiscreteMeasure> parts, const IndependenceOptions& opts) {
    if (parts.empty()) throw std::invalid_argument("independence_constant: no parts");
    DiscreteMeasure joint({}, parts.front().resolution_h());
    for (const auto& p : parts) joint = add(joint, p);
    const double diam = support_diameter(joint);
    const auto grid = decade_grid(joint.resolution_h(), std::max(diam, joint.resolution_h()));
    IndependenceReport rep;
    rep.part_norms.resize(parts.size());
    parallel_for(parts.size(), [&](std::size_t j) {
        rep.part_norms[j] = truncation_norm_profile(parts[j], grid, opts.tol, opts.max_iter, opts.seed).sup_norm;
    });
    rep.max_part_norm = *std::max_element(rep.part_norms.begin(), rep.part_norms.end());
    rep.joint_norm = truncation_norm_profile(joint, grid, opts.tol, opts.max_iter, opts.seed).sup_norm;
    rep.ratio = rep.max_part_norm > 0.0 ? rep.joint_norm / rep.max_part_norm : 0.0;
    return rep;
}

ExperimentResult cauchy_independence_check(std::span<const DiscreteMeasure> parts, const IndependenceOptions& opts) {
    const auto rep = independence_constant(parts, opts);
    ExperimentResult out;
    out.name = "cauchy_independence_check";
    out.columns = {"parts", "max_part_norm", "joint_norm", "ratio"};
    out.add_row(Json::array({parts.size(), rep.max_part_norm, rep.joint_norm, rep.ratio}));
    out.summary["part_norms"] = rep.part_norms;
    out.summary["ratio"] = rep.ratio;
    out.check("ratio_finite", std::isfinite(rep.ratio), fmt(rep.ratio));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<EnergyResidual> energy_residuals(const DiscreteMeasure& mu) {
    const double diam = support_diameter(mu);
    if (!(diam > 0.0)) return {};
    const DiscreteMeasure unit = transform(mu, 0.0, 1.0 / diam, {}, 1.0 / diam);
    const double g = growth_constant(unit).growth_constant;
    const double mass = total_mass(unit);
    std::vector<EnergyResidual> out;
    for (double eps : decade_grid(unit.resolution_h(), 1.0)) {
        EnergyResidual r;
        r.epsilon = eps;
        r.energy = energy_of_one(build_cauchy(unit, eps));
        r.c2 = c2_truncated(unit, eps).value;
        r.kappa = std::abs(r.energy - r.c2 / 6.0) / (g * g * mass);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Catalog and configured runs

namespace {

const std::vector<ExperimentInfo> kCatalog = {
    {"marcinkiewicz_check",
     "S_{N,1} = sum_j ||mu_j|| sum_{k>j} ||mu_k||^2 / (r_j + ... + r_k)^2 <= ||mu_1|| + ... + ||mu_N||",
     "Random chains of radii and masses (masses <= radii); both one-sided sums are evaluated exactly and "
     "compared with the total mass."},
    {"main_lemma_check", "c^2(mu) <= sum_j c^2(mu_j) + C ||mu||",
     "Bead chains of circle arcs on the line; rho(N) = (c^2(mu) - sum_j c^2(mu_j)) / ||mu|| over nested "
     "chain sizes. Asserts rho >= 0 and max_N rho <= band * rho(N_min); C is fitted on even trials and "
     "checked on odd trials."},
    {"good_index_selection",
     "g_i = sum_{j != i} r_j gamma_j / D(Q_j, Q_i)^2, I_* = {i : g_i <= 10 A_0}, "
     "sum_{j in I_*} gamma_j >= (9/10) sum_j gamma_j",
     "Random separated chains of segments. Retention of I_* for the per-chain fitted A_0, the geometric "
     "A_0, and the A_0 fitted on the calibration chains and applied to the evaluation chains."},
    {"mainc_check", "mu(B) <= C_0 gamma(B cap E) for every disc B",
     "Sampled discs (support atoms and midpoints, log-spaced radii). C_0 is the largest mu(B)/lower on the "
     "calibration discs; evaluation discs count as certified violations when mu(B) > C_0 upper(B cap E)."},
    {"almost_additivity_check", "gamma(E_1 u ... u E_N) >= c sum_j gamma(E_j)",
     "Curvature lower bound of the union over the exact sum of the part capacities, for a single part, two "
     "distant parts, and bead chains over lambda; lambda -> 1 is an unasserted exploratory sweep."},
    {"opnorm_divergence_ex1", "||C_{mu|Q_k} 1||^2_{L^2(mu|Q_k)} >= c (N_{k+1} - N_k) 4^{-N_k}",
     "Corner construction with growing gaps: energies of the chosen squares, their normalisation by "
     "4^{N_k}/gap, and the norm lower bound sqrt(energy / mu(Q_k)), against a constant-gap control."},
    {"cauchy_independence_check", "||C_mu||_mu <= C for mu = sum_j mu_j",
     "Empirical independence constant ||C_mu|| / max_j ||C_{mu_j}|| for two parts over a distance sweep "
     "and for the corner construction at increasing depth."},
    {"cantor_scaling", "gamma(E_n) ~ n^{-1/2} for the corner 1/4 Cantor set",
     "c^2(mu_n)/n and lower_bound_curvature(E_n) sqrt(n) for generations n; both must stay in bands."},
    {"energy_identity", "||C^eps_mu 1||^2_{L^2(mu)} = c^2_eps(mu)/6 + O(||mu||)",
     "Residual |energy - c^2_eps/6| / (g^2 ||mu||) over a decade grid of eps, on a calibration corpus and a "
     "disjoint evaluation corpus, against the frozen constant."},
    {"capacity_sanity", "gamma(disc of radius r) = r, gamma(segment) = length/4, gamma(sF + b) = |s| gamma(F)",
     "Both lower bounds and the enclosing-disc upper bound on a segment and a circle, feasibility of the "
     "witnesses, and covariance under rigid motions and dilations."},
};

Json resolved_config(const RunRequest& req, const ParamReader& gen, const ParamReader& est) {
    Json c = Json::object();
    c["schema_version"] = 1;
    c["experiment"] = req.experiment;
    c["seed"] = req.seed;
    c["threads"] = req.threads;
    c["generator"] = gen.resolved();
    c["estimator"] = est.resolved();
    return c;
}

void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(key, msg);
}

PartShape read_shape(ParamReader& r, const std::string& key, const std::string& fallback) {
    const std::string name = r.text(key, fallback);
    try {
        return parse_part_shape(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
    }
}

// -- marcinkiewicz ----------------------------------------------------------

ExperimentResult run_marcinkiewicz(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto trials = gen.integer("trials", 1000);
    const auto n_min = gen.integer("n_min", 2);
    const auto n_max = gen.integer("n_max", 200);
    const double r_lo = gen.number("radius_min", 0.1), r_hi = gen.number("radius_max", 10.0);
    gen.finish();
    est.finish();
    require(trials >= 1, "trials", "generator.trials must be >= 1");
    require(n_min >= 2 && n_max >= n_min, "n_max", "need 2 <= n_min <= n_max");
    require(r_lo > 0.0 && r_hi >= r_lo, "radius_max", "need 0 < radius_min <= radius_max");

    ExperimentResult out;
    out.name = "marcinkiewicz_check";
    out.columns = {"trial", "n", "s1", "s2", "total_mass", "s1_over_mass", "s2_over_mass"};
    std::vector<MarcinkiewiczSums> sums(static_cast<std::size_t>(trials));
    std::vector<std::size_t> sizes(sums.size());
    parallel_for(sums.size(), [&](std::size_t t) {
        std::uint64_t st = derive_seed(seed, t);
        const auto n = static_cast<std::size_t>(n_min) + splitmix64(st) % static_cast<std::uint64_t>(n_max - n_min + 1);
        std::vector<double> r(n), m(n);
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = log_uniform(st, r_lo, r_hi);
            m[j] = r[j] * unit_interval(splitmix64(st));
        }
        sizes[t] = n;
        sums[t] = marcinkiewicz_sums(r, m);
    });
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < sums.size(); ++t) {
        const auto& s = sums[t];
        if (s.s1 > s.total_mass || s.s2 > s.total_mass) ++violations;
        worst = std::max({worst, s.s1 / s.total_mass, s.s2 / s.total_mass});
        out.add_row(Json::array({t, sizes[t], s.s1, s.s2, s.total_mass, s.s1 / s.total_mass, s.s2 / s.total_mass}));
    }
    out.summary["trials"] = trials;
    out.summary["max_ratio"] = worst;
    out.summary["violations"] = violations;
    out.check("zero_violations", violations == 0,
              std::to_string(violations) + " violations, max S/sum = " + fmt(worst));
    return out;
}

// -- main lemma -------------------------------------------------------------

ExperimentResult run_main_lemma(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto trials = gen.integer("trials", 20);
    const auto sizes = gen.integers("sizes", {10, 20, 40, 80});
    const double lambda = gen.number("lambda", 2.0);
    const double r_lo = gen.number("radius_min", 0.5), r_hi = gen.number("radius_max", 2.0);
    const PartShape shape = read_shape(gen, "shape", "circle_arc");
    BeadChainOptions bo;
    bo.atoms_per_part = static_cast<int>(gen.integer("atoms_per_part", 16));
    MainLemmaOptions mo;
    mo.exact_triple_budget = est.number("exact_triple_budget", 1e9);
    mo.mc_samples = est.integer("mc_samples", 2000000);
    const double band = est.number("band", 2.5);
    gen.finish();
    est.finish();
    require(trials >= 2, "trials", "generator.trials must be >= 2 (calibration and evaluation)");
    require(!sizes.empty() && std::is_sorted(sizes.begin(), sizes.end()) && sizes.front() >= 1, "sizes",
            "generator.sizes must be nonempty, positive and increasing");
    require(lambda > 1.0, "lambda", "generator.lambda must exceed 1");
    require(r_lo > 0.0 && r_hi >= r_lo, "radius_max", "need 0 < radius_min <= radius_max");
    require(mo.mc_samples > 0, "mc_samples", "estimator.mc_samples must be positive");

    const std::size_t ns = sizes.size();
    std::vector<CrossRatio> res(static_cast<std::size_t>(trials) * ns);
    parallel_for(res.size(), [&](std::size_t idx) {
        const std::size_t t = idx / ns, s = idx % ns;
        std::uint64_t st = derive_seed(seed, 2 * t);
        std::vector<double> radii(static_cast<std::size_t>(sizes.back()));
        for (auto& r : radii) r = log_uniform(st, r_lo, r_hi);
        const auto chain = bead_chain_on_line(std::span(radii).first(static_cast<std::size_t>(sizes[s])), lambda,
                                              shape, derive_seed(seed, 2 * t + 1), bo);
        MainLemmaOptions o = mo;
        o.seed = derive_seed(seed, 1000000 + idx);
        res[idx] = cross_ratio(chain, o);
    });

    ExperimentResult out;
    out.name = "main_lemma_check";
    out.columns = {"trial", "n", "split", "cross", "mass", "rho", "estimator", "rho_std_error"};
    bool nonneg = true, banded = true;
    double c_cal = 0.0, eval_max = 0.0, worst_band = 0.0;
    for (std::size_t t = 0; t < static_cast<std::size_t>(trials); ++t) {
        const bool cal = t % 2 == 0;
        double mx = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& r = res[t * ns + s];
            nonneg = nonneg && r.rho >= 0.0;
            mx = std::max(mx, r.rho);
            out.add_row(Json::array({t, sizes[s], cal ? "calibration" : "evaluation", r.cross, r.mass, r.rho,
                                     to_string(r.estimator), r.std_error}));
        }
        const double first = res[t * ns].rho;
        const double ratio = first > 0.0 ? mx / first : (mx > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
        worst_band = std::max(worst_band, ratio);
        banded = banded && ratio <= band;
        (cal ? c_cal : eval_max) = std::max(cal ? c_cal : eval_max, mx);
    }
    out.summary["c_calibration"] = c_cal;
    out.summary["evaluation_max_rho"] = eval_max;
    out.summary["max_band_ratio"] = worst_band;
    out.check("rho_nonnegative", nonneg, "all cross terms >= 0");
    out.check("bounded_band", banded, "max_N rho / rho(N_min) = " + fmt(worst_band) + " <= " + fmt(band));
    out.check("evaluation_within_calibrated_c", eval_max <= band * c_cal,
              "evaluation max rho " + fmt(eval_max) + " <= " + fmt(band) + " * " + fmt(c_cal));
    return out;
}

// -- good indices -----------------------------------------------------------

ExperimentResult run_good_index(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto trials = gen.integer("trials", 1000);
    const auto n_min = gen.integer("n_min", 1);
    const auto n_max = gen.integer("n_max", 200);
    const double r_lo = gen.number("radius_min", 0.1), r_hi = gen.number("radius_max", 10.0);
    const double l_lo = gen.number("lambda_min", 1.1), l_hi = gen.number("lambda_max", 4.0);
    gen.finish();
    est.finish();
    require(trials >= 2, "trials", "generator.trials must be >= 2 (calibration and evaluation)");
    require(n_min >= 1 && n_max >= n_min, "n_max", "need 1 <= n_min <= n_max");
    require(r_lo > 0.0 && r_hi >= r_lo, "radius_max", "need 0 < radius_min <= radius_max");
    require(l_lo > 1.0 && l_hi >= l_lo, "lambda_max", "need 1 < lambda_min <= lambda_max");

    struct Instance {
        std::size_t n = 0;
        double lambda = 0.0;
        std::vector<double> gamma;
        GoodIndexReport rep;
    };
    std::vector<Instance> inst(static_cast<std::size_t>(trials));
    parallel_for(inst.size(), [&](std::size_t t) {
        std::uint64_t st = derive_seed(seed, 2 * t);
        const auto n = static_cast<std::size_t>(n_min) + splitmix64(st) % static_cast<std::uint64_t>(n_max - n_min + 1);
        const double lambda = l_lo + (l_hi - l_lo) * unit_interval(splitmix64(st));
        std::vector<double> radii(n);
        for (auto& r : radii) r = log_uniform(st, r_lo, r_hi);
        BeadChainOptions bo;
        bo.atoms_per_part = 2;
        const auto chain = bead_chain_on_line(radii, lambda, PartShape::segment, derive_seed(seed, 2 * t + 1), bo);
        inst[t] = {n, lambda, chain.part_gamma, good_index_values(chain.discs, lambda, chain.part_gamma)};
    });

    double a0_cal = 0.0;
    for (std::size_t t = 0; t < inst.size(); t += 2) a0_cal = std::max(a0_cal, inst[t].rep.fitted_a0);

    ExperimentResult out;
    out.name = "good_index_selection";
    out.columns = {"trial", "n", "lambda", "split", "fitted_a0", "geometric_a0", "retention_fitted",
                   "retention_geometric", "retention_calibrated"};
    std::size_t v_fit = 0, v_geo = 0, v_cal = 0;
    double min_fit = 1.0, min_geo = 1.0, min_cal = 1.0;
    for (std::size_t t = 0; t < inst.size(); ++t) {
        const auto& in = inst[t];
        const bool cal = t % 2 == 0;
        const double rf = retention(in.gamma, good_indices(in.rep, in.rep.fitted_a0));
        const double rg = retention(in.gamma, good_indices(in.rep, in.rep.geometric_a0));
        const double rc = retention(in.gamma, good_indices(in.rep, a0_cal));
        v_fit += rf < 0.9;
        v_geo += rg < 0.9;
        min_fit = std::min(min_fit, rf);
        min_geo = std::min(min_geo, rg);
        if (!cal) {
            v_cal += rc < 0.9;
            min_cal = std::min(min_cal, rc);
        }
        out.add_row(Json::array({t, in.n, in.lambda, cal ? "calibration" : "evaluation", in.rep.fitted_a0,
                                 in.rep.geometric_a0, rf, rg, cal ? Json(nullptr) : Json(rc)}));
    }
    out.summary["a0_calibration"] = a0_cal;
    out.summary["min_retention_fitted"] = min_fit;
    out.summary["min_retention_geometric"] = min_geo;
    out.summary["min_retention_calibrated"] = min_cal;
    out.check("retention_fitted", v_fit == 0, std::to_string(v_fit) + " violations, min " + fmt(min_fit));
    out.check("retention_geometric", v_geo == 0, std::to_string(v_geo) + " violations, min " + fmt(min_geo));
    out.check("retention_calibrated", v_cal == 0,
              std::to_string(v_cal) + " evaluation violations with A0 = " + fmt(a0_cal) + ", min " + fmt(min_cal));
    return out;
}

// -- mainc ------------------------------------------------------------------

std::vector<int> read_nk(ParamReader& gen, const std::string& key, const std::vector<int>& fallback) {
    auto nk = gen.integers(key, fallback);
    bool ok = nk.size() >= 2 && nk.front() == 0 && nk.back() <= 12;
    for (std::size_t i = 1; i < nk.size(); ++i) ok = ok && nk[i] > nk[i - 1];
    require(ok, key, "generator." + key + " must start at 0, increase strictly and stay <= 12");
    return nk;
}

CornerFamilyOptions read_corner(ParamReader& gen) {
    CornerFamilyOptions o;
    o.c = gen.number("c", o.c);
    o.c_prime = gen.number("c_prime", o.c_prime);
    o.grid = static_cast<int>(gen.integer("grid", o.grid));
    require(o.c > 0.0 && o.c_prime > 0.0, "c", "generator.c and generator.c_prime must be positive");
    require(o.grid >= 1, "grid", "generator.grid must be >= 1");
    return o;
}

ExperimentResult run_mainc(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const std::string family = gen.text("family", "segment");
    DiscSamplerOptions so;
    so.seed = seed;
    so.max_centers = static_cast<std::size_t>(est.integer("max_centers", 10000));
    so.radii_per_decade = static_cast<int>(est.integer("radii_per_decade", 20));
    so.subsample = static_cast<std::size_t>(est.integer("subsample", 48));
    require(so.max_centers >= 1, "max_centers", "estimator.max_centers must be positive");
    require(so.radii_per_decade >= 1, "radii_per_decade", "estimator.radii_per_decade must be positive");
    require(so.subsample >= 3, "subsample", "estimator.subsample must be >= 3");
    std::optional<DiscreteMeasure> mu;
    if (family == "segment") {
        const double len = gen.number("length", 4.0);
        const auto atoms = gen.integer("atoms", 64);
        gen.finish();
        est.finish();
        require(len > 0.0 && atoms >= 2, "length", "need length > 0 and atoms >= 2");
        mu = arc_length_measure(Segment{{0.0, 0.0}, {len, 0.0}}, static_cast<int>(atoms), "segment");
    } else if (family == "ex1" || family == "ex2") {
        const auto nk = read_nk(gen, "nk", {0, 1, 3});
        const auto opts = read_corner(gen);
        gen.finish();
        est.finish();
        mu = (family == "ex1" ? david_semmes_ex1(nk, opts) : ex2_with_discs(nk, opts)).measure;
    } else {
        throw ConfigError("family", "generator.family must be one of segment, ex1, ex2");
    }
    auto out = mainc_check(*mu, so);
    out.summary["family"] = family;
    return out;
}

// -- almost additivity ------------------------------------------------------

ExperimentResult run_almadd(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto beads = gen.integer("beads", 20);
    const auto lambdas = gen.numbers("lambdas", {1.1, 1.5, 2.0, 4.0});
    const auto explore = gen.numbers("exploratory_lambdas", {1.05, 1.02, 1.01, 1.001});
    const double r_lo = gen.number("radius_min", 0.5), r_hi = gen.number("radius_max", 2.0);
    const auto per_part = gen.integer("atoms_per_part", 16);
    const int iterations = static_cast<int>(est.integer("iterations", 50));
    const double floor = est.number("floor", 0.05);
    const double ceiling = est.number("ceiling", 4.0);
    gen.finish();
    est.finish();
    require(beads >= 2, "beads", "generator.beads must be >= 2");
    require(r_lo > 0.0 && r_hi >= r_lo, "radius_max", "need 0 < radius_min <= radius_max");
    require(per_part >= 2, "atoms_per_part", "generator.atoms_per_part must be >= 2");
    require(iterations >= 0, "iterations", "estimator.iterations must be >= 0");
    for (double l : lambdas) require(l > 1.0, "lambdas", "generator.lambdas must exceed 1");
    for (double l : explore) require(l >= 1.0, "exploratory_lambdas", "generator.exploratory_lambdas must be >= 1");

    struct Config {
        std::string label;
        std::vector<double> radii;
        double lambda;
        PartShape shape;
        bool exploratory;
    };
    std::uint64_t st = derive_seed(seed, 0);
    std::vector<double> radii(static_cast<std::size_t>(beads));
    for (auto& r : radii) r = log_uniform(st, r_lo, r_hi);
    std::vector<Config> configs = {{"one_part", {1.0}, 2.0, PartShape::segment, false},
                                   {"two_distant", {1.0, 1.0}, 1000.0, PartShape::segment, false}};
    for (PartShape shape : {PartShape::segment, PartShape::circle_arc}) {
        for (double l : lambdas) configs.push_back({"chain", radii, l, shape, false});
        for (double l : explore) configs.push_back({"chain_exploratory", radii, l, shape, true});
    }

    struct Row {
        double lower = 0.0, sum = 0.0, ratio = 0.0;
        bool exact = true;
    };
    std::vector<Row> rows(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) {
        const auto& c = configs[i];
        BeadChainOptions bo;
        bo.atoms_per_part = static_cast<int>(per_part);
        if (c.exploratory) bo.jitter_min = bo.jitter_max = 0.0;  // discs as close as lambda allows
        const auto chain = bead_chain_on_line(c.radii, c.lambda, c.shape, derive_seed(seed, i + 1), bo);
        AlmostAdditivityOptions ao;
        ao.iterations = iterations;
        const auto r = almost_additivity_check(chain, ao);
        rows[i] = {r.rows[0][3].get<double>(), r.rows[0][4].get<double>(), r.rows[0][5].get<double>(), chain.gamma_exact};
    });

    ExperimentResult out;
    out.name = "almost_additivity_check";
    out.columns = {"config", "n", "lambda", "shape", "lower_union", "sum_gamma", "ratio", "gamma_exact", "exploratory"};
    bool in_band = true;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    Json trend = Json::object();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& c = configs[i];
        out.add_row(Json::array({c.label, c.radii.size(), c.lambda, to_string(c.shape), rows[i].lower, rows[i].sum,
                                 rows[i].ratio, rows[i].exact, c.exploratory}));
        if (c.exploratory) continue;
        in_band = in_band && rows[i].ratio >= floor && rows[i].ratio <= ceiling;
        lo = std::min(lo, rows[i].ratio);
        hi = std::max(hi, rows[i].ratio);
    }
    for (PartShape shape : {PartShape::segment, PartShape::circle_arc}) {
        // Ratio as lambda decreases: reported, not asserted.
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < configs.size(); ++i)
            if (configs[i].label != "one_part" && configs[i].label != "two_distant" && configs[i].shape == shape)
                pts.push_back({configs[i].lambda, rows[i].ratio});
        std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a.first > b.first; });
        bool nonincreasing = true;
        for (std::size_t i = 1; i < pts.size(); ++i) nonincreasing = nonincreasing && pts[i].second <= pts[i - 1].second;
        trend[to_string(shape)] = nonincreasing;
    }
    const double stability = rows[1].ratio / rows[0].ratio;
    out.summary["ratio_min"] = lo;
    out.summary["ratio_max"] = hi;
    out.summary["two_distant_over_one"] = stability;
    out.summary["nonincreasing_as_lambda_decreases"] = trend;
    out.check("ratio_band", in_band, "asserted ratios in [" + fmt(lo) + ", " + fmt(hi) + "], band [" + fmt(floor) +
                                         ", " + fmt(ceiling) + "]");
    out.check("two_distant_stable", stability >= 0.5 && stability <= 2.0,
              "two distant parts / one part = " + fmt(stability));
    return out;
}

// -- operator divergence ----------------------------------------------------

ExperimentResult run_opnorm_divergence(ParamReader& gen, ParamReader& est, std::uint64_t) {
    const auto nk = read_nk(gen, "nk", {0, 1, 3, 6, 10});
    const auto control = read_nk(gen, "control_nk", {0, 1, 3, 5, 7});
    const auto opts = read_corner(gen);
    gen.finish();
    est.finish();
    require(nk.size() >= 3, "nk", "generator.nk needs at least three levels");
    return opnorm_divergence_ex1(nk, control, opts);
}

// -- independence -----------------------------------------------------------

ExperimentResult run_independence(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto distances = gen.numbers("distances", {0.0, 0.25, 1.0, 4.0, 16.0, 64.0});
    const auto atoms = gen.integer("atoms_per_part", 32);
    const auto nk = read_nk(gen, "ex1_nk", {0, 1, 3, 6});
    IndependenceOptions io;
    io.seed = seed;
    io.tol = est.number("tol", 1e-8);
    io.max_iter = static_cast<int>(est.integer("max_iter", 2000));
    const double two_part_bound = est.number("two_part_bound", 3.0);
    const double far_tolerance = est.number("far_tolerance", 0.05);
    gen.finish();
    est.finish();
    require(!distances.empty() && std::is_sorted(distances.begin(), distances.end()) && distances.front() >= 0.0,
            "distances", "generator.distances must be nonnegative and increasing");
    require(atoms >= 2, "atoms_per_part", "generator.atoms_per_part must be >= 2");
    require(nk.size() >= 3, "ex1_nk", "generator.ex1_nk needs at least three levels");
    require(io.tol > 0.0 && io.max_iter > 0, "tol", "estimator.tol and max_iter must be positive");

    ExperimentResult out;
    out.name = "cauchy_independence_check";
    out.columns = {"family", "parameter", "parts", "max_part_norm", "joint_norm", "ratio"};

    // A horizontal unit segment and a vertical one whose lower end is `d` to the right.
    std::vector<IndependenceReport> sweep(distances.size());
    parallel_for(distances.size(), [&](std::size_t i) {
        const double d = distances[i];
        const std::vector<DiscreteMeasure> parts = {
            arc_length_measure(Segment{{0.0, 0.0}, {1.0, 0.0}}, static_cast<int>(atoms), "a"),
            arc_length_measure(Segment{{1.0 + d, 0.0}, {1.0 + d, 1.0}}, static_cast<int>(atoms), "b")};
        sweep[i] = independence_constant(parts, io);
    });
    bool bounded = true;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        out.add_row(Json::array({"two_segments", distances[i], 2, sweep[i].max_part_norm, sweep[i].joint_norm,
                                 sweep[i].ratio}));
        bounded = bounded && sweep[i].ratio <= two_part_bound;
    }

    std::vector<double> depth_ratio;
    for (std::size_t len = 3; len <= nk.size(); ++len) {
        const auto fam = david_semmes_ex1(std::span(nk).first(len));
        std::vector<DiscreteMeasure> parts = fam.parts;
        parts.push_back(fam.base);
        const auto rep = independence_constant(parts, io);
        depth_ratio.push_back(rep.ratio);
        out.add_row(Json::array({"corner_ex1", nk[len - 1], parts.size(), rep.max_part_norm, rep.joint_norm, rep.ratio}));
    }
    bool grows = true;
    for (std::size_t i = 1; i < depth_ratio.size(); ++i) grows = grows && depth_ratio[i] > depth_ratio[i - 1];

    const double far = sweep.back().ratio;
    out.summary["far_ratio"] = far;
    out.summary["depth_ratios"] = depth_ratio;
    out.check("far_ratio_near_one", std::abs(far - 1.0) <= far_tolerance,
              "ratio at distance " + fmt(distances.back()) + " = " + fmt(far));
    out.check("two_parts_bounded", bounded, "every two-part ratio <= " + fmt(two_part_bound));
    out.check("corner_ratio_grows", grows, "independence constant increases with depth");
    return out;
}

// -- Cantor scaling ---------------------------------------------------------

ExperimentResult run_cantor(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto n_min = gen.integer("n_min", 2);
    const auto n_max = gen.integer("n_max", 5);
    const std::string curvature = est.text("curvature", "exact");
    const auto mc_samples = est.integer("mc_samples", 10000000);
    const int iterations = static_cast<int>(est.integer("lower_bound_iterations", 10));
    const double band = est.number("band", 3.0);
    gen.finish();
    est.finish();
    require(n_min >= 1 && n_max >= n_min && n_max <= 8, "n_max", "need 1 <= n_min <= n_max <= 8");
    require(curvature == "exact" || curvature == "monte_carlo", "curvature",
            "estimator.curvature must be exact or monte_carlo");
    require(mc_samples > 0, "mc_samples", "estimator.mc_samples must be positive");
    require(iterations >= 0, "lower_bound_iterations", "estimator.lower_bound_iterations must be >= 0");

    ExperimentResult out;
    out.name = "cantor_scaling";
    out.columns = {"n", "c2", "c2_over_n", "lower_bound", "bound_times_sqrt_n"};
    std::vector<double> per_n, scaled;
    for (auto n = n_min; n <= n_max; ++n) {
        const auto cs = cantor_corner(static_cast<int>(n));
        const CurvatureReport c2 = curvature == "exact"
                                       ? c2_exact(cs.measure, std::numeric_limits<double>::infinity())
                                       : c2_monte_carlo(cs.measure, mc_samples, derive_seed(seed, static_cast<std::uint64_t>(n)));
        CurvatureBoundOptions o;
        o.iterations = iterations;
        o.triple_budget = std::numeric_limits<double>::infinity();
        const double lb = lower_bound_curvature(cs.measure, o).bound;
        const double nn = static_cast<double>(n);
        per_n.push_back(c2.value / nn);
        scaled.push_back(lb * std::sqrt(nn));
        out.add_row(Json::array({n, c2.value, c2.value / nn, lb, lb * std::sqrt(nn)}));
        Json rec = Json::object();
        rec["n"] = n;
        rec["curvature"] = curvature_report_to_json(c2);
        out.records.push_back(rec);
    }
    out.summary["c2_over_n_band_ratio"] = band_ratio(per_n);
    out.summary["bound_times_sqrt_n_band_ratio"] = band_ratio(scaled);
    out.check("c2_over_n_band", band_ratio(per_n) <= band, "max/min = " + fmt(band_ratio(per_n)));
    out.check("bound_times_sqrt_n_band", band_ratio(scaled) <= band, "max/min = " + fmt(band_ratio(scaled)));
    return out;
}

// -- energy identity --------------------------------------------------------

struct CorpusEntry {
    std::string split;
    DiscreteMeasure mu;
};

std::vector<CorpusEntry> energy_corpus(std::uint64_t seed) {
    std::vector<CorpusEntry> c;
    c.push_back({"calibration", arc_length_measure(Segment{{0.0, 0.0}, {4.0, 0.0}}, 64, "segment64")});
    c.push_back({"calibration", arc_length_measure(CircleArc::full_circle({0.0, 0.0}, 1.0), 64, "circle64")});
    c.push_back({"calibration", cantor_corner(2).measure});
    c.push_back({"calibration", cantor_corner(3).measure});
    const std::vector<double> ten(10, 1.0);
    c.push_back({"calibration",
                 bead_chain_on_line(ten, 2.0, PartShape::segment, derive_seed(seed, 1)).measure().with_label("segment_chain10")});
    c.push_back({"evaluation", transform(arc_length_measure(Segment{{0.0, 0.0}, {2.0, 0.0}}, 100), 0.7, 1.0, {1.0, 2.0})
                                   .with_label("segment100_moved")});
    c.push_back({"evaluation", arc_length_measure(CircleArc::full_circle({0.0, 0.0}, 2.0), 96, "circle96")});
    c.push_back({"evaluation", cantor_corner(4).measure});
    std::vector<double> twelve;
    for (int i = 0; i < 12; ++i) twelve.push_back(0.5 + 0.1 * i);
    c.push_back({"evaluation",
                 bead_chain_on_line(twelve, 2.0, PartShape::circle_arc, derive_seed(seed, 2)).measure().with_label("arc_chain12")});
    c.push_back({"evaluation", bead_chain_on_line(twelve, 2.0, PartShape::point_cloud, derive_seed(seed, 3))
                                   .measure()
                                   .with_label("cloud_chain12")});
    return c;
}

ExperimentResult run_energy(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    gen.finish();
    est.finish();
    const auto corpus = energy_corpus(seed);
    std::vector<std::vector<EnergyResidual>> res(corpus.size());
    std::vector<double> growth(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
        res[i] = energy_residuals(corpus[i].mu);
        const double d = support_diameter(corpus[i].mu);
        growth[i] = growth_constant(transform(corpus[i].mu, 0.0, 1.0 / d, {}, 1.0 / d)).growth_constant;
    });
    ExperimentResult out;
    out.name = "energy_identity";
    out.columns = {"split", "measure", "atoms", "epsilon", "energy", "c2_over_6", "g", "kappa"};
    double cal = 0.0, eval = 0.0;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const bool is_cal = corpus[i].split == "calibration";
        for (const auto& r : res[i]) {
            out.add_row(Json::array({corpus[i].split, corpus[i].mu.label(), corpus[i].mu.size(), r.epsilon, r.energy,
                                     r.c2 / 6.0, growth[i], r.kappa}));
            (is_cal ? cal : eval) = std::max(is_cal ? cal : eval, r.kappa);
            if (!is_cal && r.kappa > kEnergyKappa) ++failures;
        }
    }
    out.summary["kappa_frozen"] = kEnergyKappa;
    out.summary["kappa_calibration"] = cal;
    out.summary["kappa_evaluation_max"] = eval;
    out.summary["evaluation_failures"] = failures;
    out.check("calibration_below_frozen", cal <= kEnergyKappa, "calibration kappa " + fmt(cal));
    out.check("evaluation_within_frozen", failures == 0,
              std::to_string(failures) + " evaluation failures, max kappa " + fmt(eval));
    return out;
}

// -- capacity sanity --------------------------------------------------------

ExperimentResult run_capacity(ParamReader& gen, ParamReader& est, std::uint64_t seed) {
    const auto atoms = gen.integer("atoms", 64);
    const double length = gen.number("segment_length", 4.0);
    const double radius = gen.number("circle_radius", 1.0);
    const double rotation = gen.number("rotation", 0.7);
    const double dilation = gen.number("dilation", 2.5);
    const auto shift = gen.numbers("shift", {3.0, -2.0});
    const int iterations = static_cast<int>(est.integer("iterations", 200));
    gen.finish();
    est.finish();
    require(atoms >= 3, "atoms", "generator.atoms must be >= 3");
    require(length > 0.0 && radius > 0.0, "segment_length", "sizes must be positive");
    require(dilation > 0.0, "dilation", "generator.dilation must be positive");
    require(shift.size() == 2, "shift", "generator.shift must be [x, y]");
    require(iterations >= 0, "iterations", "estimator.iterations must be >= 0");

    CurvatureBoundOptions co;
    co.iterations = iterations;
    OpnormBoundOptions oo;
    oo.seed = seed;
    struct Bounds {
        double f61 = 0.0, gop = 0.0, upper = 0.0;
        double witness_growth = 0.0, witness_c2_over_mass = 0.0;
    };
    auto bounds = [&](const DiscreteMeasure& mu) {
        const auto f = lower_bound_curvature(mu, co);
        const auto g = lower_bound_opnorm(mu, oo);
        Bounds b{f.bound, g.bound, upper_bound(mu), 0.0, 0.0};
        b.witness_growth = std::max(growth_constant(f.witness).growth_constant, growth_constant(g.witness).growth_constant);
        b.witness_c2_over_mass = c2_exact(f.witness).value / total_mass(f.witness);
        return b;
    };
    const auto n = static_cast<int>(atoms);
    const auto seg = arc_length_measure(Segment{{0.0, 0.0}, {length, 0.0}}, n, "segment");
    const auto circ = arc_length_measure(CircleArc::full_circle({0.0, 0.0}, radius), n, "circle");
    const Point b{shift[0], shift[1]};
    const std::vector<std::pair<std::string, DiscreteMeasure>> shapes = {
        {"segment", seg},
        {"circle", circ},
        {"segment_moved", transform(seg, rotation, 1.0, b)},
        {"circle_moved", transform(circ, rotation, 1.0, b)},
        {"segment_dilated", transform(seg, rotation, dilation, b)},
        {"circle_dilated", transform(circ, rotation, dilation, b)},
    };
    std::vector<Bounds> res(shapes.size());
    parallel_for(shapes.size(), [&](std::size_t i) { res[i] = bounds(shapes[i].second); });

    ExperimentResult out;
    out.name = "capacity_sanity";
    out.columns = {"shape", "atoms", "lower_curvature_f61", "lower_opnorm_gop", "upper_enclosing_disc",
                   "witness_growth", "witness_c2_over_mass"};
    for (std::size_t i = 0; i < shapes.size(); ++i)
        out.add_row(Json::array({shapes[i].first, shapes[i].second.size(), res[i].f61, res[i].gop, res[i].upper,
                                 res[i].witness_growth, res[i].witness_c2_over_mass}));
    const auto& s = res[0];
    const auto& c = res[1];
    const double h = circ.resolution_h();
    auto rel = [](double a, double e) { return std::abs(a - e) <= 1e-9 * std::max(std::abs(e), 1e-300); };
    bool covariant = true;
    for (std::size_t base = 0; base < 2; ++base) {
        const auto& o = res[base];
        const auto& m = res[base + 2];
        const auto& d = res[base + 4];
        covariant = covariant && rel(m.f61, o.f61) && rel(m.gop, o.gop) && rel(m.upper, o.upper);
        covariant = covariant && rel(d.f61, dilation * o.f61) && rel(d.gop, dilation * o.gop) &&
                    rel(d.upper, dilation * o.upper);
    }
    bool feasible = true, ordered = true;
    for (const auto& r : res) {
        feasible = feasible && r.witness_growth <= 1.0 + 1e-9 && r.witness_c2_over_mass <= 1.0 + 1e-9;
        ordered = ordered && r.f61 <= r.upper && r.gop <= r.upper;
    }
    const double scale_ratio = length / 4.0;
    const double circle_scale = radius;
    out.summary["segment_exact"] = exact_capacity_model({ModelShape::Kind::segment, length}).value;
    out.summary["disc_exact"] = exact_capacity_model({ModelShape::Kind::disc, radius}).value;
    out.check("segment_f61_band", s.f61 >= 0.25 * scale_ratio && s.f61 <= 1.0 * scale_ratio, "f61 = " + fmt(s.f61));
    out.check("segment_gop_band", s.gop >= 0.15 * scale_ratio && s.gop <= 1.5 * scale_ratio, "gop = " + fmt(s.gop));
    out.check("segment_upper", rel(s.upper, length / 2.0), "upper = " + fmt(s.upper));
    out.check("circle_lower", c.f61 >= 0.3 * circle_scale && c.gop >= 0.3 * circle_scale,
              "f61 = " + fmt(c.f61) + ", gop = " + fmt(c.gop));
    out.check("circle_upper", c.upper <= radius + h, "upper = " + fmt(c.upper));
    out.check("lower_below_upper", ordered, "every lower bound <= enclosing radius");
    out.check("methods_agree", std::max(s.f61, s.gop) <= 5.0 * std::min(s.f61, s.gop) &&
                                   std::max(c.f61, c.gop) <= 5.0 * std::min(c.f61, c.gop),
              "f61 and gop within a factor 5");
    out.check("witnesses_feasible", feasible, "growth <= 1 and c^2 <= mass for every witness");
    out.check("covariance", covariant, "rigid motion and dilation to 1e-9 relative");
    return out;
}

using Runner = ExperimentResult (*)(ParamReader&, ParamReader&, std::uint64_t);

Runner runner_for(const std::string& name) {
    static const std::map<std::string, Runner> runners = {
        {"marcinkiewicz_check", run_marcinkiewicz},
        {"main_lemma_check", run_main_lemma},
        {"good_index_selection", run_good_index},
        {"mainc_check", run_mainc},
        {"almost_additivity_check", run_almadd},
        {"opnorm_divergence_ex1", run_opnorm_divergence},
        {"cauchy_independence_check", run_independence},
        {"cantor_scaling", run_cantor},
        {"energy_identity", run_energy},
        {"capacity_sanity", run_capacity},
    };
    const auto it = runners.find(name);
    return it == runners.end() ? nullptr : it->second;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() { return kCatalog; }

const ExperimentInfo* find_experiment(const std::string& name) {
    for (const auto& e : kCatalog)
        if (e.name == name) return &e;
    return nullptr;
}

ExperimentResult run_experiment(const RunRequest& request) {
    const Runner run = runner_for(request.experiment);
    if (!run) throw ConfigError("experiment", "unknown experiment '" + request.experiment + "'");
    ParamReader gen(request.generator, "generator");
    ParamReader est(request.estimator, "estimator");
    ExperimentResult out = run(gen, est, request.seed);
    out.seed = request.seed;
    out.config = resolved_config(request, gen, est);
    return out;
}

}  // namespace caplab
