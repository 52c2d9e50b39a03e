#include "caplab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "caplab/summation.hpp"

namespace caplab {

const char* to_string(Estimator e) { return e == Estimator::exact ? "exact" : "monte_carlo"; }

namespace {

struct Soa {
    std::vector<double> x, y, w;
    explicit Soa(const DiscreteMeasure& mu) {
        for (const auto& a : mu.atoms()) {
            x.push_back(a.point.x);
            y.push_back(a.point.y);
            w.push_back(a.weight);
        }
    }
    Soa(std::span<const Point> p, std::span<const double> wt) : w(wt.begin(), wt.end()) {
        for (Point q : p) {
            x.push_back(q.x);
            y.push_back(q.y);
        }
    }
    std::size_t size() const { return x.size(); }
};

void check_budget(std::size_t n, double budget) {
    const double triples = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n);
    if (triples > budget)
        throw BudgetExceeded("curvature: " + std::to_string(n) + "^3 ordered triples exceed the budget of " +
                             std::to_string(budget) + "; use c2_monte_carlo");
}

std::vector<double> squared_distances(const Soa& s) {
    const std::size_t n = s.size();
    std::vector<double> d2(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = s.x[i] - s.x[j];
            const double dy = s.y[i] - s.y[j];
            d2[i * n + j] = dx * dx + dy * dy;
        }
    return d2;
}

/// Mask of pairs allowed by the truncation (distance > eps, with slack). Empty when eps == 0.
std::vector<unsigned char> far_mask(const Soa& s, double eps) {
    if (eps <= 0.0) return {};
    const std::size_t n = s.size();
    std::vector<unsigned char> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i * n + j] = distance(Point{s.x[i], s.y[i]}, Point{s.x[j], s.y[j]}) > eps * (1.0 + kScaleSlack) ? 1 : 0;
    return m;
}

/// Sum over unordered triples i<j<k (with optional masks) of w_i w_j w_k / R^2,
/// returned as 6x that (ordered-triple convention).
template <class Keep>
double ordered_triple_sum(const Soa& s, const std::vector<double>& d2, Keep keep_triple) {
    const std::size_t n = s.size();
    std::vector<double> per_i(n, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::vector<double> per_j;
        per_j.reserve(n - i);
        const double xi = s.x[i], yi = s.y[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = d2[i * n + j];
            if (dij == 0.0 || !keep_triple.pair(i, j)) continue;
            const double ax = s.x[j] - xi, ay = s.y[j] - yi;
            const double* dj = d2.data() + j * n;
            const double* di = d2.data() + i * n;
            double row = 0.0;
            for (std::size_t k = j + 1; k < n; ++k) {
                if (!keep_triple.triple(i, j, k)) continue;
                const double den = dij * dj[k] * di[k];
                if (den == 0.0) continue;
                const double cr = ax * (s.y[k] - yi) - ay * (s.x[k] - xi);
                row += s.w[k] * (4.0 * cr * cr / den);
            }
            per_j.push_back(s.w[j] * row);
        }
        per_i[i] = s.w[i] * pairwise_sum(per_j);
    }
    return 6.0 * pairwise_sum(per_i);
}

struct KeepAll {
    bool pair(std::size_t, std::size_t) const { return true; }
    bool triple(std::size_t, std::size_t, std::size_t) const { return true; }
};

struct KeepFar {
    const std::vector<unsigned char>& m;
    std::size_t n;
    bool pair(std::size_t i, std::size_t j) const { return m[i * n + j] != 0; }
    bool triple(std::size_t i, std::size_t j, std::size_t k) const {
        return m[i * n + k] != 0 && m[j * n + k] != 0;
    }
};

struct KeepCross {
    std::span<const int> part;
    bool pair(std::size_t, std::size_t) const { return true; }
    bool triple(std::size_t i, std::size_t j, std::size_t k) const {
        return !(part[i] == part[j] && part[j] == part[k]);
    }
};

double total_weight(const Soa& s) { return pairwise_sum(s.w); }

CurvatureReport exact_report(double value, std::size_t n, double eps) {
    const auto nn = static_cast<std::int64_t>(n);
    return {value, Estimator::exact, eps, nn * nn * nn, 0.0};
}

template <class Zero>
CurvatureReport monte_carlo_impl(const Soa& s, std::int64_t samples, std::uint64_t seed, Zero skip) {
    if (s.size() == 0) throw std::invalid_argument("c2_monte_carlo: empty measure");
    if (samples < 1000) throw std::invalid_argument("c2_monte_carlo: need at least 1000 samples");
    const std::size_t n = s.size();
    std::vector<double> cumulative(n);
    std::partial_sum(s.w.begin(), s.w.end(), cumulative.begin());
    const double cum_total = cumulative.back();
    const double mass = total_weight(s);
    const double mass3 = mass * mass * mass;

    constexpr std::int64_t kChunk = 1 << 16;
    const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<double> sums(static_cast<std::size_t>(chunks)), sums_sq(static_cast<std::size_t>(chunks));

    auto draw = [&](std::uint64_t& state) {
        const double u = unit_interval(splitmix64(state)) * cum_total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), n - 1);
    };

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) {
        std::uint64_t state = derive_seed(seed, static_cast<std::uint64_t>(c));
        const std::int64_t count = std::min(kChunk, samples - c * kChunk);
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t t = 0; t < count; ++t) {
            const std::size_t i = draw(state), j = draw(state), k = draw(state);
            if (skip(i, j, k)) continue;
            const double v = circumradius_inv_sq({s.x[i], s.y[i]}, {s.x[j], s.y[j]}, {s.x[k], s.y[k]});
            sum += v;
            sum_sq += v * v;
        }
        sums[static_cast<std::size_t>(c)] = sum;
        sums_sq[static_cast<std::size_t>(c)] = sum_sq;
    }

    const double m = static_cast<double>(samples);
    const double mean = pairwise_sum(sums) / m;
    const double var = std::max(0.0, pairwise_sum(sums_sq) / m - mean * mean) * m / (m - 1.0);
    return {mass3 * mean, Estimator::monte_carlo, 0.0, samples, mass3 * std::sqrt(var / m)};
}

}  // namespace

CurvatureReport c2_exact(const DiscreteMeasure& mu, double triple_budget) {
    check_budget(mu.size(), triple_budget);
    const Soa s(mu);
    const auto d2 = squared_distances(s);
    return exact_report(ordered_triple_sum(s, d2, KeepAll{}), s.size(), 0.0);
}

CurvatureReport c2_truncated(const DiscreteMeasure& mu, double eps, double triple_budget) {
    if (!(eps >= 0.0)) throw std::invalid_argument("c2_truncated: eps must be nonnegative");
    check_budget(mu.size(), triple_budget);
    const Soa s(mu);
    const auto d2 = squared_distances(s);
    if (eps == 0.0) return exact_report(ordered_triple_sum(s, d2, KeepAll{}), s.size(), 0.0);
    const auto mask = far_mask(s, eps);
    return exact_report(ordered_triple_sum(s, d2, KeepFar{mask, s.size()}), s.size(), eps);
}

CurvatureReport c2_monte_carlo(const DiscreteMeasure& mu, std::int64_t samples, std::uint64_t seed) {
    const Soa s(mu);
    return monte_carlo_impl(s, samples, seed, [](std::size_t, std::size_t, std::size_t) { return false; });
}

CurvatureReport c2_cross_exact(const DiscreteMeasure& mu, std::span<const int> part_of, double triple_budget) {
    if (part_of.size() != mu.size()) throw std::invalid_argument("c2_cross_exact: part label count mismatch");
    check_budget(mu.size(), triple_budget);
    const Soa s(mu);
    const auto d2 = squared_distances(s);
    return exact_report(ordered_triple_sum(s, d2, KeepCross{part_of}), s.size(), 0.0);
}

CurvatureReport c2_cross_monte_carlo(const DiscreteMeasure& mu, std::span<const int> part_of,
                                     std::int64_t samples, std::uint64_t seed) {
    if (part_of.size() != mu.size())
        throw std::invalid_argument("c2_cross_monte_carlo: part label count mismatch");
    const Soa s(mu);
    return monte_carlo_impl(s, samples, seed, [&](std::size_t i, std::size_t j, std::size_t k) {
        return part_of[i] == part_of[j] && part_of[j] == part_of[k];
    });
}

CurvatureGradient c2_with_gradient(std::span<const Point> points, std::span<const double> weights,
                                   double triple_budget) {
    if (points.size() != weights.size()) throw std::invalid_argument("c2_with_gradient: size mismatch");
    check_budget(points.size(), triple_budget);
    const Soa s(points, weights);
    const std::size_t n = s.size();
    const auto d2 = squared_distances(s);

    // Fixed chunking of the first index: each chunk owns an accumulator, and
    // chunks are merged in index order.
    constexpr std::size_t kChunk = 16;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> acc(chunks * n, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(chunks); ++cc) {
        const auto c = static_cast<std::size_t>(cc);
        double* marg = acc.data() + c * n;
        for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
            const double xi = s.x[i], yi = s.y[i], wi = s.w[i];
            const double* di = d2.data() + i * n;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dij = di[j];
                if (dij == 0.0) continue;
                const double ax = s.x[j] - xi, ay = s.y[j] - yi, wj = s.w[j];
                const double* dj = d2.data() + j * n;
                double sum_wk_v = 0.0;
                for (std::size_t k = j + 1; k < n; ++k) {
                    const double den = dij * dj[k] * di[k];
                    if (den == 0.0) continue;
                    const double cr = ax * (s.y[k] - yi) - ay * (s.x[k] - xi);
                    const double v = 4.0 * cr * cr / den;
                    sum_wk_v += s.w[k] * v;
                    marg[k] += wi * wj * v;
                }
                marg[i] += wj * sum_wk_v;
                marg[j] += wi * sum_wk_v;
            }
        }
    }

    CurvatureGradient out;
    out.gradient.assign(n, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t i = 0; i < n; ++i) out.gradient[i] += acc[c * n + i];
    std::vector<double> contrib(n);
    for (std::size_t i = 0; i < n; ++i) contrib[i] = s.w[i] * out.gradient[i];
    out.value = 2.0 * pairwise_sum(contrib);
    for (auto& g : out.gradient) g *= 6.0;
    return out;
}

}  // namespace caplab
