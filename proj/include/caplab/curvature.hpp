#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "caplab/measures.hpp"

namespace caplab {

enum class Estimator { exact, monte_carlo };

const char* to_string(Estimator e);

/// Value of c^2(mu) or c^2_eps(mu) plus how it was obtained.
struct CurvatureReport {
    double value = 0.0;
    Estimator estimator = Estimator::exact;
    double epsilon = 0.0;       ///< 0 means untruncated
    std::int64_t samples = 0;   ///< ordered triples covered (exact) or drawn (MC)
    double std_error = 0.0;     ///< 0 for exact
};

/// Thrown when n^3 exceeds the configured triple budget; use c2_monte_carlo instead.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultTripleBudget = 2e9;

/// Sum over ordered triples of w_i w_j w_k / R^2. Deterministic: per-first-index
/// partial sums are combined by pairwise summation, independent of thread count.
CurvatureReport c2_exact(const DiscreteMeasure& mu, double triple_budget = kDefaultTripleBudget);

/// As c2_exact restricted to triples whose three pairwise distances all exceed eps.
CurvatureReport c2_truncated(const DiscreteMeasure& mu, double eps,
                             double triple_budget = kDefaultTripleBudget);

/// Unbiased estimator: index triples drawn i.i.d. proportional to weight, each
/// sample worth ||mu||^3 / R^2. The sample budget is split into fixed chunks
/// with derived seeds, so the result does not depend on the worker count.
CurvatureReport c2_monte_carlo(const DiscreteMeasure& mu, std::int64_t samples, std::uint64_t seed);

/// Curvature of mu minus the sum of the curvatures of its parts, i.e. the
/// contribution of triples not contained in a single part. part_of[i] labels atom i.
CurvatureReport c2_cross_exact(const DiscreteMeasure& mu, std::span<const int> part_of,
                               double triple_budget = kDefaultTripleBudget);
CurvatureReport c2_cross_monte_carlo(const DiscreteMeasure& mu, std::span<const int> part_of,
                                     std::int64_t samples, std::uint64_t seed);

struct CurvatureGradient {
    double value = 0.0;             ///< c^2(mu)
    std::vector<double> gradient;   ///< d c^2 / d w_i
};

/// c^2 together with its partial derivatives in the weights.
CurvatureGradient c2_with_gradient(std::span<const Point> points, std::span<const double> weights,
                                   double triple_budget = kDefaultTripleBudget);

}  // namespace caplab
