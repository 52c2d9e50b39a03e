#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "caplab/measures.hpp"

namespace caplab {

using Complex = std::complex<double>;

/// Dense eps-truncated Cauchy matrix of a discrete measure:
/// K[i][j] = w_j / (p_j - p_i) when eps < |p_j - p_i| < 1/eps, else 0.
class CauchyMatrix {
public:
    CauchyMatrix(DiscreteMeasure measure, double epsilon, std::vector<Complex> entries);

    const DiscreteMeasure& measure() const { return measure_; }
    double epsilon() const { return epsilon_; }
    std::size_t size() const { return measure_.size(); }
    Complex operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
    const std::vector<Complex>& entries() const { return entries_; }

private:
    DiscreteMeasure measure_;
    double epsilon_;
    std::vector<Complex> entries_;
};

CauchyMatrix build_cauchy(const DiscreteMeasure& mu, double eps);

/// (K f)[i] = sum_j K[i][j] f[j].
std::vector<Complex> apply(const CauchyMatrix& k, std::span<const Complex> f);

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;     ///< total over restarts
    bool converged = false; ///< every restart met the tolerance
};

/// Largest singular value of K on L^2(mu) (inner product sum_i w_i f_i conj(g_i)).
/// Power iteration on the weighted normal operator, 3 seeded restarts, max taken.
NormEstimate operator_norm(const CauchyMatrix& k, double tol = 1e-10, int max_iter = 2000,
                           std::uint64_t seed = 1);

/// sum_i w_i |(K 1)[i]|^2 = ||C^eps_mu 1||^2 in L^2(mu).
double energy_of_one(const CauchyMatrix& k);

/// Decade grid {h, 10h, 100h, ...} capped at `diameter`.
std::vector<double> decade_grid(double h, double diameter);

struct TruncationProfile {
    std::vector<double> epsilons;
    std::vector<double> norms;
    double sup_norm = 0.0;
    bool converged = true;
};

/// Norms of the inner-truncated operators {eps < |xi - z|} over a grid of eps.
/// Evaluated in the frame rescaled to unit diameter (positions and weights
/// divided by the diameter, which leaves the weighted norm unchanged), so the
/// outer cutoff 1/eps never removes interactions and the result is invariant
/// under dilations of (mu, eps_grid).
TruncationProfile truncation_norm_profile(const DiscreteMeasure& mu, std::span<const double> eps_grid,
                                          double tol = 1e-10, int max_iter = 2000, std::uint64_t seed = 1);

/// Diameter of the support (max pairwise distance); 0 for fewer than 2 atoms.
double support_diameter(const DiscreteMeasure& mu);

}  // namespace caplab
