#include "caplab/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "caplab/summation.hpp"

namespace caplab {

namespace {

bool in_annulus(double d, double eps) { return d > eps * (1.0 + kScaleSlack) && d < (1.0 - kScaleSlack) / eps; }

double squared_norm(std::span<const Complex> v) {
    std::vector<double> parts(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) parts[i] = std::norm(v[i]);
    return pairwise_sum(parts);
}

/// Row-major A with A[i][j] = sqrt(w_i w_j) / (p_j - p_i) inside the annulus.
/// A is complex antisymmetric (A^T = -A), so A^H u = -conj(A conj(u)).
std::vector<Complex> symmetrised_kernel(const DiscreteMeasure& mu, double eps) {
    const std::size_t n = mu.size();
    const auto& atoms = mu.atoms();
    std::vector<Complex> a(n * n, Complex{});
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Point pi = atoms[i].point, pj = atoms[j].point;
            if (!in_annulus(distance(pi, pj), eps)) continue;
            const Complex dz{pj.x - pi.x, pj.y - pi.y};
            a[i * n + j] = std::sqrt(atoms[i].weight * atoms[j].weight) / dz;
        }
    }
    return a;
}

void matvec(const std::vector<Complex>& a, std::size_t n, std::span<const Complex> v, std::span<Complex> out) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Complex* row = a.data() + i * n;
        Complex s{};
        for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
        out[i] = s;
    }
}

NormEstimate power_iteration(const std::vector<Complex>& a, std::size_t n, double tol, int max_iter,
                             std::uint64_t seed) {
    NormEstimate best;
    best.converged = true;
    std::vector<Complex> v(n), u(n), w(n);
    for (int restart = 0; restart < 3; ++restart) {
        std::uint64_t state = derive_seed(seed, static_cast<std::uint64_t>(restart));
        for (auto& x : v)
            x = {2.0 * unit_interval(splitmix64(state)) - 1.0, 2.0 * unit_interval(splitmix64(state)) - 1.0};
        double nv = std::sqrt(squared_norm(v));
        for (auto& x : v) x /= nv;

        double sigma_sq = 0.0;
        bool converged = false;
        int it = 0;
        while (it < max_iter) {
            ++it;
            matvec(a, n, v, u);
            const double next = squared_norm(u);  // Rayleigh quotient of A^H A at unit v
            if (next == 0.0) {
                sigma_sq = 0.0;
                converged = true;
                break;
            }
            // w = A^H u = -conj(A conj(u))
            for (std::size_t i = 0; i < n; ++i) u[i] = std::conj(u[i]);
            matvec(a, n, u, w);
            for (std::size_t i = 0; i < n; ++i) w[i] = -std::conj(w[i]);
            const double nw = std::sqrt(squared_norm(w));
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
            const bool settled = std::abs(next - sigma_sq) < tol * next;
            sigma_sq = next;
            if (settled) {
                converged = true;
                break;
            }
        }
        best.value = std::max(best.value, std::sqrt(sigma_sq));
        best.iterations += it;
        best.converged = best.converged && converged;
    }
    return best;
}

}  // namespace

CauchyMatrix::CauchyMatrix(DiscreteMeasure measure, double epsilon, std::vector<Complex> entries)
    : measure_(std::move(measure)), epsilon_(epsilon), entries_(std::move(entries)) {
    if (entries_.size() != measure_.size() * measure_.size())
        throw std::invalid_argument("CauchyMatrix: entry count must be n*n");
}

CauchyMatrix build_cauchy(const DiscreteMeasure& mu, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_cauchy: eps must be positive");
    const std::size_t n = mu.size();
    const auto& atoms = mu.atoms();
    std::vector<Complex> k(n * n, Complex{});
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Point pi = atoms[i].point, pj = atoms[j].point;
            if (!in_annulus(distance(pi, pj), eps)) continue;
            k[i * n + j] = atoms[j].weight / Complex{pj.x - pi.x, pj.y - pi.y};
        }
    }
    return CauchyMatrix(mu, eps, std::move(k));
}

std::vector<Complex> apply(const CauchyMatrix& k, std::span<const Complex> f) {
    if (f.size() != k.size()) throw std::invalid_argument("apply: vector length does not match atom count");
    std::vector<Complex> out(k.size());
    matvec(k.entries(), k.size(), f, out);
    return out;
}

NormEstimate operator_norm(const CauchyMatrix& k, double tol, int max_iter, std::uint64_t seed) {
    if (k.size() == 0) throw std::invalid_argument("operator_norm: empty measure");
    if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");
    const auto a = symmetrised_kernel(k.measure(), k.epsilon());
    return power_iteration(a, k.size(), tol, max_iter, seed);
}

double energy_of_one(const CauchyMatrix& k) {
    const std::size_t n = k.size();
    const std::vector<Complex> ones(n, Complex{1.0, 0.0});
    const auto c1 = caplab::apply(k, ones);
    std::vector<double> parts(n);
    for (std::size_t i = 0; i < n; ++i) parts[i] = k.measure().atoms()[i].weight * std::norm(c1[i]);
    return pairwise_sum(parts);
}

std::vector<double> decade_grid(double h, double diameter) {
    if (!(h > 0.0)) throw std::invalid_argument("decade_grid: h must be positive");
    std::vector<double> grid;
    for (double e = h; e <= diameter * (1.0 + 1e-12); e *= 10.0) grid.push_back(e);
    if (grid.empty()) grid.push_back(h);
    return grid;
}

double support_diameter(const DiscreteMeasure& mu) {
    const auto& atoms = mu.atoms();
    double best = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            best = std::max(best, distance(atoms[i].point, atoms[j].point));
    return best;
}

TruncationProfile truncation_norm_profile(const DiscreteMeasure& mu, std::span<const double> eps_grid,
                                          double tol, int max_iter, std::uint64_t seed) {
    if (mu.empty()) throw std::invalid_argument("truncation_norm_profile: empty measure");
    TruncationProfile out;
    const double diam = support_diameter(mu);
    for (double eps : eps_grid) {
        if (!(eps > 0.0)) throw std::invalid_argument("truncation_norm_profile: eps must be positive");
        out.epsilons.push_back(eps);
        if (diam == 0.0 || eps >= diam) {
            out.norms.push_back(0.0);
            continue;
        }
        const DiscreteMeasure unit = transform(mu, 0.0, 1.0 / diam, Point{}, 1.0 / diam);
        const auto a = symmetrised_kernel(unit, eps / diam);
        const auto est = power_iteration(a, unit.size(), tol, max_iter, seed);
        out.norms.push_back(est.value);
        out.converged = out.converged && est.converged;
    }
    out.sup_norm = out.norms.empty() ? 0.0 : *std::max_element(out.norms.begin(), out.norms.end());
    return out;
}

}  // namespace caplab
