#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "caplab/generators.hpp"
#include "caplab/summation.hpp"

namespace caplab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Circles of L for D = D(0,1): the central one and N on the orbit of radius lambda' - rho.
struct Layout {
    int n;
    double rho;
    double orbit;
    double lambda;

    /// R - |c - b| - rho for the best circle; > 0 means some circle lies inside D(b, R).
    double clearance(double bx, double by, double radius) const {
        double best = radius - std::hypot(bx, by) - rho;
        const double step = 2 * kPi / n;
        const double k0 = std::round(std::atan2(by, bx) / step);
        for (int dk = -1; dk <= 1; ++dk) {
            const double th = (k0 + dk) * step;
            const double d = std::hypot(bx - orbit * std::cos(th), by - orbit * std::sin(th));
            best = std::max(best, radius - d - rho);
        }
        return best;
    }

    double min_radius() const { return (lambda - 1.0) / 2.0; }
    double max_radius() const { return 1e3 * lambda; }
    /// Admissible |b| for radius R: B meets D (|b| <= 1 + R) and leaves lambda D (|b| + R >= lambda).
    std::pair<double, double> offsets(double radius) const {
        return {std::max(0.0, lambda - radius), 1.0 + radius};
    }
};

Layout layout(double lambda, int n) {
    const double rho = a_lambda(lambda);
    return {n, rho, lambda_prime(lambda) - rho, lambda};
}

double uniform(std::uint64_t& state) { return unit_interval(splitmix64(state)); }

struct Probe {
    double log_r, frac, phi;
};

double probe_clearance(const Layout& lay, const Probe& p) {
    const double r = std::exp(p.log_r);
    const auto [lo, hi] = lay.offsets(r);
    const double off = lo + std::clamp(p.frac, 0.0, 1.0) * (hi - lo);
    return lay.clearance(off * std::cos(p.phi), off * std::sin(p.phi), r);
}

/// Adversarial search for a fixed N. Returns the smallest clearance found.
double search(const Layout& lay, std::uint64_t seed, const CoveringOptions& opts, std::int64_t& checked) {
    const double lr0 = std::log(lay.min_radius() * (1.0 + 1e-9));
    const double lr1 = std::log(lay.max_radius());
    double worst = std::numeric_limits<double>::infinity();
    Probe worst_probe{lr0, 0.0, 0.0};
    auto consider = [&](const Probe& p) {
        const double c = probe_clearance(lay, p);
        ++checked;
        if (c < worst) {
            worst = c;
            worst_probe = p;
        }
    };

    const double phi_max = kPi / lay.n;  // rotation and reflection symmetry
    for (int i = 0; i < opts.radius_steps; ++i) {
        const double lr = lr0 + (lr1 - lr0) * i / (opts.radius_steps - 1);
        for (int j = 0; j < opts.offset_steps; ++j)
            for (int k = 0; k < opts.angle_steps; ++k)
                consider({lr, static_cast<double>(j) / (opts.offset_steps - 1),
                          phi_max * k / std::max(1, opts.angle_steps - 1)});
    }
    std::uint64_t state = seed;
    for (std::int64_t s = 0; s < opts.random_samples; ++s)
        consider({lr0 + (lr1 - lr0) * uniform(state), uniform(state), 2 * kPi * uniform(state)});

    // Pattern search from the worst probe.
    double step_lr = (lr1 - lr0) / opts.radius_steps, step_f = 1.0 / opts.offset_steps, step_phi = phi_max / 4;
    for (int it = 0; it < 200 && worst > 0.0; ++it) {
        bool moved = false;
        const Probe base = worst_probe;
        const Probe trials[6] = {{base.log_r + step_lr, base.frac, base.phi}, {base.log_r - step_lr, base.frac, base.phi},
                                 {base.log_r, base.frac + step_f, base.phi},  {base.log_r, base.frac - step_f, base.phi},
                                 {base.log_r, base.frac, base.phi + step_phi}, {base.log_r, base.frac, base.phi - step_phi}};
        for (const auto& t : trials) {
            if (t.log_r < lr0 || t.log_r > lr1) continue;
            const double before = worst;
            consider({t.log_r, std::clamp(t.frac, 0.0, 1.0), t.phi});
            moved = moved || worst < before;
        }
        if (!moved) {
            step_lr /= 2;
            step_f /= 2;
            step_phi /= 2;
        }
    }
    return worst;
}

}  // namespace

CoveringResult covering_number(double lambda, std::uint64_t seed, const CoveringOptions& opts) {
    if (!(lambda > 1.0)) throw std::invalid_argument("covering_number: lambda must exceed 1");
    if (opts.radius_steps < 2 || opts.offset_steps < 2 || opts.angle_steps < 1)
        throw std::invalid_argument("covering_number: grid too small");
    CoveringResult out;
    double last_margin = 0.0;
    for (int n = 1; n <= opts.max_n; ++n) {
        const Layout lay = layout(lambda, n);
        if (n > 1 && lay.orbit * std::sin(kPi / n) <= lay.rho) break;  // circles would touch
        last_margin = search(lay, derive_seed(seed, static_cast<std::uint64_t>(n)), opts, out.discs_checked);
        if (last_margin > 0.0) {
            out.n = n;
            out.margin = last_margin;
            return out;
        }
    }
    throw std::runtime_error("covering_number: no admissible N up to " + std::to_string(opts.max_n) +
                             " for lambda = " + std::to_string(lambda) + " (last clearance " +
                             std::to_string(last_margin) + ", " + std::to_string(out.discs_checked) + " discs checked)");
}

int covering_number_cached(double lambda) {
    static std::mutex mu;
    static std::map<double, int> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(lambda); it != cache.end()) return it->second;
    }
    const int n = covering_number(lambda, 1).n;
    std::lock_guard lock(mu);
    cache.emplace(lambda, n);
    return n;
}

std::int64_t covering_violations(double lambda, int n, std::int64_t samples, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("covering_violations: N must be >= 1");
    const Layout lay = layout(lambda, n);
    const double lr0 = std::log(lay.min_radius() * (1.0 + 1e-9));
    const double lr1 = std::log(lay.max_radius());
    std::uint64_t state = seed;
    std::int64_t bad = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        const Probe p{lr0 + (lr1 - lr0) * uniform(state), uniform(state), 2 * kPi * uniform(state)};
        if (probe_clearance(lay, p) <= 0.0) ++bad;
    }
    return bad;
}

}  // namespace caplab
