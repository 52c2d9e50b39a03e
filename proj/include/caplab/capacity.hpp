#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caplab/measures.hpp"

namespace caplab {

enum class LowerMethod { curvature_f61, opnorm_gop, exact_model };
enum class UpperMethod { enclosing_disc, exact_model };

const char* to_string(LowerMethod m);
const char* to_string(UpperMethod m);

struct CapacityBounds {
    double lower = 0.0;
    double upper = 0.0;
    LowerMethod lower_method = LowerMethod::curvature_f61;
    UpperMethod upper_method = UpperMethod::enclosing_disc;
};

/// Model sets with known (or comparable) analytic capacity.
struct ModelShape {
    enum class Kind { disc, segment, circle };
    Kind kind = Kind::disc;
    double size = 0.0;  ///< radius for disc and circle, length for segment

    /// "disc", "segment" or "circle"; anything else throws.
    static ModelShape parse(const std::string& kind, double size);
};

struct ModelCapacity {
    double value = 0.0;
    bool comparable_only = false;  ///< true for the circle proxy H^1/4
};

ModelCapacity exact_capacity_model(const ModelShape& shape);

/// Multiplier turning the curvature functional sup{mu(F) : growth <= 1,
/// c^2 <= mu(F)} into a capacity lower bound. On a segment of length l the
/// functional equals l/2 (density 1/2, zero curvature) while gamma = l/4.
inline constexpr double kCurvatureMethodConstant = 0.5;

/// Multiplier for the operator-norm functional. On the unit circle the
/// arc-length Cauchy operator has norm pi and growth forces density <= 1/pi,
/// so the functional is 2 against gamma = 1; the discretised norm runs a few
/// percent below pi, which the extra factor absorbs.
inline constexpr double kOpnormMethodConstant = 0.4;

struct LowerBoundResult {
    double bound = 0.0;        ///< method constant applied
    double functional = 0.0;   ///< raw t * ||mu|| of the best feasible iterate
    DiscreteMeasure witness;   ///< the feasible measure t * mu achieving `functional`
    int iterations = 0;
};

struct CurvatureBoundOptions {
    int iterations = 200;
    double step = 0.1;  ///< eta in w_i <- w_i exp(-eta * grad_i / mean(grad))
    double triple_budget = 2e9;
};

/// Feasible-ascent lower bound through the curvature characterisation.
/// Starts from uniform weights on the sample's support; every iterate is
/// rescaled by t = min(1/g, sqrt(||mu|| / c^2)), which makes t*mu satisfy
/// both constraints, and the best t*||mu|| is kept. Fully deterministic.
LowerBoundResult lower_bound_curvature(const DiscreteMeasure& sample, const CurvatureBoundOptions& opts = {});

struct OpnormBoundOptions {
    std::vector<double> eps_grid;  ///< empty: decade grid from h to the diameter
    double tol = 1e-9;
    int max_iter = 2000;
    std::uint64_t seed = 1;
};

/// Lower bound through the operator-norm characterisation. Uses the given
/// weights (uniform when absent), scaled by t = min(1/g, 1/max_eps ||C^eps||);
/// the weighted norm is linear in t, so t*mu is feasible.
LowerBoundResult lower_bound_opnorm(const DiscreteMeasure& sample, const OpnormBoundOptions& opts = {},
                                    std::optional<std::vector<double>> weights = std::nullopt);

/// Radius of the smallest enclosing disc of the support.
double upper_bound(const DiscreteMeasure& sample);

struct ProfileRow {
    std::size_t disc_index = 0;
    int part = -1;          ///< -1 is the union row
    std::size_t atoms = 0;
    double mass = 0.0;      ///< mu(B) or mu_j(B)
    double lower = 0.0;     ///< curvature-method lower bound of gamma(B ∩ E[_j])
    double upper = 0.0;     ///< enclosing-disc upper bound
};

struct ProfileSummary {
    std::size_t disc_index = 0;
    /// mu(B) / (upper(B ∩ E) + h/2): a lower bound for the true ratio
    /// mu(B)/gamma(B ∩ E) (each atom stands for a cell of diameter h), so a
    /// value above a declared C0 certifies a violation.
    double mainc_certified = 0.0;
    /// mu(B) / lower(B ∩ E): the optimistic (upper) estimate of the same ratio.
    double mainc_estimate = 0.0;
    /// sum_j lower(B ∩ E_j) / (upper(B ∩ E) + h/2): certified lower bound of
    /// the almost-additivity ratio.
    double almadd_certified = 0.0;
    /// sum_j upper(B ∩ E_j) / lower(B ∩ E).
    double almadd_estimate = 0.0;
};

struct CapacityProfile {
    std::vector<ProfileRow> rows;
    std::vector<ProfileSummary> summaries;
};

/// Bounds of gamma(B ∩ E) and gamma(B ∩ E_j) for every disc B.
CapacityProfile capacity_profile(std::span<const DiscreteMeasure> parts, std::span<const Disc> discs,
                                 const CurvatureBoundOptions& opts = {});

void write_profile_csv(std::ostream& out, const CapacityProfile& profile);

}  // namespace caplab
