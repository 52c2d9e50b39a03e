#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "caplab/experiment_io.hpp"
#include "caplab/generators.hpp"
#include "caplab/measures.hpp"

namespace caplab {

// ---------------------------------------------------------------------------
// Marcinkiewicz-type sums on a chain

struct MarcinkiewiczSums {
    double s1 = 0.0;          ///< sum_j m_j sum_{k>j} m_k^2 / (r_j + ... + r_k)^2
    double s2 = 0.0;          ///< the same sum for the reversed chain
    double total_mass = 0.0;  ///< m_1 + ... + m_N
};

/// Exact O(N^2) evaluation from radii and masses in chain order.
MarcinkiewiczSums marcinkiewicz_sums(std::span<const double> radii, std::span<const double> masses);

/// S_{N,1}, S_{N,2} <= sum of masses for one chain (masses taken from the parts).
ExperimentResult marcinkiewicz_check(const BeadChain& chain);

// ---------------------------------------------------------------------------
// Cross curvature of a chain

struct MainLemmaOptions {
    double exact_triple_budget = 1e9;  ///< exact cross term below this n^3, Monte Carlo above
    std::int64_t mc_samples = 2000000;
    std::uint64_t seed = 1;
};

struct CrossRatio {
    double cross = 0.0;  ///< c^2(mu) - sum_j c^2(mu_j)
    double mass = 0.0;
    double rho = 0.0;    ///< cross / mass
    Estimator estimator = Estimator::exact;
    double std_error = 0.0;  ///< of rho
};

/// Throws std::invalid_argument when some part has mass above its disc radius.
CrossRatio cross_ratio(const BeadChain& chain, const MainLemmaOptions& opts = {});

/// rho for one chain, with the nonnegativity check.
ExperimentResult main_lemma_check(const BeadChain& chain, const MainLemmaOptions& opts = {});

// ---------------------------------------------------------------------------
// Good indices

struct GoodIndexReport {
    std::vector<double> g;     ///< g_i = sum_{j != i} r_j gamma_j / D(Q_i, Q_j)^2
    double fitted_a0 = 0.0;    ///< sum_i g_i gamma_i / sum_j gamma_j
    double geometric_a0 = 0.0; ///< max_j r_j sum_{i != j} r_i / D(Q_i, Q_j)^2 (an upper bound for fitted_a0)
};

/// Q_i = lambda' D_i; D(Q_i, Q_j) is the gap between the two dilated discs.
/// gamma has one entry per disc. Throws if two dilated discs overlap.
GoodIndexReport good_index_values(std::span<const Disc> discs, double lambda, std::span<const double> gamma);

/// Indices with g_i <= 10 a0.
std::vector<std::size_t> good_indices(const GoodIndexReport& report, double a0);

/// sum_{i in I} gamma_i / sum_j gamma_j (1 for an empty family).
double retention(std::span<const double> gamma, std::span<const std::size_t> indices);

/// Retention of I_* for the fitted and the geometric A0 on one chain (segment parts).
ExperimentResult good_index_selection(const BeadChain& chain);

// ---------------------------------------------------------------------------
// Growth against capacity on sampled discs

struct DiscSamplerOptions {
    std::size_t max_centers = 10000;  ///< support atoms first, then seeded pairwise midpoints
    int radii_per_decade = 20;
    std::size_t subsample = 48;       ///< atoms of B ∩ E passed to the capacity lower bound
    std::uint64_t seed = 1;
};

/// Disc centers: the support atoms followed by midpoints of seeded random
/// pairs, capped at max_centers. Radii: geometric from h to the diameter.
std::vector<Disc> sample_discs(const DiscreteMeasure& mu, const DiscSamplerOptions& opts);

/// mu(B) against capacity bounds of B ∩ E over sampled discs. Even-indexed
/// discs calibrate C0 = max mu(B)/lower; odd-indexed discs are checked for
/// certified violations mu(B) > C0 upper(B ∩ E), where upper is the
/// enclosing radius plus h/2 (each atom stands for a cell of diameter h).
/// E is the support of `measure`.
ExperimentResult mainc_check(const DiscreteMeasure& measure, const DiscSamplerOptions& opts = {});

// ---------------------------------------------------------------------------
// Capacity of the union against the sum

struct AlmostAdditivityOptions {
    int iterations = 50;
    bool exploratory = false;
};

/// lower_bound_curvature(union) / sum_j gamma(E_j) for one chain.
ExperimentResult almost_additivity_check(const BeadChain& chain, const AlmostAdditivityOptions& opts = {});

// ---------------------------------------------------------------------------
// Operator divergence on the corner family with mu_0

struct StageEnergy {
    int k = 0;              ///< Q_k is chosen[k]
    int gap = 0;            ///< N_{k+1} - N_k
    std::size_t atoms = 0;
    double mass = 0.0;      ///< mu(Q_k)
    double energy = 0.0;    ///< ||C_{mu|Q_k} 1||^2 in L^2(mu|Q_k)
    double normalized = 0.0;  ///< energy 4^{N_k} / gap
    double norm_bound = 0.0;  ///< sqrt(energy / mu(Q_k)) <= ||C_mu||
};

/// Energies of the chosen squares Q_k, k = first_stage .. K-1, with the full
/// discrete kernel (eps below the atom spacing).
std::vector<StageEnergy> stage_energies(const CornerFamily& family, int first_stage);

ExperimentResult opnorm_divergence_ex1(std::span<const int> nk, std::span<const int> control_nk,
                                       const CornerFamilyOptions& opts = {});

// ---------------------------------------------------------------------------
// Independence constant

struct IndependenceOptions {
    double tol = 1e-8;
    int max_iter = 2000;
    std::uint64_t seed = 1;
};

struct IndependenceReport {
    std::vector<double> part_norms;  ///< sup over the decade grid, each part alone
    double max_part_norm = 0.0;
    double joint_norm = 0.0;
    double ratio = 0.0;              ///< joint / max part
};

/// Norms over the decade grid from the finest resolution to the joint diameter.
IndependenceReport independence_constant(std::span<const DiscreteMeasure> parts, const IndependenceOptions& opts = {});

ExperimentResult cauchy_independence_check(std::span<const DiscreteMeasure> parts, const IndependenceOptions& opts = {});

// ---------------------------------------------------------------------------
// Residual of the energy identity

/// Frozen bound for |energy - c^2_eps / 6| / (g^2 ||mu||), fitted on the
/// calibration corpus of energy_identity (maximum 0.3544, rounded up to the
/// next tenth).
inline constexpr double kEnergyKappa = 0.4;

struct EnergyResidual {
    double epsilon = 0.0;   ///< in the unit-diameter frame
    double energy = 0.0;
    double c2 = 0.0;
    double kappa = 0.0;     ///< |energy - c2/6| / (g^2 ||mu||)
};

/// Residuals over the decade grid from h to the diameter, computed in the
/// unit-diameter frame where the outer cutoff never binds.
std::vector<EnergyResidual> energy_residuals(const DiscreteMeasure& mu);

// ---------------------------------------------------------------------------
// Experiment catalog

struct ExperimentInfo {
    std::string name;
    std::string anchor;       ///< the inequality or law under test
    std::string description;
};

const std::vector<ExperimentInfo>& experiment_catalog();
/// nullptr when unknown.
const ExperimentInfo* find_experiment(const std::string& name);

struct RunRequest {
    std::string experiment;
    std::uint64_t seed = 0;
    int threads = 1;
    Json generator = Json::object();
    Json estimator = Json::object();
};

/// Resolves the generator and estimator sections (ConfigError on unknown or
/// mistyped fields), runs the experiment and records the resolved configuration.
ExperimentResult run_experiment(const RunRequest& request);

}  // namespace caplab
