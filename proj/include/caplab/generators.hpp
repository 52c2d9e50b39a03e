#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "caplab/geometry.hpp"
#include "caplab/measures.hpp"

namespace caplab {

/// Axis-parallel closed square [x, x+side] x [y, y+side].
struct Square {
    Point corner;
    double side = 0.0;
    Point center() const { return {corner.x + side / 2, corner.y + side / 2}; }
    bool contains(Point p) const {
        return p.x >= corner.x && p.x <= corner.x + side && p.y >= corner.y && p.y <= corner.y + side;
    }
    /// Concentric square scaled by `factor`.
    Square dilated(double factor) const {
        const double s = factor * side;
        return {{center().x - s / 2, center().y - s / 2}, s};
    }
};

/// The four corner squares of side/4 (lower-left, lower-right, upper-left, upper-right).
std::vector<Square> corner_children(const Square& q);

// ---------------------------------------------------------------------------
// Corner 1/4 Cantor set

struct CantorSet {
    int n = 0;
    std::vector<Point> squares;  ///< centers of the 4^n generation-n squares, depth-first order
    double side = 1.0;
    DiscreteMeasure measure;     ///< one atom of mass 4^-n per square, h = 4^-n
};

/// Generation n of the corner construction on the unit square, 0 <= n <= 8.
/// Atoms are in depth-first order, so atoms [k*4^(n-1), (k+1)*4^(n-1)) lie in
/// first-generation square k.
CantorSet cantor_corner(int n);

// ---------------------------------------------------------------------------
// Bead chains on the real line

enum class PartShape { segment, circle_arc, point_cloud };
const char* to_string(PartShape s);
PartShape parse_part_shape(const std::string& name);

struct BeadChainOptions {
    int atoms_per_part = 16;
    /// Consecutive gaps are lambda (r_j + r_{j+1}) (1 + u), u uniform in [jitter_min, jitter_max).
    double jitter_min = 0.01;
    double jitter_max = 0.25;
};

struct BeadChain {
    ChordArcCurve curve;
    std::vector<Disc> discs;
    double lambda = 2.0;
    PartShape shape = PartShape::segment;
    std::vector<DiscreteMeasure> parts;
    /// Capacity of each E_j: exact for segments (l/4); the H^1/4 proxy for
    /// arcs (comparable only); NaN for point clouds.
    std::vector<double> part_gamma;
    bool gamma_exact = true;

    /// Sum of the parts with atom labels (part index per atom).
    DiscreteMeasure measure() const;
    std::vector<int> part_labels() const;
};

/// Discs of the given radii with centers on the real axis, left to right.
/// Parts (all inside D_j, mass <= r_j):
///   segment:     horizontal segment of length r_j centered at x_j, mass r_j
///   circle_arc:  arc of radius r_j/2 about x_j, sweep 2 rad (length r_j),
///                seeded orientation
///   point_cloud: seeded uniform points in D(x_j, r_j/2), total mass r_j/2
/// The curve is the polyline (x_1 - r_1, 0), x_1, ..., x_N, (x_N + r_N, 0).
BeadChain bead_chain_on_line(std::span<const double> radii, double lambda, PartShape shape, std::uint64_t seed,
                             const BeadChainOptions& opts = {});

// ---------------------------------------------------------------------------
// Circle families L_j and the covering number N(lambda)

/// A_lambda = min(1, lambda' - 1) / 1000 with lambda' = (1 + lambda) / 2.
double a_lambda(double lambda);
inline double lambda_prime(double lambda) { return (1.0 + lambda) / 2.0; }

struct CoveringOptions {
    int radius_steps = 48;       ///< log grid of R per candidate N
    int offset_steps = 48;       ///< grid of |b| between the admissibility limits
    int angle_steps = 12;        ///< grid of arg b over [0, pi/N]
    std::int64_t random_samples = 20000;
    int max_n = 4096;            ///< search budget on N itself
};

struct CoveringResult {
    int n = 0;
    /// Smallest clearance R - |c - b| - rho of the best circle over all
    /// searched discs B (in units of r); positive means every B contained a circle.
    double margin = 0.0;
    std::int64_t discs_checked = 0;
};

/// Smallest N for which the adversarial search finds no disc B meeting both
/// D and C \ lambda D without containing a circle of L. Geometry is normalised
/// to D = D(0, 1) with circles of the nominal radius A_lambda.
/// Throws std::runtime_error when max_n is reached.
CoveringResult covering_number(double lambda, std::uint64_t seed, const CoveringOptions& opts = {});

/// Same as covering_number(lambda, 1) but cached per lambda (thread-safe).
int covering_number_cached(double lambda);

/// Number of random admissible discs (out of `samples`) that contain no circle
/// of the N-circle configuration.
std::int64_t covering_violations(double lambda, int n, std::int64_t samples, std::uint64_t seed);

/// Central circle at D.center plus N equal circles touching the inside of
/// the boundary of lambda' D, at equal angular spacing; all radii equal and
/// chosen so the total length is A_lambda (N + 1) target_gamma.
/// Throws if the circles would intersect or leave lambda' D.
std::vector<CircleArc> lj_circles(const Disc& d, double lambda, double target_gamma, int n);
std::vector<CircleArc> lj_circles(const Disc& d, double lambda, double target_gamma);

// ---------------------------------------------------------------------------
// Example families built on the corner construction

struct SquarePart {
    Square square;
    int generation = 0;
};

struct DiscPart {
    Disc disc;
    int generation = 0;
};

struct CornerFamilyOptions {
    double c = 0.25;        ///< ||mu_j|| = c * side for square parts
    double c_prime = 0.25;  ///< disc masses c' 2^-n 4^-n
    int grid = 2;           ///< a x a atoms per square part
    int base_grid = 16;     ///< a x a atoms for mu_0 on the unit square
    int circle_atoms = 12;  ///< atoms per disc boundary circle
};

struct CornerFamily {
    std::vector<int> nk;
    std::vector<SquarePart> squares;    ///< square parts E_j (excluding E_0)
    std::vector<DiscPart> discs;        ///< disc parts (second family only)
    std::vector<Square> chosen;         ///< Q_0 = unit square, Q_1, ..., Q_K
    std::vector<DiscreteMeasure> parts; ///< one measure per square part, then per disc part
    DiscreteMeasure base{{}, 1.0};      ///< mu_0 (empty in the second family)
    DiscreteMeasure measure{{}, 1.0};   ///< mu_0 + sum of parts
};

/// Iterated construction with one chosen (lower-left) square per stage:
/// stage s makes N_s - N_{s-1} corner steps inside Q_{s-1}, keeps the
/// lower-left square as Q_s, and the other squares become parts with
/// planar-uniform atoms of total mass c * side. mu_0 is uniform on the unit square.
/// Requires Nk[0] = 0, strictly increasing, last <= 12.
CornerFamily david_semmes_ex1(std::span<const int> nk, const CornerFamilyOptions& opts = {});

/// Same squares without mu_0, plus discs of radius 4^-n/10 concentric with
/// every square that is subdivided (generations N_{s-1} .. N_s - 1 inside
/// Q_{s-1}) and with the final Q_K, carrying uniform boundary measures of
/// mass c' 2^-n 4^-n.
CornerFamily ex2_with_discs(std::span<const int> nk, const CornerFamilyOptions& opts = {});

/// Largest lambda such that the lambda-dilates of the family's parts (squares
/// and discs, concentric dilation) are pairwise disjoint, found by bisection.
double family_separation(const CornerFamily& family);

// ---------------------------------------------------------------------------
// Grid family without a connecting curve

struct GridFamily {
    std::vector<Disc> e;  ///< E_ij, radius l/N^2 at (l i/(N-1), l j/(N-1))
    std::vector<Disc> d;  ///< D_ij = 2 E_ij
    DiscreteMeasure boundary;  ///< arc length on the union of the circles of E_ij
};

GridFamily grid_prop53(double l, int n, int atoms_per_circle = 16);

// ---------------------------------------------------------------------------
// Curve constructions

/// h(z) = i (1 + z) / (1 - z). Throws when |z - 1| < 1e-9.
std::vector<Point> mobius_transfer(std::span<const Point> points);

struct Envelope {
    ChordArcCurve curve;
    double chord_arc = 1.0;
};

/// Left unit semicircle T (angles pi/2 .. 3pi/2) with the arc of T inside
/// lambda' D_j replaced by the segments x_j a_j and x_j b_j, where a_j, b_j
/// are the intersections of T with the boundary of lambda' D_j. When
/// lambda' D_j covers an end of T only one segment is used.
Envelope chordarc_envelope(std::span<const Disc> discs, double lambda, double arc_step = 0.02);

}  // namespace caplab
