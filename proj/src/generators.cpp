#include "caplab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "caplab/summation.hpp"

namespace caplab {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::uint64_t& state) { return unit_interval(splitmix64(state)); }

double pow4(int n) { return std::ldexp(1.0, -2 * n); }

void grid_atoms(const Square& q, int a, double mass, std::vector<Atom>& out) {
    const double w = mass / (a * a);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j)
            out.push_back({{q.corner.x + (i + 0.5) * q.side / a, q.corner.y + (j + 0.5) * q.side / a}, w});
}

/// All generation-(depth) descendants of q in depth-first order.
void descend(const Square& q, int depth, std::vector<Square>& out) {
    if (depth == 0) {
        out.push_back(q);
        return;
    }
    for (const auto& c : corner_children(q)) descend(c, depth - 1, out);
}

void check_nk(std::span<const int> nk) {
    if (nk.size() < 2 || nk[0] != 0) throw std::invalid_argument("corner family: Nk must start with 0 and have a stage");
    for (std::size_t i = 1; i < nk.size(); ++i)
        if (nk[i] <= nk[i - 1]) throw std::invalid_argument("corner family: Nk must be strictly increasing");
    if (nk.back() > 12) throw std::invalid_argument("corner family: depth overflow (last N_k > 12)");
}

}  // namespace

std::vector<Square> corner_children(const Square& q) {
    const double s = q.side / 4;
    const double far = 3 * s;
    return {{q.corner, s},
            {{q.corner.x + far, q.corner.y}, s},
            {{q.corner.x, q.corner.y + far}, s},
            {{q.corner.x + far, q.corner.y + far}, s}};
}

CantorSet cantor_corner(int n) {
    if (n < 0 || n > 8) throw std::invalid_argument("cantor_corner: n must be in [0, 8]");
    std::vector<Square> leaves;
    descend(Square{{0.0, 0.0}, 1.0}, n, leaves);
    CantorSet out{n, {}, pow4(n), DiscreteMeasure({}, pow4(n), "cantor_n" + std::to_string(n))};
    std::vector<Atom> atoms;
    atoms.reserve(leaves.size());
    for (const auto& q : leaves) {
        out.squares.push_back(q.center());
        atoms.push_back({q.center(), pow4(n)});
    }
    out.measure = DiscreteMeasure(std::move(atoms), pow4(n), "cantor_n" + std::to_string(n));
    return out;
}

const char* to_string(PartShape s) {
    switch (s) {
        case PartShape::segment: return "segment";
        case PartShape::circle_arc: return "circle_arc";
        case PartShape::point_cloud: return "point_cloud";
    }
    return "unknown";
}

PartShape parse_part_shape(const std::string& name) {
    if (name == "segment") return PartShape::segment;
    if (name == "circle_arc") return PartShape::circle_arc;
    if (name == "point_cloud") return PartShape::point_cloud;
    throw std::invalid_argument("unknown part shape '" + name + "'");
}

DiscreteMeasure BeadChain::measure() const {
    DiscreteMeasure mu({}, parts.empty() ? 1.0 : parts.front().resolution_h(), "bead_chain");
    for (const auto& p : parts) mu = add(mu, p);
    return mu;
}

std::vector<int> BeadChain::part_labels() const {
    std::vector<int> labels;
    for (std::size_t j = 0; j < parts.size(); ++j) labels.insert(labels.end(), parts[j].size(), static_cast<int>(j));
    return labels;
}

BeadChain bead_chain_on_line(std::span<const double> radii, double lambda, PartShape shape, std::uint64_t seed,
                             const BeadChainOptions& opts) {
    if (!(lambda > 1.0)) throw std::invalid_argument("bead_chain_on_line: lambda must exceed 1");
    if (radii.empty()) throw std::invalid_argument("bead_chain_on_line: no radii");
    for (double r : radii)
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("bead_chain_on_line: radii must be positive");
    if (opts.atoms_per_part < 1) throw std::invalid_argument("bead_chain_on_line: atoms_per_part must be >= 1");

    std::uint64_t gaps = derive_seed(seed, 0);
    std::vector<Disc> discs;
    double x = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (j > 0) {
            const double u = opts.jitter_min + (opts.jitter_max - opts.jitter_min) * uniform(gaps);
            x += lambda * (radii[j - 1] + radii[j]) * (1.0 + u);
        }
        discs.push_back({{x, 0.0}, radii[j]});
    }

    std::vector<Point> vertices{{discs.front().center.x - radii.front(), 0.0}};
    for (const auto& d : discs) vertices.push_back(d.center);
    vertices.push_back({discs.back().center.x + radii.back(), 0.0});

    BeadChain chain{ChordArcCurve(vertices), discs, lambda, shape, {}, {}, shape != PartShape::circle_arc &&
                                                                              shape != PartShape::point_cloud};
    const int m = opts.atoms_per_part;
    for (std::size_t j = 0; j < discs.size(); ++j) {
        const double r = radii[j];
        const Point c = discs[j].center;
        const std::string label = "part" + std::to_string(j);
        std::uint64_t local = derive_seed(seed, j + 1);
        switch (shape) {
            case PartShape::segment:
                chain.parts.push_back(arc_length_measure(Segment{{c.x - r / 2, 0.0}, {c.x + r / 2, 0.0}}, m, label));
                chain.part_gamma.push_back(r / 4);
                break;
            case PartShape::circle_arc: {
                const double start = 2 * kPi * uniform(local);
                chain.parts.push_back(arc_length_measure(CircleArc(c, r / 2, start, start + 2.0), m, label));
                chain.part_gamma.push_back(r / 4);
                break;
            }
            case PartShape::point_cloud: {
                std::vector<Atom> atoms;
                for (int k = 0; k < m; ++k) {
                    const double rho = (r / 2) * std::sqrt(uniform(local));
                    const double th = 2 * kPi * uniform(local);
                    atoms.push_back({{c.x + rho * std::cos(th), c.y + rho * std::sin(th)}, r / (2.0 * m)});
                }
                chain.parts.push_back(DiscreteMeasure(std::move(atoms), r / std::sqrt(static_cast<double>(m)), label));
                chain.part_gamma.push_back(std::numeric_limits<double>::quiet_NaN());
                break;
            }
        }
    }
    return chain;
}

// ---------------------------------------------------------------------------

double a_lambda(double lambda) {
    if (!(lambda > 1.0)) throw std::invalid_argument("a_lambda: lambda must exceed 1");
    return std::min(1.0, lambda_prime(lambda) - 1.0) / 1000.0;
}

std::vector<CircleArc> lj_circles(const Disc& d, double lambda, double target_gamma, int n) {
    if (!(target_gamma > 0.0) || target_gamma > d.radius)
        throw std::invalid_argument("lj_circles: need 0 < target_gamma <= radius");
    if (n < 1) throw std::invalid_argument("lj_circles: N must be >= 1");
    const double rho = a_lambda(lambda) * target_gamma / (2 * kPi);
    const double orbit = lambda_prime(lambda) * d.radius - rho;
    if (orbit - rho <= rho) throw std::invalid_argument("lj_circles: outer circles collide with the central circle");
    if (n > 1 && 2 * orbit * std::sin(kPi / n) <= 2 * rho)
        throw std::invalid_argument("lj_circles: outer circles collide with each other");
    std::vector<CircleArc> out{CircleArc::full_circle(d.center, rho)};
    for (int k = 0; k < n; ++k) {
        const double th = 2 * kPi * k / n;
        out.push_back(CircleArc::full_circle({d.center.x + orbit * std::cos(th), d.center.y + orbit * std::sin(th)}, rho));
    }
    return out;
}

std::vector<CircleArc> lj_circles(const Disc& d, double lambda, double target_gamma) {
    return lj_circles(d, lambda, target_gamma, covering_number_cached(lambda));
}

// ---------------------------------------------------------------------------

namespace {

void assemble(CornerFamily& fam, const CornerFamilyOptions& opts, bool with_base, bool with_discs) {
    if (opts.grid < 1 || opts.base_grid < 1 || opts.circle_atoms < 3)
        throw std::invalid_argument("corner family: atom counts too small");
    const auto& nk = fam.nk;
    Square q{{0.0, 0.0}, 1.0};
    fam.chosen.push_back(q);
    std::vector<DiscPart> discs;
    for (std::size_t s = 1; s < nk.size(); ++s) {
        const int gap = nk[s] - nk[s - 1];
        if (with_discs) {
            for (int n = nk[s - 1]; n < nk[s]; ++n) {
                std::vector<Square> gen;
                descend(q, n - nk[s - 1], gen);
                for (const auto& e : gen) discs.push_back({{e.center(), pow4(n) / 10}, n});
            }
        }
        std::vector<Square> leaves;
        descend(q, gap, leaves);
        // leaves[0] is the lower-left square: it continues the construction.
        for (std::size_t k = 1; k < leaves.size(); ++k) fam.squares.push_back({leaves[k], nk[s]});
        q = leaves[0];
        fam.chosen.push_back(q);
    }
    if (with_discs) discs.push_back({{q.center(), pow4(nk.back()) / 10}, nk.back()});
    fam.discs = discs;

    for (std::size_t j = 0; j < fam.squares.size(); ++j) {
        std::vector<Atom> atoms;
        const Square& e = fam.squares[j].square;
        grid_atoms(e, opts.grid, opts.c * e.side, atoms);
        fam.parts.emplace_back(std::move(atoms), e.side / opts.grid, "square" + std::to_string(j));
    }
    for (std::size_t j = 0; j < fam.discs.size(); ++j) {
        const auto& dp = fam.discs[j];
        const double mass = opts.c_prime * std::ldexp(1.0, -dp.generation) * pow4(dp.generation);
        const DiscreteMeasure circle = arc_length_measure(CircleArc::full_circle(dp.disc.center, dp.disc.radius),
                                                          opts.circle_atoms, "disc" + std::to_string(j));
        fam.parts.push_back(scale(circle, mass / total_mass(circle)));
    }

    double h = 1.0;
    for (const auto& p : fam.parts) h = std::min(h, p.resolution_h());
    if (with_base) {
        std::vector<Atom> atoms;
        grid_atoms(Square{{0.0, 0.0}, 1.0}, opts.base_grid, opts.c, atoms);
        fam.base = DiscreteMeasure(std::move(atoms), 1.0 / opts.base_grid, "mu0");
    } else {
        fam.base = DiscreteMeasure({}, h, "mu0");
    }
    DiscreteMeasure mu = fam.base.with_label(with_base ? "ex1" : "ex2");
    for (const auto& p : fam.parts) mu = add(mu, p);
    fam.measure = mu.with_label(with_base ? "ex1" : "ex2");
}

double point_square_distance(Point p, const Square& s) {
    const double dx = std::max({s.corner.x - p.x, 0.0, p.x - (s.corner.x + s.side)});
    const double dy = std::max({s.corner.y - p.y, 0.0, p.y - (s.corner.y + s.side)});
    return std::hypot(dx, dy);
}

double square_square_sep(const Square& a, const Square& b) {
    const double half = (a.side + b.side) / 2;
    return std::max(std::abs(a.center().x - b.center().x), std::abs(a.center().y - b.center().y)) / half;
}

double square_disc_sep(const Square& a, const Disc& d) {
    // Largest lambda with dist(lambda a, center) > lambda r; the gap is decreasing in lambda.
    auto gap = [&](double lam) { return point_square_distance(d.center, a.dilated(lam)) - lam * d.radius; };
    if (gap(1e-12) <= 0.0) return 0.0;
    double lo = 1e-12, hi = 1.0;
    while (gap(hi) > 0.0) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

CornerFamily david_semmes_ex1(std::span<const int> nk, const CornerFamilyOptions& opts) {
    check_nk(nk);
    CornerFamily fam;
    fam.nk.assign(nk.begin(), nk.end());
    assemble(fam, opts, true, false);
    return fam;
}

CornerFamily ex2_with_discs(std::span<const int> nk, const CornerFamilyOptions& opts) {
    check_nk(nk);
    CornerFamily fam;
    fam.nk.assign(nk.begin(), nk.end());
    assemble(fam, opts, false, true);
    return fam;
}

double family_separation(const CornerFamily& family) {
    double best = std::numeric_limits<double>::infinity();
    const auto& sq = family.squares;
    const auto& dc = family.discs;
    for (std::size_t i = 0; i < sq.size(); ++i)
        for (std::size_t j = i + 1; j < sq.size(); ++j) best = std::min(best, square_square_sep(sq[i].square, sq[j].square));
    for (std::size_t i = 0; i < dc.size(); ++i)
        for (std::size_t j = i + 1; j < dc.size(); ++j)
            best = std::min(best, distance(dc[i].disc.center, dc[j].disc.center) / (dc[i].disc.radius + dc[j].disc.radius));
    for (const auto& s : sq)
        for (const auto& d : dc) best = std::min(best, square_disc_sep(s.square, d.disc));
    return best;
}

// ---------------------------------------------------------------------------

GridFamily grid_prop53(double l, int n, int atoms_per_circle) {
    if (n < 4) throw std::invalid_argument("grid_prop53: N must be >= 4");
    if (!(l > 0.0)) throw std::invalid_argument("grid_prop53: side must be positive");
    GridFamily out{{}, {}, DiscreteMeasure({}, 1.0)};
    const double r = l / (static_cast<double>(n) * n);
    DiscreteMeasure boundary({}, 2 * kPi * r / atoms_per_circle, "prop53");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Point c{l * i / (n - 1), l * j / (n - 1)};
            out.e.push_back({c, r});
            out.d.push_back({c, 2 * r});
            boundary = add(boundary, arc_length_measure(CircleArc::full_circle(c, r), atoms_per_circle));
        }
    out.boundary = boundary.with_label("prop53");
    return out;
}

std::vector<Point> mobius_transfer(std::span<const Point> points) {
    std::vector<Point> out;
    out.reserve(points.size());
    for (Point p : points) {
        const std::complex<double> z{p.x, p.y};
        if (std::abs(z - 1.0) < 1e-9) throw std::invalid_argument("mobius_transfer: point too close to the pole z = 1");
        const auto w = std::complex<double>{0.0, 1.0} * (1.0 + z) / (1.0 - z);
        out.push_back({w.real(), w.imag()});
    }
    return out;
}

Envelope chordarc_envelope(std::span<const Disc> discs, double lambda, double arc_step) {
    if (!(lambda > 1.0)) throw std::invalid_argument("chordarc_envelope: lambda must exceed 1");
    if (!lambda_separated(discs, lambda)) throw std::invalid_argument("chordarc_envelope: discs are not lambda-separated");
    const double t0 = kPi / 2, t1 = 3 * kPi / 2;
    const double lp = lambda_prime(lambda);

    struct Window {
        double a, b;  // angular interval of T covered by lambda' D_j
        Point center;
    };
    std::vector<Window> windows;
    for (const auto& d : discs) {
        const double rho = lp * d.radius;
        const double dist = std::hypot(d.center.x, d.center.y);
        if (dist + 1.0 <= rho) throw std::invalid_argument("chordarc_envelope: lambda' D_j contains the whole circle");
        if (dist >= 1.0 + rho || dist + rho <= 1.0)
            throw std::invalid_argument("chordarc_envelope: a disc does not meet the semicircle");
        const double phi = std::atan2(d.center.y, d.center.x);
        const double half = std::acos(std::clamp((1.0 + dist * dist - rho * rho) / (2.0 * dist), -1.0, 1.0));
        double mid = phi;
        while (mid < 0.0) mid += 2 * kPi;
        const double a = mid - half, b = mid + half;
        if (b <= t0 || a >= t1) throw std::invalid_argument("chordarc_envelope: a disc does not meet the semicircle");
        windows.push_back({std::max(a, t0), std::min(b, t1), d.center});
    }
    std::sort(windows.begin(), windows.end(), [](const Window& u, const Window& v) { return u.a < v.a; });

    auto on_t = [](double th) { return Point{std::cos(th), std::sin(th)}; };
    std::vector<Point> vertices;
    auto push = [&](Point p) {
        if (vertices.empty() || distance(vertices.back(), p) > 1e-12) vertices.push_back(p);
    };
    double th = t0;
    for (const auto& w : windows) {
        if (w.a > th) {
            const int steps = std::max(1, static_cast<int>(std::ceil((w.a - th) / arc_step)));
            for (int k = 0; k <= steps; ++k) push(on_t(th + (w.a - th) * k / steps));
        } else if (w.a > t0) {
            push(on_t(w.a));
        }
        if (w.a > t0) push(on_t(w.a));
        push(w.center);
        if (w.b < t1) push(on_t(w.b));
        th = w.b;
    }
    if (th < t1) {
        const int steps = std::max(1, static_cast<int>(std::ceil((t1 - th) / arc_step)));
        for (int k = 0; k <= steps; ++k) push(on_t(th + (t1 - th) * k / steps));
    }
    Envelope env{ChordArcCurve(vertices), 1.0};
    env.chord_arc = chord_arc_constant(env.curve);
    return env;
}

}  // namespace caplab
