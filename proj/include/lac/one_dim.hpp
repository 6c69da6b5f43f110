#pragma once

// Heteroclinic profiles q : R -> R^2 connecting the wells, computed as
// minimizers of the action
//
//   E(q) = int 1/2 |q'|^2 + W(q) dx
//
// over the symmetric class (q1 odd, q2 even) with q(+-X) clamped to the wells.
// Discretization: uniform grid with a node at x = 0, cell differences for the
// kinetic term and trapezoid weights for W; the gradient of the discrete
// energy is then exactly the centered second-order Euler-Lagrange residual.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lac/common.hpp"
#include "lac/optimize.hpp"
#include "lac/potential.hpp"

namespace lac {

struct Grid1D {
    double half_extent = 10.0;  // X
    int n = 2001;               // odd so that x = 0 is a node

    double spacing() const { return 2.0 * half_extent / (n - 1); }
    double x(int i) const { return -half_extent + i * spacing(); }
    int center() const { return (n - 1) / 2; }
    int half_nodes() const { return (n + 1) / 2; }  // nodes on [0, X]
};

inline Grid1D make_grid_1d(double half_extent, double target_spacing) {
    require(half_extent > 0.0 && target_spacing > 0.0, "make_grid_1d: bad extents");
    const int half_cells = std::max(2, static_cast<int>(std::lround(half_extent / target_spacing)));
    Grid1D g;
    g.half_extent = half_extent;
    g.n = 2 * half_cells + 1;
    return g;
}

struct Profile1D {
    Grid1D grid;
    std::vector<double> c1, c2;  // component values at all n nodes
};

inline Profile1D make_profile(const Grid1D& g) {
    Profile1D p;
    p.grid = g;
    p.c1.assign(g.n, 0.0);
    p.c2.assign(g.n, 0.0);
    return p;
}

inline void check_profile(const Profile1D& q) {
    require(q.grid.n >= 5 && q.grid.n % 2 == 1, "profile: grid must be odd-sized, n >= 5");
    require(static_cast<int>(q.c1.size()) == q.grid.n && static_cast<int>(q.c2.size()) == q.grid.n,
            "profile: component size mismatch");
}

// Discrete action. Quadrature: kinetic term per cell, W by trapezoid.
inline double profile_energy(const Potential& p, const Profile1D& q) {
    check_profile(q);
    const int n = q.grid.n;
    const double h = q.grid.spacing();
    double kin = 0.0, pot = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double d1 = q.c1[i + 1] - q.c1[i];
        const double d2 = q.c2[i + 1] - q.c2[i];
        kin += (d1 * d1 + d2 * d2) / (2.0 * h);
    }
    for (int i = 0; i < n; ++i) pot += trapezoid_weight(i, n) * p.value({q.c1[i], q.c2[i]});
    return kin + pot * h;
}

// Split of the action into kinetic and potential integrals (equipartition).
struct EnergySplit {
    double kinetic = 0.0;
    double potential = 0.0;
    double defect_rel = 0.0;  // |kinetic - potential| / total
};

inline EnergySplit energy_split(const Potential& p, const Profile1D& q) {
    check_profile(q);
    EnergySplit s;
    const int n = q.grid.n;
    const double h = q.grid.spacing();
    for (int i = 0; i + 1 < n; ++i) {
        const double d1 = q.c1[i + 1] - q.c1[i];
        const double d2 = q.c2[i + 1] - q.c2[i];
        s.kinetic += (d1 * d1 + d2 * d2) / (2.0 * h);
    }
    for (int i = 0; i < n; ++i)
        s.potential += trapezoid_weight(i, n) * h * p.value({q.c1[i], q.c2[i]});
    const double tot = s.kinetic + s.potential;
    s.defect_rel = (tot > 0.0) ? std::fabs(s.kinetic - s.potential) / tot : 0.0;
    return s;
}

// Gradient of the discrete action with respect to every nodal value,
// layout [c1(0..n-1), c2(0..n-1)].
inline std::vector<double> profile_energy_gradient(const Potential& p, const Profile1D& q) {
    check_profile(q);
    const int n = q.grid.n;
    const double h = q.grid.spacing();
    std::vector<double> g(2 * static_cast<size_t>(n), 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double d1 = (q.c1[i + 1] - q.c1[i]) / h;
        const double d2 = (q.c2[i + 1] - q.c2[i]) / h;
        g[i] -= d1;
        g[i + 1] += d1;
        g[n + i] -= d2;
        g[n + i + 1] += d2;
    }
    for (int i = 0; i < n; ++i) {
        const Vec2 gw = p.gradient({q.c1[i], q.c2[i]});
        const double w = trapezoid_weight(i, n) * h;
        g[i] += w * gw.x;
        g[n + i] += w * gw.y;
    }
    return g;
}

// L2 norm and distance with trapezoid weights.
inline double profile_l2_distance(const Profile1D& a, const Profile1D& b) {
    check_profile(a);
    check_profile(b);
    require(a.grid.n == b.grid.n && a.grid.half_extent == b.grid.half_extent,
            "profile_l2_distance: grid mismatch");
    const int n = a.grid.n;
    const double h = a.grid.spacing();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d1 = a.c1[i] - b.c1[i];
        const double d2 = a.c2[i] - b.c2[i];
        s += trapezoid_weight(i, n) * (d1 * d1 + d2 * d2);
    }
    return std::sqrt(s * h);
}

// Conjugate profile (q1, -q2): the second minimizer of the pair.
inline Profile1D conjugate_profile(const Profile1D& q) {
    Profile1D b = q;
    for (double& v : b.c2) v = -v;
    return b;
}

// Projection onto the symmetry class (q1 odd, q2 even about x = 0).
inline Profile1D symmetrize_profile(const Profile1D& q) {
    check_profile(q);
    Profile1D s = q;
    const int n = q.grid.n;
    for (int i = 0; i < n; ++i) {
        const int m = n - 1 - i;
        s.c1[i] = 0.5 * (q.c1[i] - q.c1[m]);
        s.c2[i] = 0.5 * (q.c2[i] + q.c2[m]);
    }
    s.c1[q.grid.center()] = 0.0;
    return s;
}

// Reference seed: odd cubic ramp clipped to the wells, scalar second component.
inline Profile1D reference_profile(const Grid1D& g, Vec2 well_plus = {1.0, 0.0}) {
    Profile1D q = make_profile(g);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double ramp = (std::fabs(x) >= 1.0) ? std::copysign(1.0, x) : 0.5 * x * (3.0 - x * x);
        q.c1[i] = well_plus.x * ramp;
        q.c2[i] = 0.0;
    }
    return q;
}

namespace detail1d {

// Reduced unknowns: c1 at i in [center+1, n-2], c2 at i in [center, n-2].
// The center value of c1 is pinned to zero, the right boundary is clamped to
// the well, and the left half is the symmetric image.
struct Packing {
    Grid1D grid;
    Vec2 well_plus;

    int n_c1() const { return grid.n - 2 - grid.center(); }
    int n_c2() const { return grid.n - 1 - grid.center(); }
    int dim() const { return n_c1() + n_c2(); }

    void unpack(const std::vector<double>& dof, Profile1D& q) const {
        const int n = grid.n, c = grid.center();
        q.grid = grid;
        q.c1.resize(n);
        q.c2.resize(n);
        q.c1[c] = 0.0;
        q.c1[n - 1] = well_plus.x;
        q.c2[n - 1] = well_plus.y;
        for (int i = c + 1; i <= n - 2; ++i) q.c1[i] = dof[i - c - 1];
        for (int i = c; i <= n - 2; ++i) q.c2[i] = dof[n_c1() + (i - c)];
        for (int i = 0; i < c; ++i) {
            q.c1[i] = -q.c1[n - 1 - i];
            q.c2[i] = q.c2[n - 1 - i];
        }
    }

    std::vector<double> pack(const Profile1D& q) const {
        const int n = grid.n, c = grid.center();
        std::vector<double> dof(dim());
        for (int i = c + 1; i <= n - 2; ++i) dof[i - c - 1] = q.c1[i];
        for (int i = c; i <= n - 2; ++i) dof[n_c1() + (i - c)] = q.c2[i];
        return dof;
    }

    // Fold the full nodal gradient onto the reduced unknowns.
    void fold_gradient(const std::vector<double>& full, std::vector<double>& g) const {
        const int n = grid.n, c = grid.center();
        g.assign(dim(), 0.0);
        for (int i = c + 1; i <= n - 2; ++i) g[i - c - 1] = full[i] - full[n - 1 - i];
        for (int i = c + 1; i <= n - 2; ++i)
            g[n_c1() + (i - c)] = full[n + i] + full[n + (n - 1 - i)];
        g[n_c1()] = full[n + c];
    }
};

}  // namespace detail1d

// Objective on the reduced unknowns; usable with minimize and check_gradient.
inline Objective reduced_objective_1d(const Potential& p, const Grid1D& g) {
    detail1d::Packing pack{g, p.spec().well_plus};
    auto prof = std::make_shared<Profile1D>(make_profile(g));
    return [p, pack, prof](const std::vector<double>& dof, std::vector<double>& grad) {
        pack.unpack(dof, *prof);
        const double e = profile_energy(p, *prof);
        const auto full = profile_energy_gradient(p, *prof);
        pack.fold_gradient(full, grad);
        return e;
    };
}

// Initial inverse Hessian for the reduced problem: the folded kinetic operator
// plus a mass shift of the metric scale, factored once. The exact Hessian is
// this plus the nodal potential Hessians, so the preconditioned spectrum stays
// O(1) wide no matter how fine the grid.
inline std::function<void(std::vector<double>&)> grid_preconditioner_1d(const Grid1D& g) {
    detail1d::Packing pack{g, {1.0, 0.0}};
    const int n1 = pack.n_c1(), n2 = pack.n_c2(), dim = pack.dim();
    const double h = g.spacing();
    const double k = 2.0 / h;  // cell stiffness, doubled by the mirrored half
    SymBanded b(dim, 1);
    for (int i = 0; i < n1; ++i) {
        b.add(i, i, 2.0 * k + h);
        if (i + 1 < n1) b.add(i + 1, i, -k);
    }
    for (int j = 0; j < n2; ++j) {
        b.add(n1 + j, n1 + j, ((j == 0) ? k : 2.0 * k) + h);
        if (j + 1 < n2) b.add(n1 + j + 1, n1 + j, -k);
    }
    auto d = std::make_shared<std::vector<double>>();
    auto l = std::make_shared<std::vector<double>>();
    int neg = 0;
    if (!detail::banded_ldlt(b, 0.0, *d, *l, neg, 1e-300) || neg != 0)
        throw solver_error("grid_preconditioner_1d: factorization failed");
    return [d, l, dim](std::vector<double>& v) {
        require(static_cast<int>(v.size()) == dim, "preconditioner: size mismatch");
        detail::banded_ldlt_solve(*d, *l, dim, 1, v);
    };
}

struct ProfileResult {
    Profile1D profile;
    double energy = 0.0;
    double grad_norm = 0.0;
    double q2_at_zero = 0.0;
    bool scalar = false;               // q2 identically zero within tolerance
    bool converged = false;
    double sign_violation_fraction = 0.0;  // share of nodes with q1(x) x <= 0, x != 0
};

struct HeteroclinicSet {
    Grid1D grid;
    std::vector<ProfileResult> minimizers;  // least-energy cluster, ascending energy
    double m1 = 0.0;                        // energy of the best profile
    double separation = 0.0;                // least pairwise L2 distance in the cluster
    double d0 = 0.0;                        // separation / 5
    double scalar_energy = 0.0;             // energy of the scalar-restricted profile
    std::vector<std::string> notes;
};

struct HeteroOptions {
    // grad_tol sits just above the double-precision floor for O(1) action
    // values on fine grids; runs that stall at the floor instead are kept when
    // the gradient is within 100x of it.
    MinimizeOptions opt = {4000, 1e-7, 10, 0.5, 1e-4, 48, nullptr, nullptr};
    double bump_amplitude = 0.0;  // 0: derived from alpha
    std::vector<double> extra_bumps;
    double dedup_tol = 0.1;       // L2 merge radius
    double cluster_tol = 1e-6;    // relative energy window for the minimal set
    double scalar_tol = 1e-7;
};

inline ProfileResult finish_profile(const Potential& p, const Profile1D& q, double grad_norm,
                                    bool converged, double scalar_tol) {
    ProfileResult r;
    r.profile = q;
    r.energy = profile_energy(p, q);
    r.grad_norm = grad_norm;
    r.converged = converged;
    r.q2_at_zero = q.c2[q.grid.center()];
    double m2 = 0.0;
    for (double v : q.c2) m2 = std::max(m2, std::fabs(v));
    r.scalar = m2 <= scalar_tol;
    int bad = 0, tot = 0;
    for (int i = 0; i < q.grid.n; ++i) {
        if (i == q.grid.center()) continue;
        ++tot;
        if (q.c1[i] * q.grid.x(i) <= 0.0) ++bad;
    }
    r.sign_violation_fraction = tot ? static_cast<double>(bad) / tot : 0.0;
    return r;
}

// Multistart minimization over the symmetric class. Seeds: the scalar ramp and
// ramps with a positive/negative localized bump in the second component, plus
// any extra bump amplitudes. Converged profiles are deduplicated in L2 and the
// least-energy cluster is returned.
inline HeteroclinicSet find_heteroclinics(const Potential& p, const Grid1D& g,
                                          const HeteroOptions& ho = {}) {
    require(g.n % 2 == 1 && g.n >= 9, "find_heteroclinics: grid must be odd-sized, n >= 9");
    detail1d::Packing pack{g, p.spec().well_plus};
    const Objective obj = reduced_objective_1d(p, g);
    HeteroOptions opts = ho;
    if (!opts.opt.precondition) opts.opt.precondition = grid_preconditioner_1d(g);

    const double alpha = p.spec().alpha;
    const double amp = (ho.bump_amplitude > 0.0)
                           ? ho.bump_amplitude
                           : 0.75 * std::max(0.5, std::sqrt(std::max(0.0, alpha)));
    std::vector<double> bumps = {0.0, amp, -amp};
    for (double b : ho.extra_bumps) bumps.push_back(b);

    HeteroclinicSet set;
    set.grid = g;
    std::vector<ProfileResult> found;
    bool have_scalar_energy = false;

    for (double b : bumps) {
        Profile1D seed = reference_profile(g, p.spec().well_plus);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            seed.c2[i] = b * std::exp(-x * x);
        }
        seed.c2[g.n - 1] = p.spec().well_plus.y;
        seed.c2[0] = p.spec().well_plus.y;

        MinimizeResult mr;
        try {
            mr = minimize(obj, pack.pack(seed), opts.opt);
        } catch (const divergence_error&) {
            set.notes.push_back("seed diverged (bump " + std::to_string(b) + ")");
            continue;
        }
        const bool usable =
            mr.converged ||
            (mr.status == MinimizeStatus::stalled && mr.grad_norm <= 100.0 * opts.opt.grad_tol);
        Profile1D q = make_profile(g);
        pack.unpack(mr.x, q);
        if (!usable) {
            set.notes.push_back("seed did not converge (bump " + std::to_string(b) +
                                ", grad " + std::to_string(mr.grad_norm) + ")");
            continue;
        }
        ProfileResult r = finish_profile(p, q, mr.grad_norm, mr.converged, ho.scalar_tol);
        if (b == 0.0 && !have_scalar_energy) {
            // Descent from a scalar seed stays scalar (the second component is
            // an invariant subspace), so this run is the scalar-restricted one.
            set.scalar_energy = r.energy;
            have_scalar_energy = true;
        }
        bool merged = false;
        for (auto& f : found) {
            if (profile_l2_distance(f.profile, r.profile) < ho.dedup_tol) {
                if (r.energy < f.energy) f = r;
                merged = true;
                break;
            }
        }
        if (!merged) found.push_back(std::move(r));
    }
    if (found.empty()) throw solver_error("find_heteroclinics: no converged profile");
    std::sort(found.begin(), found.end(),
              [](const ProfileResult& a, const ProfileResult& b) { return a.energy < b.energy; });
    set.m1 = found.front().energy;
    if (!have_scalar_energy) set.scalar_energy = set.m1;
    const double window = ho.cluster_tol * (1.0 + std::fabs(set.m1));
    for (auto& f : found)
        if (f.energy <= set.m1 + window) set.minimizers.push_back(std::move(f));

    set.separation = 0.0;
    for (size_t i = 0; i < set.minimizers.size(); ++i)
        for (size_t j = i + 1; j < set.minimizers.size(); ++j) {
            const double d =
                profile_l2_distance(set.minimizers[i].profile, set.minimizers[j].profile);
            set.separation = (set.separation == 0.0) ? d : std::min(set.separation, d);
        }
    set.d0 = set.separation / 5.0;
    return set;
}

// Second variation of the action at a profile, restricted to the symmetric
// perturbation class (h1 odd, h2 even), Dirichlet at +-X. Assembled as a
// banded pencil on [0, X] and solved by inertia bisection.
//
// Unknowns are interleaved on the right half: h2(0), then per j >= 1 the pair
// h1(j), h2(j), up to j = half_nodes-2. h1(0) vanishes by oddness and the
// boundary node is Dirichlet; the mirrored half doubles both quadratic forms,
// which cancels in the Rayleigh quotient.
struct SecondVariationForm {
    SymBanded a;                 // quadratic form, bandwidth 2
    std::vector<double> metric;  // squared-norm weights per unknown
    int half_nodes = 0;

    static int index1(int j) { return 2 * j - 1; }  // j in [1, half_nodes-2]
    static int index2(int j) { return 2 * j; }      // j in [0, half_nodes-2]
};

inline SecondVariationForm second_variation_form(const Potential& p, const Profile1D& q) {
    check_profile(q);
    const int c = q.grid.center(), nh = q.grid.half_nodes();
    const double h = q.grid.spacing();
    const int dim = 2 * (nh - 1) - 1;
    auto idx1 = SecondVariationForm::index1;
    auto idx2 = SecondVariationForm::index2;

    SecondVariationForm f{SymBanded(dim, 2), std::vector<double>(dim, 0.0), nh};
    for (int j = 0; j + 1 < nh; ++j) {
        const bool l1 = j >= 1, r1 = j + 1 <= nh - 2;  // h1 unknowns present
        const bool l2 = j <= nh - 2, r2 = j + 1 <= nh - 2;
        if (l1) f.a.add(idx1(j), idx1(j), 1.0 / h);
        if (r1) f.a.add(idx1(j + 1), idx1(j + 1), 1.0 / h);
        if (l1 && r1) f.a.add(idx1(j + 1), idx1(j), -1.0 / h);
        if (l2) f.a.add(idx2(j), idx2(j), 1.0 / h);
        if (r2) f.a.add(idx2(j + 1), idx2(j + 1), 1.0 / h);
        if (l2 && r2) f.a.add(idx2(j + 1), idx2(j), -1.0 / h);
    }
    for (int j = 0; j <= nh - 2; ++j) {
        const double w = ((j == 0) ? 0.5 : 1.0) * h;
        const Mat2 hw = p.hessian({q.c1[c + j], q.c2[c + j]});
        if (j >= 1) {
            f.a.add(idx1(j), idx1(j), w * hw.a11);
            f.a.add(idx2(j), idx1(j), w * hw.a12);
            f.metric[idx1(j)] = w;
        }
        f.a.add(idx2(j), idx2(j), w * hw.a22);
        f.metric[idx2(j)] = w;
    }
    return f;
}

struct SpectralReport {
    double omega_star = 0.0;
    int dim = 0;
    std::vector<double> mode1, mode2;  // eigen-perturbation on the full grid
};

inline SpectralReport second_variation_smallest(const Potential& p, const Profile1D& q,
                                                double tol = 1e-12) {
    const SecondVariationForm f = second_variation_form(p, q);
    const int n = q.grid.n, c = q.grid.center(), nh = f.half_nodes;

    const EigenPair ep = smallest_eigenvalue(f.a, f.metric, tol);
    SpectralReport rep;
    rep.omega_star = ep.value;
    rep.dim = f.a.dim;
    rep.mode1.assign(n, 0.0);
    rep.mode2.assign(n, 0.0);
    for (int j = 1; j <= nh - 2; ++j) rep.mode1[c + j] = ep.vector[SecondVariationForm::index1(j)];
    for (int j = 0; j <= nh - 2; ++j) rep.mode2[c + j] = ep.vector[SecondVariationForm::index2(j)];
    for (int i = 0; i < c; ++i) {
        rep.mode1[i] = -rep.mode1[n - 1 - i];
        rep.mode2[i] = rep.mode2[n - 1 - i];
    }
    return rep;
}

// Certificate for the two standing conditions: a finite least-energy set with
// genuinely two-component profiles, and a positive second-variation bound.
struct Certificate {
    bool nondegenerate_set = false;  // every least-energy profile has |q2(0)| > tol
    bool coercive_second_variation = false;  // omega_star > tol
    double omega_star = 0.0;
    double min_abs_q2_zero = 0.0;
    std::vector<std::string> notes;

    bool ok() const { return nondegenerate_set && coercive_second_variation; }
};

inline Certificate certify_conditions(const HeteroclinicSet& set,
                                      const std::vector<SpectralReport>& spectra, double tol) {
    require(tol > 0.0, "certify_conditions: tolerance must be positive");
    require(!set.minimizers.empty(), "certify_conditions: empty minimizer set");
    require(!spectra.empty(), "certify_conditions: no spectral reports");
    Certificate c;
    c.min_abs_q2_zero = 1e300;
    for (const auto& m : set.minimizers)
        c.min_abs_q2_zero = std::min(c.min_abs_q2_zero, std::fabs(m.q2_at_zero));
    c.nondegenerate_set = c.min_abs_q2_zero > tol;
    if (!c.nondegenerate_set)
        c.notes.push_back("a least-energy profile is scalar at x = 0: the set is degenerate");
    c.omega_star = 1e300;
    for (const auto& s : spectra) c.omega_star = std::min(c.omega_star, s.omega_star);
    c.coercive_second_variation = c.omega_star > tol;
    if (!c.coercive_second_variation)
        c.notes.push_back("second variation lower bound is not positive");
    return c;
}

// Exponential tail of |q - a+| on the decay window.
struct DecayFit {
    double onset_x = 0.0;     // first x >= 0 past which the distance stays below delta
    double rate = 0.0;        // fitted exponent
    double prefactor = 0.0;
    double r2 = 0.0;
    int points = 0;
    double window_lo = 0.0, window_hi = 0.0;
};

inline DecayFit fit_tail_decay(const Profile1D& q, Vec2 well_plus, double delta) {
    check_profile(q);
    require(delta > 0.0, "fit_tail_decay: delta must be positive");
    const Grid1D& g = q.grid;
    DecayFit f;
    auto dist = [&](int i) {
        const double d1 = q.c1[i] - well_plus.x, d2 = q.c2[i] - well_plus.y;
        return std::sqrt(d1 * d1 + d2 * d2);
    };
    // Onset: scan from the right for the first violation of the delta tube.
    int onset = g.center();
    for (int i = g.n - 1; i >= g.center(); --i) {
        if (dist(i) > delta) {
            onset = std::min(i + 1, g.n - 1);
            break;
        }
    }
    f.onset_x = g.x(onset);

    std::vector<double> xs, ys;
    const double xmax = 0.8 * g.half_extent;  // keep clear of the boundary clamp
    for (int i = g.center(); i < g.n; ++i) {
        const double d = dist(i);
        if (g.x(i) <= xmax && d <= delta && d >= 1e-8) {
            xs.push_back(g.x(i));
            ys.push_back(std::log(d));
        }
    }
    const LineFit lf = fit_line(xs, ys);
    f.points = lf.points;
    f.rate = -lf.slope;
    f.prefactor = std::exp(lf.intercept);
    f.r2 = lf.r2;
    if (!xs.empty()) {
        f.window_lo = xs.front();
        f.window_hi = xs.back();
    }
    return f;
}

// Quadratic growth of the action around the minimal set: for perturbations of
// amplitude at most 0.1, the excess energy is at least (omega*/4) times the
// squared L2 distance to the set.
struct GrowthProbe {
    double min_ratio = 0.0;   // worst (excess energy) / ((omega*/4) dist^2)
    int probes = 0;
    bool all_ok = false;
};

inline GrowthProbe probe_quadratic_growth(const Potential& p, const HeteroclinicSet& set,
                                          double omega_star, int n_probes, double amplitude,
                                          unsigned long long seed) {
    require(amplitude > 0.0 && amplitude <= 0.1, "probe_quadratic_growth: amplitude in (0, 0.1]");
    require(omega_star > 0.0, "probe_quadratic_growth: omega_star must be positive");
    require(n_probes > 0, "probe_quadratic_growth: need at least one probe");
    const Grid1D& g = set.grid;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);

    GrowthProbe out;
    out.probes = n_probes;
    out.min_ratio = 1e300;
    bool ok = true;
    for (int t = 0; t < n_probes; ++t) {
        const ProfileResult& base = set.minimizers[t % set.minimizers.size()];
        // Smooth symmetric perturbation: sine modes (odd) for the first
        // component, shifted cosines (even, vanishing at +-X) for the second.
        std::vector<double> a(8), b(8);
        for (auto& v : a) v = nd(gen);
        for (auto& v : b) v = nd(gen);
        Profile1D pert = base.profile;
        Profile1D dir = make_profile(g);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            double h1 = 0.0, h2 = 0.0;
            for (int k = 0; k < 8; ++k) {
                h1 += a[k] * std::sin((k + 1) * M_PI * x / g.half_extent);
                h2 += b[k] * std::cos((k + 0.5) * M_PI * x / g.half_extent);
            }
            dir.c1[i] = h1;
            dir.c2[i] = h2;
        }
        const Profile1D zero = make_profile(g);
        const double nrm = profile_l2_distance(dir, zero);
        if (nrm <= 0.0) continue;
        for (int i = 0; i < g.n; ++i) {
            pert.c1[i] = base.profile.c1[i] + amplitude / nrm * dir.c1[i];
            pert.c2[i] = base.profile.c2[i] + amplitude / nrm * dir.c2[i];
        }
        const double excess = profile_energy(p, pert) - set.m1;
        double dist = 1e300;
        for (const auto& m : set.minimizers)
            dist = std::min(dist, profile_l2_distance(pert, m.profile));
        const double bound = 0.25 * omega_star * dist * dist;
        if (bound <= 0.0) continue;
        const double ratio = excess / bound;
        out.min_ratio = std::min(out.min_ratio, ratio);
        if (excess < bound - 1e-10) ok = false;
    }
    out.all_ok = ok;
    return out;
}

}  // namespace lac
