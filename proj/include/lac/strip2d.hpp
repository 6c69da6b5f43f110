#pragma once

// Layered fields on the strip R x (-L, L): the width-L minimization problem,
// the width table m2(L) with its exponential-gap extrapolation, and the
// truncated 2D transition connecting a profile pair.
//
// Fields live in the symmetry class
//   v(-x, y) = (-v1, v2)(x, y),   v(x, -y) = (v1, -v2)(x, y),
// so only the quarter [0, X] x [0, L] is stored (x-fastest). The energy is the
// renormalized strip action
//   phi2L(v) = int_{-L}^{L}  1/2 ||d_y v(., y)||^2  +  [slice action - m1]  dy
// with m1 the slice action of the transition profile re-solved on the same
// x-grid. Using the matched discrete m1 keeps every slice term nonnegative up
// to rounding, so the functional never suffers catastrophic cancellation.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "lac/common.hpp"
#include "lac/one_dim.hpp"
#include "lac/optimize.hpp"
#include "lac/potential.hpp"

namespace lac {

struct StripGrid {
    double x_extent = 10.0;  // X
    double y_extent = 1.0;   // L
    int nx = 0, ny = 0;      // quarter node counts, boundaries included

    double hx() const { return x_extent / (nx - 1); }
    double hy() const { return y_extent / (ny - 1); }
    double x(int i) const { return i * hx(); }
    double y(int j) const { return j * hy(); }
    int nodes() const { return nx * ny; }
    int at(int i, int j) const { return j * nx + i; }
};

inline StripGrid make_strip_grid(double x_extent, double y_extent, double hx, double hy) {
    require(x_extent > 0.0 && y_extent > 0.0 && hx > 0.0 && hy > 0.0,
            "make_strip_grid: extents and spacings must be positive");
    StripGrid g;
    g.x_extent = x_extent;
    g.y_extent = y_extent;
    g.nx = std::max(4, static_cast<int>(std::lround(x_extent / hx)) + 1);
    g.ny = std::max(2, static_cast<int>(std::lround(y_extent / hy)) + 1);
    return g;
}

enum class TopCondition { neumann, dirichlet };

struct Field2D {
    StripGrid grid;
    std::vector<double> v1, v2;  // quarter values, index grid.at(i, j)
};

inline Field2D make_strip_field(const StripGrid& g) {
    Field2D f;
    f.grid = g;
    f.v1.assign(g.nodes(), 0.0);
    f.v2.assign(g.nodes(), 0.0);
    return f;
}

inline void check_field(const Field2D& v) {
    require(v.grid.nx >= 4 && v.grid.ny >= 2, "field: grid too small");
    require(static_cast<int>(v.v1.size()) == v.grid.nodes() &&
                static_cast<int>(v.v2.size()) == v.grid.nodes(),
            "field: component size mismatch");
}

namespace detail2d {

// Half of the slice action: kinetic over x-cells plus trapezoid potential on
// the right half [0, X]. The full-line slice action is twice this value; the
// renormalized row term uses it directly so that a row holding the baseline
// profile cancels bitwise.
inline double slice_half(const Potential& p, const double* c1, const double* c2, int nx,
                         double hx) {
    double kin = 0.0, pot = 0.0;
    for (int i = 0; i + 1 < nx; ++i) {
        const double d1 = c1[i + 1] - c1[i];
        const double d2 = c2[i + 1] - c2[i];
        kin += (d1 * d1 + d2 * d2) / (2.0 * hx);
    }
    for (int i = 0; i < nx; ++i)
        pot += trapezoid_weight(i, nx) * p.value({c1[i], c2[i]});
    return kin + pot * hx;
}

}  // namespace detail2d

// The 1D data a strip computation renormalizes against: the transition profile
// and the scalar profile re-solved on the identical x-grid.
struct StripBaseline {
    double x_extent = 0.0;
    int nx = 0;
    double hx = 0.0;
    std::vector<double> q1, q2;  // transition profile, right half, q2(0) >= 0 branch
    std::vector<double> s1;      // scalar profile (second component identically zero)
    double m1_slice = 0.0;       // slice action of (q1, q2): the renormalizer
    double scalar_slice = 0.0;   // slice action of (s1, 0)
    bool nonscalar = false;
    double omega_star = 0.0;     // second-variation lower bound at the profile
};

inline StripBaseline make_strip_baseline(const Potential& p, double x_extent, double hx,
                                         const HeteroOptions& ho = {}) {
    const Grid1D g1 = make_grid_1d(x_extent, hx);
    require(std::fabs(g1.spacing() - hx) <= 1e-12 * (1.0 + hx),
            "strip baseline: x-extent must be a multiple of the spacing");
    const HeteroclinicSet set = find_heteroclinics(p, g1, ho);
    const ProfileResult* pick = &set.minimizers.front();
    for (const auto& m : set.minimizers)
        if (m.q2_at_zero > 0.0) {
            pick = &m;
            break;
        }

    StripBaseline b;
    b.x_extent = x_extent;
    b.nx = g1.half_nodes();
    b.hx = g1.spacing();
    const int c = g1.center();
    b.q1.assign(pick->profile.c1.begin() + c, pick->profile.c1.end());
    b.q2.assign(pick->profile.c2.begin() + c, pick->profile.c2.end());
    b.nonscalar = !pick->scalar;

    // Scalar branch by direct descent; the second component stays exactly zero.
    detail1d::Packing pack{g1, p.spec().well_plus};
    MinimizeOptions mo = ho.opt;
    if (!mo.precondition) mo.precondition = grid_preconditioner_1d(g1);
    const MinimizeResult sr = minimize(reduced_objective_1d(p, g1), pack.pack(reference_profile(g1, p.spec().well_plus)), mo);
    Profile1D sq = make_profile(g1);
    pack.unpack(sr.x, sq);
    b.s1.assign(sq.c1.begin() + c, sq.c1.end());

    b.m1_slice = 2.0 * detail2d::slice_half(p, b.q1.data(), b.q2.data(), b.nx, b.hx);
    std::vector<double> zero(b.nx, 0.0);
    b.scalar_slice = 2.0 * detail2d::slice_half(p, b.s1.data(), zero.data(), b.nx, b.hx);
    b.omega_star = second_variation_smallest(p, pick->profile).omega_star;
    return b;
}

inline void check_baseline_match(const StripBaseline& base, const StripGrid& g) {
    if (g.nx != base.nx || std::fabs(g.hx() - base.hx) > 1e-12 * (1.0 + base.hx) ||
        std::fabs(g.x_extent - base.x_extent) > 1e-12 * (1.0 + base.x_extent))
        throw invalid_input("strip: field grid does not match the baseline x-grid");
}

// Renormalized strip action over the whole strip (four quadrants).
inline double phi2L(const Potential& p, const StripBaseline& base, const Field2D& v) {
    check_field(v);
    check_baseline_match(base, v.grid);
    const StripGrid& g = v.grid;
    const double hx = g.hx(), hy = g.hy();
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double half = detail2d::slice_half(p, &v.v1[g.at(0, j)], &v.v2[g.at(0, j)], g.nx, hx);
        e += trapezoid_weight(j, g.ny) * hy * (half - 0.5 * base.m1_slice);
    }
    for (int i = 0; i < g.nx; ++i) {
        double kin = 0.0;
        for (int j = 0; j + 1 < g.ny; ++j) {
            const double d1 = v.v1[g.at(i, j + 1)] - v.v1[g.at(i, j)];
            const double d2 = v.v2[g.at(i, j + 1)] - v.v2[g.at(i, j)];
            kin += (d1 * d1 + d2 * d2) / (2.0 * hy);
        }
        e += trapezoid_weight(i, g.nx) * hx * kin;
    }
    return 4.0 * e;
}

// Per-row excess of the slice action over the baseline minimum. Each entry is
// nonnegative up to the 1D solver floor; a row holding the baseline profile
// gives exactly zero.
inline std::vector<double> slice_excess(const Potential& p, const StripBaseline& base,
                                        const Field2D& v) {
    check_field(v);
    check_baseline_match(base, v.grid);
    const StripGrid& g = v.grid;
    std::vector<double> out(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        const double half = detail2d::slice_half(p, &v.v1[g.at(0, j)], &v.v2[g.at(0, j)], g.nx, g.hx());
        out[j] = 2.0 * half - base.m1_slice;
    }
    return out;
}

// Integral of |d_y v|^2 over the whole strip.
inline double y_kinetic_total(const Field2D& v) {
    check_field(v);
    const StripGrid& g = v.grid;
    double kin = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        double col = 0.0;
        for (int j = 0; j + 1 < g.ny; ++j) {
            const double d1 = v.v1[g.at(i, j + 1)] - v.v1[g.at(i, j)];
            const double d2 = v.v2[g.at(i, j + 1)] - v.v2[g.at(i, j)];
            col += (d1 * d1 + d2 * d2) / g.hy();
        }
        kin += trapezoid_weight(i, g.nx) * g.hx() * col;
    }
    return 4.0 * kin;
}

// Renormalized action of the sub-strip between two y-levels of the upper half,
// full x-line scale. Bounds slice displacements:
//   || v(., y1) - v(., y0) ||^2  <=  2 (y1 - y0) phi2L_window(j0, j1).
inline double phi2L_window(const Potential& p, const StripBaseline& base, const Field2D& v,
                           int j0, int j1) {
    check_field(v);
    check_baseline_match(base, v.grid);
    require(0 <= j0 && j0 < j1 && j1 < v.grid.ny, "phi2L_window: bad row range");
    const StripGrid& g = v.grid;
    const double hx = g.hx(), hy = g.hy();
    double e = 0.0;
    for (int j = j0; j <= j1; ++j) {
        const double w = (j == j0 || j == j1) ? 0.5 : 1.0;
        const double half = detail2d::slice_half(p, &v.v1[g.at(0, j)], &v.v2[g.at(0, j)], g.nx, hx);
        e += w * hy * (half - 0.5 * base.m1_slice);
    }
    for (int i = 0; i < g.nx; ++i) {
        double kin = 0.0;
        for (int j = j0; j < j1; ++j) {
            const double d1 = v.v1[g.at(i, j + 1)] - v.v1[g.at(i, j)];
            const double d2 = v.v2[g.at(i, j + 1)] - v.v2[g.at(i, j)];
            kin += (d1 * d1 + d2 * d2) / (2.0 * hy);
        }
        e += trapezoid_weight(i, g.nx) * hx * kin;
    }
    return 2.0 * e;
}

// Gradient of phi2L with respect to every quarter node, layout [v1 | v2].
inline std::vector<double> phi2L_gradient(const Potential& p, const StripBaseline& base,
                                          const Field2D& v) {
    check_field(v);
    check_baseline_match(base, v.grid);
    const StripGrid& g = v.grid;
    const int nn = g.nodes();
    const double hx = g.hx(), hy = g.hy();
    std::vector<double> grad(2 * static_cast<size_t>(nn), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        const double wy = trapezoid_weight(j, g.ny) * hy;
        for (int i = 0; i + 1 < g.nx; ++i) {
            const int a = g.at(i, j), bidx = g.at(i + 1, j);
            const double d1 = (v.v1[bidx] - v.v1[a]) / hx;
            const double d2 = (v.v2[bidx] - v.v2[a]) / hx;
            grad[a] -= wy * d1;
            grad[bidx] += wy * d1;
            grad[nn + a] -= wy * d2;
            grad[nn + bidx] += wy * d2;
        }
        for (int i = 0; i < g.nx; ++i) {
            const int a = g.at(i, j);
            const Vec2 gw = p.gradient({v.v1[a], v.v2[a]});
            const double w = wy * trapezoid_weight(i, g.nx) * hx;
            grad[a] += w * gw.x;
            grad[nn + a] += w * gw.y;
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        const double wx = trapezoid_weight(i, g.nx) * hx;
        for (int j = 0; j + 1 < g.ny; ++j) {
            const int a = g.at(i, j), bidx = g.at(i, j + 1);
            const double d1 = (v.v1[bidx] - v.v1[a]) / hy;
            const double d2 = (v.v2[bidx] - v.v2[a]) / hy;
            grad[a] -= wx * d1;
            grad[bidx] += wx * d1;
            grad[nn + a] -= wx * d2;
            grad[nn + bidx] += wx * d2;
        }
    }
    for (double& x : grad) x *= 4.0;
    return grad;
}

// Pointwise radial clamp to the ball |v| <= R. Idempotent; never increases the
// action since the potential grows radially past the wells.
inline Field2D truncate_R(const Field2D& v, double radius) {
    check_field(v);
    require(radius > 1.0, "truncate_R: radius must exceed 1");
    Field2D out = v;
    for (int a = 0; a < v.grid.nodes(); ++a) {
        const double r = std::sqrt(v.v1[a] * v.v1[a] + v.v2[a] * v.v2[a]);
        if (r > radius) {
            out.v1[a] = v.v1[a] * radius / r;
            out.v2[a] = v.v2[a] * radius / r;
        }
    }
    return out;
}

namespace detail2d {

// Reduced unknowns. Pinned lines: v1 = 0 on x = 0, v2 = 0 on y = 0. Clamped:
// the x = X column to the well, and the top row when the condition is
// Dirichlet (its values come from the field handed to the packer).
struct Packing {
    StripGrid g;
    TopCondition top = TopCondition::neumann;
    Vec2 well{1.0, 0.0};
    std::vector<double> top1, top2;  // frozen top row (dirichlet only)

    int jmax() const { return top == TopCondition::dirichlet ? g.ny - 2 : g.ny - 1; }
    int n1() const { return (g.nx - 2) * (jmax() + 1); }
    int n2() const { return (g.nx - 1) * jmax(); }
    int dim() const { return n1() + n2(); }
    int idx1(int i, int j) const { return j * (g.nx - 2) + (i - 1); }
    int idx2(int i, int j) const { return n1() + (j - 1) * (g.nx - 1) + i; }

    void freeze_top(const Field2D& v) {
        top1.assign(v.v1.begin() + g.at(0, g.ny - 1), v.v1.begin() + g.at(0, g.ny - 1) + g.nx);
        top2.assign(v.v2.begin() + g.at(0, g.ny - 1), v.v2.begin() + g.at(0, g.ny - 1) + g.nx);
    }

    void unpack(const std::vector<double>& dof, Field2D& v) const {
        v.grid = g;
        v.v1.assign(g.nodes(), 0.0);
        v.v2.assign(g.nodes(), 0.0);
        for (int j = 0; j < g.ny; ++j) {
            v.v1[g.at(g.nx - 1, j)] = well.x;
            v.v2[g.at(g.nx - 1, j)] = well.y;
        }
        if (top == TopCondition::dirichlet)
            for (int i = 0; i < g.nx; ++i) {
                v.v1[g.at(i, g.ny - 1)] = top1[i];
                v.v2[g.at(i, g.ny - 1)] = top2[i];
            }
        for (int j = 0; j <= jmax(); ++j)
            for (int i = 1; i <= g.nx - 2; ++i) v.v1[g.at(i, j)] = dof[idx1(i, j)];
        for (int j = 1; j <= jmax(); ++j)
            for (int i = 0; i <= g.nx - 2; ++i) v.v2[g.at(i, j)] = dof[idx2(i, j)];
    }

    std::vector<double> pack(const Field2D& v) const {
        std::vector<double> dof(dim(), 0.0);
        for (int j = 0; j <= jmax(); ++j)
            for (int i = 1; i <= g.nx - 2; ++i) dof[idx1(i, j)] = v.v1[g.at(i, j)];
        for (int j = 1; j <= jmax(); ++j)
            for (int i = 0; i <= g.nx - 2; ++i) dof[idx2(i, j)] = v.v2[g.at(i, j)];
        return dof;
    }

    void fold(const std::vector<double>& full, std::vector<double>& out) const {
        const int nn = g.nodes();
        out.assign(dim(), 0.0);
        for (int j = 0; j <= jmax(); ++j)
            for (int i = 1; i <= g.nx - 2; ++i) out[idx1(i, j)] = full[g.at(i, j)];
        for (int j = 1; j <= jmax(); ++j)
            for (int i = 0; i <= g.nx - 2; ++i) out[idx2(i, j)] = full[nn + g.at(i, j)];
    }

    // Radial clamp on the unknowns; pinned components count as zero.
    bool truncate(std::vector<double>& dof, double radius) const {
        bool changed = false;
        for (int j = 0; j <= jmax(); ++j)
            for (int i = 0; i <= g.nx - 2; ++i) {
                const bool has1 = i >= 1, has2 = j >= 1;
                double a = has1 ? dof[idx1(i, j)] : 0.0;
                double b = has2 ? dof[idx2(i, j)] : 0.0;
                const double r = std::sqrt(a * a + b * b);
                if (r > radius) {
                    if (has1) dof[idx1(i, j)] = a * radius / r;
                    if (has2) dof[idx2(i, j)] = b * radius / r;
                    changed = true;
                }
            }
        return changed;
    }
};

}  // namespace detail2d

// Objective on the reduced unknowns (value = phi2L).
inline Objective strip_objective(const Potential& p, const StripBaseline& base,
                                 const detail2d::Packing& pack) {
    auto work = std::make_shared<Field2D>(make_strip_field(pack.g));
    return [p, base, pack, work](const std::vector<double>& dof, std::vector<double>& grad) {
        pack.unpack(dof, *work);
        const double e = phi2L(p, base, *work);
        const auto full = phi2L_gradient(p, base, *work);
        pack.fold(full, grad);
        return e;
    };
}

// Seeds: a layered start interpolating the transition in y, and the scalar
// extension (a critical field with known value used as the competing branch).
inline Field2D transition_seed(const StripBaseline& base, const StripGrid& g) {
    check_baseline_match(base, g);
    Field2D v = make_strip_field(g);
    for (int j = 0; j < g.ny; ++j) {
        const double ramp = (g.ny == 1) ? 1.0 : g.y(j) / g.y_extent;
        for (int i = 0; i < g.nx; ++i) {
            v.v1[g.at(i, j)] = base.q1[i];
            v.v2[g.at(i, j)] = ramp * base.q2[i];
        }
    }
    return v;
}

inline Field2D scalar_extension(const StripBaseline& base, const StripGrid& g) {
    check_baseline_match(base, g);
    Field2D v = make_strip_field(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.v1[g.at(i, j)] = base.s1[i];
    return v;
}

inline Field2D y_constant_extension(const StripBaseline& base, const StripGrid& g) {
    check_baseline_match(base, g);
    Field2D v = make_strip_field(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            v.v1[g.at(i, j)] = base.q1[i];
            v.v2[g.at(i, j)] = base.q2[i];
        }
    return v;
}

// Bilinear sample of a quarter field at (x, y) clamped to the quarter.
inline Vec2 bilinear_sample(const Field2D& v, double x, double y) {
    const StripGrid& g = v.grid;
    const double u = std::clamp(x / g.hx(), 0.0, static_cast<double>(g.nx - 1));
    const double w = std::clamp(y / g.hy(), 0.0, static_cast<double>(g.ny - 1));
    const int i0 = std::min(static_cast<int>(u), g.nx - 2);
    const int j0 = std::min(static_cast<int>(w), g.ny - 2);
    const double fu = u - i0, fw = w - j0;
    auto lerp2 = [&](const std::vector<double>& a) {
        const double b0 = a[g.at(i0, j0)] * (1 - fu) + a[g.at(i0 + 1, j0)] * fu;
        const double b1 = a[g.at(i0, j0 + 1)] * (1 - fu) + a[g.at(i0 + 1, j0 + 1)] * fu;
        return b0 * (1 - fw) + b1 * fw;
    };
    return {lerp2(v.v1), lerp2(v.v2)};
}

inline Field2D prolong_field(const Field2D& coarse, const StripGrid& fine) {
    Field2D out = make_strip_field(fine);
    for (int j = 0; j < fine.ny; ++j)
        for (int i = 0; i < fine.nx; ++i) {
            const Vec2 s = bilinear_sample(coarse, fine.x(i), fine.y(j));
            out.v1[fine.at(i, j)] = s.x;
            out.v2[fine.at(i, j)] = s.y;
        }
    return out;
}

struct StripSolveOptions {
    MinimizeOptions opt = {30000, 1e-6, 12, 0.5, 1e-4, 48, nullptr, nullptr};
    int coarsen_levels = 2;    // warm-start ladder depth for cold starts
    bool apply_truncation = true;
    double truncation_radius = 0.0;  // 0: use the potential's coercivity radius
};

struct StripResult {
    Field2D field;
    double value = 0.0;  // phi2L at the returned field
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;       // tolerance reached or accepted floor stall
    bool scalar_branch = false;   // the minimum is the scalar extension
    double scalar_value = 0.0;    // phi2L of the scalar extension
};

namespace detail2d {

inline StripBaseline restrict_baseline(const Potential& p, const StripBaseline& base,
                                       int stride) {
    StripBaseline b;
    b.x_extent = base.x_extent;
    b.nx = (base.nx - 1) / stride + 1;
    b.hx = base.hx * stride;
    b.q1.resize(b.nx);
    b.q2.resize(b.nx);
    b.s1.resize(b.nx);
    for (int i = 0; i < b.nx; ++i) {
        b.q1[i] = base.q1[i * stride];
        b.q2[i] = base.q2[i * stride];
        b.s1[i] = base.s1[i * stride];
    }
    b.nonscalar = base.nonscalar;
    b.m1_slice = 2.0 * slice_half(p, b.q1.data(), b.q2.data(), b.nx, b.hx);
    std::vector<double> zero(b.nx, 0.0);
    b.scalar_slice = 2.0 * slice_half(p, b.s1.data(), zero.data(), b.nx, b.hx);
    b.omega_star = base.omega_star;
    return b;
}

inline MinimizeResult run_strip_minimize(const Potential& p, const StripBaseline& base,
                                         Packing& pack, const Field2D& seed,
                                         const StripSolveOptions& so) {
    if (pack.top == TopCondition::dirichlet) pack.freeze_top(seed);
    MinimizeOptions mo = so.opt;
    if (so.apply_truncation) {
        const double radius =
            so.truncation_radius > 0.0 ? so.truncation_radius : p.spec().radius;
        const Packing pk = pack;
        mo.post_step = [pk, radius](std::vector<double>& dof) { return pk.truncate(dof, radius); };
    }
    return minimize(strip_objective(p, base, pack), pack.pack(seed), mo);
}

}  // namespace detail2d

namespace detail2d {

inline double max_abs_v2(const Field2D& v) {
    double m = 0.0;
    for (double x : v.v2) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace detail2d

// Minimize the strip action at width L with a free (natural) top. Cold starts
// climb a coarsened warm-start ladder; a warm field (same x-grid, any height)
// skips it. The scalar-extension branch competes; when the transition branch
// does not beat it the scalar field is returned. The scalar subspace is
// invariant under descent, so a collapsed or scalar start can never probe the
// layered branch: such starts are replaced by the transition seed.
inline StripResult solve_PL2(const Potential& p, const StripBaseline& base, const StripGrid& g,
                             const StripSolveOptions& so = {}, const Field2D* warm = nullptr) {
    check_baseline_match(base, g);
    if (!base.nonscalar)
        throw hypothesis_error("solve_PL2: baseline transition is scalar; the layered problem degenerates");

    if (warm != nullptr && detail2d::max_abs_v2(*warm) < 1e-8) warm = nullptr;

    Field2D start = make_strip_field(g);
    if (warm != nullptr) {
        check_field(*warm);
        require(warm->grid.nx == g.nx, "solve_PL2: warm field x-grid mismatch");
        for (int j = 0; j < g.ny; ++j) {
            const int js = std::min(j, warm->grid.ny - 1);
            for (int i = 0; i < g.nx; ++i) {
                start.v1[g.at(i, j)] = warm->v1[warm->grid.at(i, js)];
                start.v2[g.at(i, j)] = warm->v2[warm->grid.at(i, js)];
            }
        }
    } else {
        // Warm-start ladder: coarsen both spacings while the node counts allow.
        std::vector<int> strides = {1};
        while (static_cast<int>(strides.size()) <= so.coarsen_levels) {
            const int s = strides.back() * 2;
            if ((g.nx - 1) % s || (g.ny - 1) % s) break;
            if ((g.nx - 1) / s < 6 || (g.ny - 1) / s < 2) break;
            strides.push_back(s);
        }
        Field2D level_field;
        for (int k = static_cast<int>(strides.size()) - 1; k >= 1; --k) {
            const int s = strides[k];
            StripGrid cg = g;
            cg.nx = (g.nx - 1) / s + 1;
            cg.ny = (g.ny - 1) / s + 1;
            const StripBaseline cb = detail2d::restrict_baseline(p, base, s);
            detail2d::Packing cpack{cg, TopCondition::neumann, p.spec().well_plus, {}, {}};
            const Field2D seed =
                (k == static_cast<int>(strides.size()) - 1) ? transition_seed(cb, cg)
                                                            : level_field;
            StripSolveOptions cso = so;
            cso.opt.grad_tol = std::max(so.opt.grad_tol, 1e-5);
            const MinimizeResult mr = detail2d::run_strip_minimize(p, cb, cpack, seed, cso);
            Field2D cf = make_strip_field(cg);
            cpack.unpack(mr.x, cf);
            StripGrid ng = g;
            const int sn = strides[k - 1];
            ng.nx = (g.nx - 1) / sn + 1;
            ng.ny = (g.ny - 1) / sn + 1;
            level_field = prolong_field(cf, ng);
        }
        start = strides.size() > 1 ? level_field : transition_seed(base, g);
        if (detail2d::max_abs_v2(start) < 1e-8) start = transition_seed(base, g);
    }

    detail2d::Packing pack{g, TopCondition::neumann, p.spec().well_plus, {}, {}};
    const MinimizeResult mr = detail2d::run_strip_minimize(p, base, pack, start, so);
    StripResult res;
    res.field = make_strip_field(g);
    pack.unpack(mr.x, res.field);
    res.value = phi2L(p, base, res.field);
    res.grad_norm = mr.grad_norm;
    res.iterations = mr.iterations;
    res.converged = mr.converged || (mr.status == MinimizeStatus::stalled &&
                                     mr.grad_norm <= 100.0 * so.opt.grad_tol);
    if (!res.converged)
        throw solver_error("solve_PL2: minimization did not reach tolerance (grad " +
                           std::to_string(mr.grad_norm) + ")");

    const Field2D scal = scalar_extension(base, g);
    res.scalar_value = phi2L(p, base, scal);
    if (res.scalar_value < res.value) {
        res.field = scal;
        res.value = res.scalar_value;
        res.scalar_branch = true;
        std::vector<double> full = phi2L_gradient(p, base, scal), folded;
        pack.fold(full, folded);
        res.grad_norm = norm2(folded);
    }
    return res;
}

// Sup-norm of the interior equation residual -lap v + grad W(v). Ghost values
// come from the symmetry across x = 0 and y = 0 and from the mirror at a free
// top; each component is sampled where it is an unknown.
inline double interior_residual_sup(const Potential& p, const Field2D& v, TopCondition top) {
    check_field(v);
    const StripGrid& g = v.grid;
    const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
    const int jm = (top == TopCondition::dirichlet) ? g.ny - 2 : g.ny - 1;
    auto at1 = [&](int i, int j) {
        if (i < 0) return -v.v1[g.at(-i, j)];
        if (j < 0) return v.v1[g.at(i, -j)];
        if (j > g.ny - 1) return v.v1[g.at(i, 2 * (g.ny - 1) - j)];
        return v.v1[g.at(i, j)];
    };
    auto at2 = [&](int i, int j) {
        if (i < 0) return v.v2[g.at(-i, j)];
        if (j < 0) return -v.v2[g.at(i, -j)];
        if (j > g.ny - 1) return v.v2[g.at(i, 2 * (g.ny - 1) - j)];
        return v.v2[g.at(i, j)];
    };
    double worst = 0.0;
    for (int j = 0; j <= jm; ++j)
        for (int i = 0; i <= g.nx - 2; ++i) {
            const Vec2 gw = p.gradient({v.v1[g.at(i, j)], v.v2[g.at(i, j)]});
            if (i >= 1) {
                const double lap1 = (at1(i + 1, j) + at1(i - 1, j) - 2.0 * at1(i, j)) / hx2 +
                                    (at1(i, j + 1) + at1(i, j - 1) - 2.0 * at1(i, j)) / hy2;
                worst = std::max(worst, std::fabs(-lap1 + gw.x));
            }
            if (j >= 1) {
                const double lap2 = (at2(i + 1, j) + at2(i - 1, j) - 2.0 * at2(i, j)) / hx2 +
                                    (at2(i, j + 1) + at2(i, j - 1) - 2.0 * at2(i, j)) / hy2;
                worst = std::max(worst, std::fabs(-lap2 + gw.y));
            }
        }
    return worst;
}

// Full-line L2 distance between one field row and a right-half profile.
inline double slice_l2_distance(const Field2D& v, int j, const std::vector<double>& r1,
                                const std::vector<double>& r2) {
    check_field(v);
    const StripGrid& g = v.grid;
    require(j >= 0 && j < g.ny, "slice_l2_distance: row out of range");
    require(static_cast<int>(r1.size()) == g.nx && static_cast<int>(r2.size()) == g.nx,
            "slice_l2_distance: profile size mismatch");
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double d1 = v.v1[g.at(i, j)] - r1[i];
        const double d2 = v.v2[g.at(i, j)] - r2[i];
        s += trapezoid_weight(i, g.nx) * (d1 * d1 + d2 * d2);
    }
    return std::sqrt(2.0 * s * g.hx());
}

struct WidthTable {
    std::vector<double> widths;
    std::vector<double> values;        // strip minimum per width
    std::vector<char> scalar_branch;   // 1 where the scalar extension wins
    double m2 = 0.0;                   // extrapolated limit
    double gap_rate = 0.0;             // fitted exponent of m2 - value(L)
    double gap_prefactor = 0.0;
    double fit_r2 = 0.0;
    int fit_points = 0;
    std::vector<StripResult> minimizers;
};

// Width table with warm starts, monotonicity enforcement and the fixed-point
// exponential extrapolation of the limit value.
inline WidthTable m2l_table(const Potential& p, const StripBaseline& base, double hy,
                            const std::vector<double>& widths, const StripSolveOptions& so = {}) {
    require(!widths.empty(), "m2l_table: empty width list");
    for (size_t k = 0; k < widths.size(); ++k) {
        require(widths[k] > 0.0, "m2l_table: widths must be positive");
        require(k == 0 || widths[k] > widths[k - 1], "m2l_table: widths must ascend");
    }
    WidthTable t;
    t.widths = widths;
    const Field2D* warm = nullptr;
    for (double L : widths) {
        const StripGrid g = make_strip_grid(base.x_extent, L, base.hx, hy);
        StripResult r = solve_PL2(p, base, g, so, warm);
        t.values.push_back(r.value);
        t.scalar_branch.push_back(r.scalar_branch ? 1 : 0);
        t.minimizers.push_back(std::move(r));
        warm = &t.minimizers.back().field;
    }
    for (size_t k = 1; k < t.values.size(); ++k)
        if (t.values[k] < t.values[k - 1] - 1e-8)
            throw solver_error("m2l_table: width table decreased beyond tolerance at L = " +
                               std::to_string(t.widths[k]));

    // Fixed-point fit of value(L) = m2 - C exp(-rate L) over the upper half.
    const size_t nfit_from = t.widths.size() / 2;
    double m2_hat = t.values.back();
    if (t.values.size() >= 2)
        m2_hat += std::max(0.0, t.values.back() - t.values[t.values.size() - 2]);
    double rate = 0.0, lnc = 0.0, r2 = 0.0;
    int pts = 0;
    for (int pass = 0; pass < 200; ++pass) {
        std::vector<double> xs, ys;
        for (size_t k = nfit_from; k < t.widths.size(); ++k) {
            const double gap = m2_hat - t.values[k];
            if (gap > 1e-13) {
                xs.push_back(t.widths[k]);
                ys.push_back(std::log(gap));
            }
        }
        if (xs.size() < 2) break;
        const LineFit lf = fit_line(xs, ys);
        if (!(lf.slope < 0.0)) break;
        rate = -lf.slope;
        lnc = lf.intercept;
        r2 = lf.r2;
        pts = lf.points;
        const double next = t.values.back() + std::exp(lnc - rate * t.widths.back());
        if (std::fabs(next - m2_hat) <= 1e-14 * (1.0 + std::fabs(m2_hat))) {
            m2_hat = next;
            break;
        }
        m2_hat = next;
    }
    t.m2 = std::max(m2_hat, t.values.back());
    t.gap_rate = rate;
    t.gap_prefactor = (pts >= 2) ? std::exp(lnc) : 0.0;
    t.fit_r2 = r2;
    t.fit_points = pts;
    return t;
}

// Truncated transition between the profile pair: Dirichlet top row holding the
// baseline profile, natural decay measured in y.
struct Decay2D {
    std::vector<double> slice_l2;   // per row, distance to the baseline profile
    std::vector<double> slice_sup;
    DecayFit fit;                   // log slice_l2 against y
    double ratio_start_end = 0.0;   // slice_l2 front over back
};

inline Decay2D check_2d_decay(const StripBaseline& base, const Field2D& v) {
    check_field(v);
    check_baseline_match(base, v.grid);
    const StripGrid& g = v.grid;
    Decay2D d;
    d.slice_l2.resize(g.ny);
    d.slice_sup.resize(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        d.slice_l2[j] = slice_l2_distance(v, j, base.q1, base.q2);
        double sup = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double d1 = v.v1[g.at(i, j)] - base.q1[i];
            const double d2 = v.v2[g.at(i, j)] - base.q2[i];
            sup = std::max(sup, std::sqrt(d1 * d1 + d2 * d2));
        }
        d.slice_sup[j] = sup;
    }
    // Window: past the transition (below half the midline distance), inside
    // the truncation-unaffected range, and above the solver noise floor.
    const double start = d.slice_l2.front();
    std::vector<double> xs, ys;
    for (int j = 0; j < g.ny; ++j) {
        const double dist = d.slice_l2[j];
        if (g.y(j) <= 0.8 * g.y_extent && dist <= 0.5 * start && dist >= 1e-6) {
            xs.push_back(g.y(j));
            ys.push_back(std::log(dist));
        }
    }
    const LineFit lf = fit_line(xs, ys);
    d.fit.rate = -lf.slope;
    d.fit.prefactor = (lf.points >= 2) ? std::exp(lf.intercept) : 0.0;
    d.fit.r2 = lf.r2;
    d.fit.points = lf.points;
    if (!xs.empty()) {
        d.fit.onset_x = xs.front();
        d.fit.window_lo = xs.front();
        d.fit.window_hi = xs.back();
    }
    const double back = d.slice_l2.back();
    d.ratio_start_end = (back > 0.0) ? start / back : 1e300;
    return d;
}

struct Hetero2DResult {
    Field2D field;
    double value = 0.0;      // phi2L of the truncated transition
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    double midline_distance = 0.0;  // row y = 0 against the baseline profile
    double pair_half_gap = 0.0;     // half the distance between the profile pair
    Decay2D decay;
};

inline Hetero2DResult solve_hetero2d(const Potential& p, const StripBaseline& base, double y_extent,
                                     double hy, const StripSolveOptions& so = {}) {
    if (!base.nonscalar)
        throw hypothesis_error("solve_hetero2d: baseline transition is scalar; no pair to connect");
    const StripGrid g = make_strip_grid(base.x_extent, y_extent, base.hx, hy);
    detail2d::Packing pack{g, TopCondition::dirichlet, p.spec().well_plus, {}, {}};
    const Field2D seed = transition_seed(base, g);  // top row equals the profile
    const MinimizeResult mr = detail2d::run_strip_minimize(p, base, pack, seed, so);

    Hetero2DResult res;
    res.field = make_strip_field(g);
    pack.unpack(mr.x, res.field);
    res.value = phi2L(p, base, res.field);
    res.grad_norm = mr.grad_norm;
    res.iterations = mr.iterations;
    res.converged = mr.converged || (mr.status == MinimizeStatus::stalled &&
                                     mr.grad_norm <= 100.0 * so.opt.grad_tol);
    if (!res.converged)
        throw solver_error("solve_hetero2d: minimization did not reach tolerance (grad " +
                           std::to_string(mr.grad_norm) + ")");
    res.midline_distance = slice_l2_distance(res.field, 0, base.q1, base.q2);
    double gap = 0.0;
    for (int i = 0; i < g.nx; ++i)
        gap += trapezoid_weight(i, g.nx) * base.q2[i] * base.q2[i];
    res.pair_half_gap = std::sqrt(2.0 * gap * g.hx());  // = ||q2|| = half of ||q - conj q||
    res.decay = check_2d_decay(base, res.field);
    return res;
}

}  // namespace lac
