#pragma once

// Layered fields on the truncated solid prism {0 <= z <= Z, |y| <= z tan(theta)}
// with half-opening theta = pi/(2 j). The functional is renormalized twice:
// every z-slice is a strip problem renormalized by the matched 1D minimum, and
// the slice value itself is renormalized by the width-table minimum at the
// slice width, so the z-integrand vanishes as the slices approach the strip
// minimizers.
//
// The prism is masked onto a Cartesian grid as a staircase: level k activates
// the y-nodes |y| <= M_k hy with M_k = floor(z_k tan(theta) / hy). Slanted
// walls get mirror (natural) treatment, first-order accurate; this is the
// dominant discretization error and the reason results here verify trends
// rather than sharp constants. Slices inherit the strip symmetries, so storage
// is the x >= 0, y >= 0 quadrant of every level. Levels with fewer than three
// active y-nodes across the full slice cannot carry a transverse structure and
// are slaved to the transition profile's scalar part (q1, 0). The cap z = Z is
// clamped to the truncated 2D transition restricted to the top width.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lac/common.hpp"
#include "lac/one_dim.hpp"
#include "lac/optimize.hpp"
#include "lac/potential.hpp"
#include "lac/strip2d.hpp"

namespace lac {

struct PrismGrid {
    int j_fold = 2;  // theta = pi / (2 j_fold)
    double x_extent = 8.0, z_extent = 12.0;
    double hx = 0.1, hy = 0.15, hz = 0.15;
    int nx = 0, nz = 0;
    double tan_theta = 1.0;
    std::vector<int> m;          // active y-node bound per level: jy in [0, m[k]]
    std::vector<size_t> offset;  // node offset per level, offset[nz] = total

    int cap_m() const { return m.back(); }
    size_t nodes() const { return offset.back(); }
    size_t at(int k, int jy, int i) const {
        return offset[k] + static_cast<size_t>(jy) * nx + i;
    }
    double x(int i) const { return i * hx; }
    double y(int jy) const { return jy * hy; }
    double z(int k) const { return k * hz; }
    bool slaved(int k) const { return m[k] < 1; }
};

inline PrismGrid make_prism_grid(int j, double x_extent, double z_extent, double hx, double hy,
                                 double hz) {
    require(j >= 2, "prism grid: the fold count j must be at least 2");
    require(x_extent > 0 && z_extent > 0 && hx > 0 && hy > 0 && hz > 0,
            "prism grid: extents and spacings must be positive");
    PrismGrid g;
    g.j_fold = j;
    g.x_extent = x_extent;
    g.z_extent = z_extent;
    g.hx = hx;
    g.hy = hy;
    g.hz = hz;
    g.tan_theta = std::tan(M_PI / (2.0 * j));
    g.nx = std::max(4, static_cast<int>(std::lround(x_extent / hx)) + 1);
    g.nz = std::max(3, static_cast<int>(std::lround(z_extent / hz)) + 1);
    g.m.resize(g.nz);
    g.offset.assign(g.nz + 1, 0);
    for (int k = 0; k < g.nz; ++k) {
        const double reach = g.z(k) * g.tan_theta / hy;
        g.m[k] = static_cast<int>(std::floor(reach + 1e-9 * (1.0 + reach)));
        g.offset[k + 1] = g.offset[k] + static_cast<size_t>(g.m[k] + 1) * g.nx;
    }
    // The staircase must open up by half height, else the apex is unresolved
    // and the whole computation degenerates to the slaved line.
    int first_open = g.nz;
    for (int k = 0; k < g.nz; ++k)
        if (g.m[k] >= 1) {
            first_open = k;
            break;
        }
    require(first_open < g.nz && g.z(first_open) <= 0.5 * z_extent,
            "prism grid: unresolved apex (fewer than 3 active y-nodes below z = Z/2); refine hy");
    return g;
}

struct Field3D {
    PrismGrid grid;
    std::vector<double> v1, v2;  // active-node values, index grid.at(k, jy, i)
};

inline Field3D make_prism_field(const PrismGrid& g) {
    Field3D f;
    f.grid = g;
    f.v1.assign(g.nodes(), 0.0);
    f.v2.assign(g.nodes(), 0.0);
    return f;
}

inline void check_field(const Field3D& u) {
    require(u.grid.nz >= 3 && u.grid.nx >= 4, "prism field: grid too small");
    require(u.v1.size() == u.grid.nodes() && u.v2.size() == u.grid.nodes(),
            "prism field: component size mismatch");
}

// Width-table lookup for the slice renormalizer. Inside the table: linear
// interpolation (a chord underestimates the concave width curve, which keeps
// slice excesses nonnegative). Below the first width: the scalar competitor
// bound 2 L (scalar - m1), exact while the scalar branch wins there. Above the
// last width: the fitted exponential approach to the limit; without a usable
// fit that region is an error.
inline double table_value_at(const WidthTable& t, const StripBaseline& base, double width) {
    require(!t.widths.empty(), "table_value_at: empty table");
    require(width >= 0.0, "table_value_at: negative width");
    if (width == 0.0) return 0.0;
    const double lo = t.widths.front(), hi = t.widths.back();
    if (width < lo)
        return std::min(2.0 * width * (base.scalar_slice - base.m1_slice), t.values.front());
    if (width <= hi) {
        const auto it = std::lower_bound(t.widths.begin(), t.widths.end(), width);
        const size_t b = it - t.widths.begin();
        if (t.widths[b] == width) return t.values[b];
        const size_t a = b - 1;
        const double f = (width - t.widths[a]) / (t.widths[b] - t.widths[a]);
        return t.values[a] + f * (t.values[b] - t.values[a]);
    }
    if (t.fit_points < 2 || !(t.gap_rate > 0.0))
        throw invalid_input("table_value_at: width " + std::to_string(width) +
                            " beyond the table and no exponential fit is available");
    return t.m2 - t.gap_prefactor * std::exp(-t.gap_rate * width);
}

namespace detail3d {

// Quarter slice form of level k: renormalized rows plus y-kinetic, exactly the
// strip quadrature at width m[k] hy. The full slice value is four times this.
inline double slice_quarter(const Potential& p, const StripBaseline& base, const Field3D& u,
                            int k) {
    const PrismGrid& g = u.grid;
    const int mk = g.m[k], ny = mk + 1;
    double e = 0.0;
    for (int jy = 0; jy < ny; ++jy) {
        const double half =
            detail2d::slice_half(p, &u.v1[g.at(k, jy, 0)], &u.v2[g.at(k, jy, 0)], g.nx, g.hx);
        e += trapezoid_weight(jy, ny) * g.hy * (half - 0.5 * base.m1_slice);
    }
    if (mk >= 1)
        for (int i = 0; i < g.nx; ++i) {
            double kin = 0.0;
            for (int jy = 0; jy + 1 < ny; ++jy) {
                const double d1 = u.v1[g.at(k, jy + 1, i)] - u.v1[g.at(k, jy, i)];
                const double d2 = u.v2[g.at(k, jy + 1, i)] - u.v2[g.at(k, jy, i)];
                kin += (d1 * d1 + d2 * d2) / (2.0 * g.hy);
            }
            e += trapezoid_weight(i, g.nx) * g.hx * kin;
        }
    return e;
}

}  // namespace detail3d

// Renormalized slice value of one level (full slice scale).
inline double slice_phi2(const Potential& p, const StripBaseline& base, const Field3D& u, int k) {
    check_field(u);
    require(k >= 0 && k < u.grid.nz, "slice_phi2: level out of range");
    // A slaved level has zero width: no transverse content, value zero.
    if (u.grid.m[k] < 1) return 0.0;
    return 4.0 * detail3d::slice_quarter(p, base, u, k);
}

// Doubly renormalized prism functional.
inline double phi3(const Potential& p, const StripBaseline& base, const WidthTable& table,
                   const Field3D& u) {
    check_field(u);
    const PrismGrid& g = u.grid;
    require(g.nx == base.nx && std::fabs(g.hx - base.hx) <= 1e-12 * (1.0 + base.hx),
            "phi3: prism x-grid does not match the baseline");
    double e = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        const double width = g.m[k] * g.hy;
        const double renorm = table_value_at(table, base, width);
        const double slice = g.slaved(k) ? 0.0 : 4.0 * detail3d::slice_quarter(p, base, u, k);
        e += trapezoid_weight(k, g.nz) * g.hz * (slice - renorm);
    }
    // z-kinetic over the common (overlap) nodes of consecutive levels.
    for (int k = 0; k + 1 < g.nz; ++k) {
        const int mc = std::min(g.m[k], g.m[k + 1]), ny = mc + 1;
        double cell = 0.0;
        for (int jy = 0; jy < ny; ++jy) {
            const double wy = trapezoid_weight(jy, ny) * g.hy;
            double row = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                const double d1 = u.v1[g.at(k + 1, jy, i)] - u.v1[g.at(k, jy, i)];
                const double d2 = u.v2[g.at(k + 1, jy, i)] - u.v2[g.at(k, jy, i)];
                row += trapezoid_weight(i, g.nx) * (d1 * d1 + d2 * d2);
            }
            cell += wy * row * g.hx;
        }
        e += 4.0 * cell / (2.0 * g.hz);
    }
    return e;
}

// Gradient of phi3 with respect to every active node, layout [v1 | v2].
// The renormalizers are constants, so only the slice forms and the z-kinetic
// appear in the gradient.
inline std::vector<double> phi3_gradient(const Potential& p, const StripBaseline& base,
                                         const Field3D& u) {
    check_field(u);
    const PrismGrid& g = u.grid;
    require(g.nx == base.nx && std::fabs(g.hx - base.hx) <= 1e-12 * (1.0 + base.hx),
            "phi3_gradient: prism x-grid does not match the baseline");
    const size_t nn = g.nodes();
    std::vector<double> grad(2 * nn, 0.0);
    for (int k = 0; k < g.nz; ++k) {
        if (g.slaved(k)) continue;
        const double wz = trapezoid_weight(k, g.nz) * g.hz;
        const int ny = g.m[k] + 1;
        for (int jy = 0; jy < ny; ++jy) {
            const double wy = trapezoid_weight(jy, ny) * g.hy;
            for (int i = 0; i + 1 < g.nx; ++i) {
                const size_t a = g.at(k, jy, i), b = g.at(k, jy, i + 1);
                const double d1 = (u.v1[b] - u.v1[a]) / g.hx;
                const double d2 = (u.v2[b] - u.v2[a]) / g.hx;
                grad[a] -= wz * wy * d1;
                grad[b] += wz * wy * d1;
                grad[nn + a] -= wz * wy * d2;
                grad[nn + b] += wz * wy * d2;
            }
            for (int i = 0; i < g.nx; ++i) {
                const size_t a = g.at(k, jy, i);
                const Vec2 gw = p.gradient({u.v1[a], u.v2[a]});
                const double w = wz * wy * trapezoid_weight(i, g.nx) * g.hx;
                grad[a] += w * gw.x;
                grad[nn + a] += w * gw.y;
            }
        }
        for (int i = 0; i < g.nx; ++i) {
            const double wx = trapezoid_weight(i, g.nx) * g.hx;
            for (int jy = 0; jy + 1 < ny; ++jy) {
                const size_t a = g.at(k, jy, i), b = g.at(k, jy + 1, i);
                const double d1 = (u.v1[b] - u.v1[a]) / g.hy;
                const double d2 = (u.v2[b] - u.v2[a]) / g.hy;
                grad[a] -= wz * wx * d1;
                grad[b] += wz * wx * d1;
                grad[nn + a] -= wz * wx * d2;
                grad[nn + b] += wz * wx * d2;
            }
        }
    }
    for (int k = 0; k + 1 < g.nz; ++k) {
        const int ny = std::min(g.m[k], g.m[k + 1]) + 1;
        for (int jy = 0; jy < ny; ++jy) {
            const double wy = trapezoid_weight(jy, ny) * g.hy;
            for (int i = 0; i < g.nx; ++i) {
                const double w = wy * trapezoid_weight(i, g.nx) * g.hx / g.hz;
                const size_t a = g.at(k, jy, i), b = g.at(k + 1, jy, i);
                const double d1 = (u.v1[b] - u.v1[a]) * w;
                const double d2 = (u.v2[b] - u.v2[a]) * w;
                grad[a] -= d1;
                grad[b] += d1;
                grad[nn + a] -= d2;
                grad[nn + b] += d2;
            }
        }
    }
    for (double& x : grad) x *= 4.0;
    return grad;
}

// Restriction of a strip field to the staircase width of level k.
inline Field2D extract_slice(const Field3D& u, int k) {
    check_field(u);
    require(k >= 0 && k < u.grid.nz && u.grid.m[k] >= 1, "extract_slice: level has no width");
    const PrismGrid& g = u.grid;
    StripGrid sg;
    sg.x_extent = g.x_extent;
    sg.y_extent = g.m[k] * g.hy;
    sg.nx = g.nx;
    sg.ny = g.m[k] + 1;
    Field2D f = make_strip_field(sg);
    for (int jy = 0; jy <= g.m[k]; ++jy)
        for (int i = 0; i < g.nx; ++i) {
            f.v1[sg.at(i, jy)] = u.v1[g.at(k, jy, i)];
            f.v2[sg.at(i, jy)] = u.v2[g.at(k, jy, i)];
        }
    return f;
}

namespace detail3d {

// Reduced unknowns: active nodes on open (non-slaved) levels below the cap.
// Pins and clamps per level match the strip packing; slaved levels hold
// (q1, 0) and the cap holds the restricted 2D transition.
struct Packing3 {
    PrismGrid g;
    Vec2 well{1.0, 0.0};
    std::vector<double> q1;            // slaved-level profile values
    std::vector<double> cap1, cap2;    // cap level rows, (cap_m()+1) x nx
    std::vector<size_t> dof_off;       // per level, dof_off[nz] = total
    int first_open = 0;

    void init() {
        dof_off.assign(g.nz + 1, 0);
        first_open = g.nz;
        for (int k = 0; k < g.nz; ++k) {
            size_t n = 0;
            if (!g.slaved(k) && k < g.nz - 1) {
                if (first_open == g.nz) first_open = k;
                n = static_cast<size_t>(g.nx - 2) * (g.m[k] + 1) +
                    static_cast<size_t>(g.nx - 1) * g.m[k];
            }
            dof_off[k + 1] = dof_off[k] + n;
        }
    }
    bool free_level(int k) const { return !g.slaved(k) && k < g.nz - 1; }
    size_t dim() const { return dof_off[g.nz]; }
    size_t idx1(int k, int jy, int i) const {
        return dof_off[k] + static_cast<size_t>(jy) * (g.nx - 2) + (i - 1);
    }
    size_t idx2(int k, int jy, int i) const {
        return dof_off[k] + static_cast<size_t>(g.nx - 2) * (g.m[k] + 1) +
               static_cast<size_t>(jy - 1) * (g.nx - 1) + i;
    }

    void unpack(const std::vector<double>& dof, Field3D& u) const {
        u.grid = g;
        u.v1.assign(g.nodes(), 0.0);
        u.v2.assign(g.nodes(), 0.0);
        for (int k = 0; k < g.nz; ++k) {
            if (g.slaved(k)) {
                for (int i = 0; i < g.nx; ++i) u.v1[g.at(k, 0, i)] = q1[i];
                continue;
            }
            if (k == g.nz - 1) {
                for (int jy = 0; jy <= g.m[k]; ++jy)
                    for (int i = 0; i < g.nx; ++i) {
                        u.v1[g.at(k, jy, i)] = cap1[static_cast<size_t>(jy) * g.nx + i];
                        u.v2[g.at(k, jy, i)] = cap2[static_cast<size_t>(jy) * g.nx + i];
                    }
                continue;
            }
            for (int jy = 0; jy <= g.m[k]; ++jy) {
                u.v1[g.at(k, jy, g.nx - 1)] = well.x;
                u.v2[g.at(k, jy, g.nx - 1)] = well.y;
                for (int i = 1; i <= g.nx - 2; ++i) u.v1[g.at(k, jy, i)] = dof[idx1(k, jy, i)];
                if (jy >= 1)
                    for (int i = 0; i <= g.nx - 2; ++i) u.v2[g.at(k, jy, i)] = dof[idx2(k, jy, i)];
            }
        }
    }

    std::vector<double> pack(const Field3D& u) const {
        std::vector<double> dof(dim(), 0.0);
        for (int k = 0; k < g.nz; ++k) {
            if (!free_level(k)) continue;
            for (int jy = 0; jy <= g.m[k]; ++jy) {
                for (int i = 1; i <= g.nx - 2; ++i) dof[idx1(k, jy, i)] = u.v1[g.at(k, jy, i)];
                if (jy >= 1)
                    for (int i = 0; i <= g.nx - 2; ++i) dof[idx2(k, jy, i)] = u.v2[g.at(k, jy, i)];
            }
        }
        return dof;
    }

    void fold(const std::vector<double>& full, std::vector<double>& out) const {
        const size_t nn = g.nodes();
        out.assign(dim(), 0.0);
        for (int k = 0; k < g.nz; ++k) {
            if (!free_level(k)) continue;
            for (int jy = 0; jy <= g.m[k]; ++jy) {
                for (int i = 1; i <= g.nx - 2; ++i) out[idx1(k, jy, i)] = full[g.at(k, jy, i)];
                if (jy >= 1)
                    for (int i = 0; i <= g.nx - 2; ++i)
                        out[idx2(k, jy, i)] = full[nn + g.at(k, jy, i)];
            }
        }
    }

    bool truncate(std::vector<double>& dof, double radius) const {
        bool changed = false;
        for (int k = 0; k < g.nz; ++k) {
            if (!free_level(k)) continue;
            for (int jy = 0; jy <= g.m[k]; ++jy)
                for (int i = 0; i <= g.nx - 2; ++i) {
                    const bool has1 = i >= 1, has2 = jy >= 1;
                    const double a = has1 ? dof[idx1(k, jy, i)] : 0.0;
                    const double b = has2 ? dof[idx2(k, jy, i)] : 0.0;
                    const double r = std::sqrt(a * a + b * b);
                    if (r > radius) {
                        if (has1) dof[idx1(k, jy, i)] = a * radius / r;
                        if (has2) dof[idx2(k, jy, i)] = b * radius / r;
                        changed = true;
                    }
                }
        }
        return changed;
    }
};

}  // namespace detail3d

// Constant-in-z extension of a strip field, masked to the staircase. Requires
// the strip field to cover the cap width on the same x-grid and y-spacing.
inline Field3D constant_z_extension(const StripBaseline& base, const Field2D& v_q,
                                    const PrismGrid& g) {
    check_field(v_q);
    require(v_q.grid.nx == g.nx, "prism extension: strip field x-grid mismatch");
    require(v_q.grid.ny >= g.cap_m() + 1, "prism extension: strip field narrower than the cap");
    require(std::fabs(v_q.grid.hy() - g.hy) <= 1e-9 * (1.0 + g.hy),
            "prism extension: strip field y-spacing mismatch");
    Field3D u = make_prism_field(g);
    for (int k = 0; k < g.nz; ++k) {
        if (g.slaved(k)) {
            for (int i = 0; i < g.nx; ++i) u.v1[g.at(k, 0, i)] = base.q1[i];
            continue;
        }
        for (int jy = 0; jy <= g.m[k]; ++jy)
            for (int i = 0; i < g.nx; ++i) {
                u.v1[g.at(k, jy, i)] = v_q.v1[v_q.grid.at(i, jy)];
                u.v2[g.at(k, jy, i)] = v_q.v2[v_q.grid.at(i, jy)];
            }
    }
    return u;
}

inline Objective prism_objective(const Potential& p, const StripBaseline& base,
                                 const WidthTable& table, const detail3d::Packing3& pack) {
    auto work = std::make_shared<Field3D>(make_prism_field(pack.g));
    return [p, base, table, pack, work](const std::vector<double>& dof,
                                        std::vector<double>& grad) {
        pack.unpack(dof, *work);
        const double e = phi3(p, base, table, *work);
        const auto full = phi3_gradient(p, base, *work);
        pack.fold(full, grad);
        return e;
    };
}

struct PrismOptions {
    MinimizeOptions opt = {30000, 2e-6, 8, 0.5, 1e-4, 48, nullptr, nullptr};
    bool apply_truncation = true;
    double truncation_radius = 0.0;  // 0: the potential's coercivity radius
};

struct PrismResult {
    Field3D field;
    double value = 0.0;  // phi3 at the minimizer
    double seed_value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Minimize phi3 over the staircase prism from the constant-in-z seed.
inline PrismResult solve_prism(const Potential& p, const StripBaseline& base,
                               const WidthTable& table, const Field2D& v_q, const PrismGrid& g,
                               const PrismOptions& po = {}) {
    if (!base.nonscalar)
        throw hypothesis_error("solve_prism: baseline transition is scalar; no layered structure");
    require(g.nx == base.nx && std::fabs(g.hx - base.hx) <= 1e-12 * (1.0 + base.hx),
            "solve_prism: prism x-grid does not match the baseline");

    detail3d::Packing3 pack;
    pack.g = g;
    pack.well = p.spec().well_plus;
    pack.q1 = base.q1;
    pack.init();
    const Field3D seed = constant_z_extension(base, v_q, g);
    pack.cap1.assign(static_cast<size_t>(g.cap_m() + 1) * g.nx, 0.0);
    pack.cap2 = pack.cap1;
    for (int jy = 0; jy <= g.cap_m(); ++jy)
        for (int i = 0; i < g.nx; ++i) {
            pack.cap1[static_cast<size_t>(jy) * g.nx + i] = seed.v1[g.at(g.nz - 1, jy, i)];
            pack.cap2[static_cast<size_t>(jy) * g.nx + i] = seed.v2[g.at(g.nz - 1, jy, i)];
        }

    MinimizeOptions mo = po.opt;
    if (po.apply_truncation) {
        const double radius =
            po.truncation_radius > 0.0 ? po.truncation_radius : p.spec().radius;
        const detail3d::Packing3 pk = pack;
        mo.post_step = [pk, radius](std::vector<double>& dof) { return pk.truncate(dof, radius); };
    }
    const MinimizeResult mr = minimize(prism_objective(p, base, table, pack), pack.pack(seed), mo);

    PrismResult res;
    res.field = make_prism_field(g);
    pack.unpack(mr.x, res.field);
    res.value = phi3(p, base, table, res.field);
    res.seed_value = phi3(p, base, table, seed);
    res.grad_norm = mr.grad_norm;
    res.iterations = mr.iterations;
    res.converged = mr.converged || (mr.status == MinimizeStatus::stalled &&
                                     mr.grad_norm <= 100.0 * po.opt.grad_tol);
    if (!res.converged)
        throw solver_error("solve_prism: minimization did not reach tolerance (grad " +
                           std::to_string(mr.grad_norm) + ")");
    return res;
}

// Per-level distances of the slices to the strip field they should approach,
// measured over the staircase width of each level (full-slice scale).
struct SliceTrack {
    std::vector<double> z;
    std::vector<double> l2, sup;
    std::vector<double> energy_excess;  // slice_phi2 minus the width renormalizer
};

inline SliceTrack track_slices(const Potential& p, const StripBaseline& base,
                               const WidthTable& table, const Field3D& u, const Field2D& v_q) {
    check_field(u);
    check_field(v_q);
    const PrismGrid& g = u.grid;
    require(v_q.grid.nx == g.nx && v_q.grid.ny >= g.cap_m() + 1,
            "track_slices: strip field does not cover the cap");
    SliceTrack t;
    for (int k = 0; k < g.nz; ++k) {
        if (g.slaved(k)) continue;
        t.z.push_back(g.z(k));
        double acc = 0.0, sup = 0.0;
        const int ny = g.m[k] + 1;
        for (int jy = 0; jy < ny; ++jy) {
            const double wy = trapezoid_weight(jy, ny) * g.hy;
            for (int i = 0; i < g.nx; ++i) {
                const double d1 = u.v1[g.at(k, jy, i)] - v_q.v1[v_q.grid.at(i, jy)];
                const double d2 = u.v2[g.at(k, jy, i)] - v_q.v2[v_q.grid.at(i, jy)];
                acc += wy * trapezoid_weight(i, g.nx) * g.hx * (d1 * d1 + d2 * d2);
                sup = std::max(sup, std::sqrt(d1 * d1 + d2 * d2));
            }
        }
        t.l2.push_back(std::sqrt(4.0 * acc));
        t.sup.push_back(sup);
        t.energy_excess.push_back(slice_phi2(p, base, u, k) -
                                  table_value_at(table, base, g.m[k] * g.hy));
    }
    return t;
}

// Far-field approach to the well along x: the worst distance over (y, z) at a
// few x-stations, fitted to an exponential.
struct FarFieldReport {
    std::vector<double> stations;  // x values sampled
    std::vector<double> sup_dist;  // max over active (y, z) of |u - a+|
    double rate = 0.0;
    double r2 = 0.0;
    bool monotone = false;
};

inline FarFieldReport check_far_field(const Field3D& u, Vec2 well_plus = {1.0, 0.0}) {
    check_field(u);
    const PrismGrid& g = u.grid;
    FarFieldReport rep;
    for (double f : {0.5, 0.6, 0.7, 0.8}) {
        const int i = static_cast<int>(std::lround(f * (g.nx - 1)));
        double sup = 0.0;
        for (int k = 0; k < g.nz; ++k)
            for (int jy = 0; jy <= g.m[k]; ++jy) {
                const double d1 = u.v1[g.at(k, jy, i)] - well_plus.x;
                const double d2 = u.v2[g.at(k, jy, i)] - well_plus.y;
                sup = std::max(sup, std::sqrt(d1 * d1 + d2 * d2));
            }
        rep.stations.push_back(g.x(i));
        rep.sup_dist.push_back(sup);
    }
    rep.monotone = true;
    for (size_t s = 1; s < rep.sup_dist.size(); ++s)
        if (rep.sup_dist[s] > rep.sup_dist[s - 1]) rep.monotone = false;
    std::vector<double> xs, ys;
    for (size_t s = 0; s < rep.stations.size(); ++s)
        if (rep.sup_dist[s] > 1e-14) {
            xs.push_back(rep.stations[s]);
            ys.push_back(std::log(rep.sup_dist[s]));
        }
    const LineFit lf = fit_line(xs, ys);
    rep.rate = -lf.slope;
    rep.r2 = lf.r2;
    return rep;
}

// Gradient energy over the truncated prism of height r (full domain scale).
inline double gradient_energy_below(const Field3D& u, double r) {
    check_field(u);
    const PrismGrid& g = u.grid;
    require(r > 0.0, "gradient_energy_below: height must be positive");
    const int kr = std::min(g.nz - 1, static_cast<int>(std::floor(r / g.hz + 1e-9)));
    double e = 0.0;
    for (int k = 0; k <= kr; ++k) {
        if (g.slaved(k)) continue;
        const double wz = ((k == 0 || k == kr) ? 0.5 : 1.0) * g.hz;
        const int ny = g.m[k] + 1;
        double lvl = 0.0;
        for (int jy = 0; jy < ny; ++jy) {
            const double wy = trapezoid_weight(jy, ny) * g.hy;
            for (int i = 0; i + 1 < g.nx; ++i) {
                const double d1 = u.v1[g.at(k, jy, i + 1)] - u.v1[g.at(k, jy, i)];
                const double d2 = u.v2[g.at(k, jy, i + 1)] - u.v2[g.at(k, jy, i)];
                lvl += wy * (d1 * d1 + d2 * d2) / g.hx;
            }
        }
        for (int i = 0; i < g.nx; ++i) {
            const double wx = trapezoid_weight(i, g.nx) * g.hx;
            for (int jy = 0; jy + 1 < ny; ++jy) {
                const double d1 = u.v1[g.at(k, jy + 1, i)] - u.v1[g.at(k, jy, i)];
                const double d2 = u.v2[g.at(k, jy + 1, i)] - u.v2[g.at(k, jy, i)];
                lvl += wx * (d1 * d1 + d2 * d2) / g.hy;
            }
        }
        e += wz * lvl;
    }
    for (int k = 0; k + 1 <= kr; ++k) {
        const int ny = std::min(g.m[k], g.m[k + 1]) + 1;
        for (int jy = 0; jy < ny; ++jy) {
            const double wy = trapezoid_weight(jy, ny) * g.hy;
            for (int i = 0; i < g.nx; ++i) {
                const double d1 = u.v1[g.at(k + 1, jy, i)] - u.v1[g.at(k, jy, i)];
                const double d2 = u.v2[g.at(k + 1, jy, i)] - u.v2[g.at(k, jy, i)];
                e += wy * trapezoid_weight(i, g.nx) * g.hx * (d1 * d1 + d2 * d2) / g.hz;
            }
        }
    }
    return 4.0 * e;
}

}  // namespace lac
