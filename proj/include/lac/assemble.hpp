#pragma once

// Assembly of the entire-space solution from the prism building block: the
// (y, z)-plane is tiled by 2j rotated copies of the prism sector, and the
// field in sector k is the prism field pulled back through the k-fold
// rotation, with the y-argument flipped on odd sectors. Far out along every
// tile wall the profile alternates between the transition pair.
//
// Conventions: angles in the (y, z)-plane are measured from the +y axis
// toward +z (atan2(z, y)); sector 0 is centered on the +z axis. Queries on a
// shared wall belong to the smaller sector index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "lac/common.hpp"
#include "lac/prism3d.hpp"
#include "lac/strip2d.hpp"

namespace lac {

struct Mat3 {
    double a[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 identity() { return {}; }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                double s = 0.0;
                for (int l = 0; l < 3; ++l) s += a[i][l] * o.a[l][k];
                r.a[i][k] = s;
            }
        return r;
    }
    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) r.a[i][k] = a[k][i];
        return r;
    }
    double max_abs_diff(const Mat3& o) const {
        double m = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) m = std::max(m, std::fabs(a[i][k] - o.a[i][k]));
        return m;
    }
};

// Rotation about the x-axis by -pi/j (in the angle convention above).
inline Mat3 rotation_matrix(int j) {
    require(j >= 2, "rotation_matrix: j must be at least 2");
    const double c = std::cos(M_PI / j), s = std::sin(M_PI / j);
    Mat3 r;
    r.a[0][0] = 1;
    r.a[0][1] = r.a[0][2] = r.a[1][0] = r.a[2][0] = 0;
    r.a[1][1] = c;
    r.a[1][2] = s;
    r.a[2][1] = -s;
    r.a[2][2] = c;
    return r;
}

// Sector of a (y, z) point: the k for which rotating by +k pi/j moves the
// angle into [pi/2 - pi/(2j), pi/2 + pi/(2j)]. Wall ties go to the smaller
// wrapped index; the origin is sector 0 by convention.
inline int sector_index(double y, double z, int j) {
    require(j >= 2, "sector_index: j must be at least 2");
    if (y == 0.0 && z == 0.0) return 0;
    const double t = (M_PI / 2.0 - std::atan2(z, y)) * j / M_PI;
    const long m = static_cast<long>(std::ceil(t - 0.5));
    auto wrap = [j](long v) {
        const long n = 2 * j;
        return static_cast<int>(((v % n) + n) % n);
    };
    int k = wrap(m);
    const double tie = t + 0.5;
    if (tie == std::floor(tie)) k = std::min(k, wrap(m + 1));
    return k;
}

// Symmetry-aware trilinear sample of the prism field in prism coordinates.
// The stored quadrant extends by the slice symmetries (first component odd in
// x, second odd in y); outside the staircase in y the edge row extends
// (mirror convention at the slanted wall); x clamps to the well columns.
inline Vec2 evaluate_prism(const Field3D& u, double x, double y, double z, bool clamp_z = false) {
    const PrismGrid& g = u.grid;
    double s1 = 1.0, s2 = 1.0;
    if (x < 0.0) {
        x = -x;
        s1 = -1.0;
    }
    if (y < 0.0) {
        y = -y;
        s2 = -1.0;
    }
    // rotations carry fp noise, so forgive hairline overshoots of the range
    if (z < -1e-9 || z > g.z_extent + std::max(1e-9, g.z_extent * 1e-12)) {
        if (!clamp_z)
            throw invalid_input("evaluate_prism: z = " + std::to_string(z) +
                                " outside the prism height");
    }
    z = std::clamp(z, 0.0, g.z_extent);
    const double kf = std::min(z / g.hz, static_cast<double>(g.nz - 1));
    const int k0 = std::min(static_cast<int>(kf), g.nz - 2);
    const double fz = kf - k0;
    const double uf = std::clamp(x / g.hx, 0.0, static_cast<double>(g.nx - 1));
    const int i0 = std::min(static_cast<int>(uf), g.nx - 2);
    const double fx = uf - i0;
    auto level = [&](int k, int comp) {
        const std::vector<double>& a = comp == 0 ? u.v1 : u.v2;
        const int mk = g.m[k];
        const double vf = std::clamp(y / g.hy, 0.0, static_cast<double>(mk));
        const int j0 = std::min(static_cast<int>(vf), std::max(mk - 1, 0));
        const double fy = (mk >= 1) ? vf - j0 : 0.0;
        const int j1 = std::min(j0 + 1, mk);
        const double b0 = a[g.at(k, j0, i0)] * (1 - fx) + a[g.at(k, j0, i0 + 1)] * fx;
        const double b1 = a[g.at(k, j1, i0)] * (1 - fx) + a[g.at(k, j1, i0 + 1)] * fx;
        return b0 * (1 - fy) + b1 * fy;
    };
    const double v1 = level(k0, 0) * (1 - fz) + level(k0 + 1, 0) * fz;
    const double v2 = level(k0, 1) * (1 - fz) + level(k0 + 1, 1) * fz;
    return {s1 * v1, s2 * v2};
}

struct ReflectionAssembly {
    int j = 2;
    Field3D u;
    StripBaseline base;
    bool clamp_z = false;
};

inline ReflectionAssembly make_assembly(const Field3D& u, const StripBaseline& base,
                                        bool clamp_z = false) {
    check_field(u);
    require(u.grid.j_fold >= 2, "make_assembly: prism fold must be at least 2");
    require(static_cast<int>(base.q1.size()) == u.grid.nx,
            "make_assembly: baseline does not match the prism x-grid");
    return {u.grid.j_fold, u, base, clamp_z};
}

// Field value with the sector forced (used by the face-continuity oracle).
// Rotating by +k pi/j returns the sector to the central band; odd sectors are
// additionally y-reflected, which the prism evaluation absorbs through the
// slice conjugation.
inline Vec2 evaluate_in_sector(const ReflectionAssembly& a, double x, double y, double z, int k) {
    require(k >= 0 && k < 2 * a.j, "evaluate_in_sector: sector out of range");
    const double ang = k * M_PI / a.j;
    const double c = std::cos(ang), s = std::sin(ang);
    double y2 = c * y - s * z;
    const double z2 = s * y + c * z;
    if (k % 2) y2 = -y2;
    return evaluate_prism(a.u, x, y2, z2, a.clamp_z);
}

inline Vec2 evaluate_vj(const ReflectionAssembly& a, double x, double y, double z) {
    return evaluate_in_sector(a, x, y, z, sector_index(y, z, a.j));
}

// Cylindrical view: rho >= 0, theta from the +y axis toward +z.
inline Vec2 evaluate_cyl(const ReflectionAssembly& a, double x, double rho, double theta) {
    require(rho >= 0.0, "evaluate_cyl: negative radius");
    return evaluate_vj(a, x, rho * std::cos(theta), rho * std::sin(theta));
}

// First-order bound on the interpolation plus staircase error: the wall sits
// up to hy tan(theta) away from the staircase edge (transported by the z
// derivative), and trilinear interpolation carries the usual h^2/8 curvature
// terms.
inline double estimate_interpolation_error(const Field3D& u) {
    check_field(u);
    const PrismGrid& g = u.grid;
    double d1z = 0.0, d2x = 0.0, d2y = 0.0, d2z = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        const int mk = g.m[k];
        for (int jy = 0; jy <= mk; ++jy)
            for (int i = 0; i < g.nx; ++i) {
                const size_t a = g.at(k, jy, i);
                if (i + 2 < g.nx) {
                    d2x = std::max(d2x, std::fabs(u.v1[g.at(k, jy, i + 2)] -
                                                  2 * u.v1[g.at(k, jy, i + 1)] + u.v1[a]));
                    d2x = std::max(d2x, std::fabs(u.v2[g.at(k, jy, i + 2)] -
                                                  2 * u.v2[g.at(k, jy, i + 1)] + u.v2[a]));
                }
                if (jy + 2 <= mk) {
                    d2y = std::max(d2y, std::fabs(u.v1[g.at(k, jy + 2, i)] -
                                                  2 * u.v1[g.at(k, jy + 1, i)] + u.v1[a]));
                    d2y = std::max(d2y, std::fabs(u.v2[g.at(k, jy + 2, i)] -
                                                  2 * u.v2[g.at(k, jy + 1, i)] + u.v2[a]));
                }
                if (k + 1 < g.nz && jy <= g.m[k + 1]) {
                    const size_t b = g.at(k + 1, jy, i);
                    d1z = std::max(d1z, std::fabs(u.v1[b] - u.v1[a]));
                    d1z = std::max(d1z, std::fabs(u.v2[b] - u.v2[a]));
                    if (k + 2 < g.nz && jy <= g.m[k + 2]) {
                        const size_t cidx = g.at(k + 2, jy, i);
                        d2z = std::max(d2z, std::fabs(u.v1[cidx] - 2 * u.v1[b] + u.v1[a]));
                        d2z = std::max(d2z, std::fabs(u.v2[cidx] - 2 * u.v2[b] + u.v2[a]));
                    }
                }
            }
    }
    // the raw second differences already carry the h^2 factor
    return g.hy * g.tan_theta * (d1z / g.hz) + (d2x + d2y + d2z) / 8.0;
}

struct AssemblyReport {
    double periodicity_max = 0.0;  // rotation by 2 pi / j leaves the field unchanged
    double face_jump_max = 0.0;    // worst two-sector disagreement on walls
    double interp_error = 0.0;     // first-order error estimate for the field
    std::vector<double> ray_rho;   // sampled radii along the walls
    // For each wall r: sup_x distance of the ray profile to the expected
    // branch (transition for odd walls, its conjugate for even walls).
    std::vector<std::vector<double>> ray_dist;
    bool rays_decreasing = true;
    double ray_worst_far = 0.0;  // worst distance at the largest radius
};

inline AssemblyReport check_assembly(const ReflectionAssembly& a, int n_samples = 200,
                                     uint64_t seed = 20260823ull) {
    require(n_samples > 0, "check_assembly: sample count must be positive");
    const PrismGrid& g = a.u.grid;
    AssemblyReport rep;
    rep.interp_error = estimate_interpolation_error(a.u);

    // deterministic sample set: golden-angle sweep in (rho, theta), x sweep
    uint64_t state = seed;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    const double rho_max = 0.95 * g.z_extent;
    for (int s = 0; s < n_samples; ++s) {
        const double x = (2.0 * next() - 1.0) * g.x_extent;
        const double rho = (0.1 + 0.85 * next()) * rho_max;
        const double theta = 2.0 * M_PI * next();
        const Vec2 v0 = evaluate_cyl(a, x, rho, theta);
        const Vec2 v1 = evaluate_cyl(a, x, rho, theta + 2.0 * M_PI / a.j);
        rep.periodicity_max = std::max(rep.periodicity_max,
                                       std::max(std::fabs(v0.x - v1.x), std::fabs(v0.y - v1.y)));
    }

    // face continuity: both adjacent sectors evaluated on each wall; wall r
    // separates the wrapped sectors -r and -r-1
    auto wrapk = [n = 2 * a.j](long v) { return static_cast<int>(((v % n) + n) % n); };
    for (int r = 0; r < 2 * a.j; ++r) {
        const double theta = M_PI / 2.0 + (M_PI / a.j) * (0.5 + r);
        const int ka = wrapk(-r);
        const int kb = wrapk(-r - 1);
        for (int s = 0; s < 16; ++s) {
            const double rho = (0.15 + 0.8 * (s / 15.0)) * rho_max;
            const double y = rho * std::cos(theta), z = rho * std::sin(theta);
            for (double x : {-0.6 * g.x_extent, 0.0, 0.35 * g.x_extent}) {
                const Vec2 va = evaluate_in_sector(a, x, y, z, ka);
                const Vec2 vb = evaluate_in_sector(a, x, y, z, kb);
                rep.face_jump_max =
                    std::max(rep.face_jump_max,
                             std::max(std::fabs(va.x - vb.x), std::fabs(va.y - vb.y)));
            }
        }
    }

    // wall rays: profiles against the expected transition branch
    rep.ray_rho = {0.3 * g.z_extent, 0.8 * g.z_extent};
    rep.ray_dist.assign(2 * a.j, {});
    for (int r = 0; r < 2 * a.j; ++r) {
        const double theta = M_PI / 2.0 + (M_PI / a.j) * (0.5 + r);
        for (double rho : rep.ray_rho) {
            double sup = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i);
                const Vec2 vp = evaluate_cyl(a, x, rho, theta);
                const Vec2 vm = evaluate_cyl(a, -x, rho, theta);
                const double w2 = (r % 2) ? a.base.q2[i] : -a.base.q2[i];
                const double dplus =
                    std::max(std::fabs(vp.x - a.base.q1[i]), std::fabs(vp.y - w2));
                const double dminus =
                    std::max(std::fabs(vm.x + a.base.q1[i]), std::fabs(vm.y - w2));
                sup = std::max(sup, std::max(dplus, dminus));
            }
            rep.ray_dist[r].push_back(sup);
        }
        if (rep.ray_dist[r].back() > rep.ray_dist[r].front()) rep.rays_decreasing = false;
        rep.ray_worst_far = std::max(rep.ray_worst_far, rep.ray_dist[r].back());
    }
    return rep;
}

// Legacy structured-points volumetric export: three scalar arrays (the two
// components and the distance to the positive well), deterministic bytes.
struct ExportBox {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1, z0 = -1, z1 = 1;
};

inline void export_field3d(const ReflectionAssembly& a, const ExportBox& box, int nx, int ny,
                           int nz, std::ostream& out) {
    require(nx >= 2 && ny >= 2 && nz >= 2, "export_field3d: need at least 2 samples per axis");
    require(box.x1 > box.x0 && box.y1 > box.y0 && box.z1 > box.z0,
            "export_field3d: empty box");
    if (!a.clamp_z) {
        const double ry = std::max(std::fabs(box.y0), std::fabs(box.y1));
        const double rz = std::max(std::fabs(box.z0), std::fabs(box.z1));
        require(std::hypot(ry, rz) <= a.u.grid.z_extent * (1.0 + 1e-12),
                "export_field3d: box leaves the tiled prism height; enable clamping or shrink it");
    }
    const double dx = (box.x1 - box.x0) / (nx - 1);
    const double dy = (box.y1 - box.y0) / (ny - 1);
    const double dz = (box.z1 - box.z0) / (nz - 1);
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9e\n", v);
        out << buf;
    };
    out << "# vtk DataFile Version 3.0\n";
    out << "layered-ac assembled field, fold " << a.j << "\n";
    out << "ASCII\nDATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << nx << " " << ny << " " << nz << "\n";
    std::snprintf(buf, sizeof buf, "ORIGIN %.9e %.9e %.9e\n", box.x0, box.y0, box.z0);
    out << buf;
    std::snprintf(buf, sizeof buf, "SPACING %.9e %.9e %.9e\n", dx, dy, dz);
    out << buf;
    const long total = static_cast<long>(nx) * ny * nz;
    out << "POINT_DATA " << total << "\n";
    std::vector<double> c1, c2;
    c1.reserve(total);
    c2.reserve(total);
    for (int kz = 0; kz < nz; ++kz)
        for (int ky = 0; ky < ny; ++ky)
            for (int kx = 0; kx < nx; ++kx) {
                const Vec2 v = evaluate_vj(a, box.x0 + kx * dx, box.y0 + ky * dy,
                                           box.z0 + kz * dz);
                c1.push_back(v.x);
                c2.push_back(v.y);
            }
    out << "SCALARS v1 double 1\nLOOKUP_TABLE default\n";
    for (double v : c1) put(v);
    out << "SCALARS v2 double 1\nLOOKUP_TABLE default\n";
    for (double v : c2) put(v);
    out << "SCALARS dist_plus double 1\nLOOKUP_TABLE default\n";
    for (long i = 0; i < total; ++i) put(std::hypot(c1[i] - 1.0, c2[i]));
    if (!out) throw io_error("export_field3d: stream write failed");
}

inline void export_field3d(const ReflectionAssembly& a, const ExportBox& box, int nx, int ny,
                           int nz, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("export_field3d: cannot open " + path);
    export_field3d(a, box, nx, ny, nz, f);
    f.close();
    if (!f) throw io_error("export_field3d: write to " + path + " failed");
}

}  // namespace lac
