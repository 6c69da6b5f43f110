#pragma once

// Shared small types and helpers for the layered Allen-Cahn solver stack.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lac {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Symmetric 2x2 matrix (Hessians).
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;

    double eig_min() const {
        const double tr = a11 + a22;
        const double disc = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
        return 0.5 * tr - disc;
    }
    double eig_max() const {
        const double tr = a11 + a22;
        const double disc = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
        return 0.5 * tr + disc;
    }
};

inline Vec2 apply(const Mat2& m, Vec2 h) {
    return {m.a11 * h.x + m.a12 * h.y, m.a12 * h.x + m.a22 * h.y};
}

// Error taxonomy; the CLI maps these onto exit codes.
struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& m) : std::runtime_error(m) {}
};
struct hypothesis_error : std::runtime_error {
    explicit hypothesis_error(const std::string& m) : std::runtime_error(m) {}
};
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& m) : std::runtime_error(m) {}
};
struct divergence_error : solver_error {
    explicit divergence_error(const std::string& m) : solver_error(m) {}
};
struct io_error : std::runtime_error {
    explicit io_error(const std::string& m) : std::runtime_error(m) {}
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw invalid_input(msg);
}

// Trapezoid weight on a uniform node range [0, n-1].
inline double trapezoid_weight(int i, int n) {
    return (i == 0 || i == n - 1) ? 0.5 : 1.0;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

inline double norm_inf(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s = std::max(s, std::fabs(a));
    return s;
}

// Least-squares line y = slope*x + intercept with coefficient of determination.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    require(xs.size() == ys.size(), "fit_line: size mismatch");
    LineFit f;
    f.points = static_cast<int>(xs.size());
    if (f.points < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < f.points; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double n = f.points;
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (int i = 0; i < f.points; ++i) {
        const double fit = f.slope * xs[i] + f.intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

// FNV-1a, used for stage input digests in the pipeline manifest.
inline std::uint64_t fnv1a(const std::string& data, std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

}  // namespace lac
