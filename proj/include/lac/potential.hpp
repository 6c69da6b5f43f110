#pragma once

// Symmetric double-well potentials W on R^2 with wells a+/- = (+-1, 0).
//
// Every supported family is stored as a polynomial in (s, t) = (xi1^2, xi2^2),
// which makes the component-wise evenness structural and keeps value, gradient
// and Hessian in one code path:
//
//   W(xi) = P(s, t),  dW/dxi1 = 2 xi1 P_s,  dW/dxi2 = 2 xi2 P_t,
//   H11 = 4 xi1^2 P_ss + 2 P_s,  H12 = 4 xi1 xi2 P_st,  H22 = 4 xi2^2 P_tt + 2 P_t.
//
// The built-in "abg" family is
//   W(xi) = (xi1^2 - 1)^2 + (xi2^2 - alpha (1 - xi1^2))^2 + gamma xi2^2.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lac/common.hpp"

namespace lac {

struct PolyTerm {
    int ps = 0;  // power of s = xi1^2
    int pt = 0;  // power of t = xi2^2
    double c = 0.0;
};

struct PotentialSpec {
    std::string family = "abg";
    double alpha = 2.0;
    double gamma = 0.3;
    double radius = 2.0;  // coercivity radius R > 1
    Vec2 well_plus{1.0, 0.0};
    Vec2 well_minus{-1.0, 0.0};
    std::vector<PolyTerm> poly;  // used when family == "poly"
};

namespace detail {
inline double ipow(double b, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= b;
    return r;
}
}  // namespace detail

class Potential {
  public:
    explicit Potential(PotentialSpec spec) : spec_(std::move(spec)) {
        require(std::isfinite(spec_.alpha) && std::isfinite(spec_.gamma) &&
                    std::isfinite(spec_.radius),
                "potential: non-finite parameter");
        require(spec_.radius > 1.0, "potential: coercivity radius must exceed 1");
        if (spec_.family == "abg") {
            const double a = spec_.alpha, g = spec_.gamma;
            terms_ = {{2, 0, 1.0 + a * a}, {1, 0, -2.0 - 2.0 * a * a},
                      {0, 0, 1.0 + a * a}, {0, 2, 1.0},
                      {1, 1, 2.0 * a},     {0, 1, g - 2.0 * a}};
        } else if (spec_.family == "poly") {
            require(!spec_.poly.empty(), "potential: empty polynomial");
            for (const auto& t : spec_.poly) {
                require(t.ps >= 0 && t.pt >= 0 && std::isfinite(t.c),
                        "potential: bad polynomial term");
            }
            terms_ = spec_.poly;
        } else {
            throw invalid_input("potential: unknown family '" + spec_.family + "'");
        }
    }

    const PotentialSpec& spec() const { return spec_; }

    double value(Vec2 xi) const {
        check_point(xi);
        const double s = xi.x * xi.x, t = xi.y * xi.y;
        double w = 0.0;
        for (const auto& m : terms_) w += m.c * detail::ipow(s, m.ps) * detail::ipow(t, m.pt);
        return w;
    }

    Vec2 gradient(Vec2 xi) const {
        check_point(xi);
        const double s = xi.x * xi.x, t = xi.y * xi.y;
        double ps = 0.0, pt = 0.0;
        for (const auto& m : terms_) {
            if (m.ps > 0) ps += m.c * m.ps * detail::ipow(s, m.ps - 1) * detail::ipow(t, m.pt);
            if (m.pt > 0) pt += m.c * m.pt * detail::ipow(s, m.ps) * detail::ipow(t, m.pt - 1);
        }
        return {2.0 * xi.x * ps, 2.0 * xi.y * pt};
    }

    Mat2 hessian(Vec2 xi) const {
        check_point(xi);
        const double s = xi.x * xi.x, t = xi.y * xi.y;
        double ps = 0, pt = 0, pss = 0, pst = 0, ptt = 0;
        for (const auto& m : terms_) {
            const double us = detail::ipow(s, m.ps), ut = detail::ipow(t, m.pt);
            if (m.ps > 0) ps += m.c * m.ps * detail::ipow(s, m.ps - 1) * ut;
            if (m.pt > 0) pt += m.c * m.pt * us * detail::ipow(t, m.pt - 1);
            if (m.ps > 1) pss += m.c * m.ps * (m.ps - 1) * detail::ipow(s, m.ps - 2) * ut;
            if (m.ps > 0 && m.pt > 0)
                pst += m.c * m.ps * m.pt * detail::ipow(s, m.ps - 1) * detail::ipow(t, m.pt - 1);
            if (m.pt > 1) ptt += m.c * m.pt * (m.pt - 1) * us * detail::ipow(t, m.pt - 2);
        }
        Mat2 h;
        h.a11 = 4.0 * s * pss + 2.0 * ps;
        h.a12 = 4.0 * xi.x * xi.y * pst;
        h.a22 = 4.0 * t * ptt + 2.0 * pt;
        return h;
    }

    // chi: distance to the closer well.
    double well_distance(Vec2 xi) const {
        check_point(xi);
        return std::min(norm(xi - spec_.well_plus), norm(xi - spec_.well_minus));
    }

  private:
    static void check_point(Vec2 xi) {
        if (!(std::isfinite(xi.x) && std::isfinite(xi.y)))
            throw invalid_input("potential: non-finite evaluation point");
    }

    PotentialSpec spec_;
    std::vector<PolyTerm> terms_;
};

// Constants of the near-well regime: on the ball chi(xi) <= 2 delta_bar,
//   2 w_lower <= eig(hess W) <= 2 w_upper,
//   w_lower chi^2 <= W <= w_upper chi^2,  |grad W| <= 2 w_upper chi.
struct WellConstants {
    double delta_bar = 0.0;
    double w_lower = 0.0;
    double w_upper = 0.0;
    double lambda_min_plus = 0.0;  // smallest Hessian eigenvalue at the well itself
};

inline WellConstants well_constants(const Potential& p) {
    const Vec2 wells[2] = {p.spec().well_plus, p.spec().well_minus};
    {
        const Mat2 h = p.hessian(wells[0]);
        if (h.eig_min() <= 0.0)
            throw hypothesis_error("well constants: Hessian not positive definite at a well");
    }

    const int nr = 24, na = 48;
    double delta = 0.124;  // just below the admissible ceiling 1/8
    while (delta >= 1e-3) {
        double emin = 1e300, emax = -1e300;
        bool ok = true;
        // Pass 1: Hessian eigenvalue range over the sampled 2*delta balls.
        for (const Vec2& a : wells) {
            for (int ir = 0; ir <= nr && ok; ++ir) {
                const double r = 2.0 * delta * ir / nr;
                const int nang = (ir == 0) ? 1 : na;
                for (int ia = 0; ia < nang; ++ia) {
                    const double th = 2.0 * M_PI * ia / na;
                    const Vec2 xi = a + Vec2{r * std::cos(th), r * std::sin(th)};
                    const Mat2 h = p.hessian(xi);
                    emin = std::min(emin, h.eig_min());
                    emax = std::max(emax, h.eig_max());
                }
            }
        }
        if (emin > 0.0) {
            const double wl = 0.5 * emin, wu = 0.5 * emax;
            // Pass 2: growth envelopes with those constants.
            for (const Vec2& a : wells) {
                for (int ir = 1; ir <= nr && ok; ++ir) {
                    const double r = 2.0 * delta * ir / nr;
                    for (int ia = 0; ia < na; ++ia) {
                        const double th = 2.0 * M_PI * ia / na;
                        const Vec2 xi = a + Vec2{r * std::cos(th), r * std::sin(th)};
                        const double chi = p.well_distance(xi);
                        const double w = p.value(xi);
                        const double g = norm(p.gradient(xi));
                        const double slack = 1e-12 * (1.0 + w);
                        if (!(w >= wl * chi * chi - slack && w <= wu * chi * chi + slack &&
                              g <= 2.0 * wu * chi + slack)) {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if (ok) {
                WellConstants wc;
                wc.delta_bar = delta;
                wc.w_lower = wl;
                wc.w_upper = wu;
                wc.lambda_min_plus = p.hessian(p.spec().well_plus).eig_min();
                return wc;
            }
        }
        delta *= 0.8;
    }
    throw hypothesis_error("well constants: no admissible delta_bar >= 1e-3");
}

struct HypothesesReport {
    bool wells_ok = false;      // zeros, critical points, SPD Hessians, orientation
    bool positivity_ok = false; // W > 0 away from the wells
    bool coercivity_ok = false; // grad W . xi > 0 for |xi| >= R
    bool symmetry_ok = false;   // evenness in each component separately
    std::vector<std::string> failures;

    bool ok() const { return wells_ok && positivity_ok && coercivity_ok && symmetry_ok; }
};

// Sampled verification of the standing hypotheses on [-2R, 2R]^2 plus the
// circle |xi| = R. Sampling is deterministic; the report lists all failures.
inline HypothesesReport validate_hypotheses(const Potential& p) {
    HypothesesReport rep;
    const Vec2 ap = p.spec().well_plus, am = p.spec().well_minus;
    const double R = p.spec().radius;

    rep.wells_ok = true;
    if (!(ap.x > 0.0 && ap.y == 0.0 && am.x == -ap.x && am.y == 0.0)) {
        rep.wells_ok = false;
        rep.failures.push_back("wells: expected a+ = (p, 0) with p > 0 and a- = -a+");
    }
    for (const Vec2& a : {ap, am}) {
        if (std::fabs(p.value(a)) > 1e-10) {
            rep.wells_ok = false;
            rep.failures.push_back("wells: W does not vanish at a declared well");
        }
        if (norm(p.gradient(a)) > 1e-10) {
            rep.wells_ok = false;
            rep.failures.push_back("wells: declared well is not a critical point");
        }
        if (p.hessian(a).eig_min() <= 0.0) {
            rep.wells_ok = false;
            rep.failures.push_back("wells: Hessian not positive definite at a well");
        }
    }

    const int ns = 81;
    rep.positivity_ok = true;
    rep.symmetry_ok = true;
    rep.coercivity_ok = true;
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < ns; ++j) {
            const Vec2 xi{-2.0 * R + 4.0 * R * i / (ns - 1), -2.0 * R + 4.0 * R * j / (ns - 1)};
            const double w = p.value(xi);
            const bool at_well = norm(xi - ap) < 1e-12 || norm(xi - am) < 1e-12;
            if (!at_well && !(w > 0.0) && rep.positivity_ok) {
                rep.positivity_ok = false;
                rep.failures.push_back("W1: W not strictly positive away from the wells");
            }
            const double wr = p.value({-xi.x, xi.y});
            const double wu = p.value({xi.x, -xi.y});
            const double tol = 1e-11 * (1.0 + std::fabs(w));
            if ((std::fabs(w - wr) > tol || std::fabs(w - wu) > tol) && rep.symmetry_ok) {
                rep.symmetry_ok = false;
                rep.failures.push_back("W3: evenness in a component fails");
            }
            const double r = norm(xi);
            if (r >= R && !(dot(p.gradient(xi), xi) > 0.0) && rep.coercivity_ok) {
                rep.coercivity_ok = false;
                rep.failures.push_back("W2: grad W . xi not positive at |xi| >= R");
            }
        }
    }
    const int nc = 256;
    for (int ia = 0; ia < nc; ++ia) {
        const double th = 2.0 * M_PI * ia / nc;
        const Vec2 xi{R * std::cos(th), R * std::sin(th)};
        if (!(dot(p.gradient(xi), xi) > 0.0)) {
            rep.coercivity_ok = false;
            rep.failures.push_back("W2: grad W . xi not positive on the circle |xi| = R");
            break;
        }
    }
    return rep;
}

}  // namespace lac
