#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "lac/potential.hpp"
#include "lac/prism3d.hpp"
#include "test_support.hpp"

using namespace lac;

namespace {

Potential default_potential() {
    PotentialSpec spec;
    return Potential(spec);
}

// One coarse production-shaped instance shared by the solver tests.
struct CoarsePrism {
    Potential p;
    StripBaseline base;
    PrismGrid grid;
    WidthTable table;
    Field2D vq;
};

const CoarsePrism& coarse_prism() {
    static const CoarsePrism c = [] {
        Potential p = default_potential();
        StripBaseline base = make_strip_baseline(p, 8.0, 0.1);
        PrismGrid g = make_prism_grid(2, 8.0, 3.0, 0.1, 0.15, 0.15);
        std::vector<double> widths;
        for (int m = 1; m <= g.cap_m(); ++m) widths.push_back(m * g.hy);
        WidthTable table = m2l_table(p, base, g.hy, widths);
        Hetero2DResult h = solve_hetero2d(p, base, g.cap_m() * g.hy, g.hy);
        return CoarsePrism{p, base, g, table, h.field};
    }();
    return c;
}

}  // namespace

TEST_CASE("prism staircase follows the opening angle") {
    SECTION("right angle fold j = 2") {
        const PrismGrid g = make_prism_grid(2, 2.0, 2.0, 0.25, 0.25, 0.25);
        REQUIRE(g.nz == 9);
        for (int k = 0; k < g.nz; ++k) CHECK(g.m[k] == k);  // tan(pi/4) staircase
        CHECK(g.slaved(0));
        CHECK_FALSE(g.slaved(1));
        CHECK(g.offset[g.nz] == g.nodes());
        size_t total = 0;
        for (int k = 0; k < g.nz; ++k) total += static_cast<size_t>(g.m[k] + 1) * g.nx;
        CHECK(g.nodes() == total);
    }
    SECTION("sharper fold j = 3 opens more slowly") {
        const PrismGrid g = make_prism_grid(3, 2.0, 3.0, 0.25, 0.15, 0.15);
        const double tan30 = std::tan(M_PI / 6.0);
        for (int k = 0; k < g.nz; ++k)
            CHECK(g.m[k] == static_cast<int>(std::floor(k * 0.15 * tan30 / 0.15 + 1e-9)));
        CHECK(g.m[1] == 0);  // slaved beyond the first level
        CHECK(g.m[2] == 1);
    }
    SECTION("unresolved apex is rejected") {
        CHECK_THROWS_AS(make_prism_grid(2, 2.0, 2.0, 0.25, 5.0, 0.25), invalid_input);
        CHECK_THROWS_AS(make_prism_grid(1, 2.0, 2.0, 0.25, 0.25, 0.25), invalid_input);
        CHECK_THROWS_AS(make_prism_grid(2, -1.0, 2.0, 0.25, 0.25, 0.25), invalid_input);
    }
}

TEST_CASE("width lookup interpolates the table and extends both ends") {
    const auto& c = coarse_prism();
    const WidthTable& t = c.table;
    const StripBaseline& b = c.base;

    SECTION("nodal widths are exact") {
        for (size_t k = 0; k < t.widths.size(); ++k)
            CHECK(table_value_at(t, b, t.widths[k]) == t.values[k]);
    }
    SECTION("between nodes the chord is used") {
        const double mid = 0.5 * (t.widths[3] + t.widths[4]);
        CHECK(table_value_at(t, b, mid) ==
              Catch::Approx(0.5 * (t.values[3] + t.values[4])).epsilon(1e-12));
    }
    SECTION("below the table the scalar competitor bound applies") {
        const double w = 0.4 * t.widths.front();
        const double bound = 2.0 * w * (b.scalar_slice - b.m1_slice);
        CHECK(table_value_at(t, b, w) == Catch::Approx(bound).epsilon(1e-12));
        CHECK(table_value_at(t, b, 0.0) == 0.0);
    }
    SECTION("above the table the fitted exponential takes over") {
        REQUIRE(t.fit_points >= 2);
        const double w = t.widths.back() + 1.0;
        const double want = t.m2 - t.gap_prefactor * std::exp(-t.gap_rate * w);
        CHECK(table_value_at(t, b, w) == Catch::Approx(want).epsilon(1e-12));
        CHECK(table_value_at(t, b, w) <= t.m2);
        CHECK(table_value_at(t, b, w) >= t.values.back() - 1e-10);
    }
    SECTION("no fit means no extension") {
        WidthTable bare;
        bare.widths = {1.0, 2.0};
        bare.values = {0.5, 0.6};
        bare.fit_points = 0;
        CHECK_THROWS_AS(table_value_at(bare, b, 3.0), invalid_input);
        CHECK_THROWS_AS(table_value_at(bare, b, -1.0), invalid_input);
    }
}

TEST_CASE("phi3 of the constant extension assembles from 2d slices") {
    const auto& c = coarse_prism();
    const PrismGrid& g = c.grid;
    const Field3D u = constant_z_extension(c.base, c.vq, g);
    const double e = phi3(c.p, c.base, c.table, u);

    // manual reconstruction: renormalized 2d slice values plus the z-kinetic
    // cells (only the apex cells are nonzero for a constant-in-z field)
    double manual = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        const double wz = ((k == 0 || k == g.nz - 1) ? 0.5 : 1.0) * g.hz;
        const double slice = g.slaved(k) ? 0.0 : phi2L(c.p, c.base, extract_slice(u, k));
        manual += wz * (slice - table_value_at(c.table, c.base, g.m[k] * g.hy));
    }
    for (int k = 0; k + 1 < g.nz; ++k) {
        const int ny = std::min(g.m[k], g.m[k + 1]) + 1;
        double cell = 0.0;
        for (int jy = 0; jy < ny; ++jy)
            for (int i = 0; i < g.nx; ++i) {
                const double d1 = u.v1[g.at(k + 1, jy, i)] - u.v1[g.at(k, jy, i)];
                const double d2 = u.v2[g.at(k + 1, jy, i)] - u.v2[g.at(k, jy, i)];
                cell += trapezoid_weight(jy, ny) * g.hy * trapezoid_weight(i, g.nx) * g.hx *
                        (d1 * d1 + d2 * d2);
            }
        manual += 4.0 * cell / (2.0 * g.hz);
    }
    CHECK(e == Catch::Approx(manual).margin(1e-10));

    // the slicewise bound: each slice of the 2d transition costs at most the
    // limit value, so the total is small and finite
    double bound = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        const double wz = ((k == 0 || k == g.nz - 1) ? 0.5 : 1.0) * g.hz;
        bound += wz * (c.table.m2 - table_value_at(c.table, c.base, g.m[k] * g.hy));
    }
    // allowance for the apex kink between the slaved line and the first slices
    CHECK(e <= bound + 0.5);
    CHECK(e >= -static_cast<double>(g.nz) * 1e-9);
}

TEST_CASE("prism gradient matches finite differences") {
    Potential p = default_potential();
    StripBaseline base = make_strip_baseline(p, 2.0, 0.25);
    WidthTable table = m2l_table(p, base, 0.25, {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0});
    const PrismGrid g = make_prism_grid(2, 2.0, 2.0, 0.25, 0.25, 0.25);
    Hetero2DResult h = solve_hetero2d(p, base, g.cap_m() * 0.25, 0.25);

    detail3d::Packing3 pack;
    pack.g = g;
    pack.well = p.spec().well_plus;
    pack.q1 = base.q1;
    pack.init();
    const Field3D u0 = constant_z_extension(base, h.field, g);
    pack.cap1.assign(static_cast<size_t>(g.cap_m() + 1) * g.nx, 0.0);
    pack.cap2 = pack.cap1;
    for (int jy = 0; jy <= g.cap_m(); ++jy)
        for (int i = 0; i < g.nx; ++i) {
            pack.cap1[static_cast<size_t>(jy) * g.nx + i] = u0.v1[g.at(g.nz - 1, jy, i)];
            pack.cap2[static_cast<size_t>(jy) * g.nx + i] = u0.v2[g.at(g.nz - 1, jy, i)];
        }
    const Objective obj = prism_objective(p, base, table, pack);
    auto rng = tsup::rng();
    std::normal_distribution<double> nd(0.0, 0.1);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> x = pack.pack(u0);
        for (auto& v : x) v += nd(rng);
        CHECK(check_gradient(obj, x) < 1e-5);
    }
}

TEST_CASE("coarse prism solve settles under the constant competitor") {
    const auto& c = coarse_prism();
    const PrismResult r = solve_prism(c.p, c.base, c.table, c.vq, c.grid);
    CHECK(r.converged);
    CHECK(r.value < r.seed_value);

    SECTION("slice inequality against the width table") {
        const SliceTrack t = track_slices(c.p, c.base, c.table, r.field, c.vq);
        for (double e : t.energy_excess) CHECK(e >= -1e-6);
    }

    SECTION("apex line and cap are frozen") {
        const PrismGrid& g = c.grid;
        for (int i = 0; i < g.nx; ++i) {
            CHECK(r.field.v1[g.at(0, 0, i)] == c.base.q1[i]);
            CHECK(r.field.v2[g.at(0, 0, i)] == 0.0);
        }
        for (int jy = 0; jy <= g.cap_m(); ++jy)
            for (int i = 0; i < g.nx; i += 7)
                CHECK(r.field.v1[g.at(g.nz - 1, jy, i)] == c.vq.v1[c.vq.grid.at(i, jy)]);
    }

    SECTION("truncation keeps the sup norm inside the ball") {
        double sup = 0.0;
        for (size_t a = 0; a < r.field.v1.size(); ++a)
            sup = std::max(sup, std::hypot(r.field.v1[a], r.field.v2[a]));
        CHECK(sup <= c.p.spec().radius + 1e-12);
    }

    SECTION("far field approaches the well exponentially") {
        const FarFieldReport ff = check_far_field(r.field);
        CHECK(ff.monotone);
        CHECK(ff.rate > 0.0);
        const double spectral = std::sqrt(well_constants(c.p).lambda_min_plus);
        CHECK(ff.rate > 0.5 * spectral);
        CHECK(ff.rate < 2.0 * spectral);
    }

    SECTION("gradient energy bound on truncated prisms") {
        for (double rr : {1.5, 3.0}) {
            const double lhs = gradient_energy_below(r.field, rr);
            const double rhs = 2.0 * (r.value + rr * c.table.m2 +
                                      c.grid.tan_theta * rr * rr * c.base.m1_slice);
            CHECK(lhs <= rhs + 1e-6);
        }
    }

    SECTION("slices head toward the cap field") {
        const SliceTrack t = track_slices(c.p, c.base, c.table, r.field, c.vq);
        REQUIRE(t.l2.size() >= 6);
        // weakly decreasing over the last third of the levels
        const size_t from = t.l2.size() - t.l2.size() / 3;
        for (size_t k = from; k < t.l2.size(); ++k) CHECK(t.l2[k] <= t.l2[k - 1] + 1e-9);
    }
}

TEST_CASE("prism input validation") {
    const auto& c = coarse_prism();

    SECTION("strip field must cover the cap") {
        const StripGrid narrow = make_strip_grid(8.0, 0.15, 0.1, 0.15);
        const Field2D tiny = make_strip_field(narrow);
        CHECK_THROWS_AS(constant_z_extension(c.base, tiny, c.grid), invalid_input);
    }
    SECTION("baseline x-grid must match") {
        Potential p = default_potential();
        StripBaseline other = make_strip_baseline(p, 2.0, 0.25);
        CHECK_THROWS_AS(phi3(p, other, c.table, make_prism_field(c.grid)), invalid_input);
    }
    SECTION("scalar baseline cannot seed a layered prism") {
        PotentialSpec spec;
        spec.alpha = 0.0;
        spec.gamma = 1.0;
        Potential ps(spec);
        StripBaseline bs = make_strip_baseline(ps, 8.0, 0.1);
        REQUIRE_FALSE(bs.nonscalar);
        CHECK_THROWS_AS(solve_prism(ps, bs, c.table, c.vq, c.grid), hypothesis_error);
    }
}
