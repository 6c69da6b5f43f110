#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lac/optimize.hpp"
#include "test_support.hpp"

using namespace lac;

TEST_CASE("rosenbrock reaches the minimum") {
    Objective rosen = [](const std::vector<double>& x, std::vector<double>& g) {
        const double a = x[0], b = x[1];
        g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        g[1] = 200.0 * (b - a * a);
        return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
    };
    MinimizeOptions opts;
    opts.max_iter = 500;
    opts.grad_tol = 1e-10;
    const MinimizeResult r = minimize(rosen, {-1.2, 1.0}, opts);
    REQUIRE(r.converged);
    CHECK(std::fabs(r.x[0] - 1.0) < 1e-6);
    CHECK(std::fabs(r.x[1] - 1.0) < 1e-6);
    for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-14);
}

TEST_CASE("strictly convex quadratic is solved to high accuracy") {
    const int n = 10;
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = 1.0 + i;
    Objective quad = [&](const std::vector<double>& x, std::vector<double>& g) {
        double f = 0.0;
        for (int i = 0; i < n; ++i) {
            g[i] = diag[i] * (x[i] - 2.0);
            f += 0.5 * diag[i] * (x[i] - 2.0) * (x[i] - 2.0);
        }
        return f;
    };
    MinimizeOptions opts;
    opts.max_iter = 200;
    opts.grad_tol = 1e-12;
    opts.memory = n;
    const MinimizeResult r = minimize(quad, std::vector<double>(n, 0.0), opts);
    REQUIRE(r.converged);
    CHECK(r.value <= 1e-10);
}

TEST_CASE("non-finite objective raises divergence") {
    Objective bad = [](const std::vector<double>& x, std::vector<double>& g) {
        g[0] = -1.0;
        return x[0] > 0.5 ? std::nan("") : -x[0];
    };
    MinimizeOptions opts;
    opts.max_iter = 50;
    CHECK_THROWS_AS(minimize(bad, {0.0}, opts), divergence_error);
}

TEST_CASE("inconsistent gradient stalls and keeps the last iterate") {
    // Gradient points uphill: no step can satisfy Armijo.
    Objective lying = [](const std::vector<double>& x, std::vector<double>& g) {
        g[0] = -2.0 * x[0];
        return x[0] * x[0];
    };
    MinimizeOptions opts;
    opts.max_iter = 50;
    const MinimizeResult r = minimize(lying, {3.0}, opts);
    CHECK(r.status == MinimizeStatus::stalled);
    CHECK_FALSE(r.converged);
    CHECK(r.x[0] == Catch::Approx(3.0));
    CHECK(check_gradient(lying, {3.0}) > 0.1);
}

TEST_CASE("gradient checker accepts a correct gradient") {
    Objective quartic = [](const std::vector<double>& x, std::vector<double>& g) {
        double f = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            f += x[i] * x[i] * x[i] * x[i] + 0.3 * x[i] * x[(i + 1) % x.size()];
            g[i] = 4.0 * x[i] * x[i] * x[i];
        }
        for (size_t i = 0; i < x.size(); ++i) {
            g[(i + 1) % x.size()] += 0.3 * x[i];
            g[i] += 0.3 * x[(i + 1) % x.size()];
        }
        return f;
    };
    CHECK(check_gradient(quartic, {0.3, -1.2, 0.7, 2.0}) < 1e-7);
}

TEST_CASE("post-step hook is honored and clears into a consistent state") {
    // Clamp to |x| <= 1; minimum of (x-3)^2 over the clamp is at x = 1.
    Objective f = [](const std::vector<double>& x, std::vector<double>& g) {
        g[0] = 2.0 * (x[0] - 3.0);
        return (x[0] - 3.0) * (x[0] - 3.0);
    };
    MinimizeOptions opts;
    opts.max_iter = 100;
    opts.grad_tol = 1e-12;
    opts.post_step = [](std::vector<double>& x) {
        if (std::fabs(x[0]) > 1.0) {
            x[0] = std::copysign(1.0, x[0]);
            return true;
        }
        return false;
    };
    const MinimizeResult r = minimize(f, {-0.5, }, opts);
    CHECK(std::fabs(r.x[0] - 1.0) < 1e-12);
}

TEST_CASE("option validation") {
    Objective f = [](const std::vector<double>& x, std::vector<double>& g) {
        g[0] = x[0];
        return 0.5 * x[0] * x[0];
    };
    MinimizeOptions bad;
    bad.grad_tol = 0.0;
    CHECK_THROWS_AS(minimize(f, {1.0}, bad), invalid_input);
    CHECK_THROWS_AS(minimize(f, {}, MinimizeOptions{}), invalid_input);
}

static ApplyFn diag_op(std::vector<double> d) {
    return [d = std::move(d)](const std::vector<double>& in, std::vector<double>& out) {
        for (size_t i = 0; i < in.size(); ++i) out[i] = d[i] * in[i];
    };
}

TEST_CASE("smallest eigenvalue: explicit diagonal cases") {
    {
        const auto p = smallest_eigenvalue(diag_op({1.0, 1.0, 1.0}), {1.0, 1.0, 1.0}, 3);
        CHECK(p.value == Catch::Approx(1.0).margin(1e-10));
    }
    {
        const auto p = smallest_eigenvalue(diag_op({5.0, 2.0, 9.0}), {1.0, 1.0, 1.0}, 3);
        CHECK(p.value == Catch::Approx(2.0).margin(1e-9));
    }
    {
        // Generalized: M^{-1} A = diag(1, 3).
        const auto p = smallest_eigenvalue(diag_op({2.0, 3.0}), {2.0, 1.0}, 2);
        CHECK(p.value == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("smallest eigenvalue: Dirichlet Laplacian on [0, pi]") {
    const int n = 200;
    const double h = M_PI / (n + 1);
    ApplyFn lap = [&](const std::vector<double>& u, std::vector<double>& out) {
        for (int i = 0; i < n; ++i) {
            const double um = (i > 0) ? u[i - 1] : 0.0;
            const double up = (i + 1 < n) ? u[i + 1] : 0.0;
            out[i] = (2.0 * u[i] - um - up) / (h * h);
        }
    };
    const auto p = smallest_eigenvalue(lap, std::vector<double>(n, 1.0), n, 1e-10);
    CHECK(std::fabs(p.value - 1.0) < 0.01);

    const auto dense = tsup::dense_eigenvalues(lap, n);
    CHECK(std::fabs(p.value - dense.front()) <= 1e-6 * std::max(1.0, std::fabs(dense.front())));
}

TEST_CASE("smallest eigenvalue matches dense route on random banded operators") {
    auto gen = tsup::rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int dim : {40, 120, 400}) {
        std::vector<double> diag(dim), off1(dim - 1), off3(dim - 3);
        for (double& v : diag) v = 4.0 + u(gen);
        for (double& v : off1) v = u(gen);
        for (double& v : off3) v = 0.5 * u(gen);
        ApplyFn op = [&](const std::vector<double>& in, std::vector<double>& out) {
            for (int i = 0; i < dim; ++i) out[i] = diag[i] * in[i];
            for (int i = 0; i + 1 < dim; ++i) {
                out[i] += off1[i] * in[i + 1];
                out[i + 1] += off1[i] * in[i];
            }
            for (int i = 0; i + 3 < dim; ++i) {
                out[i] += off3[i] * in[i + 3];
                out[i + 3] += off3[i] * in[i];
            }
        };
        std::vector<double> metric(dim);
        for (double& m : metric) m = 0.5 + 0.5 * (u(gen) + 1.0);

        const auto p = smallest_eigenvalue(op, metric, dim, 1e-11);

        // Dense oracle on the symmetric similarity transform.
        std::vector<double> is(dim);
        for (int i = 0; i < dim; ++i) is[i] = 1.0 / std::sqrt(metric[i]);
        ApplyFn sym = [&](const std::vector<double>& in, std::vector<double>& out) {
            std::vector<double> t(dim), t2(dim);
            for (int i = 0; i < dim; ++i) t[i] = is[i] * in[i];
            op(t, t2);
            for (int i = 0; i < dim; ++i) out[i] = is[i] * t2[i];
        };
        const auto dense = tsup::dense_eigenvalues(sym, dim);
        CHECK(std::fabs(p.value - dense.front()) <=
              1e-6 * std::max(1.0, std::fabs(dense.front())));

        // Residual property of the returned pair.
        std::vector<double> av(dim);
        op(p.vector, av);
        double rs = 0.0, scale = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double ri = av[i] - p.value * metric[i] * p.vector[i];
            rs += ri * ri;
            scale += metric[i] * p.vector[i] * p.vector[i];
        }
        CHECK(std::sqrt(rs) <= 1e-8 * std::max(1.0, std::fabs(p.value)) * std::sqrt(scale) + 1e-9);
    }
}

TEST_CASE("banded smallest eigenvalue matches dense route") {
    auto gen = tsup::rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int dim : {5, 60, 400}) {
        SymBanded a(dim, 2);
        for (int i = 0; i < dim; ++i) a.add(i, i, 3.0 + u(gen));
        for (int i = 0; i + 1 < dim; ++i) a.add(i + 1, i, u(gen));
        for (int i = 0; i + 2 < dim; ++i) a.add(i + 2, i, 0.4 * u(gen));
        std::vector<double> metric(dim);
        for (double& m : metric) m = 0.25 + 0.75 * (0.5 * (u(gen) + 1.0));

        const auto p = smallest_eigenvalue(a, metric, 1e-13);

        std::vector<double> is(dim);
        for (int i = 0; i < dim; ++i) is[i] = 1.0 / std::sqrt(metric[i]);
        ApplyFn sym = [&](const std::vector<double>& in, std::vector<double>& out) {
            std::vector<double> t(dim), t2(dim);
            for (int i = 0; i < dim; ++i) t[i] = is[i] * in[i];
            a.apply(t, t2);
            for (int i = 0; i < dim; ++i) out[i] = is[i] * t2[i];
        };
        const auto dense = tsup::dense_eigenvalues(sym, dim);
        CHECK(std::fabs(p.value - dense.front()) <=
              1e-6 * std::max(1.0, std::fabs(dense.front())));

        std::vector<double> av(dim);
        a.apply(p.vector, av);
        double rs = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double ri = av[i] - p.value * metric[i] * p.vector[i];
            rs += ri * ri;
        }
        CHECK(std::sqrt(rs) <= 1e-7 * std::max(1.0, std::fabs(p.value)));
    }

    // A stiff indefinite case: shifted Laplacian with a huge spectral range.
    {
        const int dim = 300;
        const double h = 1.0 / (dim + 1);
        SymBanded a(dim, 1);
        for (int i = 0; i < dim; ++i) a.add(i, i, 2.0 / (h * h) - 12.0);
        for (int i = 0; i + 1 < dim; ++i) a.add(i + 1, i, -1.0 / (h * h));
        const auto p = smallest_eigenvalue(a, std::vector<double>(dim, 1.0), 1e-13);
        // Smallest eigenvalue is pi^2 - 12 < 0 up to O(h^2).
        CHECK(p.value == Catch::Approx(M_PI * M_PI - 12.0).margin(0.01));
        CHECK(p.value < 0.0);
    }
}

TEST_CASE("smallest eigenvalue input validation") {
    CHECK_THROWS_AS(smallest_eigenvalue(diag_op({1.0}), {1.0}, 1, 0.0), invalid_input);
    CHECK_THROWS_AS(smallest_eigenvalue(diag_op({1.0, 1.0}), {1.0}, 2), invalid_input);
    CHECK_THROWS_AS(smallest_eigenvalue(diag_op({1.0, 1.0}), {1.0, -1.0}, 2), invalid_input);
}
