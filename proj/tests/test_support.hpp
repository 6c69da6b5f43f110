#pragma once

// Helpers shared by the test binaries. The dense eigensolver here is the
// independent oracle route; production code never includes this header.

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "lac/common.hpp"

namespace tsup {

inline std::mt19937_64 rng(unsigned long long seed = 20260823ull) {
    return std::mt19937_64(seed);
}

// Central finite difference of a scalar function of one packed vector.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Densify a matrix-free symmetric operator and return all eigenvalues ascending.
inline std::vector<double> dense_eigenvalues(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply, int dim) {
    Eigen::MatrixXd A(dim, dim);
    std::vector<double> e(dim, 0.0), out(dim, 0.0);
    for (int j = 0; j < dim; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        apply(e, out);
        for (int i = 0; i < dim; ++i) A(i, j) = out[i];
    }
    A = 0.5 * (A + A.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + dim);
    return ev;
}

}  // namespace tsup
