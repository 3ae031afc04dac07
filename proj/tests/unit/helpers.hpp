#pragma once

#include "dirspike/vector_space.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using Matrix = std::vector<std::vector<double>>;

inline dirspike::StateVec gaussian_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> v(n);
    for (auto& e : v) e = g(rng);
    return dirspike::StateVec(std::move(v));
}

// Orthogonal matrix from Gram-Schmidt on Gaussian columns.
inline Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix q(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> c(n);
        for (auto& e : c) e = g(rng);
        for (std::size_t k = 0; k < j; ++k) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += c[i] * q[i][k];
            for (std::size_t i = 0; i < n; ++i) c[i] -= d * q[i][k];
        }
        double r = 0.0;
        for (double e : c) r += e * e;
        r = std::sqrt(r);
        for (std::size_t i = 0; i < n; ++i) q[i][j] = c[i] / r;
    }
    return q;
}

inline dirspike::StateVec apply(const Matrix& q, const dirspike::StateVec& x) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += q[i][j] * x[j];
    }
    return dirspike::StateVec(std::move(y));
}

inline double max_abs_diff(const dirspike::StateVec& a, const dirspike::StateVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testing
