#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "causticfd/tridiagonal.hpp"

using namespace causticfd;

namespace {

// Dense Gaussian elimination with partial pivoting on the full periodic matrix.
std::vector<double> dense_solve(double sub, double diag, double super, std::vector<double> b) {
    const std::size_t n = b.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][(i + n - 1) % n] += sub;
        a[i][i] += diag;
        a[i][(i + 1) % n] += super;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

}  // namespace

TEST_CASE("cyclic solve matches dense elimination") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {3u, 4u, 5u, 8u, 17u, 64u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double sub = u(rng), super = u(rng);
            const double diag = (trial % 2 ? -1.0 : 1.0) * (std::abs(sub) + std::abs(super) + 0.1 + std::abs(u(rng)));
            std::vector<double> rhs(n);
            for (auto& v : rhs) v = u(rng);
            const CyclicTridiagonal m(sub, diag, super, n);
            std::vector<double> x(n), y(n);
            m.solve(rhs, x);
            const auto ref = dense_solve(sub, diag, super, rhs);
            m.apply(x, y);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
                CHECK(std::abs(y[i] - rhs[i]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("crank-nicolson type operator") {
    // Skew off-diagonals are the implicit part of the centred schemes.
    const std::size_t n = 1000;
    const CyclicTridiagonal m(-0.35, 1.0, 0.35, n);
    std::vector<double> rhs(n), x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = std::sin(0.37 * static_cast<double>(i)) + 0.1;
    m.solve(rhs, x);
    m.apply(x, y);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(y[i] - rhs[i]));
    CHECK(err <= 1e-12);
}

TEST_CASE("singular and invalid systems are rejected") {
    // Symbol 2 + 2 cos(phi) vanishes at phi = pi for even n.
    CHECK_THROWS_AS(CyclicTridiagonal(1.0, 2.0, 1.0, 8), std::domain_error);
    // Row sums zero: constant vector in the kernel.
    CHECK_THROWS_AS(CyclicTridiagonal(-1.0, 2.0, -1.0, 10), std::domain_error);
    CHECK_THROWS_AS(CyclicTridiagonal(1.0, 4.0, 1.0, 2), std::invalid_argument);
    CHECK_NOTHROW(CyclicTridiagonal(1.0, 2.0, 1.0, 9));
    const CyclicTridiagonal m(0.5, 3.0, 0.5, 5);
    std::vector<double> rhs(4), x(5);
    CHECK_THROWS_AS(m.solve(rhs, x), std::invalid_argument);
}
