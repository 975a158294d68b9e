#include "causticfd/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

namespace causticfd {

CyclicTridiagonal::CyclicTridiagonal(double sub, double diag, double super, std::size_t n)
    : sub_(sub), diag_(diag), super_(super), n_(n), gamma_(-diag) {
    if (n_ < 3) throw std::invalid_argument("cyclic tridiagonal system needs at least 3 unknowns");
    if (diag == 0.0) throw std::domain_error("cyclic tridiagonal system has a zero diagonal");
    const double scale = std::abs(sub) + std::abs(diag) + std::abs(super);

    // Modified diagonal: b_0 - gamma, b_{n-1} - alpha beta / gamma with
    // alpha = A(n-1, 0) = super and beta = A(0, n-1) = sub.
    inv_pivot_.resize(n_);
    c_prime_.resize(n_);
    double b = diag_ - gamma_;
    for (std::size_t i = 0; i < n_; ++i) {
        if (i == n_ - 1) b = diag_ - super_ * sub_ / gamma_;
        const double pivot = (i == 0) ? b : b - sub_ * c_prime_[i - 1];
        if (std::abs(pivot) <= 1e-14 * scale) throw std::domain_error("singular cyclic tridiagonal system");
        inv_pivot_[i] = 1.0 / pivot;
        c_prime_[i] = super_ * inv_pivot_[i];
        b = diag_;
    }

    std::vector<double> u(n_, 0.0);
    u.front() = gamma_;
    u.back() = super_;
    z_.resize(n_);
    thomas(u, z_);
    correction_denominator_ = 1.0 + z_.front() + sub_ * z_.back() / gamma_;
    if (std::abs(correction_denominator_) <= 1e-14) throw std::domain_error("singular cyclic tridiagonal system");
}

void CyclicTridiagonal::thomas(std::span<const double> rhs, std::span<double> x) const {
    x[0] = rhs[0] * inv_pivot_[0];
    for (std::size_t i = 1; i < n_; ++i) x[i] = (rhs[i] - sub_ * x[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n_ - 1; i-- > 0;) x[i] -= c_prime_[i] * x[i + 1];
}

void CyclicTridiagonal::solve(std::span<const double> rhs, std::span<double> x) const {
    if (rhs.size() != n_ || x.size() != n_) throw std::invalid_argument("cyclic tridiagonal size mismatch");
    thomas(rhs, x);
    const double fact = (x.front() + sub_ * x.back() / gamma_) / correction_denominator_;
    for (std::size_t i = 0; i < n_; ++i) x[i] -= fact * z_[i];
}

void CyclicTridiagonal::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("cyclic tridiagonal size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        const double left = x[(i + n_ - 1) % n_];
        const double right = x[(i + 1) % n_];
        y[i] = sub_ * left + diag_ * x[i] + super_ * right;
    }
}

}  // namespace causticfd
