#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace causticfd {

/// Periodic tridiagonal system with constant diagonals,
///   sub x_{j-1} + diag x_j + super x_{j+1} = r_j,  indices mod n.
///
/// The corner entries are removed by a rank-one (Sherman-Morrison)
/// correction so each solve is two Thomas sweeps; both factorizations are
/// computed once at construction.
class CyclicTridiagonal {
public:
    CyclicTridiagonal(double sub, double diag, double super, std::size_t n);

    void solve(std::span<const double> rhs, std::span<double> x) const;
    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;

    [[nodiscard]] std::size_t size() const { return n_; }

private:
    void thomas(std::span<const double> rhs, std::span<double> x) const;

    double sub_;
    double diag_;
    double super_;
    std::size_t n_;
    double gamma_;
    std::vector<double> inv_pivot_;
    std::vector<double> c_prime_;
    std::vector<double> z_;
    double correction_denominator_;
};

}  // namespace causticfd
