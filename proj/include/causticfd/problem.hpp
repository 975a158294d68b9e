#pragma once

#include <cmath>
#include <stdexcept>

namespace causticfd {

/// Constant-speed advection u_t + c u_x = 0 on a uniform grid.
struct AdvectionProblem {
    double c = 1.0;    ///< advection speed
    double h = 1.0;    ///< mesh size
    double tau = 1.0;  ///< time step

    static AdvectionProblem from_sigma(double c, double h, double sigma) {
        return make(c, h, sigma * h / c);
    }

    static AdvectionProblem make(double c, double h, double tau) {
        AdvectionProblem p{c, h, tau};
        p.validate();
        return p;
    }

    [[nodiscard]] double sigma() const { return c * tau / h; }

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("mesh size h must be positive");
        if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("time step tau must be positive");
        if (c == 0.0 || !std::isfinite(c)) throw std::invalid_argument("advection speed c must be nonzero");
        if (!std::isfinite(sigma())) throw std::invalid_argument("CFL number is not finite");
    }
};

}  // namespace causticfd
