#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "causticfd/problem.hpp"
#include "causticfd/stencil.hpp"

namespace causticfd {

using Complex = std::complex<double>;

/// Fourier symbols of the three time levels at wavenumber phi.
///
/// Substituting u_l^m = G^m e^{i l phi} into the stencil and dividing by
/// G^{n-1} e^{i j phi} gives next G^2 + current G + previous = 0.  For
/// two-level schemes previous is identically zero and the relation is
/// reduced to next G + current = 0.
struct SymbolQuadratic {
    Complex next;      ///< level n+1 (A)
    Complex current;   ///< level n   (B)
    Complex previous;  ///< level n-1 (C)
    bool two_level = false;

    [[nodiscard]] Complex residual(Complex g) const {
        return two_level ? next * g + current : (next * g + current) * g + previous;
    }
    [[nodiscard]] double scale() const {
        return std::max({std::abs(next), std::abs(current), std::abs(previous)});
    }
};

[[nodiscard]] SymbolQuadratic assemble_symbol(const Stencil& st, double phi);

/// Roots of the amplification relation, ordered by |G - 1| ascending.
/// A relation whose leading coefficient is below 1e-14 of the others is
/// solved as linear. Throws std::domain_error if it is identically zero.
[[nodiscard]] std::vector<Complex> solve_amplification(const SymbolQuadratic& q);

/// Numerically stable roots of a g^2 + b g + c = 0, a != 0.
[[nodiscard]] std::array<Complex, 2> quadratic_roots(Complex a, Complex b, Complex c);

/// One point of a dispersion curve.
///
/// Convention: u = exp(i(kx - omega t)) so one step multiplies a mode by
/// G = exp(-i omega tau), hence |G| = exp(eta_omega tau) and
/// xi_omega tau = -arg G, unwrapped continuously from phi = 0.
struct DispersionSample {
    double sigma = 0.0;
    double phi = 0.0;
    int branch = 0;
    Complex amplification;
    double amp_modulus = 0.0;
    double xi_omega_tau = 0.0;
    double eta_omega = 0.0;
    double v_group = 0.0;
    double dvg_dphi = 0.0;  ///< d Vg / d phi, length/time per radian
    bool branch_collision = false;
};

/// Number of roots the relation has for this stencil (1 or 2).
[[nodiscard]] int branch_count(const Stencil& st);

/// Samples one branch at phi. Branch 0 is the root continuously connected
/// to the root nearest G = 1 at phi = 0.
[[nodiscard]] DispersionSample dispersion_sample(const Stencil& st, const AdvectionProblem& prob,
                                                 double phi, int branch = 0);

/// Samples one branch at many wavenumbers with a single continuation pass.
/// Results are returned in the order of `phis`.
[[nodiscard]] std::vector<DispersionSample> dispersion_sweep(const Stencil& st, const AdvectionProblem& prob,
                                                             std::span<const double> phis, int branch = 0);

/// Group velocity from a Richardson-refined central difference of the
/// unwrapped phase, step `dphi` and `dphi / 2`.
[[nodiscard]] double group_velocity_fd(const Stencil& st, const AdvectionProblem& prob, double phi,
                                       int branch = 0, double dphi = 1e-4);

/// Tabulated closed-form group velocity. Empty for schemes without one.
/// Throws std::domain_error for leapfrog when |sigma sin phi| >= 1.
[[nodiscard]] std::optional<double> closed_form_vg(SchemeId id, double sigma, double phi, double c = 1.0);

/// Derivative of the Lax-Wendroff phase atan2(sigma sin phi, 1 - 2 sigma^2 sin^2(phi/2))
/// taken by hand. Exact at sigma = 1, unlike the tabulated form.
[[nodiscard]] double lax_wendroff_vg_arctan_form(double sigma, double phi, double c = 1.0);

/// Tabulated closed-form |G|. Empty for schemes without one.
[[nodiscard]] std::optional<double> amplification_modulus_closed_form(SchemeId id, double sigma, double phi);

struct AmplificationPeak {
    double max_modulus = 0.0;
    double phi = 0.0;
    int branch = 0;
};

/// Largest |G| over all roots on a uniform grid of [0, pi].
[[nodiscard]] AmplificationPeak max_amplification(const Stencil& st, int phi_points = 513);

}  // namespace causticfd
