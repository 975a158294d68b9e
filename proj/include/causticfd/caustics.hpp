#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "causticfd/dispersion.hpp"
#include "causticfd/problem.hpp"
#include "causticfd/stencil.hpp"

namespace causticfd {

enum class RootKind { trivial_boundary, interior };
/// Nature of the group-velocity extremum at a root of d Vg / d phi.
enum class Extremum { min, max, flat };

[[nodiscard]] std::string_view to_string(RootKind kind);
[[nodiscard]] std::string_view to_string(Extremum e);

inline constexpr double root_tolerance = 1e-8;       ///< |d Vg / d phi| at a root, units of |c|
inline constexpr double flatness_tolerance = 1e-7;   ///< max |d Vg / d phi| of a constant Vg, units of |c|
inline constexpr double touch_tolerance = 1e-9;      ///< double-root detection threshold, units of |c|
inline constexpr double bisection_width = 1e-10;
inline constexpr double boundary_tolerance = 1e-6;   ///< phi_c this close to 0 or pi is a boundary root

/// A stationary point of the group velocity: the wavenumber whose packets
/// travel along the ray x / t = u_c.
struct CausticRoot {
    double sigma = 0.0;
    double phi_c = 0.0;
    double u_c = 0.0;
    int branch = 0;
    RootKind kind = RootKind::interior;
    Extremum extremum = Extremum::flat;
    double residual = 0.0;  ///< d Vg / d phi evaluated at phi_c

    [[nodiscard]] double k_c(double h) const { return phi_c / h; }
};

/// d Vg / d phi on one branch.
[[nodiscard]] double dvg_dphi(const Stencil& st, const AdvectionProblem& prob, double phi, int branch = 0);

/// Summary of one (sigma, branch) slice of a root search.
struct SliceSummary {
    double sigma = 0.0;
    int branch = 0;
    int interior_roots = 0;
    int trivial_roots = 0;
    double max_abs_dvg = 0.0;  ///< over the interior search grid
    bool flat = false;         ///< Vg constant to flatness_tolerance
    bool monotone = false;     ///< d Vg / d phi keeps one sign on (0, pi)

    [[nodiscard]] bool caustic_free() const { return flat || (interior_roots == 0 && monotone); }
};

struct RootSearch {
    std::vector<CausticRoot> roots;  ///< ascending phi_c
    SliceSummary summary;
};

/// Brackets sign changes of d Vg / d phi on a uniform grid of `phi_points`
/// intervals over (0, pi), refines each by bisection, and adds the boundary
/// roots at phi = 0 and pi. Tangent double roots are found by minimising
/// |d Vg / d phi| around grid minima.
[[nodiscard]] RootSearch search_caustic_roots(const Stencil& st, const AdvectionProblem& prob, int branch = 0,
                                              int phi_points = 256);

[[nodiscard]] std::vector<CausticRoot> find_caustic_roots(const Stencil& st, const AdvectionProblem& prob,
                                                          int branch = 0, int phi_points = 256);

/// Uniform CFL grid min, min + step, ..., max.
struct SigmaGrid {
    double min = 0.1;
    double max = 0.9;
    double step = 0.1;

    [[nodiscard]] std::vector<double> values() const;
};

struct CausticLocus {
    std::string scheme;
    SigmaGrid grid;
    std::vector<CausticRoot> roots;  ///< ascending sigma, branch, phi_c
    std::vector<SliceSummary> slices;
    bool caustic_free = false;
    bool constant_vg = false;  ///< every slice flat
    double max_abs_dvg = 0.0;
};

using StencilFactory = std::function<Stencil(const AdvectionProblem&)>;

struct SweepOptions {
    int phi_points = 256;
    bool allow_unstable = false;  ///< permit sigma > 1
    bool all_branches = true;
};

/// Root search for every sigma of the grid, with the problem's c and h held
/// fixed and tau = sigma h / c.
[[nodiscard]] CausticLocus sweep_locus(std::string scheme, const StencilFactory& factory,
                                       const AdvectionProblem& base, const SigmaGrid& grid,
                                       const SweepOptions& options = {});
[[nodiscard]] CausticLocus sweep_locus(SchemeId id, const AdvectionProblem& base, const SigmaGrid& grid,
                                       const SweepOptions& options = {});

/// Ray x = x0 + u_c t along which packets near phi_c focus.
struct CausticLine {
    double slope = 0.0;
    double x0 = 0.0;

    [[nodiscard]] double position(double t) const { return x0 + slope * t; }
};

[[nodiscard]] CausticLine caustic_line(const CausticRoot& root, double x0 = 0.0);

}  // namespace causticfd
