#include "causticfd/caustics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace causticfd {

namespace {

constexpr double curvature_step = 1e-5;

double second_derivative(const Stencil& st, const AdvectionProblem& prob, double phi, int branch) {
    return (dvg_dphi(st, prob, phi + curvature_step, branch) - dvg_dphi(st, prob, phi - curvature_step, branch)) /
           (2.0 * curvature_step);
}

Extremum classify(double d2, double c) {
    if (std::abs(d2) <= 1e-6 * std::abs(c)) return Extremum::flat;
    return d2 > 0.0 ? Extremum::min : Extremum::max;
}

CausticRoot make_root(const Stencil& st, const AdvectionProblem& prob, double phi, int branch, bool touching) {
    const auto s = dispersion_sample(st, prob, phi, branch);
    CausticRoot r;
    r.sigma = prob.sigma();
    r.phi_c = phi;
    r.u_c = s.v_group;
    r.branch = branch;
    r.residual = s.dvg_dphi;
    r.kind = (phi <= boundary_tolerance || phi >= M_PI - boundary_tolerance) ? RootKind::trivial_boundary
                                                                             : RootKind::interior;
    r.extremum = touching ? Extremum::flat : classify(second_derivative(st, prob, phi, branch), prob.c);
    return r;
}

double bisect(const Stencil& st, const AdvectionProblem& prob, int branch, double lo, double hi, double f_lo) {
    double f_hi = dvg_dphi(st, prob, hi, branch);
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = dvg_dphi(st, prob, mid, branch);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

/// Golden-section minimisation of |d Vg / d phi| on [lo, hi].
double minimise_abs(const Stencil& st, const AdvectionProblem& prob, int branch, double lo, double hi) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    const auto f = [&](double p) { return std::abs(dvg_dphi(st, prob, p, branch)); };
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > bisection_width) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(RootKind kind) {
    return kind == RootKind::trivial_boundary ? "trivial_boundary" : "interior";
}

std::string_view to_string(Extremum e) {
    switch (e) {
        case Extremum::min: return "min";
        case Extremum::max: return "max";
        case Extremum::flat: return "flat";
    }
    return "flat";
}

double dvg_dphi(const Stencil& st, const AdvectionProblem& prob, double phi, int branch) {
    return dispersion_sample(st, prob, phi, branch).dvg_dphi;
}

RootSearch search_caustic_roots(const Stencil& st, const AdvectionProblem& prob, int branch, int phi_points) {
    if (phi_points < 64) throw std::invalid_argument("root search needs at least 64 grid intervals on (0, pi)");
    const double c_abs = std::abs(prob.c);

    RootSearch out;
    out.summary.sigma = prob.sigma();
    out.summary.branch = branch;

    std::vector<double> grid(phi_points - 1);
    for (int i = 1; i < phi_points; ++i) grid[i - 1] = M_PI * i / phi_points;
    const auto samples = dispersion_sweep(st, prob, grid, branch);
    std::vector<double> f(samples.size());
    std::transform(samples.begin(), samples.end(), f.begin(), [](const auto& s) { return s.dvg_dphi; });

    double max_abs = 0.0;
    bool any_pos = false, any_neg = false;
    for (double v : f) {
        max_abs = std::max(max_abs, std::abs(v));
        any_pos |= v > touch_tolerance * c_abs;
        any_neg |= v < -touch_tolerance * c_abs;
    }
    out.summary.max_abs_dvg = max_abs;
    out.summary.flat = max_abs <= flatness_tolerance * c_abs;
    out.summary.monotone = !(any_pos && any_neg);

    for (double phi : {0.0, M_PI}) {
        const double d = dvg_dphi(st, prob, phi, branch);
        if (std::abs(d) <= root_tolerance * c_abs) out.roots.push_back(make_root(st, prob, phi, branch, false));
    }

    if (!out.summary.flat) {
        const std::size_t n = f.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (f[i] == 0.0) {
                out.roots.push_back(make_root(st, prob, grid[i], branch, false));
            } else if ((f[i] < 0.0) != (f[i + 1] < 0.0) && f[i + 1] != 0.0) {
                const double phi = bisect(st, prob, branch, grid[i], grid[i + 1], f[i]);
                out.roots.push_back(make_root(st, prob, phi, branch, false));
            }
        }
        // Tangent roots: |f| has a grid minimum without a neighbouring sign change.
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const bool local_min = std::abs(f[i]) <= std::abs(f[i - 1]) && std::abs(f[i]) <= std::abs(f[i + 1]);
            const bool same_sign = (f[i - 1] < 0.0) == (f[i] < 0.0) && (f[i] < 0.0) == (f[i + 1] < 0.0);
            if (!local_min || !same_sign || f[i] == 0.0) continue;
            const double phi = minimise_abs(st, prob, branch, grid[i - 1], grid[i + 1]);
            if (std::abs(dvg_dphi(st, prob, phi, branch)) <= touch_tolerance * c_abs) {
                out.roots.push_back(make_root(st, prob, phi, branch, true));
            }
        }
    }

    std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) { return a.phi_c < b.phi_c; });
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end(),
                                [](const auto& a, const auto& b) { return std::abs(a.phi_c - b.phi_c) <= 1e-9; }),
                    out.roots.end());
    for (const auto& r : out.roots) {
        (r.kind == RootKind::interior ? out.summary.interior_roots : out.summary.trivial_roots) += 1;
    }
    if (out.summary.interior_roots > 0) out.summary.monotone = false;
    return out;
}

std::vector<CausticRoot> find_caustic_roots(const Stencil& st, const AdvectionProblem& prob, int branch,
                                            int phi_points) {
    return search_caustic_roots(st, prob, branch, phi_points).roots;
}

std::vector<double> SigmaGrid::values() const {
    if (!(step > 0.0) || max < min) throw std::invalid_argument("sigma grid needs step > 0 and max >= min");
    const auto count = static_cast<long>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (long i = 0; i < count; ++i) {
        // Round to 12 decimals so 0.1 + 2 * 0.1 lands on the double nearest 0.3.
        out.push_back(std::round((min + i * step) * 1e12) / 1e12);
    }
    return out;
}

CausticLocus sweep_locus(std::string scheme, const StencilFactory& factory, const AdvectionProblem& base,
                         const SigmaGrid& grid, const SweepOptions& options) {
    CausticLocus locus;
    locus.scheme = std::move(scheme);
    locus.grid = grid;
    const auto sigmas = grid.values();
    for (double sigma : sigmas) {
        if (!(sigma > 0.0)) throw std::invalid_argument("sigma grid values must be positive");
        if (sigma > 1.0 && !options.allow_unstable) {
            throw std::invalid_argument("sigma > 1 requires allow_unstable");
        }
    }

    locus.caustic_free = true;
    locus.constant_vg = true;
    for (double sigma : sigmas) {
        const auto prob = AdvectionProblem::from_sigma(base.c, base.h, sigma);
        const auto st = factory(prob);
        const int branches = options.all_branches ? branch_count(st) : 1;
        for (int b = 0; b < branches; ++b) {
            auto search = search_caustic_roots(st, prob, b, options.phi_points);
            locus.caustic_free &= search.summary.caustic_free();
            locus.constant_vg &= search.summary.flat;
            locus.max_abs_dvg = std::max(locus.max_abs_dvg, search.summary.max_abs_dvg);
            locus.slices.push_back(search.summary);
            locus.roots.insert(locus.roots.end(), search.roots.begin(), search.roots.end());
        }
    }
    return locus;
}

CausticLocus sweep_locus(SchemeId id, const AdvectionProblem& base, const SigmaGrid& grid,
                         const SweepOptions& options) {
    return sweep_locus(std::string(to_string(id)), [id](const AdvectionProblem& p) { return build_scheme(id, p); },
                       base, grid, options);
}

CausticLine caustic_line(const CausticRoot& root, double x0) { return {root.u_c, x0}; }

}  // namespace causticfd
