#include "causticfd/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace causticfd {

namespace {

constexpr double degenerate_ratio = 1e-14;
constexpr double collision_tolerance = 1e-8;
constexpr double max_continuation_step = 5e-3;

/// Level symbol c0 + cp e^{i phi} + cm e^{-i phi} and its first two phi derivatives.
struct SymbolJet {
    Complex value;
    Complex d1;
    Complex d2;
};

SymbolJet level_jet(const Stencil& st, Level level, double phi) {
    const double c0 = st.coefficient(level, 0);
    const double cp = st.coefficient(level, +1);
    const double cm = st.coefficient(level, -1);
    const Complex ep = std::polar(1.0, phi);
    const Complex em = std::conj(ep);
    const Complex i{0.0, 1.0};
    return {c0 + cp * ep + cm * em, i * (cp * ep - cm * em), -(cp * ep + cm * em)};
}

/// Polynomial p2 G^2 + p1 G + p0 with phi-derivatives of each coefficient.
struct RelationJet {
    std::array<SymbolJet, 3> p;  // p[k] multiplies G^k
};

RelationJet relation_jet(const Stencil& st, double phi) {
    RelationJet r;
    if (st.is_three_level()) {
        r.p[2] = level_jet(st, Level::next, phi);
        r.p[1] = level_jet(st, Level::current, phi);
        r.p[0] = level_jet(st, Level::previous, phi);
    } else {
        r.p[2] = {};
        r.p[1] = level_jet(st, Level::next, phi);
        r.p[0] = level_jet(st, Level::current, phi);
    }
    return r;
}

struct RootDerivatives {
    Complex d1;
    Complex d2;
    bool singular = false;
};

/// Implicit differentiation of P(G(phi), phi) = 0.
RootDerivatives root_derivatives(const RelationJet& r, Complex g) {
    const auto& [p0, p1, p2] = r.p;
    const Complex pg = 2.0 * p2.value * g + p1.value;
    const Complex pgg = 2.0 * p2.value;
    const Complex pphi = (p2.d1 * g + p1.d1) * g + p0.d1;
    const Complex pgphi = 2.0 * p2.d1 * g + p1.d1;
    const Complex pphiphi = (p2.d2 * g + p1.d2) * g + p0.d2;
    RootDerivatives d;
    if (std::abs(pg) == 0.0) {
        d.singular = true;
        d.d1 = d.d2 = Complex{std::numeric_limits<double>::quiet_NaN(), 0.0};
        return d;
    }
    d.d1 = -pphi / pg;
    d.d2 = -(pgg * d.d1 * d.d1 + 2.0 * pgphi * d.d1 + pphiphi) / pg;
    return d;
}

/// Follows the roots along phi from 0 by small steps, matching them to a
/// linear prediction and accumulating the unwrapped phase of each.
class Continuation {
public:
    explicit Continuation(const Stencil& st) : st_(st) {
        auto roots = solve_amplification(assemble_symbol(st_, 0.0));
        count_ = static_cast<int>(roots.size());
        for (int b = 0; b < count_; ++b) {
            g_[b] = roots[b];
            xi_[b] = -std::arg(roots[b]);
        }
    }

    void advance_to(double target) {
        while (phi_ != target) {
            const double gap = target - phi_;
            const double step = std::clamp(gap, -max_continuation_step, max_continuation_step);
            move(std::abs(gap) <= max_continuation_step ? target : phi_ + step);
        }
    }

    [[nodiscard]] int count() const { return count_; }
    [[nodiscard]] Complex root(int b) const { return g_[b]; }
    [[nodiscard]] double phase(int b) const { return xi_[b]; }
    [[nodiscard]] double phi() const { return phi_; }

private:
    void move(double next_phi) {
        auto roots = solve_amplification(assemble_symbol(st_, next_phi));
        if (static_cast<int>(roots.size()) != count_) {
            throw std::domain_error("amplification relation changes degree along the dispersion curve");
        }
        if (count_ == 2) {
            std::array<Complex, 2> predicted = g_;
            if (has_previous_) {
                const double ratio = (next_phi - phi_) / (phi_ - previous_phi_);
                for (int b = 0; b < 2; ++b) predicted[b] = g_[b] + (g_[b] - previous_g_[b]) * ratio;
            }
            const double keep = std::abs(roots[0] - predicted[0]) + std::abs(roots[1] - predicted[1]);
            const double swap = std::abs(roots[1] - predicted[0]) + std::abs(roots[0] - predicted[1]);
            if (swap < keep) std::swap(roots[0], roots[1]);
        }
        for (int b = 0; b < count_; ++b) {
            if (std::abs(g_[b]) > 0.0 && std::abs(roots[b]) > 0.0) xi_[b] -= std::arg(roots[b] / g_[b]);
            previous_g_[b] = g_[b];
            g_[b] = roots[b];
        }
        previous_phi_ = phi_;
        phi_ = next_phi;
        has_previous_ = true;
    }

    const Stencil& st_;
    int count_ = 0;
    double phi_ = 0.0;
    double previous_phi_ = 0.0;
    bool has_previous_ = false;
    std::array<Complex, 2> g_{};
    std::array<Complex, 2> previous_g_{};
    std::array<double, 2> xi_{};
};

DispersionSample make_sample(const Stencil& st, const AdvectionProblem& prob, const Continuation& cont, int branch) {
    DispersionSample s;
    s.sigma = prob.sigma();
    s.phi = cont.phi();
    s.branch = branch;
    const Complex g = cont.root(branch);
    s.amplification = g;
    s.amp_modulus = std::abs(g);
    s.xi_omega_tau = cont.phase(branch);
    s.eta_omega = std::log(s.amp_modulus) / prob.tau;
    if (cont.count() == 2) {
        const Complex other = cont.root(1 - branch);
        s.branch_collision = std::abs(g - other) <= collision_tolerance * std::max(1.0, std::abs(g));
    }
    const auto d = root_derivatives(relation_jet(st, s.phi), g);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (d.singular || s.amp_modulus == 0.0) {
        s.v_group = s.dvg_dphi = nan;
        return s;
    }
    const Complex log_d1 = d.d1 / g;
    const Complex log_d2 = d.d2 / g - log_d1 * log_d1;
    const double scale = prob.h / prob.tau;
    s.v_group = -scale * log_d1.imag();
    s.dvg_dphi = -scale * log_d2.imag();
    return s;
}

void check_branch(const Stencil& st, int branch) {
    if (branch < 0 || branch >= branch_count(st)) {
        throw std::out_of_range("branch " + std::to_string(branch) + " does not exist for scheme '" + st.name + "'");
    }
}

}  // namespace

SymbolQuadratic assemble_symbol(const Stencil& st, double phi) {
    st.validate();
    SymbolQuadratic q;
    q.next = level_jet(st, Level::next, phi).value;
    q.current = level_jet(st, Level::current, phi).value;
    q.previous = level_jet(st, Level::previous, phi).value;
    q.two_level = !st.is_three_level();
    return q;
}

std::array<Complex, 2> quadratic_roots(Complex a, Complex b, Complex c) {
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    // Choose the sign that avoids cancellation in b + sqrt(disc).
    const Complex sum = (std::real(std::conj(b) * disc) >= 0.0) ? b + disc : b - disc;
    const Complex q = -0.5 * sum;
    if (std::abs(q) == 0.0) return {Complex{0.0, 0.0}, Complex{0.0, 0.0}};  // b = c = 0
    return {q / a, c / q};
}

std::vector<Complex> solve_amplification(const SymbolQuadratic& q) {
    std::vector<Complex> roots;
    const auto linear = [&](Complex lead, Complex constant) {
        if (std::abs(lead) <= degenerate_ratio * std::abs(constant) || std::abs(lead) == 0.0) {
            throw std::domain_error("amplification relation has no nondegenerate root");
        }
        roots.push_back(-constant / lead);
    };
    if (q.two_level) {
        linear(q.next, q.current);
    } else if (std::abs(q.next) < degenerate_ratio * std::max(std::abs(q.current), std::abs(q.previous)) ||
               std::abs(q.next) == 0.0) {
        linear(q.current, q.previous);
    } else {
        const auto r = quadratic_roots(q.next, q.current, q.previous);
        roots.assign(r.begin(), r.end());
    }
    std::stable_sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
        return std::abs(x - 1.0) < std::abs(y - 1.0);
    });
    return roots;
}

int branch_count(const Stencil& st) {
    return static_cast<int>(solve_amplification(assemble_symbol(st, 0.0)).size());
}

DispersionSample dispersion_sample(const Stencil& st, const AdvectionProblem& prob, double phi, int branch) {
    const double one[] = {phi};
    return dispersion_sweep(st, prob, one, branch).front();
}

std::vector<DispersionSample> dispersion_sweep(const Stencil& st, const AdvectionProblem& prob,
                                               std::span<const double> phis, int branch) {
    prob.validate();
    check_branch(st, branch);
    std::vector<std::size_t> order(phis.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return phis[a] < phis[b]; });

    std::vector<DispersionSample> out(phis.size());
    // Non-negative wavenumbers ascending from 0, then negative ones descending from 0.
    Continuation up(st);
    for (auto idx : order) {
        if (phis[idx] < 0.0) continue;
        up.advance_to(phis[idx]);
        out[idx] = make_sample(st, prob, up, branch);
    }
    Continuation down(st);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (phis[*it] >= 0.0) continue;
        down.advance_to(phis[*it]);
        out[*it] = make_sample(st, prob, down, branch);
    }
    return out;
}

double group_velocity_fd(const Stencil& st, const AdvectionProblem& prob, double phi, int branch, double dphi) {
    const auto centre = dispersion_sample(st, prob, phi, branch);
    const auto nearest = [&](double p) {
        auto roots = solve_amplification(assemble_symbol(st, p));
        return *std::min_element(roots.begin(), roots.end(), [&](Complex a, Complex b) {
            return std::abs(a - centre.amplification) < std::abs(b - centre.amplification);
        });
    };
    const auto central = [&](double d) {
        return -std::arg(nearest(phi + d) / nearest(phi - d)) / (2.0 * d);
    };
    const double coarse = central(dphi);
    const double fine = central(0.5 * dphi);
    return prob.h / prob.tau * (4.0 * fine - coarse) / 3.0;
}

std::optional<double> closed_form_vg(SchemeId id, double sigma, double phi, double c) {
    const double s = std::sin(phi);
    const double co = std::cos(phi);
    const double s2 = sigma * sigma;
    switch (id) {
        case SchemeId::leapfrog: {
            const double r = 1.0 - s2 * s * s;
            if (!(r > 0.0)) throw std::domain_error("leapfrog closed form requires |sigma sin phi| < 1");
            return c * co / std::sqrt(r);
        }
        case SchemeId::lax:
            return c / (co * co + s2 * s * s);
        case SchemeId::lax_wendroff: {
            const double half = std::sin(0.5 * phi);
            const double d = 1.0 - 2.0 * s2 * half * half;
            return c * (d * co + s2 * s * half * half) / (d * d + s2 * s * s);
        }
        default:
            return std::nullopt;
    }
}

double lax_wendroff_vg_arctan_form(double sigma, double phi, double c) {
    const double s = std::sin(phi);
    const double half = std::sin(0.5 * phi);
    const double s2 = sigma * sigma;
    const double d = 1.0 - 2.0 * s2 * half * half;
    return c * (d * std::cos(phi) + s2 * s * s) / (d * d + s2 * s * s);
}

std::optional<double> amplification_modulus_closed_form(SchemeId id, double sigma, double phi) {
    const double s = std::sin(phi);
    const double s2 = sigma * sigma;
    switch (id) {
        case SchemeId::leapfrog:
            return 1.0;
        case SchemeId::lax:
            return std::sqrt(std::cos(phi) * std::cos(phi) + s2 * s * s);
        case SchemeId::lax_wendroff: {
            const double half = std::sin(0.5 * phi);
            return std::sqrt(1.0 - 4.0 * (1.0 - s2) * s2 * std::pow(half, 4));
        }
        default:
            return std::nullopt;
    }
}

AmplificationPeak max_amplification(const Stencil& st, int phi_points) {
    AmplificationPeak peak;
    const int n = std::max(phi_points, 2);
    for (int i = 0; i < n; ++i) {
        const double phi = M_PI * i / (n - 1);
        const auto roots = solve_amplification(assemble_symbol(st, phi));
        for (std::size_t b = 0; b < roots.size(); ++b) {
            if (std::abs(roots[b]) > peak.max_modulus) {
                peak = {std::abs(roots[b]), phi, static_cast<int>(b)};
            }
        }
    }
    return peak;
}

}  // namespace causticfd
