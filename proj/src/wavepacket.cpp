#include "causticfd/wavepacket.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace causticfd {

namespace {

constexpr double coverage_level = 1e-12;
constexpr double negligible_level = 1e-17;
constexpr double separation_level = 1e-10;

struct Copy {
    std::string name;
    const WavePacket* packet;
    double speed;
};

std::vector<Copy> active_copies(const PacketErrorConfig& cfg) {
    std::vector<Copy> out;
    if (cfg.packet1.amplitude != 0.0) {
        out.push_back({"exact1", &cfg.packet1, cfg.c});
        out.push_back({"dispersive1", &cfg.packet1, cfg.packet1.v_advect});
    }
    if (cfg.packet2.amplitude != 0.0) {
        out.push_back({"exact2", &cfg.packet2, cfg.c});
        out.push_back({"dispersive2", &cfg.packet2, cfg.packet2.v_advect});
    }
    return out;
}

double error_at(const PacketErrorConfig& cfg, double x, double t) {
    const auto& p1 = cfg.packet1;
    const auto& p2 = cfg.packet2;
    return std::abs(p1.evaluate(x, t, cfg.c) - p1.evaluate(x, t) + p2.evaluate(x, t, cfg.c) - p2.evaluate(x, t));
}

}  // namespace

double WavePacket::at_offset(double s) const {
    return amplitude * std::exp(-alpha_env * s * s) * std::cos(k_wave * s);
}

double WavePacket::support_radius(double level) const { return std::sqrt(-std::log(level) / alpha_env); }

void WavePacket::validate() const {
    if (!(alpha_env > 0.0) || !std::isfinite(alpha_env)) throw std::invalid_argument("alpha_env must be positive");
    for (double v : {x0, k_wave, v_advect, amplitude}) {
        if (!std::isfinite(v)) throw std::invalid_argument("wave packet parameters must be finite");
    }
}

void PacketErrorConfig::validate() const {
    packet1.validate();
    packet2.validate();
    if (!std::isfinite(c)) throw std::invalid_argument("c must be finite");
    if (!(dx > 0.0)) throw std::invalid_argument("dx must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    if (!(x_max > x_min)) throw std::invalid_argument("x_max must exceed x_min");

    for (const auto* p : {&packet1, &packet2}) {
        if (p->amplitude == 0.0) continue;
        if (p->k_wave != 0.0 && dx > M_PI / (4.0 * std::abs(p->k_wave))) {
            throw std::invalid_argument("dx does not resolve the carrier: need dx <= pi / (4 k_wave)");
        }
        const double r = p->support_radius(coverage_level);
        for (double speed : {c, p->v_advect}) {
            for (double t : {0.0, t_end}) {
                const double centre = p->x0 + speed * t;
                if (centre - r < x_min || centre + r > x_max) {
                    throw std::invalid_argument("spatial extent does not cover the packet support over [0, t_end]");
                }
            }
        }
    }
}

std::size_t PacketErrorConfig::x_count() const {
    return static_cast<std::size_t>(std::floor((x_max - x_min) / dx + 1e-9)) + 1;
}

std::size_t PacketErrorConfig::t_count() const {
    return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
}

PacketErrorConfig default_packet_config() {
    PacketErrorConfig cfg;
    cfg.c = 1.0;
    cfg.packet1 = {1.0, 0.0, 10.0 * M_PI, 2.04, 1.0};
    cfg.packet2 = {1.0, 8.0, 10.0 * M_PI, 2.02, 1.0};
    cfg.dx = 0.01;
    cfg.dt = 1.0;
    cfg.t_end = 1000.0;
    cfg.x_min = -10.0;
    cfg.x_max = 2050.0;
    return cfg;
}

std::vector<double> error_field(const PacketErrorConfig& cfg, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("error field requires t >= 0");
    cfg.validate();
    std::vector<double> out(cfg.x_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = error_at(cfg, cfg.x_at(i), t);
    return out;
}

std::vector<NormSample> norm_history(const PacketErrorConfig& cfg) {
    cfg.validate();
    const auto copies = active_copies(cfg);
    const std::size_t nx = cfg.x_count();
    const std::size_t nt = cfg.t_count();
    std::vector<NormSample> out;
    out.reserve(nt);

    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t n = 0; n < nt; ++n) {
        const double t = cfg.t_at(n);
        ranges.clear();
        for (const auto& copy : copies) {
            const double centre = copy.packet->x0 + copy.speed * t;
            const double r = copy.packet->support_radius(negligible_level);
            const double lo = std::clamp(std::floor((centre - r - cfg.x_min) / cfg.dx), 0.0, double(nx - 1));
            const double hi = std::clamp(std::ceil((centre + r - cfg.x_min) / cfg.dx), 0.0, double(nx - 1));
            ranges.emplace_back(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
        }
        std::sort(ranges.begin(), ranges.end());

        NormSample s{t, 0.0, 0.0};
        std::size_t next_free = 0;
        for (auto [lo, hi] : ranges) {
            for (std::size_t i = std::max(lo, next_free); i <= hi; ++i) {
                const double e = error_at(cfg, cfg.x_at(i), t);
                s.l1 += e;
                s.linf = std::max(s.linf, e);
            }
            next_free = std::max(next_free, hi + 1);
        }
        s.l1 *= cfg.dx;
        out.push_back(s);
    }
    return out;
}

double envelope_overlap(const WavePacket& a, double centre_a, const WavePacket& b, double centre_b) {
    const double d = centre_a - centre_b;
    return std::exp(-a.alpha_env * b.alpha_env * d * d / (a.alpha_env + b.alpha_env));
}

ErrorLimitReport verify_error_limits(const PacketErrorConfig& cfg) {
    return verify_error_limits(cfg, norm_history(cfg));
}

ErrorLimitReport verify_error_limits(const PacketErrorConfig& cfg, const std::vector<NormSample>& history) {
    cfg.validate();
    if (cfg.packet1.amplitude != 0.0 && cfg.packet2.amplitude != 0.0 &&
        envelope_overlap(cfg.packet1, cfg.packet1.x0, cfg.packet2, cfg.packet2.x0) >= separation_level) {
        throw std::invalid_argument("packets must be separated initially (envelope overlap < 1e-10)");
    }

    ErrorLimitReport rep;
    const auto copies = active_copies(cfg);
    rep.no_error = std::all_of(copies.begin(), copies.end(), [&](const Copy& c) { return c.speed == cfg.c; });

    for (std::size_t i = 0; i < cfg.x_count(); ++i) {
        rep.reference_linf = std::max(rep.reference_linf, std::abs(cfg.packet1.evaluate(cfg.x_at(i), 0.0)));
    }

    if (!history.empty()) {
        const std::size_t window = std::max<std::size_t>(1, (history.size() + 9) / 10);
        const auto first = history.end() - static_cast<std::ptrdiff_t>(window);
        for (auto it = first; it != history.end(); ++it) rep.plateau += it->linf;
        rep.plateau /= static_cast<double>(window);
        if (rep.plateau > 0.0) {
            rep.still_trending = std::abs(history.back().linf - first->linf) > 0.005 * rep.plateau;
        }
        const auto peak = std::max_element(history.begin(), history.end(),
                                           [](const auto& a, const auto& b) { return a.linf < b.linf; });
        rep.max_value = peak->linf;
        rep.max_time = peak->t;
    }
    if (!rep.no_error && rep.reference_linf > 0.0) {
        rep.plateau_ratio = rep.plateau / rep.reference_linf;
        rep.max_ratio = rep.max_value / rep.reference_linf;
    }

    for (std::size_t a = 0; a < copies.size(); ++a) {
        for (std::size_t b = a + 1; b < copies.size(); ++b) {
            const auto& ca = copies[a];
            const auto& cb = copies[b];
            if (ca.packet == cb.packet || ca.speed == cb.speed) continue;
            const double t = (cb.packet->x0 - ca.packet->x0) / (ca.speed - cb.speed);
            if (t > 0.0 && t <= cfg.t_end) rep.crossings.push_back({ca.name, cb.name, t});
        }
    }
    std::sort(rep.crossings.begin(), rep.crossings.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
    rep.crossover_occurred = !rep.crossings.empty();

    for (std::size_t a = 0; a < copies.size(); ++a) {
        for (std::size_t b = a + 1; b < copies.size(); ++b) {
            const auto& ca = copies[a];
            const auto& cb = copies[b];
            if (ca.packet == cb.packet && ca.speed == cb.speed) continue;
            const double xa = ca.packet->x0 + ca.speed * cfg.t_end;
            const double xb = cb.packet->x0 + cb.speed * cfg.t_end;
            if (envelope_overlap(*ca.packet, xa, *cb.packet, xb) >= separation_level) rep.incomplete = true;
        }
    }
    return rep;
}

HistoryShape analyse_shape(const std::vector<NormSample>& history) {
    HistoryShape shape;
    if (history.size() < 3) return shape;
    const std::size_t window = std::max<std::size_t>(1, (history.size() + 9) / 10);
    const auto first = history.end() - static_cast<std::ptrdiff_t>(window);

    double plateau = 0.0, l1_plateau = 0.0;
    for (auto it = first; it != history.end(); ++it) {
        plateau += it->linf;
        l1_plateau += it->l1;
    }
    plateau /= static_cast<double>(window);
    l1_plateau /= static_cast<double>(window);

    const auto peak = std::max_element(history.begin(), history.end(),
                                       [](const auto& a, const auto& b) { return a.linf < b.linf; });
    shape.linf_peak_index = static_cast<std::size_t>(peak - history.begin());
    shape.linf_peak_interior = shape.linf_peak_index > 0 && shape.linf_peak_index + 1 < history.size() &&
                               peak->linf > history.front().linf && peak->linf > history.back().linf;
    if (plateau > 0.0) shape.linf_peak_over_plateau = peak->linf / plateau;
    const double mid = 0.5 * (plateau + peak->linf);
    // Carrier beats split a crossing into several runs above the midpoint;
    // runs closer than 5% of the record belong to the same transient.
    const std::size_t merge_gap = std::max<std::size_t>(1, history.size() / 20);
    std::optional<std::size_t> last_above;
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (!(history[i].linf > mid)) continue;
        if (!last_above || i - *last_above > merge_gap) ++shape.linf_excursions;
        last_above = i;
    }
    bool strict = true;
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (i != shape.linf_peak_index && !(history[i].linf < peak->linf)) strict = false;
    }
    shape.linf_strict_max = strict;
    shape.linf_single_transient = shape.linf_peak_interior && strict && shape.linf_peak_over_plateau > 1.1;

    const auto nonzero = std::find_if(history.begin(), history.end(), [](const auto& s) { return s.l1 > 0.0; });
    if (nonzero != history.end()) shape.l1_growth = history.back().l1 / nonzero->l1;
    if (l1_plateau > 0.0) shape.l1_final_window_drift = std::abs(history.back().l1 - first->l1) / l1_plateau;
    shape.l1_saturated = shape.l1_growth > 1.0 && shape.l1_final_window_drift < 0.005;
    return shape;
}

}  // namespace causticfd
