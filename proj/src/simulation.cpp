#include "causticfd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "causticfd/io.hpp"

namespace causticfd {

namespace {

double wrap_offset(double s, double length) {
    s = std::fmod(s + 0.5 * length, length);
    if (s < 0.0) s += length;
    return s - 0.5 * length;
}

double max_abs(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

double unwrap(double raw, double previous, double length) {
    return raw + length * std::round((previous - raw) / length);
}

void write_snapshot(const GridField& field, const std::filesystem::path& dir) {
    std::ofstream out(dir / ("step_" + std::to_string(field.step_index) + ".csv"), std::ios::binary);
    out << "x,u\n";
    for (std::size_t j = 0; j < field.n; ++j) {
        out << format_number(field.x(j)) << ',' << format_number(field.current[j]) << '\n';
    }
    if (!out) throw std::runtime_error("failed to write snapshot in " + dir.string());
}

StabilityDiagnostic stability_of(const Stencil& st) {
    const auto peak = max_amplification(st);
    StabilityDiagnostic d;
    d.max_amplification = peak.max_modulus;
    d.phi_at_max = peak.phi;
    d.branch = peak.branch;
    d.stable = peak.max_modulus <= 1.0 + 1e-12;
    return d;
}

}  // namespace

double PeriodicPackets::operator()(double x) const {
    double sum = 0.0;
    for (const auto& p : packets) sum += p.at_offset(wrap_offset(x - p.x0, length));
    return sum;
}

GridField init_field(const Profile& u0, std::size_t n, double h, const Stencil& st, const AdvectionProblem& prob,
                     StartUp start) {
    if (n < 3) throw std::invalid_argument("grid needs at least 3 cells");
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    GridField f;
    f.n = n;
    f.h = h;
    f.current.resize(n);
    for (std::size_t j = 0; j < n; ++j) f.current[j] = u0(f.x(j));
    if (!st.is_three_level()) return f;

    if (start == StartUp::exact) {
        f.previous.resize(n);
        for (std::size_t j = 0; j < n; ++j) f.previous[j] = u0(f.x(j) + prob.c * prob.tau);
        return f;
    }
    GridField boot;
    boot.n = n;
    boot.h = h;
    boot.current = f.current;
    Stepper(build_scheme(SchemeId::lax, prob), n).advance(boot, prob.tau);
    f.previous = std::move(f.current);
    f.current = std::move(boot.current);
    f.step_index = 1;
    f.time = prob.tau;
    return f;
}

GridField init_from_packets(const std::vector<WavePacket>& packets, std::size_t n, double h, const Stencil& st,
                            const AdvectionProblem& prob, StartUp start) {
    const double length = static_cast<double>(n) * h;
    for (const auto& p : packets) {
        p.validate();
        if (p.amplitude == 0.0) continue;
        const double r = p.support_radius(1e-12);
        if (p.x0 - r < 0.0 || p.x0 + r > length) {
            throw std::invalid_argument("packet support crosses the periodic seam");
        }
    }
    return init_field(PeriodicPackets{packets, length}, n, h, st, prob, start);
}

Stepper::Stepper(Stencil st, std::size_t n) : st_(std::move(st)), rhs_(n), next_(n) {
    st_.validate();
    if (st_.is_implicit()) {
        solver_.emplace(st_.theta, st_.alpha, st_.zeta, n);
    } else if (st_.alpha == 0.0) {
        throw std::invalid_argument("explicit stencil needs a nonzero alpha");
    }
}

void Stepper::assemble_rhs(const GridField& f, std::span<double> rhs) const {
    const std::size_t n = f.n;
    const auto& u = f.current;
    const bool three = st_.is_three_level();
    if (three && f.previous.size() != n) throw std::invalid_argument("three-level stencil needs level n-1");
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t l = (j + n - 1) % n;
        const std::size_t r = (j + 1) % n;
        double s = st_.beta * u[j] + st_.delta * u[r] + st_.epsilon * u[l];
        if (three) {
            const auto& p = f.previous;
            s += st_.gamma * p[j] + st_.upsilon * p[r] + st_.eta * p[l];
        }
        rhs[j] = -s;
    }
}

void Stepper::advance(GridField& f, double tau) const {
    if (f.current.size() != rhs_.size()) throw std::invalid_argument("field size does not match stepper");
    assemble_rhs(f, rhs_);
    if (solver_) {
        solver_->solve(rhs_, next_);
    } else {
        const double inv = 1.0 / st_.alpha;
        for (std::size_t j = 0; j < f.n; ++j) next_[j] = rhs_[j] * inv;
    }
    if (st_.is_three_level()) f.previous.swap(f.current);
    f.current.swap(next_);
    ++f.step_index;
    f.time += tau;
}

GridField step(const GridField& field, const Stencil& st, const AdvectionProblem& prob) {
    GridField out = field;
    Stepper(st, field.n).advance(out, prob.tau);
    return out;
}

NumericalBlowUp::NumericalBlowUp(StabilityDiagnostic d)
    : std::runtime_error("numerical blow-up at step " + std::to_string(d.step) + ", max |G| = " +
                         std::to_string(d.max_amplification)),
      diagnostic_(d) {}

std::optional<double> fit_slope(std::span<const TrackPoint> track) {
    if (track.size() < 2) return std::nullopt;
    double mt = 0.0, mx = 0.0;
    for (const auto& p : track) {
        mt += p.t;
        mx += p.x;
    }
    mt /= static_cast<double>(track.size());
    mx /= static_cast<double>(track.size());
    double stt = 0.0, stx = 0.0;
    for (const auto& p : track) {
        stt += (p.t - mt) * (p.t - mt);
        stx += (p.t - mt) * (p.x - mx);
    }
    if (stt == 0.0) return std::nullopt;
    return stx / stt;
}

RunReport run(GridField& field, const Stencil& st, const AdvectionProblem& prob, int n_steps,
              const Profile& exact_initial, const RunOptions& options) {
    if (n_steps < 1) throw std::invalid_argument("run needs at least one step");
    if (options.norm_cadence < 1) throw std::invalid_argument("norm cadence must be at least 1");
    const Stepper stepper(st, field.n);
    const double length = field.length();

    RunReport rep;
    rep.stability = stability_of(st);
    for (int b = 0; b < branch_count(st); ++b) {
        try {
            auto roots = find_caustic_roots(st, prob, b, options.root_grid);
            rep.predicted.insert(rep.predicted.end(), roots.begin(), roots.end());
        } catch (const std::exception&) {
            // Degenerate dispersion curves carry no usable ray prediction.
        }
    }

    const double initial_max = max_abs(field.current);
    std::vector<double> err(field.n);
    std::optional<double> last_argmax, last_centroid;

    const auto record = [&]() {
        NormSample s{field.time, 0.0, 0.0};
        std::size_t arg = 0;
        double cw = 0.0, sw = 0.0;
        for (std::size_t j = 0; j < field.n; ++j) {
            const double x = field.x(j);
            const double e = std::abs(field.current[j] - exact_initial(x - prob.c * field.time));
            s.l1 += e;
            if (e > s.linf) {
                s.linf = e;
                arg = j;
            }
            const double w = field.current[j] * field.current[j];
            const double angle = 2.0 * M_PI * x / length;
            cw += w * std::cos(angle);
            sw += w * std::sin(angle);
        }
        s.l1 *= field.h;
        rep.norms.push_back(s);

        if (s.linf > 0.0) {
            double ax = field.x(arg);
            if (last_argmax) ax = unwrap(ax, *last_argmax, length);
            last_argmax = ax;
            rep.argmax_track.push_back({field.time, ax});
        }

        if (cw != 0.0 || sw != 0.0) {
            double cx = std::atan2(sw, cw) / (2.0 * M_PI) * length;
            if (cx < 0.0) cx += length;
            if (last_centroid) cx = unwrap(cx, *last_centroid, length);
            last_centroid = cx;
            rep.packet_track.push_back({field.time, cx});
        }
    };

    record();
    if (options.snapshot_cadence > 0) write_snapshot(field, options.snapshot_dir);
    for (int k = 1; k <= n_steps; ++k) {
        stepper.advance(field, prob.tau);
        const double m = max_abs(field.current);
        if (!std::isfinite(m) || (initial_max > 0.0 && m > options.blowup_factor * initial_max)) {
            auto d = rep.stability;
            d.blew_up = true;
            d.step = field.step_index;
            d.time = field.time;
            throw NumericalBlowUp(d);
        }
        if (k % options.norm_cadence == 0 || k == n_steps) record();
        if (options.snapshot_cadence > 0 && k % options.snapshot_cadence == 0) {
            write_snapshot(field, options.snapshot_dir);
        }
    }
    rep.remaining_amplitude = initial_max > 0.0 ? max_abs(field.current) / initial_max : 0.0;

    // Focusing window: L-inf above 1.2x its early level until it falls back.
    const std::size_t count = rep.norms.size();
    const std::size_t early_end = std::max<std::size_t>(2, count / 10);
    double early = 0.0;
    std::size_t early_n = 0;
    for (std::size_t i = 1; i < std::min(early_end, count); ++i, ++early_n) early += rep.norms[i].linf;
    if (early_n > 0) early /= static_cast<double>(early_n);
    std::size_t begin = 0, end = count;
    const double threshold = 1.2 * early;
    const auto above = std::find_if(rep.norms.begin() + static_cast<std::ptrdiff_t>(std::min(early_end, count)),
                                    rep.norms.end(), [&](const auto& s) { return s.linf > threshold; });
    if (early > 0.0 && above != rep.norms.end()) {
        begin = static_cast<std::size_t>(above - rep.norms.begin());
        const auto below = std::find_if(above, rep.norms.end(), [&](const auto& s) { return s.linf < threshold; });
        end = static_cast<std::size_t>(below - rep.norms.begin());
    }
    if (end - begin < 3) {
        begin = 0;
        end = count;
    }
    rep.fit_begin = begin;
    rep.fit_end = end;
    std::vector<TrackPoint> window;
    for (const auto& p : rep.argmax_track) {
        if (count > 0 && p.t >= rep.norms[begin].t && p.t <= rep.norms[end - 1].t) window.push_back(p);
    }
    rep.fitted_uc = fit_slope(window);
    rep.fitted_packet_speed = fit_slope(rep.packet_track);
    return rep;
}

Complex mode_amplitude(std::span<const double> u, std::size_t mode) {
    const std::size_t n = u.size();
    Complex a{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = 2.0 * M_PI * static_cast<double>((mode * j) % n) / static_cast<double>(n);
        a += u[j] * std::polar(1.0, -angle);
    }
    return 2.0 * a / static_cast<double>(n);
}

ModeResponse measure_mode_response(const Stencil& st, const AdvectionProblem& prob, std::size_t n,
                                   std::size_t mode, int steps) {
    if (mode == 0 || 2 * mode >= n) throw std::invalid_argument("mode must satisfy 0 < mode < n / 2");
    if (steps < 1) throw std::invalid_argument("mode measurement needs at least one step");
    const double phi = 2.0 * M_PI * static_cast<double>(mode) / static_cast<double>(n);
    GridField f;
    f.n = n;
    f.h = prob.h;
    f.current.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        f.current[j] = std::cos(2.0 * M_PI * static_cast<double>((mode * j) % n) / static_cast<double>(n));
    }
    if (st.is_three_level()) {
        // Seed level n-1 on the physical branch only: u^{-1} = Re(e^{i j phi} / G).
        const Complex inv_g = 1.0 / dispersion_sample(st, prob, phi, 0).amplification;
        f.previous.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = 2.0 * M_PI * static_cast<double>((mode * j) % n) / static_cast<double>(n);
            f.previous[j] = (std::polar(1.0, angle) * inv_g).real();
        }
    }
    const Stepper stepper(st, n);
    Complex a = mode_amplitude(f.current, mode);
    double log_mod = 0.0, phase = 0.0;
    for (int k = 0; k < steps; ++k) {
        stepper.advance(f, prob.tau);
        const Complex b = mode_amplitude(f.current, mode);
        const Complex ratio = b / a;
        log_mod += std::log(std::abs(ratio));
        phase -= std::arg(ratio);
        a = b;
    }
    return {phi, std::exp(log_mod / steps), phase / steps};
}

}  // namespace causticfd
