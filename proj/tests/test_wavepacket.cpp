#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "causticfd/wavepacket.hpp"

using namespace causticfd;

namespace {

PacketErrorConfig small_config() {
    PacketErrorConfig cfg;
    cfg.c = 1.0;
    cfg.packet1 = {1.0, 0.0, 5.0 * M_PI, 1.5, 1.0};
    cfg.packet2 = {1.0, 10.0, 5.0 * M_PI, 1.2, 1.0};
    cfg.dx = 0.025;
    cfg.dt = 0.5;
    cfg.t_end = 60.0;
    cfg.x_min = -10.0;
    cfg.x_max = 120.0;
    return cfg;
}

double brute_error(const PacketErrorConfig& cfg, double x, double t) {
    return std::abs(cfg.packet1.evaluate(x, t, cfg.c) - cfg.packet1.evaluate(x, t) +
                    cfg.packet2.evaluate(x, t, cfg.c) - cfg.packet2.evaluate(x, t));
}

}  // namespace

TEST_CASE("packet evaluation") {
    const WavePacket p{2.0, 1.0, 3.0, 0.5, 1.5};
    CHECK(p.evaluate(1.0, 0.0) == doctest::Approx(1.5));
    CHECK(p.evaluate(2.0, 2.0) == doctest::Approx(1.5));
    CHECK(p.evaluate(1.5, 0.0) == doctest::Approx(1.5 * std::exp(-0.5) * std::cos(1.5)));
    CHECK(p.evaluate(1.5, 1.0, 0.5) == doctest::Approx(p.evaluate(1.0, 0.0)));
    CHECK(std::exp(-p.alpha_env * std::pow(p.support_radius(1e-12), 2)) == doctest::Approx(1e-12));
    CHECK_THROWS_AS((WavePacket{0.0, 0, 0, 0, 1}).validate(), std::invalid_argument);
}

TEST_CASE("configuration validation") {
    auto cfg = default_packet_config();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.x_count() == 206001);
    CHECK(cfg.t_count() == 1001);

    SUBCASE("coarse grid against the carrier") {
        cfg.packet1.k_wave = 50.0 * M_PI;  // needs dx <= 0.005
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.dx = 0.005;
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("domain must contain the packets over the whole run") {
        cfg.x_max = 2000.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("initial overlap is refused") {
        cfg.packet2.x0 = 3.0;
        CHECK_THROWS_AS((void)verify_error_limits(cfg, {}), std::invalid_argument);
    }
    SUBCASE("bad steps") {
        cfg.dt = 0.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}

TEST_CASE("the error vanishes initially and without dispersion") {
    const auto cfg = small_config();
    for (double e : error_field(cfg, 0.0)) CHECK(e == 0.0);

    auto same = cfg;
    same.packet1.v_advect = same.c;
    same.packet2.v_advect = same.c;
    for (const auto& s : norm_history(same)) {
        CHECK(s.l1 == 0.0);
        CHECK(s.linf == 0.0);
    }
    const auto rep = verify_error_limits(same);
    CHECK(rep.no_error);
    CHECK(rep.max_ratio == 0.0);
    CHECK(rep.plateau_ratio == 0.0);
}

TEST_CASE("windowed norms agree with a full grid sweep") {
    const auto cfg = small_config();
    const auto history = norm_history(cfg);
    REQUIRE(history.size() == cfg.t_count());
    for (std::size_t n = 0; n < history.size(); n += 7) {
        const auto field = error_field(cfg, history[n].t);
        double l1 = 0.0, linf = 0.0;
        for (double e : field) {
            l1 += e;
            linf = std::max(linf, e);
        }
        CHECK(history[n].linf == doctest::Approx(linf).epsilon(1e-14));
        CHECK(history[n].l1 == doctest::Approx(l1 * cfg.dx).epsilon(1e-12));
    }
}

TEST_CASE("default crossover history") {
    const auto cfg = default_packet_config();
    const auto history = norm_history(cfg);
    const auto rep = verify_error_limits(cfg, history);

    CHECK(rep.reference_linf == doctest::Approx(1.0));
    CHECK(history.front().linf == 0.0);
    // Once the exact and dispersive copies separate, the error is one packet.
    CHECK(rep.plateau_ratio == doctest::Approx(1.0).epsilon(0.01));
    CHECK_FALSE(rep.still_trending);
    CHECK_FALSE(rep.incomplete);
    // The dispersive copies meet at t = 8 / 0.02 = 400 in phase.
    CHECK(rep.max_time == doctest::Approx(400.0));
    CHECK(rep.max_ratio == doctest::Approx(2.0).epsilon(0.02));
    CHECK(rep.crossover_occurred);
    bool found = false;
    for (const auto& c : rep.crossings) {
        if (c.first == "dispersive1" && c.second == "dispersive2") {
            found = true;
            CHECK(c.t == doctest::Approx(400.0));
        }
    }
    CHECK(found);

    // Shape: zero, rise to one, a doubled peak, back to one.
    CHECK(history[20].linf == doctest::Approx(1.0).epsilon(0.01));
    CHECK(history[200].linf == doctest::Approx(1.0).epsilon(0.01));
    CHECK(history[400].linf > 1.9);
    CHECK(history[600].linf == doctest::Approx(1.0).epsilon(0.01));

    const auto shape = analyse_shape(history);
    CHECK(shape.linf_peak_interior);
    CHECK(shape.linf_strict_max);
    CHECK(shape.linf_peak_index == 400);
    // The earlier, brief event is dispersive copy 1 overtaking exact copy 2.
    CHECK(shape.linf_excursions == 2);
    CHECK(shape.linf_single_transient);
    CHECK(shape.l1_growth > 1.0);
    CHECK(shape.l1_saturated);

    // Dense brute-force oracle around the meeting point.
    double peak = 0.0;
    for (int i = -20000; i <= 20000; ++i) peak = std::max(peak, brute_error(cfg, 816.0 + i * 1e-4, 400.0));
    CHECK(rep.max_value == doctest::Approx(peak).epsilon(1e-6));
    CHECK(peak == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("single packet plateau") {
    auto cfg = default_packet_config();
    cfg.packet2.amplitude = 0.0;
    const auto rep = verify_error_limits(cfg);
    CHECK(rep.plateau_ratio == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rep.max_ratio == doctest::Approx(1.0).epsilon(0.01));
    CHECK_FALSE(rep.crossover_occurred);
}

TEST_CASE("incomplete runs are flagged") {
    auto cfg = default_packet_config();
    cfg.t_end = 2.0;
    cfg.x_max = 30.0;
    const auto rep = verify_error_limits(cfg);
    CHECK(rep.incomplete);
}

TEST_CASE("translation covariance") {
    const auto cfg = small_config();
    auto shifted = cfg;
    const double shift = 40 * cfg.dx;
    shifted.packet1.x0 += shift;
    shifted.packet2.x0 += shift;
    shifted.x_min += shift;
    shifted.x_max += shift;
    const auto a = norm_history(cfg);
    const auto b = norm_history(shifted);
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(b[n].linf == doctest::Approx(a[n].linf).epsilon(1e-9).scale(1.0));
        CHECK(b[n].l1 == doctest::Approx(a[n].l1).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("galilean shift of every speed") {
    const auto cfg = small_config();
    auto moving = cfg;
    // w t is a whole number of cells at every sample time.
    const double w = 2.0 * cfg.dx / cfg.dt;
    moving.c += w;
    moving.packet1.v_advect += w;
    moving.packet2.v_advect += w;
    moving.x_max += w * cfg.t_end;
    const auto a = norm_history(cfg);
    const auto b = norm_history(moving);
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(b[n].linf == doctest::Approx(a[n].linf).epsilon(1e-9).scale(1.0));
        CHECK(b[n].l1 == doctest::Approx(a[n].l1).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("the error is bounded by twice the summed amplitudes") {
    auto cfg = small_config();
    cfg.packet1.amplitude = 0.7;
    cfg.packet2.amplitude = -1.3;
    for (const auto& s : norm_history(cfg)) CHECK(s.linf <= 2.0 * (0.7 + 1.3) + 1e-12);
    const auto rep = verify_error_limits(cfg);
    CHECK(rep.reference_linf == doctest::Approx(0.7));
}

TEST_CASE("linearity in the amplitudes") {
    auto cfg = small_config();
    auto scaled = cfg;
    scaled.packet1.amplitude = 3.0;
    scaled.packet2.amplitude = 3.0;
    const auto a = norm_history(cfg);
    const auto b = norm_history(scaled);
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(b[n].linf == doctest::Approx(3.0 * a[n].linf).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("shape analysis of synthetic histories") {
    std::vector<NormSample> monotone, twin;
    for (int n = 0; n <= 100; ++n) {
        const double t = n;
        monotone.push_back({t, 1.0 - std::exp(-t), 1.0 - std::exp(-t)});
        const double bumps = std::exp(-std::pow(t - 30, 2) / 4) + std::exp(-std::pow(t - 60, 2) / 4);
        twin.push_back({t, 1.0, 1.0 + bumps});
    }
    const auto m = analyse_shape(monotone);
    CHECK_FALSE(m.linf_single_transient);
    CHECK(m.l1_saturated);
    const auto tw = analyse_shape(twin);
    CHECK(tw.linf_excursions == 2);
    CHECK_FALSE(tw.linf_strict_max);
    CHECK_FALSE(tw.linf_single_transient);
    CHECK_FALSE(tw.l1_saturated);  // flat L1 never grew
}
