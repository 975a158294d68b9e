#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace causticfd {

/// Gaussian-modulated cosine exp(-a (x - x0 - v t)^2) cos(k (x - x0 - v t)).
struct WavePacket {
    double alpha_env = 1.0;  ///< envelope rate, 1/length^2
    double x0 = 0.0;
    double k_wave = 0.0;
    double v_advect = 1.0;
    double amplitude = 1.0;

    [[nodiscard]] double evaluate(double x, double t) const { return at_offset(x - x0 - v_advect * t); }
    [[nodiscard]] double evaluate(double x, double t, double speed) const { return at_offset(x - x0 - speed * t); }
    [[nodiscard]] double at_offset(double s) const;
    /// Distance from the centre beyond which the envelope is below `level`.
    [[nodiscard]] double support_radius(double level) const;
    void validate() const;
};

/// Two packets, each carried once at the exact speed c and once at its own
/// dispersive speed v_advect. The error is
///   E = u1(c) - u1(V1) + u2(c) - u2(V2).
struct PacketErrorConfig {
    double c = 1.0;
    WavePacket packet1;
    WavePacket packet2;
    double x_min = 0.0;
    double x_max = 1.0;
    double dx = 0.01;
    double t_end = 1.0;
    double dt = 0.1;

    /// Throws std::invalid_argument on a bad grid, a carrier the grid cannot
    /// resolve (dx > pi / (4 k)), or a domain that does not cover the packets.
    void validate() const;
    [[nodiscard]] std::size_t x_count() const;
    [[nodiscard]] std::size_t t_count() const;
    [[nodiscard]] double x_at(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    [[nodiscard]] double t_at(std::size_t n) const { return static_cast<double>(n) * dt; }
};

/// Default two-packet setup: alpha = 1, dx = 0.01, V1 = 2.04, V2 = 2.02 and
/// c = 1, with the faster packet starting 8 length units behind. Carriers
/// are 10 pi. The dispersive copies meet at t = 400 with equal phase.
[[nodiscard]] PacketErrorConfig default_packet_config();

/// |E(x, t)| sampled on the configuration's spatial grid.
[[nodiscard]] std::vector<double> error_field(const PacketErrorConfig& cfg, double t);

struct NormSample {
    double t = 0.0;
    double l1 = 0.0;
    double linf = 0.0;
};

/// L1 (rectangle rule) and L-infinity norms of E at t = 0, dt, ..., t_end.
/// Points where every packet envelope is below 1e-17 are treated as zero.
[[nodiscard]] std::vector<NormSample> norm_history(const PacketErrorConfig& cfg);

struct CrossingEvent {
    std::string first;   ///< e.g. "dispersive1"
    std::string second;  ///< e.g. "exact2"
    double t = 0.0;
};

struct ErrorLimitReport {
    double reference_linf = 0.0;  ///< L-infinity of u1 at t = 0 on the grid
    double plateau = 0.0;         ///< mean L-infinity over the final 10% of samples
    double max_value = 0.0;
    double max_time = 0.0;
    double plateau_ratio = 0.0;
    double max_ratio = 0.0;
    bool no_error = false;             ///< every copy moves at c
    bool still_trending = false;       ///< final window drifts by more than 0.5%
    bool incomplete = false;           ///< copies still overlap at t_end
    bool crossover_occurred = false;   ///< two copies with different speeds meet within (0, t_end]
    std::vector<CrossingEvent> crossings;
};

/// Measures plateau and peak of the L-infinity history against L-inf(u1(0)).
/// Throws std::invalid_argument if the packets overlap initially.
[[nodiscard]] ErrorLimitReport verify_error_limits(const PacketErrorConfig& cfg);
[[nodiscard]] ErrorLimitReport verify_error_limits(const PacketErrorConfig& cfg,
                                                   const std::vector<NormSample>& history);

/// Shape of a norm history: where the L-infinity peak sits relative to the
/// plateau, and how flat the L1 tail is.
struct HistoryShape {
    std::size_t linf_peak_index = 0;
    bool linf_peak_interior = false;
    int linf_excursions = 0;  ///< separated runs above the midpoint between plateau and peak
    double linf_peak_over_plateau = 0.0;
    bool linf_strict_max = false;  ///< no other sample reaches the peak
    /// Strict interior global maximum at least 10% above the plateau.
    bool linf_single_transient = false;
    double l1_growth = 0.0;          ///< final L1 over the first nonzero L1
    double l1_final_window_drift = 0.0;  ///< relative change over the final 10% window
    bool l1_saturated = false;
};

[[nodiscard]] HistoryShape analyse_shape(const std::vector<NormSample>& history);

/// Peak over x of the product of two unit envelopes centred at the given points.
[[nodiscard]] double envelope_overlap(const WavePacket& a, double centre_a, const WavePacket& b, double centre_b);

}  // namespace causticfd
