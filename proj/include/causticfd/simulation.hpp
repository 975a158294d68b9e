#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "causticfd/caustics.hpp"
#include "causticfd/dispersion.hpp"
#include "causticfd/problem.hpp"
#include "causticfd/stencil.hpp"
#include "causticfd/tridiagonal.hpp"
#include "causticfd/wavepacket.hpp"

namespace causticfd {

/// Periodic grid x_j = j h, j = 0..n-1, holding levels n and (for
/// three-level schemes) n-1.
struct GridField {
    std::size_t n = 0;
    double h = 1.0;
    std::vector<double> current;
    std::vector<double> previous;  ///< empty for two-level schemes
    long step_index = 0;
    double time = 0.0;

    [[nodiscard]] double length() const { return static_cast<double>(n) * h; }
    [[nodiscard]] double x(std::size_t j) const { return static_cast<double>(j) * h; }
};

/// Initial profile; must be periodic with the grid length.
using Profile = std::function<double(double)>;

/// Sum of packets on a periodic domain of the given length, each packet
/// evaluated at the offset from its centre wrapped into [-L/2, L/2).
/// The packets' v_advect is ignored.
struct PeriodicPackets {
    std::vector<WavePacket> packets;
    double length = 1.0;

    double operator()(double x) const;
};

/// How level n-1 is filled for three-level schemes.
enum class StartUp {
    exact,          ///< level n-1 is the exact solution at t = -tau
    lax_bootstrap,  ///< initial data at t = 0 becomes level n-1 and one Lax step gives level n
};

[[nodiscard]] GridField init_field(const Profile& u0, std::size_t n, double h, const Stencil& st,
                                   const AdvectionProblem& prob, StartUp start = StartUp::exact);

/// Rejects packets whose envelope exceeds 1e-12 at the periodic seam.
[[nodiscard]] GridField init_from_packets(const std::vector<WavePacket>& packets, std::size_t n, double h,
                                          const Stencil& st, const AdvectionProblem& prob,
                                          StartUp start = StartUp::exact);

/// Advances a field by one time step with a fixed stencil.
class Stepper {
public:
    Stepper(Stencil st, std::size_t n);

    void advance(GridField& field, double tau) const;
    [[nodiscard]] const Stencil& stencil() const { return st_; }
    [[nodiscard]] const std::optional<CyclicTridiagonal>& implicit_operator() const { return solver_; }

    /// Right-hand side of the level n+1 system from levels n and n-1.
    void assemble_rhs(const GridField& field, std::span<double> rhs) const;

private:
    Stencil st_;
    std::optional<CyclicTridiagonal> solver_;
    mutable std::vector<double> rhs_;
    mutable std::vector<double> next_;
};

[[nodiscard]] GridField step(const GridField& field, const Stencil& st, const AdvectionProblem& prob);

struct StabilityDiagnostic {
    double max_amplification = 0.0;
    double phi_at_max = 0.0;
    int branch = 0;
    bool stable = true;
    bool blew_up = false;
    long step = 0;
    double time = 0.0;
};

class NumericalBlowUp : public std::runtime_error {
public:
    explicit NumericalBlowUp(StabilityDiagnostic d);
    [[nodiscard]] const StabilityDiagnostic& diagnostic() const { return diagnostic_; }

private:
    StabilityDiagnostic diagnostic_;
};

struct TrackPoint {
    double t = 0.0;
    double x = 0.0;
};

struct RunReport {
    std::vector<NormSample> norms;           ///< error against the exactly advected profile
    std::vector<TrackPoint> argmax_track;    ///< location of max |error| (when nonzero), unwrapped across the seam
    std::vector<TrackPoint> packet_track;    ///< circular centroid of u^2, unwrapped
    std::vector<CausticRoot> predicted;      ///< roots at the run's CFL, all branches
    std::optional<double> fitted_uc;         ///< slope of argmax_track over the focusing window
    std::size_t fit_begin = 0;
    std::size_t fit_end = 0;
    std::optional<double> fitted_packet_speed;  ///< slope of packet_track over the whole run
    double remaining_amplitude = 0.0;        ///< max |u| at the end over max |u| at the start
    StabilityDiagnostic stability;
};

struct RunOptions {
    int norm_cadence = 1;
    int snapshot_cadence = 0;  ///< 0 disables snapshots
    std::filesystem::path snapshot_dir;
    double blowup_factor = 1e6;
    int root_grid = 256;
};

/// Steps `field` n_steps times, recording error norms and tracks at the
/// norm cadence. Throws NumericalBlowUp when max |u| exceeds
/// blowup_factor times its initial value.
[[nodiscard]] RunReport run(GridField& field, const Stencil& st, const AdvectionProblem& prob, int n_steps,
                            const Profile& exact_initial, const RunOptions& options = {});

/// Least-squares slope of x against t; empty with fewer than two points.
[[nodiscard]] std::optional<double> fit_slope(std::span<const TrackPoint> track);

/// Per-step amplification of the Fourier mode e^{i j phi}, phi = 2 pi mode / n,
/// measured from a run started at cos(j phi). Three-level schemes get level
/// n-1 from the physical branch so the computational mode stays unexcited.
struct ModeResponse {
    double phi = 0.0;
    double amp_modulus = 0.0;
    double xi_omega_tau = 0.0;
};

[[nodiscard]] ModeResponse measure_mode_response(const Stencil& st, const AdvectionProblem& prob, std::size_t n,
                                                 std::size_t mode, int steps);

/// Complex amplitude of e^{i j phi} in a real periodic field.
[[nodiscard]] Complex mode_amplitude(std::span<const double> u, std::size_t mode);

}  // namespace causticfd
