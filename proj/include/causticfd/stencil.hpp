#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causticfd/problem.hpp"

namespace causticfd {

/// Time level of a stencil term relative to the current level n.
enum class Level { previous = 0, current = 1, next = 2 };

/// Three-level, three-point difference scheme
///
///   alpha u_j^{n+1} + beta u_j^n + gamma u_j^{n-1}
///   + delta u_{j+1}^n + upsilon u_{j+1}^{n-1} + epsilon u_{j-1}^n
///   + zeta u_{j+1}^{n+1} + eta u_{j-1}^{n-1} + theta u_{j-1}^{n+1} = 0
///
/// with coefficients already evaluated at a particular (c, h, tau).
struct Stencil {
    std::string name;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double upsilon = 0.0;
    double epsilon = 0.0;
    double zeta = 0.0;
    double eta = 0.0;
    double theta = 0.0;

    /// Coefficient of u_{j+offset} at the given level, offset in {-1, 0, +1}.
    [[nodiscard]] double coefficient(Level level, int offset) const;

    [[nodiscard]] bool is_three_level() const { return gamma != 0.0 || upsilon != 0.0 || eta != 0.0; }
    [[nodiscard]] bool is_implicit() const { return zeta != 0.0 || theta != 0.0; }
    [[nodiscard]] bool advances() const { return alpha != 0.0 || zeta != 0.0 || theta != 0.0; }

    /// Throws std::invalid_argument if no level-(n+1) coefficient is nonzero
    /// or any coefficient is not finite.
    void validate() const;
};

enum class SchemeId { leapfrog, lax, lax_wendroff, crank_nicolson_table1, crank_nicolson_standard };

inline constexpr std::array<SchemeId, 5> all_schemes = {
    SchemeId::leapfrog, SchemeId::lax, SchemeId::lax_wendroff,
    SchemeId::crank_nicolson_table1, SchemeId::crank_nicolson_standard};

[[nodiscard]] std::string_view to_string(SchemeId id);
/// Lowercase identifier to scheme; throws std::invalid_argument on unknown names.
[[nodiscard]] SchemeId parse_scheme(std::string_view name);

/// Catalog stencil evaluated at (c, h, tau).
[[nodiscard]] Stencil build_scheme(SchemeId id, const AdvectionProblem& prob);
[[nodiscard]] Stencil build_scheme(std::string_view id, const AdvectionProblem& prob);

/// Residuals of the stencil applied to u = 1 and u = x - c t at (j, n) = (0, 0).
struct ConsistencyReport {
    double constant_residual = 0.0;
    double linear_residual = 0.0;
    double constant_scale = 0.0;
    double linear_scale = 0.0;
    bool constant_ok = false;
    bool linear_ok = false;

    [[nodiscard]] bool passed() const { return constant_ok && linear_ok; }
};

inline constexpr double consistency_tolerance = 1e-12;

[[nodiscard]] ConsistencyReport check_consistency(const Stencil& st, const AdvectionProblem& prob);

/// Parses a custom stencil document with exactly the keys
/// name, alpha, beta, gamma, delta, upsilon, epsilon, zeta, eta, theta.
[[nodiscard]] Stencil parse_stencil_json(std::string_view text);
[[nodiscard]] Stencil load_stencil_file(const std::filesystem::path& path);
[[nodiscard]] std::string stencil_to_json(const Stencil& st);

}  // namespace causticfd
