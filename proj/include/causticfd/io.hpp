#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "causticfd/caustics.hpp"
#include "causticfd/dispersion.hpp"
#include "causticfd/simulation.hpp"
#include "causticfd/wavepacket.hpp"

namespace causticfd {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' separator, locale independent.
[[nodiscard]] std::string format_number(double v);

/// Serializes with two-space indentation and every floating-point value in
/// format_number form, members in insertion order, '\n' line ends.
[[nodiscard]] std::string dump_json(const Json& doc);

void write_dispersion_csv(std::ostream& out, std::span<const DispersionSample> samples);
void write_locus_csv(std::ostream& out, const CausticLocus& locus);
void write_norms_csv(std::ostream& out, std::span<const NormSample> history);

[[nodiscard]] Json to_json(const CausticRoot& root);
[[nodiscard]] Json to_json(const SliceSummary& slice);
[[nodiscard]] Json locus_summary_json(const CausticLocus& locus);
[[nodiscard]] Json to_json(const ErrorLimitReport& report);
[[nodiscard]] Json to_json(const HistoryShape& shape);
[[nodiscard]] Json to_json(const StabilityDiagnostic& d);
/// Keys norms, argmax_track, predicted_uc, fitted_uc, stability, then
/// packet_track, fitted_packet_speed, remaining_amplitude.
[[nodiscard]] Json to_json(const RunReport& report);

[[nodiscard]] Json to_json(const WavePacket& p);
[[nodiscard]] Json to_json(const PacketErrorConfig& cfg);
/// Missing keys keep the defaults of `base`; unknown keys are rejected.
[[nodiscard]] WavePacket packet_from_json(const Json& doc, const WavePacket& base = {});
[[nodiscard]] PacketErrorConfig packet_config_from_json(const Json& doc,
                                                        const PacketErrorConfig& base = default_packet_config());

}  // namespace causticfd
