#include "causticfd/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace causticfd {

namespace {

void dump_into(std::string& out, const Json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += inner + Json(key).dump() + ": ";
                dump_into(out, item, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) out += ",\n";
                out += inner;
                dump_into(out, v[i], indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_number(d) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

void reject_unknown(const Json& doc, const std::set<std::string>& keys, const std::string& what) {
    if (!doc.is_object()) throw std::invalid_argument(what + " must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!keys.contains(key)) throw std::invalid_argument("unknown " + what + " key '" + key + "'");
    }
}

double number(const Json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc[key];
    if (!v.is_number()) throw std::invalid_argument(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // snprintf follows LC_NUMERIC; force '.'
    for (char& ch : buf) {
        if (ch == ',') ch = '.';
    }
    return buf;
}

std::string dump_json(const Json& doc) {
    std::string out;
    dump_into(out, doc, 0);
    out += '\n';
    return out;
}

void write_dispersion_csv(std::ostream& out, std::span<const DispersionSample> samples) {
    out << "sigma,phi,branch,amp,xi_omega_tau,vg\n";
    for (const auto& s : samples) {
        out << format_number(s.sigma) << ',' << format_number(s.phi) << ',' << s.branch << ','
            << format_number(s.amp_modulus) << ',' << format_number(s.xi_omega_tau) << ','
            << format_number(s.v_group) << '\n';
    }
}

void write_locus_csv(std::ostream& out, const CausticLocus& locus) {
    out << "scheme,sigma,phi_c,u_c,branch,kind,extremum\n";
    for (const auto& r : locus.roots) {
        out << locus.scheme << ',' << format_number(r.sigma) << ',' << format_number(r.phi_c) << ','
            << format_number(r.u_c) << ',' << r.branch << ',' << to_string(r.kind) << ',' << to_string(r.extremum)
            << '\n';
    }
}

void write_norms_csv(std::ostream& out, std::span<const NormSample> history) {
    out << "t,l1,linf\n";
    for (const auto& s : history) {
        out << format_number(s.t) << ',' << format_number(s.l1) << ',' << format_number(s.linf) << '\n';
    }
}

Json to_json(const CausticRoot& r) {
    Json j;
    j["sigma"] = r.sigma;
    j["phi_c"] = r.phi_c;
    j["u_c"] = r.u_c;
    j["branch"] = r.branch;
    j["kind"] = std::string(to_string(r.kind));
    j["extremum"] = std::string(to_string(r.extremum));
    j["residual"] = r.residual;
    return j;
}

Json to_json(const SliceSummary& s) {
    Json j;
    j["sigma"] = s.sigma;
    j["branch"] = s.branch;
    j["interior_roots"] = s.interior_roots;
    j["trivial_roots"] = s.trivial_roots;
    j["max_abs_dvg"] = s.max_abs_dvg;
    j["flat"] = s.flat;
    j["monotone"] = s.monotone;
    j["caustic_free"] = s.caustic_free();
    return j;
}

Json locus_summary_json(const CausticLocus& locus) {
    Json j;
    j["scheme"] = locus.scheme;
    j["sigma_grid"] = {{"min", locus.grid.min}, {"max", locus.grid.max}, {"step", locus.grid.step}};
    j["caustic_free"] = locus.caustic_free;
    j["constant_vg"] = locus.constant_vg;
    j["max_abs_dvg"] = locus.max_abs_dvg;
    int interior = 0, trivial = 0;
    for (const auto& r : locus.roots) (r.kind == RootKind::interior ? interior : trivial) += 1;
    j["root_counts"] = {{"interior", interior}, {"trivial_boundary", trivial}};
    j["slices"] = Json::array();
    for (const auto& s : locus.slices) j["slices"].push_back(to_json(s));
    return j;
}

Json to_json(const ErrorLimitReport& r) {
    Json j;
    j["reference_linf"] = r.reference_linf;
    j["plateau"] = r.plateau;
    j["max_value"] = r.max_value;
    j["max_time"] = r.max_time;
    j["plateau_ratio"] = r.plateau_ratio;
    j["max_ratio"] = r.max_ratio;
    j["no_error"] = r.no_error;
    j["still_trending"] = r.still_trending;
    j["incomplete"] = r.incomplete;
    j["crossover_occurred"] = r.crossover_occurred;
    j["crossings"] = Json::array();
    for (const auto& c : r.crossings) j["crossings"].push_back({{"first", c.first}, {"second", c.second}, {"t", c.t}});
    return j;
}

Json to_json(const HistoryShape& s) {
    Json j;
    j["linf_peak_index"] = s.linf_peak_index;
    j["linf_peak_interior"] = s.linf_peak_interior;
    j["linf_strict_max"] = s.linf_strict_max;
    j["linf_excursions"] = s.linf_excursions;
    j["linf_peak_over_plateau"] = s.linf_peak_over_plateau;
    j["linf_single_transient"] = s.linf_single_transient;
    j["l1_growth"] = s.l1_growth;
    j["l1_final_window_drift"] = s.l1_final_window_drift;
    j["l1_saturated"] = s.l1_saturated;
    return j;
}

Json to_json(const StabilityDiagnostic& d) {
    Json j;
    j["max_amplification"] = d.max_amplification;
    j["phi_at_max"] = d.phi_at_max;
    j["branch"] = d.branch;
    j["stable"] = d.stable;
    j["blew_up"] = d.blew_up;
    j["step"] = d.step;
    j["time"] = d.time;
    return j;
}

Json to_json(const RunReport& r) {
    Json j;
    j["norms"] = Json::array();
    for (const auto& s : r.norms) j["norms"].push_back({{"t", s.t}, {"l1", s.l1}, {"linf", s.linf}});
    j["argmax_track"] = Json::array();
    for (const auto& p : r.argmax_track) j["argmax_track"].push_back({{"t", p.t}, {"x", p.x}});
    j["predicted_uc"] = Json::array();
    for (const auto& root : r.predicted) j["predicted_uc"].push_back(to_json(root));
    j["fitted_uc"] = optional_number(r.fitted_uc);
    j["stability"] = to_json(r.stability);
    j["packet_track"] = Json::array();
    for (const auto& p : r.packet_track) j["packet_track"].push_back({{"t", p.t}, {"x", p.x}});
    j["fitted_packet_speed"] = optional_number(r.fitted_packet_speed);
    j["remaining_amplitude"] = r.remaining_amplitude;
    return j;
}

Json to_json(const WavePacket& p) {
    return {{"alpha_env", p.alpha_env}, {"x0", p.x0}, {"k_wave", p.k_wave}, {"v_advect", p.v_advect},
            {"amplitude", p.amplitude}};
}

Json to_json(const PacketErrorConfig& cfg) {
    return {{"c", cfg.c},         {"packet1", to_json(cfg.packet1)}, {"packet2", to_json(cfg.packet2)},
            {"x_min", cfg.x_min}, {"x_max", cfg.x_max},              {"dx", cfg.dx},
            {"t_end", cfg.t_end}, {"dt", cfg.dt}};
}

WavePacket packet_from_json(const Json& doc, const WavePacket& base) {
    reject_unknown(doc, {"alpha_env", "x0", "k_wave", "v_advect", "amplitude"}, "packet");
    WavePacket p = base;
    p.alpha_env = number(doc, "alpha_env", p.alpha_env);
    p.x0 = number(doc, "x0", p.x0);
    p.k_wave = number(doc, "k_wave", p.k_wave);
    p.v_advect = number(doc, "v_advect", p.v_advect);
    p.amplitude = number(doc, "amplitude", p.amplitude);
    return p;
}

PacketErrorConfig packet_config_from_json(const Json& doc, const PacketErrorConfig& base) {
    reject_unknown(doc, {"c", "packet1", "packet2", "x_min", "x_max", "dx", "t_end", "dt"}, "packet config");
    PacketErrorConfig cfg = base;
    cfg.c = number(doc, "c", cfg.c);
    if (doc.contains("packet1")) cfg.packet1 = packet_from_json(doc["packet1"], cfg.packet1);
    if (doc.contains("packet2")) cfg.packet2 = packet_from_json(doc["packet2"], cfg.packet2);
    cfg.x_min = number(doc, "x_min", cfg.x_min);
    cfg.x_max = number(doc, "x_max", cfg.x_max);
    cfg.dx = number(doc, "dx", cfg.dx);
    cfg.t_end = number(doc, "t_end", cfg.t_end);
    cfg.dt = number(doc, "dt", cfg.dt);
    return cfg;
}

}  // namespace causticfd
