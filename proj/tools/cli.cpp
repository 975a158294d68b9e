#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "causticfd/caustics.hpp"
#include "causticfd/dispersion.hpp"
#include "causticfd/io.hpp"
#include "causticfd/simulation.hpp"
#include "causticfd/stencil.hpp"
#include "causticfd/wavepacket.hpp"

namespace causticfd::cli {

namespace {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Typed access to the merged configuration document.
class Config {
public:
    explicit Config(Json doc) : doc_(std::move(doc)) {}

    [[nodiscard]] bool has(const std::string& key) const { return doc_.contains(key); }
    [[nodiscard]] const Json& raw(const std::string& key) const { return doc_.at(key); }

    [[nodiscard]] double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_number()) throw ConfigError(key, "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
        return d;
    }

    [[nodiscard]] std::optional<double> number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    [[nodiscard]] long integer(const std::string& key, long fallback, long min) const {
        long v = fallback;
        if (has(key)) {
            const auto& j = doc_.at(key);
            if (j.is_number_integer()) {
                v = j.get<long>();
            } else if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>() &&
                       std::abs(j.get<double>()) < 1e15) {
                v = static_cast<long>(j.get<double>());
            } else {
                throw ConfigError(key, "must be an integer");
            }
        }
        if (v < min) throw ConfigError(key, "must be at least " + std::to_string(min));
        return v;
    }

    [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = doc_.at(key);
        if (!v.is_boolean()) throw ConfigError(key, "must be true or false");
        return v.get<bool>();
    }

    [[nodiscard]] std::optional<std::string> string(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const auto& v = doc_.at(key);
        if (!v.is_string()) throw ConfigError(key, "must be a string");
        return v.get<std::string>();
    }

    void allow_only(const std::set<std::string>& keys, const std::string& command) const {
        for (const auto& [key, value] : doc_.items()) {
            if (!keys.contains(key)) throw ConfigError(key, "is not a valid key for '" + command + "'");
        }
    }

private:
    Json doc_;
};

const std::set<std::string> common_keys{"scheme", "stencil_file", "c",         "h",         "tau",
                                        "sigma",  "out",          "overwrite", "emit_plots"};

std::set<std::string> with_common(std::initializer_list<std::string> extra) {
    std::set<std::string> keys = common_keys;
    keys.insert(extra);
    return keys;
}

/// Output files of one invocation, written into a staging directory and
/// moved into place only after the whole command succeeded.
class OutputSet {
public:
    OutputSet(fs::path out_dir, bool overwrite) : out_dir_(std::move(out_dir)), overwrite_(overwrite) {}

    ~OutputSet() {
        if (!staging_.empty()) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    /// Refuses to proceed when a target exists and overwriting is off.
    void claim(const fs::path& relative) const {
        const auto target = out_dir_ / relative;
        if (fs::exists(target) && !overwrite_) {
            throw ConfigError("overwrite", "output file " + target.string() + " exists; pass --overwrite to replace it");
        }
    }

    void claim_directory_contents(const fs::path& relative) const {
        const auto dir = out_dir_ / relative;
        if (!overwrite_ && fs::is_directory(dir) && !fs::is_empty(dir)) {
            throw ConfigError("overwrite", "output directory " + dir.string() + " is not empty; pass --overwrite");
        }
    }

    [[nodiscard]] const fs::path& staging() {
        if (staging_.empty()) {
            std::error_code ec;
            fs::create_directories(out_dir_, ec);
            if (ec || !fs::is_directory(out_dir_)) {
                throw ConfigError("out", "cannot create output directory " + out_dir_.string());
            }
            staging_ = out_dir_ / (".causticfd-staging-" + std::to_string(::getpid()));
            fs::remove_all(staging_);
            fs::create_directories(staging_);
        }
        return staging_;
    }

    void write(const fs::path& relative, const std::string& content) {
        claim(relative);
        const auto path = staging() / relative;
        fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        out << content;
        out.close();
        if (!out) throw std::runtime_error("failed to write " + path.string());
        add(relative);
    }

    /// Registers a file some other code wrote into the staging directory.
    void add(const fs::path& relative) {
        if (std::find(files_.begin(), files_.end(), relative) == files_.end()) files_.push_back(relative);
    }

    [[nodiscard]] bool produces(const fs::path& relative) const {
        return std::find(files_.begin(), files_.end(), relative) != files_.end();
    }

    void commit() {
        for (const auto& f : files_) claim(f);
        for (const auto& f : files_) {
            const auto target = out_dir_ / f;
            fs::create_directories(target.parent_path());
            fs::rename(staging_ / f, target);
        }
    }

    [[nodiscard]] const std::vector<fs::path>& files() const { return files_; }

private:
    fs::path out_dir_;
    bool overwrite_;
    fs::path staging_;
    std::vector<fs::path> files_;
};

struct SchemeChoice {
    std::string name;
    std::optional<SchemeId> id;
    std::optional<Stencil> custom;

    [[nodiscard]] Stencil build(const AdvectionProblem& prob) const { return id ? build_scheme(*id, prob) : *custom; }
};

SchemeChoice scheme_choice(const Config& cfg) {
    const auto scheme = cfg.string("scheme");
    const auto file = cfg.string("stencil_file");
    if (scheme && file) throw ConfigError("stencil_file", "give either scheme or stencil_file, not both");
    if (!scheme && !file) throw ConfigError("scheme", "a scheme or a stencil_file is required");
    SchemeChoice choice;
    if (scheme) {
        try {
            choice.id = parse_scheme(*scheme);
        } catch (const std::exception& e) {
            throw ConfigError("scheme", e.what());
        }
        choice.name = *scheme;
        return choice;
    }
    try {
        choice.custom = load_stencil_file(*file);
    } catch (const std::exception& e) {
        throw ConfigError("stencil_file", e.what());
    }
    choice.name = choice.custom->name;
    return choice;
}

double speed(const Config& cfg) {
    const double c = cfg.number("c", 1.0);
    if (c == 0.0) throw ConfigError("c", "advection speed must be nonzero");
    return c;
}

double mesh(const Config& cfg) {
    const double h = cfg.number("h", 1.0);
    if (!(h > 0.0)) throw ConfigError("h", "mesh size must be positive");
    return h;
}

bool has_time_step(const Config& cfg) { return cfg.has("tau") || cfg.has("sigma"); }

AdvectionProblem problem(const Config& cfg) {
    const double c = speed(cfg), h = mesh(cfg);
    const auto tau = cfg.number("tau");
    const auto sigma = cfg.number("sigma");
    if (tau && sigma) throw ConfigError("sigma", "give exactly one of tau and sigma");
    if (!tau && !sigma) throw ConfigError("tau", "one of tau or sigma is required");
    const double t = tau ? *tau : *sigma * h / c;
    if (!(t > 0.0)) throw ConfigError(tau ? "tau" : "sigma", "time step must be positive (sigma must have the sign of c)");
    return AdvectionProblem::make(c, h, t);
}

std::string csv(const std::function<void(std::ostream&)>& write) {
    std::ostringstream s;
    write(s);
    return s.str();
}

std::string quoted(const fs::path& p) { return "'" + p.generic_string() + "'"; }

// ---------------------------------------------------------------- dispersion

void cmd_dispersion(const Config& cfg, OutputSet& out, bool plots) {
    cfg.allow_only(with_common({"phi_points"}), "dispersion");
    const auto choice = scheme_choice(cfg);
    const auto prob = problem(cfg);
    const long points = cfg.integer("phi_points", 64, 2);
    out.claim("dispersion.csv");
    if (plots) out.claim("dispersion.gp");

    const auto st = choice.build(prob);
    std::vector<double> phis(static_cast<std::size_t>(points));
    for (long i = 1; i <= points; ++i) phis[static_cast<std::size_t>(i - 1)] = M_PI * static_cast<double>(i) / points;
    std::vector<DispersionSample> rows;
    for (int b = 0; b < branch_count(st); ++b) {
        const auto sweep = dispersion_sweep(st, prob, phis, b);
        rows.insert(rows.end(), sweep.begin(), sweep.end());
    }
    out.write("dispersion.csv", csv([&](std::ostream& s) { write_dispersion_csv(s, rows); }));

    if (plots) {
        std::ostringstream gp;
        gp << "# " << choice.name << ", sigma = " << format_number(prob.sigma()) << "\n"
           << "set datafile separator \",\"\n"
           << "set key autotitle columnhead\n"
           << "set multiplot layout 3,1\n"
           << "set xlabel \"phi\"\n"
           << "set ylabel \"|G|\"\n"
           << "plot " << quoted("dispersion.csv") << " using 2:4 with points pt 7 ps 0.4 title \"amp\"\n"
           << "set ylabel \"xi tau\"\n"
           << "plot " << quoted("dispersion.csv") << " using 2:5 with points pt 7 ps 0.4 title \"xi_omega_tau\"\n"
           << "set ylabel \"Vg\"\n"
           << "plot " << quoted("dispersion.csv") << " using 2:6 with points pt 7 ps 0.4 title \"vg\"\n"
           << "unset multiplot\n"
           << "pause mouse close\n";
        out.write("dispersion.gp", gp.str());
    }
}

// ------------------------------------------------------------------ caustics

Json claim_audit(const CausticLocus& locus) {
    // Published expectation for the Crank-Nicolson family: no spurious
    // caustics, constant group velocity.
    Json j;
    j["expected_caustic_free"] = true;
    j["expected_constant_vg"] = true;
    j["caustic_free_agrees"] = locus.caustic_free;
    j["constant_vg_agrees"] = locus.constant_vg;
    j["verdict"] = locus.caustic_free && locus.constant_vg ? "agrees"
                   : locus.caustic_free                    ? "partially agrees: no interior root, but Vg is not constant"
                                                           : "disagrees: interior roots found";
    return j;
}

void cmd_caustics(const Config& cfg, OutputSet& out, bool plots) {
    cfg.allow_only(with_common({"sigma_min", "sigma_max", "sigma_step", "phi_points", "allow_unstable"}), "caustics");
    const auto choice = scheme_choice(cfg);
    SweepOptions options;
    options.phi_points = static_cast<int>(cfg.integer("phi_points", 256, 64));
    options.allow_unstable = cfg.boolean("allow_unstable", false);

    AdvectionProblem base;
    SigmaGrid grid;
    if (choice.custom || has_time_step(cfg)) {
        if (cfg.has("sigma_min") || cfg.has("sigma_max") || cfg.has("sigma_step")) {
            throw ConfigError(cfg.has("sigma_min") ? "sigma_min" : cfg.has("sigma_max") ? "sigma_max" : "sigma_step",
                              "a sigma range cannot be combined with tau/sigma or a stencil file");
        }
        base = problem(cfg);
        grid = {base.sigma(), base.sigma(), 1.0};
    } else {
        base = AdvectionProblem::make(speed(cfg), mesh(cfg), 1.0);
        grid.min = cfg.number("sigma_min", 0.1);
        grid.max = cfg.number("sigma_max", 0.9);
        grid.step = cfg.number("sigma_step", 0.1);
        if (!(grid.min > 0.0)) throw ConfigError("sigma_min", "must be positive");
        if (grid.max < grid.min) throw ConfigError("sigma_max", "must not be below sigma_min");
        if (!(grid.step > 0.0)) throw ConfigError("sigma_step", "must be positive");
    }
    if (grid.max > 1.0 && !options.allow_unstable) {
        throw ConfigError(choice.custom || has_time_step(cfg) ? (cfg.has("tau") ? "tau" : "sigma") : "sigma_max",
                          "sigma > 1 is outside the stable range; set allow_unstable to sweep it");
    }
    out.claim("caustics.csv");
    out.claim("caustics_summary.json");
    if (plots) out.claim("caustics.gp");

    const CausticLocus locus = choice.custom
                                   ? sweep_locus(choice.name, [&](const AdvectionProblem&) { return *choice.custom; },
                                                 base, grid, options)
                                   : sweep_locus(*choice.id, base, grid, options);

    Json summary = locus_summary_json(locus);
    {
        // Consistency of the stencil at the first grid CFL.
        const auto prob = AdvectionProblem::from_sigma(base.c, base.h, grid.values().front());
        const auto rep = check_consistency(choice.build(prob), prob);
        summary["consistency"] = {{"passed", rep.passed()},
                                  {"constant_residual", rep.constant_residual},
                                  {"linear_residual", rep.linear_residual}};
    }
    if (choice.id == SchemeId::crank_nicolson_table1 || choice.id == SchemeId::crank_nicolson_standard) {
        summary["claim_audit"] = claim_audit(locus);
    }
    out.write("caustics.csv", csv([&](std::ostream& s) { write_locus_csv(s, locus); }));
    out.write("caustics_summary.json", dump_json(summary));

    if (plots) {
        std::ostringstream gp;
        gp << "# spurious caustic locus, " << locus.scheme << "\n"
           << "set datafile separator \",\"\n"
           << "set multiplot layout 2,1\n"
           << "set xlabel \"sigma\"\n"
           << "set ylabel \"phi_c\"\n"
           << "set yrange [0:pi]\n"
           << "plot " << quoted("caustics.csv")
           << " using 2:(strcol(6) eq \"interior\" ? $3 : NaN) skip 1 with points pt 7 title \"interior roots\", \\\n"
           << "     " << quoted("caustics.csv")
           << " using 2:(strcol(6) eq \"trivial_boundary\" ? $3 : NaN) skip 1 with points pt 6 title \"trivial roots\"\n"
           << "set ylabel \"U_c\"\n"
           << "set autoscale y\n"
           << "plot " << quoted("caustics.csv")
           << " using 2:(strcol(6) eq \"interior\" ? $4 : NaN) skip 1 with points pt 7 title \"interior U_c\"\n"
           << "unset multiplot\n"
           << "pause mouse close\n";
        out.write("caustics.gp", gp.str());
    }
}

// ------------------------------------------------------------------- packets

void cmd_packets(const Config& cfg, OutputSet& out, bool plots) {
    cfg.allow_only({"c", "h", "out", "overwrite", "emit_plots", "packets"}, "packets");
    PacketErrorConfig pc = default_packet_config();
    if (cfg.has("packets")) {
        try {
            pc = packet_config_from_json(cfg.raw("packets"));
        } catch (const std::exception& e) {
            throw ConfigError("packets", e.what());
        }
    }
    if (cfg.has("c")) pc.c = cfg.number("c", pc.c);
    if (cfg.has("h")) pc.dx = mesh(cfg);
    try {
        pc.validate();
    } catch (const std::exception& e) {
        throw ConfigError("packets", e.what());
    }
    out.claim("norms.csv");
    out.claim("limits.json");
    if (plots) out.claim("packets.gp");

    const auto history = norm_history(pc);
    ErrorLimitReport rep;
    try {
        rep = verify_error_limits(pc, history);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("packets", e.what());
    }
    Json limits;
    limits["config"] = to_json(pc);
    limits["limits"] = to_json(rep);
    limits["shape"] = to_json(analyse_shape(history));
    out.write("norms.csv", csv([&](std::ostream& s) { write_norms_csv(s, history); }));
    out.write("limits.json", dump_json(limits));

    if (plots) {
        std::ostringstream gp;
        gp << "# two-packet error history\n"
           << "set datafile separator \",\"\n"
           << "set key autotitle columnhead\n"
           << "set multiplot layout 2,1\n"
           << "set xlabel \"t\"\n"
           << "set ylabel \"L1\"\n"
           << "plot " << quoted("norms.csv") << " using 1:2 with lines title \"L1\"\n"
           << "set ylabel \"Linf\"\n"
           << "plot " << quoted("norms.csv") << " using 1:3 with lines title \"Linf\"\n"
           << "unset multiplot\n"
           << "pause mouse close\n";
        out.write("packets.gp", gp.str());
    }
}

// ------------------------------------------------------------------ simulate

std::vector<WavePacket> simulation_packets(const Config& cfg, std::size_t n, double h) {
    // Narrow-band packet at kh = pi/2, 40 cells wide, a quarter into the domain.
    const double length = static_cast<double>(n) * h;
    const WavePacket base{1.0 / std::pow(40.0 * h, 2), 0.25 * length, M_PI / (2.0 * h), 1.0, 1.0};
    if (!cfg.has("packets")) return {base};
    const auto& doc = cfg.raw("packets");
    if (!doc.is_array() || doc.empty()) throw ConfigError("packets", "must be a non-empty array of packet objects");
    std::vector<WavePacket> out;
    for (const auto& item : doc) {
        try {
            out.push_back(packet_from_json(item, base));
            out.back().validate();
        } catch (const std::exception& e) {
            throw ConfigError("packets", e.what());
        }
    }
    return out;
}

std::string track_csv(const RunReport& rep) {
    std::map<double, double> argmax, packet;
    for (const auto& p : rep.argmax_track) argmax[p.t] = p.x;
    for (const auto& p : rep.packet_track) packet[p.t] = p.x;
    const auto column = [](const std::map<double, double>& m, double t) {
        const auto it = m.find(t);
        return it == m.end() ? std::string("nan") : format_number(it->second);
    };
    std::ostringstream s;
    s << "t,argmax_x,packet_x\n";
    for (const auto& n : rep.norms) s << format_number(n.t) << ',' << column(argmax, n.t) << ',' << column(packet, n.t) << '\n';
    return s.str();
}

int cmd_simulate(const Config& cfg, OutputSet& out, bool plots, std::ostream& err) {
    cfg.allow_only(with_common({"n", "steps", "packets", "start_up", "norm_cadence", "snapshot_cadence",
                                "blowup_factor"}),
                   "simulate");
    const auto choice = scheme_choice(cfg);
    const auto prob = problem(cfg);
    const auto n = static_cast<std::size_t>(cfg.integer("n", 8192, 3));
    const int steps = static_cast<int>(cfg.integer("steps", 40, 1));
    RunOptions options;
    options.norm_cadence = static_cast<int>(cfg.integer("norm_cadence", 1, 1));
    options.snapshot_cadence = static_cast<int>(cfg.integer("snapshot_cadence", 0, 0));
    options.blowup_factor = cfg.number("blowup_factor", options.blowup_factor);
    if (!(options.blowup_factor > 1.0)) throw ConfigError("blowup_factor", "must exceed 1");
    StartUp start = StartUp::exact;
    if (const auto s = cfg.string("start_up")) {
        if (*s == "exact") {
            start = StartUp::exact;
        } else if (*s == "lax_bootstrap") {
            start = StartUp::lax_bootstrap;
        } else {
            throw ConfigError("start_up", "must be 'exact' or 'lax_bootstrap'");
        }
    }
    const auto packets = simulation_packets(cfg, n, prob.h);
    const auto st = choice.build(prob);
    try {
        st.validate();
    } catch (const std::exception& e) {
        throw ConfigError(choice.custom ? "stencil_file" : "scheme", e.what());
    }

    GridField field;
    try {
        field = init_from_packets(packets, n, prob.h, st, prob, start);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("packets", e.what());
    }
    out.claim("report.json");
    out.claim("track.csv");
    out.claim("stability.json");
    if (options.snapshot_cadence > 0) out.claim_directory_contents("snapshots");
    if (plots) out.claim("simulate.gp");

    if (options.snapshot_cadence > 0) {
        options.snapshot_dir = out.staging() / "snapshots";
        fs::create_directories(options.snapshot_dir);
    }
    const PeriodicPackets exact{packets, field.length()};
    RunReport rep;
    try {
        rep = run(field, st, prob, steps, exact, options);
    } catch (const NumericalBlowUp& e) {
        err << "numerical failure: " << e.what() << "\n";
        // Only the diagnostic reaches the output directory; staged snapshots are discarded.
        out.write("stability.json", dump_json(Json{{"stability", to_json(e.diagnostic())}}));
        out.commit();
        return exit_numerical;
    }
    if (options.snapshot_cadence > 0) {
        for (const auto& entry : fs::directory_iterator(options.snapshot_dir)) {
            out.add(fs::path("snapshots") / entry.path().filename());
        }
    }

    Json report = to_json(rep);
    report["scheme"] = choice.name;
    report["sigma"] = prob.sigma();
    report["steps"] = steps;
    out.write("report.json", dump_json(report));
    out.write("track.csv", track_csv(rep));

    if (plots) {
        const double x_start = rep.packet_track.empty() ? 0.0 : rep.packet_track.front().x;
        std::set<std::string> rays;
        for (const auto& r : rep.predicted) rays.insert(format_number(r.u_c));
        std::ostringstream gp;
        gp << "# space-time track of " << choice.name << " with predicted caustic rays x = x0 + U_c t\n"
           << "set datafile separator \",\"\n"
           << "set xlabel \"t\"\n"
           << "set ylabel \"x\"\n"
           << "x0 = " << format_number(x_start) << "\n"
           << "plot " << quoted("track.csv") << " using 1:2 skip 1 with points pt 7 ps 0.4 title \"argmax |error|\", \\\n"
           << "     " << quoted("track.csv") << " using 1:3 skip 1 with lines lw 2 title \"packet centroid\"";
        for (const auto& u : rays) gp << ", \\\n     x0 + (" << u << ") * x with lines dt 2 title \"U_c = " << u << "\"";
        gp << "\n";
        if (options.snapshot_cadence > 0) {
            std::vector<fs::path> snaps;
            for (const auto& f : out.files()) {
                if (f.parent_path() == "snapshots") snaps.push_back(f);
            }
            std::sort(snaps.begin(), snaps.end(), [](const fs::path& a, const fs::path& b) {
                const auto index = [](const fs::path& p) { return std::stol(p.stem().string().substr(5)); };
                return index(a) < index(b);
            });
            gp << "pause mouse close\n"
               << "set xlabel \"x\"\n"
               << "set ylabel \"u\"\n"
               << "plot";
            for (std::size_t i = 0; i < snaps.size(); ++i) {
                gp << (i ? ", \\\n    " : "") << " " << quoted(snaps[i]) << " using 1:2 skip 1 with lines title \""
                   << snaps[i].stem().string() << "\"";
            }
            gp << "\n";
        }
        gp << "pause mouse close\n";
        out.write("simulate.gp", gp.str());
    }
    return exit_ok;
}

// ------------------------------------------------------------------- driver

struct Flags {
    std::optional<std::string> scheme, stencil_file, out, config;
    std::optional<double> c, h, tau, sigma;
    bool overwrite = false;
    bool emit_plots = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--scheme", f.scheme, "catalog scheme: leapfrog, lax, lax_wendroff, crank_nicolson_table1, "
                                          "crank_nicolson_standard");
    sub->add_option("--stencil-file", f.stencil_file, "custom stencil JSON document");
    sub->add_option("--c", f.c, "advection speed");
    sub->add_option("--h", f.h, "mesh size (packets: sample spacing)");
    sub->add_option("--tau", f.tau, "time step");
    sub->add_option("--sigma", f.sigma, "CFL number c tau / h");
    sub->add_option("--out", f.out, "output directory (default: current directory)");
    sub->add_flag("--overwrite", f.overwrite, "replace existing output files");
    sub->add_flag("--emit-plots", f.emit_plots, "also write gnuplot scripts");
    sub->add_option("--config", f.config, "JSON configuration file; flags override its values");
}

Json merged_config(const Flags& f) {
    Json doc = Json::object();
    if (f.config) {
        std::ifstream in(*f.config, std::ios::binary);
        if (!in) throw ConfigError("config", "cannot read " + *f.config);
        try {
            doc = Json::parse(in);
        } catch (const std::exception& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw ConfigError("config", "top level must be a JSON object");
    }
    if (f.scheme) {
        doc["scheme"] = *f.scheme;
        doc.erase("stencil_file");
    }
    if (f.stencil_file) {
        doc["stencil_file"] = *f.stencil_file;
        doc.erase("scheme");
    }
    if (f.tau && f.sigma) throw ConfigError("sigma", "give exactly one of --tau and --sigma");
    if (f.c) doc["c"] = *f.c;
    if (f.h) doc["h"] = *f.h;
    if (f.tau) {
        doc["tau"] = *f.tau;
        doc.erase("sigma");
    }
    if (f.sigma) {
        doc["sigma"] = *f.sigma;
        doc.erase("tau");
    }
    if (f.out) doc["out"] = *f.out;
    if (f.overwrite) doc["overwrite"] = true;
    if (f.emit_plots) doc["emit_plots"] = true;
    return doc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dispersion and spurious-caustic analysis of three-level finite-difference advection schemes",
                 "causticfd"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    Flags flags;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"dispersion", "amplification, phase and group velocity over phi"},
             {"caustics", "roots of dVg/dphi over a sigma grid"},
             {"packets", "two-packet dispersive error model"},
             {"simulate", "periodic finite-difference run with error tracking"}}) {
        subs[name] = app.add_subcommand(name, help);
        add_common(subs[name], flags);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "config error [arguments]: " << e.what() << "\n";
        return exit_config;
    }
    for (const auto& [name, sub] : subs) {
        if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
            out << sub->help();
            return exit_ok;
        }
    }

    try {
        const Config cfg(merged_config(flags));
        const auto out_dir = cfg.string("out").value_or(".");
        OutputSet outputs(out_dir, cfg.boolean("overwrite", false));
        const bool plots = cfg.boolean("emit_plots", false);
        int code = exit_ok;
        if (subs["dispersion"]->parsed()) {
            cmd_dispersion(cfg, outputs, plots);
        } else if (subs["caustics"]->parsed()) {
            cmd_caustics(cfg, outputs, plots);
        } else if (subs["packets"]->parsed()) {
            cmd_packets(cfg, outputs, plots);
        } else {
            code = cmd_simulate(cfg, outputs, plots, err);
        }
        if (code != exit_ok) return code;
        outputs.commit();
        for (const auto& f : outputs.files()) out << (fs::path(out_dir) / f).generic_string() << "\n";
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error [" << e.key() << "]: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalBlowUp& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::domain_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "config error [input]: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace causticfd::cli
