#include "vort2d/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vort2d {

const char* kVersion = "vort2d 0.1.0";

SimConfig RunConfig::sim_config() const {
    SimConfig cfg;
    cfg.grid.n = grid_n;
    cfg.grid.scale = grid_scale;
    cfg.grid.dealias_fraction = grid_dealias_fraction;
    cfg.nu = sim_nu;
    cfg.tau = sim_tau;
    cfg.dt = sim_dt;
    cfg.t_end = sim_t_end;
    cfg.seed = sim_seed;
    cfg.output_every = sim_output_every;
    cfg.nonlinearity = sim_nonlinearity;
    cfg.cfl = sim_cfl;
    cfg.forcing = forcing_spec();
    return cfg;
}

ForcingSpec RunConfig::forcing_spec() const {
    if (forcing_modes.empty()) return ForcingSpec{};  // unforced run
    std::vector<ForcingMode> raw;
    for (const auto& m : forcing_modes)
        raw.push_back({static_cast<int>(m[0]), static_cast<int>(m[1]), m[2]});
    return validate_forcing(std::move(raw), forcing_auto_reflect);
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (...) {
    }
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (...) {
    }
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "on") return true;
    if (t == "false" || t == "0" || t == "off") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

// Flat list "[a, b, c]" of numbers.
std::vector<double> parse_list(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw std::invalid_argument("config: expected [..] list for " + key);
    std::vector<double> out;
    std::string body = t.substr(1, t.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, trim(item)));
    }
    return out;
}

// Nested list "[[kx, ky, gamma], ...]".
std::vector<std::array<double, 3>> parse_mode_list(const std::string& key,
                                                   const std::string& v) {
    const std::string t = trim(v);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw std::invalid_argument("config: expected [[..],..] for " + key);
    std::vector<std::array<double, 3>> out;
    size_t i = 1;
    const size_t end = t.size() - 1;
    while (i < end) {
        while (i < end && (t[i] == ',' || std::isspace(static_cast<unsigned char>(t[i]))))
            ++i;
        if (i >= end) break;
        if (t[i] != '[')
            throw std::invalid_argument("config: malformed triple in " + key);
        const size_t close = t.find(']', i);
        if (close == std::string::npos)
            throw std::invalid_argument("config: unterminated triple in " + key);
        const auto triple = parse_list(key, t.substr(i, close - i + 1));
        if (triple.size() != 3)
            throw std::invalid_argument("config: " + key +
                                        " entries must be [kx, ky, gamma]");
        out.push_back({triple[0], triple[1], triple[2]});
        i = close + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

std::string fmt_modes(const std::vector<std::array<double, 3>>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += "[" + fmt(v[i][0]) + ", " + fmt(v[i][1]) + ", " + fmt(v[i][2]) + "]";
    }
    return s + "]";
}

}  // namespace

ConfigSchema::ConfigSchema(RunConfig& cfg) {
    auto add = [&](const std::string& key, auto setter, auto getter) {
        entries_[key] = {setter, getter};
        order_.push_back(key);
    };
    auto add_double = [&](const std::string& key, double& ref) {
        add(key, [&ref, key](const std::string& v) { ref = parse_double(key, v); },
            [&ref]() { return fmt(ref); });
    };
    auto add_int = [&](const std::string& key, int& ref) {
        add(key,
            [&ref, key](const std::string& v) {
                ref = static_cast<int>(parse_int(key, v));
            },
            [&ref]() { return std::to_string(ref); });
    };
    auto add_bool = [&](const std::string& key, bool& ref) {
        add(key, [&ref, key](const std::string& v) { ref = parse_bool(key, v); },
            [&ref]() { return ref ? std::string("true") : std::string("false"); });
    };
    auto add_string = [&](const std::string& key, std::string& ref) {
        add(key, [&ref](const std::string& v) { ref = trim(v); },
            [&ref]() { return ref; });
    };
    auto add_list = [&](const std::string& key, std::vector<double>& ref) {
        add(key, [&ref, key](const std::string& v) { ref = parse_list(key, v); },
            [&ref]() { return fmt_list(ref); });
    };

    add_int("grid.n", cfg.grid_n);
    add_double("grid.scale", cfg.grid_scale);
    add_double("grid.dealias_fraction", cfg.grid_dealias_fraction);
    add_double("sim.nu", cfg.sim_nu);
    add_double("sim.tau", cfg.sim_tau);
    add_double("sim.dt", cfg.sim_dt);
    add_double("sim.t_end", cfg.sim_t_end);
    add("sim.seed",
        [&cfg](const std::string& v) {
            cfg.sim_seed =
                static_cast<unsigned long long>(parse_int("sim.seed", v));
        },
        [&cfg]() { return std::to_string(cfg.sim_seed); });
    add_int("sim.output_every", cfg.sim_output_every);
    add_bool("sim.nonlinearity", cfg.sim_nonlinearity);
    add_double("sim.cfl", cfg.sim_cfl);
    add_int("sim.snapshot_every", cfg.sim_snapshot_every);
    add_string("sim.initial_snapshot", cfg.sim_initial_snapshot);
    add("forcing.modes",
        [&cfg](const std::string& v) {
            cfg.forcing_modes = parse_mode_list("forcing.modes", v);
        },
        [&cfg]() { return fmt_modes(cfg.forcing_modes); });
    add_bool("forcing.auto_reflect", cfg.forcing_auto_reflect);
    add_string("output.dir", cfg.output_dir);
    add_int("ensemble.members", cfg.ensemble_members);
    add_int("ensemble.threads", cfg.ensemble_threads);
    add_double("balance.burn_in", cfg.balance_burn_in);
    add_int("balance.batches", cfg.balance_batches);
    add_double("balance.tol", cfg.balance_tol);
    add_double("spectrum.t_start", cfg.spectrum_t_start);
    add_int("spectrum.sample_every", cfg.spectrum_sample_every);
    add_double("spectrum.kappa_lo", cfg.spectrum_kappa_lo);
    add_double("spectrum.kappa_hi", cfg.spectrum_kappa_hi);
    add_list("contraction.cutoffs", cfg.contraction_cutoffs);
    add_double("contraction.T", cfg.contraction_T);
    add_double("contraction.p", cfg.contraction_p);
    add_int("contraction.samples", cfg.contraction_samples);
    add_double("contraction.burn_in", cfg.contraction_burn_in);
    add_int("survey.samples", cfg.survey_samples);
    add_double("survey.alpha", cfg.survey_alpha);
    add_int("survey.low_cutoff", cfg.survey_low_cutoff);
    add_int("survey.galerkin_cutoff", cfg.survey_galerkin_cutoff);
    add_double("survey.interval", cfg.survey_interval);
    add_int("survey.substeps", cfg.survey_substeps);
    add_double("survey.burn_in", cfg.survey_burn_in);
    add_list("control.lambdas", cfg.control_lambdas);
    add_int("control.cutoff", cfg.control_cutoff);
    add_int("control.intervals", cfg.control_intervals);
    add_int("control.substeps", cfg.control_substeps);
    add_int("control.seeds", cfg.control_seeds);
    add_double("control.xi_decay", cfg.control_xi_decay);
    add_double("couple.T", cfg.couple_T);
    add_int("couple.cutoff", cfg.couple_cutoff);
    add_list("couple.delta_mode", cfg.couple_delta_mode);
    add_double("couple.delta_amp", cfg.couple_delta_amp);
    add_string("couple.snapshot_a", cfg.couple_snapshot_a);
    add_string("couple.snapshot_b", cfg.couple_snapshot_b);

    // Provenance line in echoed configs; accepted and ignored on re-parse.
    entries_["code_version"] = {[](const std::string&) {},
                                []() { return std::string(kVersion); }};
}

void ConfigSchema::set(const std::string& key, const std::string& value) {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second.set(value);
}

std::string ConfigSchema::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw std::invalid_argument("config: unknown key '" + key + "'");
    return it->second.get();
}

void apply_config_file(ConfigSchema& schema, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' at " + path + ":" +
                                        std::to_string(lineno));
        schema.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void apply_overrides(ConfigSchema& schema,
                     const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: override needs key=value: '" + a +
                                        "'");
        schema.set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
    }
}

void write_effective_config(const ConfigSchema& schema, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# effective configuration (" << kVersion << ")\n";
    out << "code_version = " << kVersion << "\n";
    for (const auto& key : schema.keys())
        out << key << " = " << schema.get(key) << "\n";
}

}  // namespace vort2d
