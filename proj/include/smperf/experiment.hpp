#pragma once

// Experiment configuration (key=value text), presets, and the bound/sim
// orchestration behind the command-line tool.
//
// Config file format: one `key = value` per line, `#` starts a comment.
//
//   n_t            transmit antennas (power of two)                required
//   n_r            receive antennas                                required
//   constellation  comma list of bpsk, qpsk, qam8, qam16, qam32, or ssk  required
//   k_factor       Rician factor                                   default 0
//   k_factor_unit  linear | db                                     default linear
//   correlation    none | exponential                              default none
//   gamma_t        transmit correlation coefficient (real)         default 0
//   gamma_r        receive correlation coefficient (real)          default 0
//   snr            START:STOP:STEP in dB                           default 0:20:2
//   quad_nodes     Gauss-Legendre nodes                            default 64
//   min_bit_errors simulation stopping rule                        default 200
//   max_frames     simulation frame cap                            default 100000000
//   seed           master seed (u64)                               default 1
//   prefactor      paper | conventional                            default paper

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smperf/analysis.hpp"
#include "smperf/channel.hpp"
#include "smperf/constellation.hpp"
#include "smperf/error.hpp"
#include "smperf/montecarlo.hpp"

namespace smperf {

enum class CorrelationModel { none, exponential };

struct SnrRange {
    double start = 0.0;
    double stop = 20.0;
    double step = 2.0;

    std::vector<double> grid() const
    {
        std::vector<double> out;
        for (int k = 0;; ++k) {
            const double v = start + k * step;
            if (v > stop + 1e-9 * std::max(1.0, std::abs(stop)))
                break;
            out.push_back(v);
        }
        return out;
    }

    friend bool operator==(const SnrRange&, const SnrRange&) = default;
};

struct ExperimentConfig {
    unsigned n_t = 0;
    unsigned n_r = 0;
    std::vector<std::string> constellations;
    double k_factor = 0.0; // linear
    CorrelationModel correlation = CorrelationModel::none;
    double gamma_t = 0.0;
    double gamma_r = 0.0;
    SnrRange snr;
    std::size_t quad_nodes = 64;
    StoppingRule stopping;
    std::uint64_t seed = 1;
    PrefactorMode prefactor = PrefactorMode::paper;

    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b)
    {
        return a.n_t == b.n_t && a.n_r == b.n_r && a.constellations == b.constellations &&
               a.k_factor == b.k_factor && a.correlation == b.correlation &&
               a.gamma_t == b.gamma_t && a.gamma_r == b.gamma_r && a.snr == b.snr &&
               a.quad_nodes == b.quad_nodes &&
               a.stopping.min_bit_errors == b.stopping.min_bit_errors &&
               a.stopping.max_frames == b.stopping.max_frames && a.seed == b.seed &&
               a.prefactor == b.prefactor;
    }

    ChannelSpec channel() const
    {
        if (correlation == CorrelationModel::none)
            return ChannelSpec::uncorrelated(n_t, n_r, k_factor);
        return ChannelSpec::exponential(n_t, n_r, k_factor, gamma_t, gamma_r);
    }

    BoundConfig bound_config() const { return {quad_nodes, prefactor}; }
};

namespace detail {

[[noreturn]] inline void config_error(std::string_view field, const std::string& message)
{
    throw Error(ErrorCode::config, std::string(field) + ": " + message);
}

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string format_double(double v)
{
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

inline double parse_double(std::string_view field, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v))
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        config_error(field, "expected a finite real number, got '" + text + "'");
    }
}

inline std::uint64_t parse_unsigned(std::string_view field, const std::string& text)
{
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char ch) {
            return std::isdigit(ch) != 0;
        }))
        config_error(field, "expected a non-negative integer, got '" + text + "'");
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        config_error(field, "integer out of range: '" + text + "'");
    }
}

inline double parse_gamma(std::string_view field, const std::string& text)
{
    if (text.find_first_of("ijIJ") != std::string::npos)
        config_error(field, "complex correlation coefficients are not supported, got '" + text + "'");
    return parse_double(field, text);
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
        if (next == std::string_view::npos)
            return out;
        pos = next + 1;
    }
}

} // namespace detail

inline SnrRange parse_snr_range(const std::string& text, std::string_view field = "snr")
{
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3)
        detail::config_error(field, "expected START:STOP:STEP, got '" + text + "'");
    SnrRange r{detail::parse_double(field, parts[0]), detail::parse_double(field, parts[1]),
               detail::parse_double(field, parts[2])};
    if (!(r.step > 0.0))
        detail::config_error(field, "step must be positive");
    if (r.stop < r.start)
        detail::config_error(field, "stop must not be below start");
    return r;
}

inline PrefactorMode parse_prefactor(const std::string& text, std::string_view field = "prefactor")
{
    if (text == "paper")
        return PrefactorMode::paper;
    if (text == "conventional")
        return PrefactorMode::conventional;
    detail::config_error(field, "expected paper or conventional, got '" + text + "'");
}

/// Checks every downstream precondition so bad input fails before any work starts.
inline void validate(const ExperimentConfig& cfg)
{
    using detail::config_error;
    if (cfg.n_t == 0 || (cfg.n_t & (cfg.n_t - 1)) != 0)
        config_error("n_t", "must be a power of two >= 1, got " + std::to_string(cfg.n_t));
    if (cfg.n_r == 0)
        config_error("n_r", "must be >= 1");
    if (cfg.constellations.empty())
        config_error("constellation", "missing constellation name");
    for (const auto& name : cfg.constellations) {
        if (name != "ssk" &&
            std::find(constellation_names().begin(), constellation_names().end(), name) ==
                constellation_names().end())
            config_error("constellation", "unknown constellation '" + name +
                                              "' (expected bpsk, qpsk, qam8, qam16, qam32 or ssk)");
        if (name == "ssk" && cfg.n_t < 2)
            config_error("constellation", "ssk requires n_t >= 2");
    }
    if (!(cfg.k_factor >= 0.0) || !std::isfinite(cfg.k_factor))
        config_error("k_factor", "must be finite and >= 0");
    if (cfg.correlation == CorrelationModel::exponential) {
        if (!(std::abs(cfg.gamma_t) < 1.0))
            config_error("gamma_t", "must satisfy |gamma_t| < 1");
        if (!(std::abs(cfg.gamma_r) < 1.0))
            config_error("gamma_r", "must satisfy |gamma_r| < 1");
    }
    if (!(cfg.snr.step > 0.0) || cfg.snr.stop < cfg.snr.start)
        config_error("snr", "need step > 0 and stop >= start");
    if (cfg.quad_nodes < 8)
        config_error("quad_nodes", "must be >= 8");
    if (cfg.stopping.min_bit_errors < 1)
        config_error("min_bit_errors", "must be >= 1");
    if (cfg.stopping.max_frames < 1)
        config_error("max_frames", "must be >= 1");
}

/// Applies one key=value assignment; shared by the file parser and CLI overrides.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                          bool& k_in_db)
{
    using namespace detail;
    if (key == "n_t")
        cfg.n_t = static_cast<unsigned>(parse_unsigned(key, value));
    else if (key == "n_r")
        cfg.n_r = static_cast<unsigned>(parse_unsigned(key, value));
    else if (key == "constellation") {
        cfg.constellations.clear();
        for (auto& name : split(value, ','))
            if (!name.empty())
                cfg.constellations.push_back(name);
    } else if (key == "k_factor")
        cfg.k_factor = parse_double(key, value);
    else if (key == "k_factor_unit") {
        if (value == "db")
            k_in_db = true;
        else if (value == "linear")
            k_in_db = false;
        else
            config_error(key, "expected linear or db, got '" + value + "'");
    } else if (key == "correlation") {
        if (value == "none")
            cfg.correlation = CorrelationModel::none;
        else if (value == "exponential")
            cfg.correlation = CorrelationModel::exponential;
        else
            config_error(key, "expected none or exponential, got '" + value + "'");
    } else if (key == "gamma_t")
        cfg.gamma_t = parse_gamma(key, value);
    else if (key == "gamma_r")
        cfg.gamma_r = parse_gamma(key, value);
    else if (key == "snr")
        cfg.snr = parse_snr_range(value);
    else if (key == "quad_nodes")
        cfg.quad_nodes = static_cast<std::size_t>(parse_unsigned(key, value));
    else if (key == "min_bit_errors")
        cfg.stopping.min_bit_errors = parse_unsigned(key, value);
    else if (key == "max_frames")
        cfg.stopping.max_frames = parse_unsigned(key, value);
    else if (key == "seed")
        cfg.seed = parse_unsigned(key, value);
    else if (key == "prefactor")
        cfg.prefactor = parse_prefactor(value);
    else
        config_error(key, "unknown configuration key");
}

inline ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig cfg;
    std::map<std::string, int> seen;
    bool k_in_db = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(std::string_view(raw).substr(0, hash));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::config,
                        "line " + std::to_string(line_no) + ": expected key = value, got '" + line + "'");
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (seen.count(key))
            detail::config_error(key, "duplicate key on line " + std::to_string(line_no) +
                                          " (first on line " + std::to_string(seen[key]) + ")");
        seen[key] = line_no;
        apply_setting(cfg, key, value, k_in_db);
    }
    for (const char* required : {"n_t", "n_r", "constellation"})
        if (!seen.count(required))
            detail::config_error(required, "required field is missing");
    if (k_in_db)
        cfg.k_factor = std::pow(10.0, cfg.k_factor / 10.0);
    validate(cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Inverse of parse_config; K is always written in linear units.
inline std::string serialize_config(const ExperimentConfig& cfg)
{
    using detail::format_double;
    std::ostringstream os;
    std::string names;
    for (const auto& n : cfg.constellations)
        names += (names.empty() ? "" : ",") + n;
    os << "n_t = " << cfg.n_t << '\n'
       << "n_r = " << cfg.n_r << '\n'
       << "constellation = " << names << '\n'
       << "k_factor = " << format_double(cfg.k_factor) << '\n'
       << "k_factor_unit = linear\n"
       << "correlation = " << (cfg.correlation == CorrelationModel::none ? "none" : "exponential")
       << '\n'
       << "gamma_t = " << format_double(cfg.gamma_t) << '\n'
       << "gamma_r = " << format_double(cfg.gamma_r) << '\n'
       << "snr = " << format_double(cfg.snr.start) << ':' << format_double(cfg.snr.stop) << ':'
       << format_double(cfg.snr.step) << '\n'
       << "quad_nodes = " << cfg.quad_nodes << '\n'
       << "min_bit_errors = " << cfg.stopping.min_bit_errors << '\n'
       << "max_frames = " << cfg.stopping.max_frames << '\n'
       << "seed = " << cfg.seed << '\n'
       << "prefactor = " << to_string(cfg.prefactor) << '\n';
    return os.str();
}

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"fig1", "fig2", "fig3"};
    return names;
}

/// 4x4 configurations from the simulation study. fig1/fig2 sweep R = 3..7
/// through bpsk..qam32; fig3 is SSK (R = 2) and assumes gamma_t = gamma_r = 0.8.
inline ExperimentConfig preset(std::string_view name)
{
    ExperimentConfig cfg;
    cfg.n_t = 4;
    cfg.n_r = 4;
    cfg.k_factor = 5.0;
    cfg.snr = {0.0, 20.0, 2.0};
    if (name == "fig1") {
        cfg.constellations = constellation_names();
        cfg.correlation = CorrelationModel::none;
    } else if (name == "fig2") {
        cfg.constellations = constellation_names();
        cfg.correlation = CorrelationModel::exponential;
        cfg.gamma_t = 0.8;
        cfg.gamma_r = 0.8;
    } else if (name == "fig3") {
        cfg.constellations = {"ssk"};
        cfg.correlation = CorrelationModel::exponential;
        cfg.gamma_t = 0.8;
        cfg.gamma_r = 0.8;
    } else {
        throw Error(ErrorCode::config,
                    "preset: unknown preset '" + std::string(name) + "' (valid: fig1, fig2, fig3)");
    }
    return cfg;
}

enum class RunMode { bound, sim, both };

inline RunMode parse_mode(const std::string& text)
{
    if (text == "bound")
        return RunMode::bound;
    if (text == "sim")
        return RunMode::sim;
    if (text == "both")
        return RunMode::both;
    detail::config_error("mode", "expected bound, sim or both, got '" + text + "'");
}

inline constexpr std::string_view kCsvHeader =
    "snr_db,ber_bound_raw,ber_bound_clipped,ber_sim,frames,bit_errors,below_resolution_flag";

inline std::string format_csv(const BerCurve& curve)
{
    std::ostringstream os;
    os << kCsvHeader << '\n';
    std::array<char, 64> buf{};
    auto sci = [&buf](double v) {
        std::snprintf(buf.data(), buf.size(), "%.10e", v);
        return std::string(buf.data());
    };
    for (const auto& p : curve.points) {
        os << detail::format_double(p.snr_db) << ',';
        if (p.bound)
            os << sci(p.bound->raw) << ',' << sci(p.bound->clipped);
        else
            os << ',';
        os << ',';
        if (p.sim)
            os << sci(p.sim->ber) << ',' << p.sim->frames << ',' << p.sim->bit_errors << ','
               << (p.sim->below_resolution ? 1 : 0);
        else
            os << ",,,";
        os << '\n';
    }
    return os.str();
}

/// Output file for one curve: `out` itself for single-curve runs, otherwise
/// `<stem>_R<rate><ext>` next to it.
inline std::string curve_output_path(const std::string& out, unsigned rate, bool multiple)
{
    if (!multiple)
        return out;
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    const std::string stem = has_ext ? out.substr(0, dot) : out;
    const std::string ext = has_ext ? out.substr(dot) : "";
    return stem + "_R" + std::to_string(rate) + ext;
}

struct RunResult {
    std::vector<BerCurve> curves;
    std::vector<std::string> files;
};

/// Runs every configured curve and writes one CSV per curve.
inline RunResult run_experiment(const ExperimentConfig& cfg, RunMode mode, const std::string& out,
                                unsigned workers = 0, std::ostream* log = nullptr,
                                std::ostream* summary = nullptr)
{
    validate(cfg);
    const ChannelSpec spec = cfg.channel();
    const auto grid = cfg.snr.grid();
    const SweepParts parts = mode == RunMode::bound ? SweepParts::bound
                             : mode == RunMode::sim ? SweepParts::sim
                                                    : SweepParts::both;
    RunResult result;
    const bool multiple = cfg.constellations.size() > 1;
    for (const auto& name : cfg.constellations) {
        const Constellation c = constellation_by_name(name);
        auto curve = sweep(spec, c, grid, cfg.stopping, cfg.seed, cfg.bound_config(), parts,
                           workers, [&](const CurvePoint& p) {
                               if (!log)
                                   return;
                               *log << "[" << name << "] snr " << p.snr_db << " dB";
                               if (p.bound)
                                   *log << " bound " << p.bound->clipped;
                               if (p.sim)
                                   *log << " sim " << p.sim->ber << " (" << p.sim->bit_errors
                                        << " errors / " << p.sim->frames << " frames)";
                               *log << '\n';
                           });
        const std::string path = curve_output_path(out, curve.rate, multiple);
        std::ofstream file(path);
        if (!file)
            throw Error(ErrorCode::io, "cannot open output file '" + path + "'");
        file << format_csv(curve);
        if (!file)
            throw Error(ErrorCode::io, "failed writing '" + path + "'");
        if (summary) {
            std::array<char, 128> buf{};
            *summary << "# " << name << " (R = " << curve.rate << ") -> " << path << '\n';
            std::snprintf(buf.data(), buf.size(), "%8s  %14s  %14s\n", "snr_db", "bound", "sim_ber");
            *summary << buf.data();
            for (const auto& p : curve.points) {
                std::snprintf(buf.data(), buf.size(), "%8.2f  %14.6g  %14.6g\n", p.snr_db,
                              p.bound ? p.bound->clipped : NAN, p.sim ? p.sim->ber : NAN);
                *summary << buf.data();
            }
        }
        result.files.push_back(path);
        result.curves.push_back(std::move(curve));
    }
    return result;
}

} // namespace smperf
