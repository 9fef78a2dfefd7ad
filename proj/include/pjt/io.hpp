// io.hpp: defect presets, parameter files and the CSV commands behind the CLI.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pjt/analysis.hpp"
#include "pjt/eigensolver.hpp"
#include "pjt/hamiltonian.hpp"

namespace pjt {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct DefectPreset {
    std::string_view name;
    PjtParams params;
    double reference_delta;  // meV
};

// hbar_omega, Lambda, Xi, F_g, F_u (meV) and the computed delta.
inline constexpr std::array<DefectPreset, 4> kPresets{{
    {"SiV", {75.9, 78.3, 45.0, 95.0, 103.0}, 6.7},
    {"GeV", {78.2, 88.6, 40.0, 83.0, 112.0}, 7.6},
    {"SnV", {81.3, 99.5, 42.0, 67.0, 120.0}, 9.3},
    {"PbV", {81.4, 119.0, 36.0, 52.0, 125.0}, 10.8},
}};

inline const DefectPreset& find_preset(std::string_view name) {
    for (const auto& p : kPresets)
        if (p.name == name)
            return p;
    std::string msg = "unknown preset '" + std::string(name) + "'; available:";
    for (const auto& p : kPresets)
        msg += " " + std::string(p.name);
    throw std::invalid_argument(msg);
}

class ParamFileError : public std::runtime_error {
public:
    ParamFileError(const std::string& what, std::string key, int line)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
    return std::string(buf.data(), res.ptr);
}

}  // namespace detail

/// Parses the flat `key=value` schema:
///   hbar_omega_mev, lambda_mev, xi_mev, and either (f_g_mev, f_u_mev) or
///   (e_jt1_mev, e_jt2_mev). '#' starts a comment. Energy-form couplings are
///   converted with couplings_from_ejt (F_u >= F_g).
inline PjtParams parse_params(std::string_view text) {
    static constexpr std::array<std::string_view, 7> known{"hbar_omega_mev", "lambda_mev", "xi_mev", "f_g_mev",
                                                           "f_u_mev",        "e_jt1_mev",  "e_jt2_mev"};
    std::map<std::string, double, std::less<>> values;
    std::map<std::string, int, std::less<>> lines;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParamFileError("line " + std::to_string(lineno) + ": expected key=value", "", lineno);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view raw = detail::trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParamFileError("line " + std::to_string(lineno) + ": unknown key '" + key + "'", key, lineno);
        if (values.count(key))
            throw ParamFileError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' (first on line " +
                                     std::to_string(lines[key]) + ")",
                                 key, lineno);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(v))
            throw ParamFileError("line " + std::to_string(lineno) + ": non-numeric value for '" + key + "'", key,
                                 lineno);
        if (v < 0.0)
            throw ParamFileError("line " + std::to_string(lineno) + ": negative value for '" + key + "'", key, lineno);
        values[key] = v;
        lines[key] = lineno;
    }

    auto require = [&](const char* key) {
        const auto it = values.find(key);
        if (it == values.end())
            throw ParamFileError(std::string("missing key '") + key + "'", key, 0);
        return it->second;
    };
    const bool has_f = values.count("f_g_mev") || values.count("f_u_mev");
    const bool has_e = values.count("e_jt1_mev") || values.count("e_jt2_mev");
    if (has_f && has_e)
        throw ParamFileError("conflicting coupling specification: give either f_g_mev/f_u_mev or e_jt1_mev/e_jt2_mev",
                             values.count("f_g_mev") ? "f_g_mev" : "f_u_mev", 0);

    PjtParams p;
    p.hbar_omega = require("hbar_omega_mev");
    if (!(p.hbar_omega > 0.0))
        throw ParamFileError("hbar_omega_mev must be > 0", "hbar_omega_mev", lines["hbar_omega_mev"]);
    p.lambda_corr = require("lambda_mev");
    p.xi_corr = require("xi_mev");
    if (has_e) {
        const double e1 = require("e_jt1_mev");
        const double e2 = require("e_jt2_mev");
        if (e2 > e1)
            throw ParamFileError("e_jt2_mev exceeds e_jt1_mev", "e_jt2_mev", lines["e_jt2_mev"]);
        const auto c = couplings_from_ejt(e1, e2, p.hbar_omega);
        p.f_g = c.f_g;
        p.f_u = c.f_u;
    } else {
        p.f_g = require("f_g_mev");
        p.f_u = require("f_u_mev");
    }
    validate(p);
    return p;
}

inline PjtParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open parameter file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_params(ss.str());
}

struct RunConfig {
    std::string preset;       // either preset or params_path
    std::string params_path;
    int cutoff{15};
    int num_states{8};
    double tolerance{kDefaultTolerance};
    double x_min{-4.0};
    double x_max{4.0};
    int points{81};
    double y{0.0};
    std::vector<int> cutoffs;
    double converge_threshold{0.1};  // meV, on successive ground energies
};

inline PjtParams resolve_params(const RunConfig& cfg) {
    if (!cfg.preset.empty() && !cfg.params_path.empty())
        throw std::invalid_argument("give either --preset or --params, not both");
    if (!cfg.preset.empty())
        return find_preset(cfg.preset).params;
    if (!cfg.params_path.empty())
        return load_params_file(cfg.params_path);
    throw std::invalid_argument("no parameters: use --preset <name> or --params <file>");
}

inline std::string source_name(const RunConfig& cfg) {
    return cfg.preset.empty() ? cfg.params_path : cfg.preset;
}

namespace detail {

inline void write_provenance(std::ostream& out, std::string_view command, const RunConfig& cfg,
                             const PjtParams& p) {
    out << "# pjt " << kToolVersion << " " << command << "\n"
        << "# source=" << source_name(cfg) << "\n"
        << "# hbar_omega_mev=" << format_double(p.hbar_omega) << " lambda_mev=" << format_double(p.lambda_corr)
        << " xi_mev=" << format_double(p.xi_corr) << " f_g_mev=" << format_double(p.f_g)
        << " f_u_mev=" << format_double(p.f_u) << "\n";
}

}  // namespace detail

/// CSV: index,energy_mev,label,w_a2u,w_a1u,w_eu,r_dimensionless then a
/// `delta_mev=` footer. Returns the process exit status.
inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.cutoff < 1)
            throw std::invalid_argument("--cutoff must be >= 1");
        const PjtParams p = resolve_params(cfg);
        SolveRequest req;
        req.tolerance = cfg.tolerance;
        const auto report = spectrum_report(p, cfg.cutoff, cfg.num_states, req);
        detail::write_provenance(out, "spectrum", cfg, p);
        out << "# cutoff=" << std::to_string(cfg.cutoff) << "\n";
        out << "index,energy_mev,label,w_a2u,w_a1u,w_eu,r_dimensionless\n";
        for (std::size_t i = 0; i < report.states.size(); ++i) {
            const auto& s = report.states[i];
            out << std::to_string(i) << ',' << detail::format_double(s.energy) << ',' << label_name(s.label) << ','
                << detail::format_double(s.character.a2u) << ',' << detail::format_double(s.character.a1u) << ','
                << detail::format_double(s.character.eu()) << ',' << detail::format_double(s.distortion_r) << '\n';
            if (s.truncation_warning)
                err << "warning: state " << i << " has more than 1% weight in the top two Fock shells\n";
        }
        if (!report.delta)
            err << "warning: delta undefined (ground state is not a nondegenerate A2u level or no Eu doublet found)\n";
        out << "delta_mev=" << detail::format_double(report.delta.value_or(std::nan(""))) << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

/// CSV: x,e0_mev..e3_mev and the character of the lowest sheet.
inline int cmd_apes(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!std::isfinite(cfg.x_min) || !std::isfinite(cfg.x_max) || !std::isfinite(cfg.y))
            throw std::invalid_argument("scan range must be finite");
        if (cfg.points < 2)
            throw std::invalid_argument("--points must be >= 2");
        if (!(cfg.x_max > cfg.x_min))
            throw std::invalid_argument("--xmax must exceed --xmin");
        const PjtParams p = resolve_params(cfg);
        validate(p);
        std::vector<double> xs(static_cast<std::size_t>(cfg.points));
        const double step = (cfg.x_max - cfg.x_min) / (cfg.points - 1);
        for (int i = 0; i < cfg.points; ++i)
            xs[static_cast<std::size_t>(i)] = i == cfg.points - 1 ? cfg.x_max : cfg.x_min + i * step;
        const auto scan = apes_scan(p, xs, cfg.y);
        detail::write_provenance(out, "apes", cfg, p);
        out << "# y=" << detail::format_double(cfg.y) << "\n";
        out << "x,e0_mev,e1_mev,e2_mev,e3_mev,sheet0_w_a2u,sheet0_w_a1u,sheet0_w_eu\n";
        for (const auto& pt : scan) {
            out << detail::format_double(pt.point.x);
            for (int s = 0; s < 4; ++s)
                out << ',' << detail::format_double(pt.point.energies[s]);
            const auto& w = pt.sheets[0];
            out << ',' << detail::format_double(w.a2u) << ',' << detail::format_double(w.a1u) << ','
                << detail::format_double(w.eu()) << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

/// CSV: cutoff,e0_mev..e{k-1}_mev,delta_mev. A failing cutoff is reported
/// as a comment row and on `err`; the remaining cutoffs still run.
inline int cmd_converge(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    PjtParams p;
    try {
        if (cfg.cutoffs.size() < 2)
            throw std::invalid_argument("--cutoffs needs at least two values");
        for (std::size_t i = 0; i < cfg.cutoffs.size(); ++i) {
            if (cfg.cutoffs[i] < 1)
                throw std::invalid_argument("--cutoffs values must be >= 1");
            if (i > 0 && cfg.cutoffs[i] <= cfg.cutoffs[i - 1])
                throw std::invalid_argument("--cutoffs must be strictly ascending");
        }
        if (cfg.num_states < 1)
            throw std::invalid_argument("--states must be >= 1");
        p = resolve_params(cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    detail::write_provenance(out, "converge", cfg, p);
    out << "cutoff";
    for (int i = 0; i < cfg.num_states; ++i)
        out << ",e" << std::to_string(i) << "_mev";
    out << ",delta_mev\n";

    SolveRequest req;
    req.tolerance = cfg.tolerance;
    bool all_ok = true;
    std::optional<double> prev_e0;
    std::optional<double> last_diff;
    for (int cutoff : cfg.cutoffs) {
        try {
            const int dim = static_cast<int>(4 * FockBasis::dimension_for(cutoff));
            const auto report = spectrum_report(p, cutoff, std::min(cfg.num_states, dim), req);
            out << std::to_string(cutoff);
            for (int i = 0; i < cfg.num_states; ++i)
                out << ',' << (i < static_cast<int>(report.states.size())
                                   ? detail::format_double(report.states[static_cast<std::size_t>(i)].energy)
                                   : std::string("nan"));
            out << ',' << detail::format_double(report.delta.value_or(std::nan(""))) << '\n';
            const double e0 = report.states.front().energy;
            if (prev_e0)
                last_diff = std::abs(e0 - *prev_e0);
            prev_e0 = e0;
        } catch (const std::exception& e) {
            all_ok = false;
            out << "# cutoff=" << std::to_string(cutoff) << " failed: " << e.what() << '\n';
            err << "error: cutoff " << cutoff << ": " << e.what() << '\n';
        }
    }
    out << "# converged=" << (last_diff && *last_diff < cfg.converge_threshold ? "yes" : "no")
        << " threshold_mev=" << detail::format_double(cfg.converge_threshold) << '\n';
    return all_ok ? 0 : 1;
}

}  // namespace pjt
