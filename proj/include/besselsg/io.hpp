#pragma once

// CSV tables, grid-function files, grid specs given on the command line, and
// the JSON run configuration.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "besselsg/error.hpp"
#include "besselsg/grid_function.hpp"
#include "besselsg/measure.hpp"
#include "besselsg/semigroup.hpp"
#include "besselsg/time_grid.hpp"

namespace besselsg {

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "BESSELSG_OUTPUT_DIR";

inline std::filesystem::path default_output_dir() {
    const char* v = std::getenv(output_dir_env);
    return v && *v ? std::filesystem::path(v) : std::filesystem::current_path();
}

/// Round-trip formatting: 17 significant digits.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const CsvTable& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_csv(os, t);
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::optional<double> parse_number(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// Numeric CSV. A first line that does not parse as numbers is the header;
/// blank lines and lines starting with '#' are skipped.
inline CsvTable read_csv(std::istream& is, const std::string& name = "<csv>") {
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto cells = detail::split(s, ',');
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            const auto v = detail::parse_number(c);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (t.header.empty() && t.rows.empty()) {
                for (const auto& c : cells) t.header.push_back(detail::trim(c));
                continue;
            }
            throw invalid_argument(name + ":" + std::to_string(lineno) + ": non-numeric cell");
        }
        if (!t.rows.empty() && row.size() != t.rows.front().size())
            throw invalid_argument(name + ":" + std::to_string(lineno) + ": expected " +
                                   std::to_string(t.rows.front().size()) + " columns");
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw invalid_argument("cannot open " + path.string());
    return read_csv(is, path.string());
}

inline Extension parse_extension(const std::string& s) {
    if (s == "zero") return Extension::zero;
    if (s == "constant") return Extension::constant;
    if (s == "log-linear" || s == "log_linear") return Extension::log_linear;
    if (s == "none") return Extension::none;
    throw invalid_argument("unknown extension '" + s + "' (expected zero, constant, log-linear or none)");
}

/// Grid function from a (node, value) CSV; repeated nodes encode jumps.
inline GridFunction read_grid_function(const MeasureContext& ctx, const std::filesystem::path& path,
                                       Extension left = Extension::constant, Extension right = Extension::zero) {
    const auto t = read_csv(path);
    if (t.rows.empty()) throw invalid_argument(path.string() + ": no data rows");
    if (t.rows.front().size() < 2) throw invalid_argument(path.string() + ": need node and value columns");
    std::vector<double> y, v;
    for (const auto& r : t.rows) {
        y.push_back(r[0]);
        v.push_back(r[1]);
    }
    return GridFunction(Grid(ctx, std::move(y)), std::move(v), path.stem().string(), left, right);
}

inline CsvTable grid_function_table(const GridFunction& f, const std::string& value_name = "value") {
    CsvTable t{{"node", value_name}, {}};
    for (std::size_t i = 0; i < f.grid().size(); ++i) t.rows.push_back({f.grid().nodes()[i], f.values()[i]});
    return t;
}

/// Point sets given on the command line: "log:lo:hi:n", "linear:lo:hi:n" or
/// an explicit comma list "0.5,1,2".
inline std::vector<double> parse_points(const std::string& spec) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "linear")) {
        const auto lo = detail::parse_number(parts[1]), hi = detail::parse_number(parts[2]);
        const auto n = detail::parse_number(parts[3]);
        if (!lo || !hi || !n || !(*n >= 1) || *n != std::floor(*n) || !(*hi >= *lo) || !(*lo > 0.0))
            throw invalid_argument("bad point spec '" + spec + "'");
        const int k = static_cast<int>(*n);
        std::vector<double> out;
        for (int i = 0; i < k; ++i) {
            const double s = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
            out.push_back(parts[0] == "log" ? *lo * std::pow(*hi / *lo, s) : *lo + (*hi - *lo) * s);
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& c : detail::split(spec, ',')) {
        const auto v = detail::parse_number(c);
        if (!v) throw invalid_argument("bad point spec '" + spec + "' (expected log:lo:hi:n, linear:lo:hi:n or a list)");
        out.push_back(*v);
    }
    if (out.empty()) throw invalid_argument("empty point spec");
    return out;
}

// ---------------------------------------------------------------- run config

struct TimeGridConfig {
    double t_max = 64.0;
    int slots = 16;
    int refine = 4;
    TimeGrid make() const { return TimeGrid::dyadic(t_max, slots, refine); }
};

struct RunConfig {
    std::vector<double> lambdas;              // empty: each experiment uses its own set
    SemigroupKind kind = SemigroupKind::poisson;
    double rho = 3.0;
    std::optional<TimeGridConfig> time_grid;  // overrides the per-experiment default
    double kernel_tolerance = 1e-10;
    double apply_tolerance = 1e-10;
    std::vector<std::string> experiments;     // empty or {"all"}: every experiment
    std::uint64_t seed = 20240611;
    std::filesystem::path output_dir;
    int workers = 1;
    bool write_files = true;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

template <class T>
T get_field(const nlohmann::json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(field, std::string("wrong type (") + j.type_name() + ")");
    }
}

inline double positive(const nlohmann::json& j, const std::string& field) {
    const double v = get_field<double>(j, field);
    if (!(v > 0.0) || !std::isfinite(v)) throw config_error(field, "must be a positive number");
    return v;
}

}  // namespace detail

/// Parses and validates a JSON run configuration. Unknown keys are errors.
inline RunConfig parse_run_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("<document>", "line " + std::to_string(detail::line_of_offset(text, e.byte)) + ": " +
                                             e.what());
    }
    if (!j.is_object()) throw config_error("<document>", "top level must be an object");
    RunConfig c;
    c.output_dir = default_output_dir();
    for (const auto& [key, v] : j.items()) {
        if (key == "lambda") {
            if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i)
                    c.lambdas.push_back(detail::positive(v[i], "lambda[" + std::to_string(i) + "]"));
            } else {
                c.lambdas.push_back(detail::positive(v, key));
            }
        } else if (key == "kind") {
            try {
                c.kind = parse_semigroup_kind(detail::get_field<std::string>(v, key));
            } catch (const invalid_argument& e) {
                throw config_error(key, e.what());
            }
        } else if (key == "rho") {
            c.rho = detail::get_field<double>(v, key);
            if (!(c.rho > 2.0)) throw config_error(key, "must exceed 2");
        } else if (key == "time_grid") {
            if (!v.is_object()) throw config_error(key, "must be an object");
            TimeGridConfig tg;
            for (const auto& [k2, v2] : v.items()) {
                const std::string f = key + "." + k2;
                if (k2 == "t_max") tg.t_max = detail::positive(v2, f);
                else if (k2 == "slots") tg.slots = detail::get_field<int>(v2, f);
                else if (k2 == "refine") tg.refine = detail::get_field<int>(v2, f);
                else throw config_error(f, "unknown key");
            }
            if (tg.slots < 1) throw config_error(key + ".slots", "must be at least 1");
            if (tg.refine < 2) throw config_error(key + ".refine", "must be at least 2");
            c.time_grid = tg;
        } else if (key == "tolerances") {
            if (!v.is_object()) throw config_error(key, "must be an object");
            for (const auto& [k2, v2] : v.items()) {
                const std::string f = key + "." + k2;
                if (k2 == "kernel") c.kernel_tolerance = detail::positive(v2, f);
                else if (k2 == "apply") c.apply_tolerance = detail::positive(v2, f);
                else throw config_error(f, "unknown key");
            }
        } else if (key == "experiments") {
            if (!v.is_array()) throw config_error(key, "must be an array of names");
            for (std::size_t i = 0; i < v.size(); ++i)
                c.experiments.push_back(detail::get_field<std::string>(v[i], key + "[" + std::to_string(i) + "]"));
        } else if (key == "seed") {
            c.seed = detail::get_field<std::uint64_t>(v, key);
        } else if (key == "output_dir") {
            c.output_dir = detail::get_field<std::string>(v, key);
        } else if (key == "workers") {
            c.workers = detail::get_field<int>(v, key);
            if (c.workers < 1) throw config_error(key, "must be at least 1");
        } else if (key == "write_files") {
            c.write_files = detail::get_field<bool>(v, key);
        } else {
            throw config_error(key, "unknown key");
        }
    }
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw config_error("<file>", "cannot open " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace besselsg
