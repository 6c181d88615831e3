#pragma once

// Run configuration: INI-style sections parsed with Boost.PropertyTree.
// Unknown sections/keys are rejected so that typos cannot silently fall back
// to defaults. See README for the grammar.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "../counting.hpp"
#include "../inertia.hpp"
#include "../model.hpp"

namespace smilansky::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepPath { list, diagonal, fixed_minus };

struct EtaPoint {
    double eta_plus = 0.0;
    double eta_minus = 0.0;
};

struct SweepConfig {
    SweepPath path = SweepPath::list;
    std::vector<EtaPoint> points; // expanded from the path
    bool oracle = false;
    int threads = 0; // 0: hardware concurrency
};

struct OracleConfig {
    int points = 64;
    double depth = 5.0;
    double tolerance = 0.0; // 0: 1e-10 r00
    bool residuals = true;
    int threads = 1;
};

struct RunConfig {
    std::optional<ModelParams> model; // absent only for sweep-only configs
    double nu_plus = 1.0;
    double nu_minus = 1.0;
    Schedule schedule{};
    CountTarget target = CountTarget::reduced;
    SolverSettings solver{};
    std::optional<SweepConfig> sweep;
    OracleConfig oracle{};
    std::optional<std::string> output_directory;
    bool write_csv = true;
    bool write_json = true;
    bool cache = true;
};

namespace detail {

inline const std::set<std::string>& allowed_keys(const std::string& section) {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model", {"alpha_plus", "alpha_minus", "nu_plus", "nu_minus", "eta_plus", "eta_minus"}},
        {"truncation", {"scheme", "L0", "growth", "stall_window", "cap", "target"}},
        {"solver", {"method", "pivot_tol", "margin", "dense_limit", "lanczos_steps", "lanczos_max_dim"}},
        {"sweep", {"path", "etas", "eta_minus", "points", "oracle", "threads"}},
        {"oracle", {"points", "depth", "tolerance", "residuals", "threads"}},
        {"output", {"directory", "formats", "cache"}},
    };
    const auto it = keys.find(section);
    if (it == keys.end())
        throw ConfigError("unknown section [" + section + "]");
    return it->second;
}

inline double parse_double(const std::string& key, std::string v) {
    boost::algorithm::trim(v);
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
        throw ConfigError("key '" + key + "': expected a finite number, got '" + v + "'");
    return out;
}

inline int parse_int(const std::string& key, std::string v) {
    boost::algorithm::trim(v);
    int out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != end)
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, std::string v) {
    boost::algorithm::trim(v);
    boost::algorithm::to_lower(v);
    if (v == "true" || v == "yes" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
        return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::vector<std::string> parts;
    boost::algorithm::split(parts, v, boost::is_any_of(","));
    for (auto& p : parts) {
        boost::algorithm::trim(p);
        if (!p.empty())
            out.push_back(parse_double(key, p));
    }
    return out;
}

class Section {
public:
    Section(const boost::property_tree::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }
    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    std::optional<std::string> text(const std::string& key) const {
        if (!has(key))
            return std::nullopt;
        return tree_->get<std::string>(key);
    }
    std::optional<double> number(const std::string& key) const {
        const auto t = text(key);
        return t ? std::optional(parse_double(qualified(key), *t)) : std::nullopt;
    }
    std::optional<int> integer(const std::string& key) const {
        const auto t = text(key);
        return t ? std::optional(parse_int(qualified(key), *t)) : std::nullopt;
    }
    std::optional<bool> flag(const std::string& key) const {
        const auto t = text(key);
        return t ? std::optional(parse_bool(qualified(key), *t)) : std::nullopt;
    }
    double positive(const std::string& key, double fallback) const {
        const double v = number(key).value_or(fallback);
        if (!(v > 0.0))
            throw ConfigError("key '" + qualified(key) + "' must be positive");
        return v;
    }

private:
    const boost::property_tree::ptree* tree_;
    std::string name_;
};

inline Section section(const boost::property_tree::ptree& root, const std::string& name) {
    const auto it = root.find(name);
    return {it == root.not_found() ? nullptr : &it->second, name};
}

inline CountMethod parse_method(const std::string& v) {
    if (v == "auto")
        return CountMethod::automatic;
    if (v == "sturm")
        return CountMethod::sturm;
    if (v == "sparse_ldlt")
        return CountMethod::sparse_ldlt;
    if (v == "dense")
        return CountMethod::dense;
    throw ConfigError("key 'solver.method': expected auto, sturm, sparse_ldlt or dense, got '" + v + "'");
}

} // namespace detail

inline RunConfig parse_config(std::istream& in) {
    boost::property_tree::ptree root;
    try {
        boost::property_tree::ini_parser::read_ini(in, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    for (const auto& [name, body] : root) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + name + "' appears outside any section");
        const auto& allowed = detail::allowed_keys(name);
        for (const auto& [key, value] : body)
            if (!allowed.count(key))
                throw ConfigError("unknown key '" + name + "." + key + "'");
    }

    RunConfig cfg;
    const auto model = detail::section(root, "model");
    cfg.nu_plus = model.positive("nu_plus", 1.0);
    cfg.nu_minus = model.positive("nu_minus", 1.0);
    const bool alpha_form = model.has("alpha_plus") || model.has("alpha_minus");
    const bool eta_form = model.has("eta_plus") || model.has("eta_minus");
    if (alpha_form && eta_form)
        throw ConfigError("section [model] mixes the alpha form and the eta form; give exactly one");
    if (alpha_form) {
        for (const char* k : {"alpha_plus", "alpha_minus"})
            if (!model.has(k))
                throw ConfigError(std::string("key 'model.") + k + "' is missing (alpha form needs both)");
        const double ap = *model.number("alpha_plus");
        const double am = *model.number("alpha_minus");
        if (ap < 0.0 || am < 0.0)
            throw ConfigError(std::string("key 'model.") + (ap < 0.0 ? "alpha_plus" : "alpha_minus") +
                              "' must be non-negative");
        cfg.model = ModelParams{ap, am, cfg.nu_plus, cfg.nu_minus};
    } else if (eta_form) {
        for (const char* k : {"eta_plus", "eta_minus"})
            if (!model.has(k))
                throw ConfigError(std::string("key 'model.") + k + "' is missing (eta form needs both)");
        const double ep = *model.number("eta_plus");
        const double em = *model.number("eta_minus");
        for (const auto& [k, v] : {std::pair{"eta_plus", ep}, std::pair{"eta_minus", em}})
            if (!(v > 0.0))
                throw ConfigError(std::string("key 'model.") + k + "' must be positive (mu = 1 + eta > 1)");
        cfg.model = ModelParams::from_eta(ep, em, cfg.nu_plus, cfg.nu_minus);
    }

    const auto trunc = detail::section(root, "truncation");
    if (const auto s = trunc.text("scheme")) {
        if (*s == "simplex")
            cfg.schedule.scheme = Scheme::simplex;
        else if (*s == "rectangle")
            cfg.schedule.scheme = Scheme::rectangle;
        else
            throw ConfigError("key 'truncation.scheme': expected simplex or rectangle, got '" + *s + "'");
    }
    if (const auto t = trunc.text("target")) {
        if (*t == "reduced")
            cfg.target = CountTarget::reduced;
        else if (*t == "full")
            cfg.target = CountTarget::full;
        else
            throw ConfigError("key 'truncation.target': expected reduced or full, got '" + *t + "'");
    }
    cfg.schedule.L0 = trunc.integer("L0").value_or(cfg.schedule.L0);
    cfg.schedule.growth = trunc.number("growth").value_or(cfg.schedule.growth);
    cfg.schedule.stall_window = trunc.integer("stall_window").value_or(cfg.schedule.stall_window);
    cfg.schedule.cap = trunc.integer("cap").value_or(cfg.schedule.cap);
    if (cfg.schedule.L0 < 1)
        throw ConfigError("key 'truncation.L0' must be >= 1");
    if (!(cfg.schedule.growth > 1.0))
        throw ConfigError("key 'truncation.growth' must be > 1");
    if (cfg.schedule.stall_window < 1)
        throw ConfigError("key 'truncation.stall_window' must be >= 1");
    if (cfg.schedule.cap < cfg.schedule.L0)
        throw ConfigError("key 'truncation.cap' must be >= L0");

    const auto solver = detail::section(root, "solver");
    if (const auto m = solver.text("method"))
        cfg.solver.counting.method = detail::parse_method(*m);
    cfg.solver.counting.pivot_tol = solver.positive("pivot_tol", cfg.solver.counting.pivot_tol);
    cfg.solver.margin = solver.positive("margin", cfg.solver.margin);
    if (!(cfg.solver.margin < 1.0))
        throw ConfigError("key 'solver.margin' must be < 1");
    cfg.solver.counting.dense_limit = solver.integer("dense_limit").value_or(
        static_cast<int>(cfg.solver.counting.dense_limit));
    cfg.solver.lanczos_steps = solver.integer("lanczos_steps").value_or(cfg.solver.lanczos_steps);
    cfg.solver.lanczos_max_dim = solver.integer("lanczos_max_dim").value_or(
        static_cast<int>(cfg.solver.lanczos_max_dim));
    if (cfg.solver.lanczos_steps < 0)
        throw ConfigError("key 'solver.lanczos_steps' must be >= 0");

    const auto sweep = detail::section(root, "sweep");
    if (root.find("sweep") != root.not_found()) {
        SweepConfig sc;
        const std::string path = sweep.text("path").value_or("list");
        if (path == "list") {
            sc.path = SweepPath::list;
            std::vector<std::string> pairs;
            const std::string raw = sweep.text("points").value_or("");
            boost::algorithm::split(pairs, raw, boost::is_any_of(";"));
            for (auto& p : pairs) {
                boost::algorithm::trim(p);
                if (p.empty())
                    continue;
                std::vector<std::string> ab;
                boost::algorithm::split(ab, p, boost::is_any_of(":"));
                if (ab.size() != 2)
                    throw ConfigError("key 'sweep.points': expected 'eta_plus:eta_minus' pairs separated by ';'");
                sc.points.push_back({detail::parse_double("sweep.points", ab[0]),
                                     detail::parse_double("sweep.points", ab[1])});
            }
        } else if (path == "diagonal" || path == "fixed_minus") {
            sc.path = path == "diagonal" ? SweepPath::diagonal : SweepPath::fixed_minus;
            const auto etas = detail::parse_list("sweep.etas", sweep.text("etas").value_or(""));
            std::optional<double> fixed;
            if (sc.path == SweepPath::fixed_minus) {
                fixed = sweep.number("eta_minus");
                if (!fixed)
                    throw ConfigError("key 'sweep.eta_minus' is required for path = fixed_minus");
            }
            for (const double e : etas)
                sc.points.push_back({e, fixed.value_or(e)});
        } else {
            throw ConfigError("key 'sweep.path': expected list, diagonal or fixed_minus, got '" + path + "'");
        }
        for (const auto& p : sc.points)
            if (!(p.eta_plus > 0.0) || !(p.eta_minus > 0.0))
                throw ConfigError("sweep points need positive eta values (key 'sweep." +
                                  std::string(sc.path == SweepPath::list ? "points" : "etas") + "')");
        sc.oracle = sweep.flag("oracle").value_or(false);
        sc.threads = sweep.integer("threads").value_or(0);
        if (sc.threads < 0)
            throw ConfigError("key 'sweep.threads' must be >= 0");
        cfg.sweep = sc;
    }

    const auto oracle = detail::section(root, "oracle");
    cfg.oracle.points = oracle.integer("points").value_or(cfg.oracle.points);
    if (cfg.oracle.points < 2)
        throw ConfigError("key 'oracle.points' must be >= 2");
    cfg.oracle.depth = oracle.positive("depth", cfg.oracle.depth);
    cfg.oracle.tolerance = oracle.number("tolerance").value_or(0.0);
    if (cfg.oracle.tolerance < 0.0)
        throw ConfigError("key 'oracle.tolerance' must be >= 0 (0 selects the default)");
    cfg.oracle.residuals = oracle.flag("residuals").value_or(true);
    cfg.oracle.threads = oracle.integer("threads").value_or(1);
    if (cfg.oracle.threads < 1)
        throw ConfigError("key 'oracle.threads' must be >= 1");

    const auto output = detail::section(root, "output");
    cfg.output_directory = output.text("directory");
    if (const auto f = output.text("formats")) {
        std::vector<std::string> parts;
        boost::algorithm::split(parts, *f, boost::is_any_of(","));
        cfg.write_csv = cfg.write_json = false;
        for (auto& p : parts) {
            boost::algorithm::trim(p);
            if (p == "csv")
                cfg.write_csv = true;
            else if (p == "json")
                cfg.write_json = true;
            else if (!p.empty())
                throw ConfigError("key 'output.formats': unknown format '" + p + "'");
        }
    }
    cfg.cache = output.flag("cache").value_or(true);
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file '" + path + "'");
    return parse_config(in);
}

} // namespace smilansky::harness
