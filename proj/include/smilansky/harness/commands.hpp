#pragma once

// Subcommands of the `smilansky` tool. Each returns the process exit code:
//   0 ok, 1 selfcheck failure, 2 not converged, 3 invalid configuration,
//   4 oracle bracket violated, 5 internal consistency failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "../counting.hpp"
#include "../parallel.hpp"
#include "../secular.hpp"
#include "cache.hpp"
#include "checks.hpp"
#include "config.hpp"
#include "report.hpp"

namespace smilansky::harness {

enum ExitCode : int {
    exit_ok = 0,
    exit_selfcheck_failed = 1,
    exit_not_converged = 2,
    exit_invalid_config = 3,
    exit_bracket_failed = 4,
    exit_inconsistent = 5,
};

struct CommandContext {
    std::optional<std::string> out_dir; // --out
    std::optional<int> threads;         // --threads
    bool no_cache = false;              // --no-cache
    std::ostream* out = &std::cout;
    std::ostream* err = &std::cerr;
};

/// --out, then $OUTPUT_DIR, then [output] directory, then "out".
inline std::filesystem::path resolve_output_dir(const RunConfig& cfg, const CommandContext& ctx) {
    if (ctx.out_dir)
        return *ctx.out_dir;
    if (const char* env = std::getenv("OUTPUT_DIR"); env && *env)
        return env;
    if (cfg.output_directory)
        return *cfg.output_directory;
    return "out";
}

inline ReportCache make_cache(const RunConfig& cfg, const CommandContext& ctx) {
    return ReportCache(resolve_output_dir(cfg, ctx) / "cache", cfg.cache && !ctx.no_cache, *ctx.err);
}

inline CountReport cached_count(const ModelParams& p, const RunConfig& cfg, const ReportCache& cache,
                                bool* hit = nullptr) {
    const auto key = sha256_hex(count_cache_material(p, cfg.schedule, cfg.solver, cfg.target));
    if (auto r = cache.lookup(key)) {
        if (hit)
            *hit = true;
        return *r;
    }
    if (hit)
        *hit = false;
    auto r = converge_in_truncation(p, cfg.schedule, cfg.solver, cfg.target);
    cache.store(key, r);
    return r;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline void print_report(std::ostream& os, const CountReport& r) {
    os << "count               " << r.count << " (" << name_of(r.target) << ", " << name_of(r.scheme) << ")\n";
    os << "L_used              " << r.L_used << " (dimension " << r.dimension << ")\n";
    os << "converged           " << (r.converged ? "yes" : "no") << (r.ambiguous ? " (boundary-ambiguous)" : "")
       << '\n';
    os << "stall evidence     ";
    for (const auto c : r.stall_evidence)
        os << ' ' << c;
    os << '\n';
    os << "prediction          " << fmt17(r.prediction) << '\n';
    os << "ratio               " << (std::isnan(r.ratio) ? std::string("n/a") : fmt17(r.ratio)) << '\n';
    os << "extremal eigenvalue "
       << (std::isnan(r.extremal_eigenvalue) ? std::string("n/a") : fmt17(r.extremal_eigenvalue)) << '\n';
    os << "trace              ";
    for (const auto& t : r.trace)
        os << ' ' << t.L << ':' << t.count;
    os << '\n';
}

inline const ModelParams& require_model(const RunConfig& cfg) {
    if (!cfg.model)
        throw ConfigError("section [model] needs alpha_plus/alpha_minus or eta_plus/eta_minus");
    return *cfg.model;
}

inline void require_counting_params(const ModelParams& p) {
    try {
        require_subcritical(p);
    } catch (const SupercriticalError& e) {
        throw ConfigError(std::string("keys 'model.alpha_plus'/'model.alpha_minus': ") + e.what());
    }
}

inline int cmd_count(const RunConfig& cfg, const CommandContext& ctx) {
    const auto& p = require_model(cfg);
    require_counting_params(p);
    const auto cache = make_cache(cfg, ctx);
    bool hit = false;
    const auto r = cached_count(p, cfg, cache, &hit);
    print_report(*ctx.out, r);
    if (hit)
        *ctx.out << "(cached)\n";
    if (cfg.write_json)
        write_text(resolve_output_dir(cfg, ctx) / "count.json", to_json(r).dump(2) + "\n");
    return r.converged ? exit_ok : exit_not_converged;
}

/// Oracle crossing count for a converged main report (origin reinstated, same L).
inline EnergyScan oracle_scan(const ModelParams& p, const RunConfig& cfg, int L, int threads, int top_k) {
    const auto trunc = counting_truncation(cfg.schedule.scheme, L, CountTarget::full);
    ScanOptions so;
    so.tolerance = cfg.oracle.tolerance;
    so.threads = threads;
    so.top_k = top_k;
    so.counting = cfg.solver.counting;
    return scan_and_refine(p, trunc, default_lambda_grid(p.threshold(), cfg.solver.margin, cfg.oracle.points,
                                                         cfg.oracle.depth),
                           so, cfg.solver.margin);
}

inline SweepRecord sweep_point(const EtaPoint& e, const RunConfig& cfg, const ReportCache& cache) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.eta_plus = e.eta_plus;
    rec.eta_minus = e.eta_minus;
    try {
        const auto p = ModelParams::from_eta(e.eta_plus, e.eta_minus, cfg.nu_plus, cfg.nu_minus);
        const auto c = mu_eta(p);
        rec.mu_plus = c.mu_plus;
        rec.mu_minus = c.mu_minus;
        rec.prediction = asymptotic_prediction(p);
        const auto r = cached_count(p, cfg, cache);
        rec.L_used = r.L_used;
        rec.dim = r.dimension;
        rec.count = r.count;
        rec.ratio = r.ratio;
        rec.converged = r.converged;
        rec.report = r;
        if (cfg.sweep->oracle) {
            const auto scan = oracle_scan(p, cfg, r.L_used, 1, 0);
            rec.oracle_count = scan.oracle_count();
            rec.oracle_gap = scan.oracle_count() - r.count;
        }
    } catch (const std::exception& ex) {
        rec.converged = false;
        rec.error = ex.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

inline std::vector<SweepRecord> run_sweep(const RunConfig& cfg, const CommandContext& ctx) {
    if (!cfg.sweep)
        throw ConfigError("section [sweep] is required for the sweep command");
    const auto cache = make_cache(cfg, ctx);
    int threads = ctx.threads.value_or(cfg.sweep->threads);
    if (threads <= 0)
        threads = hardware_threads();
    const auto& points = cfg.sweep->points;
    std::vector<SweepRecord> records(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) { records[i] = sweep_point(points[i], cfg, cache); });
    return records;
}

inline int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx) {
    const auto records = run_sweep(cfg, ctx);
    const auto dir = resolve_output_dir(cfg, ctx);
    if (cfg.write_csv) {
        std::ostringstream csv;
        write_csv(csv, records);
        write_text(dir / "sweep.csv", csv.str());
    }
    if (cfg.write_json) {
        json arr = json::array();
        for (const auto& r : records)
            arr.push_back(to_json(r));
        write_text(dir / "sweep.json", arr.dump(2) + "\n");
    }
    auto& os = *ctx.out;
    os << "eta_plus eta_minus count prediction ratio L_used converged\n";
    for (const auto& r : records) {
        os << fmt17(r.eta_plus) << ' ' << fmt17(r.eta_minus) << ' ' << r.count << ' ' << fmt17(r.prediction) << ' '
           << (std::isnan(r.ratio) ? std::string("n/a") : fmt17(r.ratio)) << ' ' << r.L_used << ' '
           << (r.converged ? "yes" : "no");
        if (r.oracle_count)
            os << " oracle=" << *r.oracle_count;
        if (r.error)
            os << " error: " << *r.error;
        os << '\n';
    }
    return exit_ok;
}

struct OracleOutcome {
    CountReport main;
    EnergyScan scan;
    std::vector<ResidualReport> residuals;
    std::int64_t gap = 0;
    std::int64_t slack = 0; // eigenvalues possibly hiding in the last grid cell / margin window
    bool bracket_ok = false;
    bool residuals_ok = true;
};

inline constexpr double residual_limit = 1e-7;

inline OracleOutcome run_oracle(const RunConfig& cfg, const CommandContext& ctx) {
    const auto& p = require_model(cfg);
    require_counting_params(p);
    const auto cache = make_cache(cfg, ctx);
    OracleOutcome o;
    o.main = cached_count(p, cfg, cache);
    o.scan = oracle_scan(p, cfg, o.main.L_used, ctx.threads.value_or(cfg.oracle.threads), 3);
    const auto& counts = o.scan.counts;
    o.slack = counts.size() >= 2 ? counts[counts.size() - 1] - counts[counts.size() - 2] : 0;
    o.gap = o.scan.oracle_count() - o.main.count;
    o.bracket_ok = std::abs(o.gap) <= 2 + o.slack;
    if (cfg.oracle.residuals) {
        const auto trunc = counting_truncation(cfg.schedule.scheme, o.main.L_used, CountTarget::full);
        for (const auto& c : o.scan.crossings) {
            o.residuals.push_back(residual_check(p, trunc, c.lambda));
            const auto& r = o.residuals.back();
            if (r.isolated && !(r.max_residual <= residual_limit))
                o.residuals_ok = false;
        }
    }
    return o;
}

inline int cmd_oracle(const RunConfig& cfg, const CommandContext& ctx) {
    const auto o = run_oracle(cfg, ctx);
    const bool pass = o.bracket_ok && o.residuals_ok;
    auto& os = *ctx.out;
    os << "main count     " << o.main.count << " (" << name_of(o.main.target) << ", L=" << o.main.L_used
       << (o.main.converged ? ", converged" : ", NOT converged") << ")\n";
    os << "oracle count   " << o.scan.oracle_count() << " (" << o.scan.crossings_found() << " crossings, "
       << o.scan.count_below_grid() << " below the grid)\n";
    for (std::size_t i = 0; i < o.scan.crossings.size(); ++i) {
        os << "  lambda_" << i << " = " << fmt17(o.scan.crossings[i].lambda);
        if (i < o.residuals.size())
            os << "  residual " << sci(o.residuals[i].max_residual)
               << (o.residuals[i].isolated ? "" : " (null vector not isolated)");
        os << '\n';
    }
    for (const auto& a : o.scan.anomalies)
        os << "  anomaly: " << a << '\n';
    os << "gap            " << o.gap << " (allowed 2 + " << o.slack << ")\n";
    os << (pass ? "PASS" : "FAIL") << '\n';

    if (cfg.write_json) {
        json res = json::array();
        for (const auto& r : o.residuals)
            res.push_back({{"max_residual", number_or_null(r.max_residual)},
                           {"residual_plus", r.max_residual_plus},
                           {"residual_minus", r.max_residual_minus},
                           {"isolated", r.isolated},
                           {"smallest", r.smallest},
                           {"second", number_or_null(r.second)},
                           {"channels_checked", r.channels_checked}});
        const json j{{"main", to_json(o.main)},
                     {"scan", to_json(o.scan)},
                     {"residuals", res},
                     {"bracket",
                      {{"main_count", o.main.count},
                       {"oracle_count", o.scan.oracle_count()},
                       {"gap", o.gap},
                       {"slack", o.slack},
                       {"pass", o.bracket_ok}}},
                     {"residuals_pass", o.residuals_ok},
                     {"pass", pass}};
        write_text(resolve_output_dir(cfg, ctx) / "oracle.json", j.dump(2) + "\n");
    }
    if (!pass)
        return exit_bracket_failed;
    return o.main.converged ? exit_ok : exit_not_converged;
}

inline std::vector<CheckResult> selfcheck_results() {
    return {check_trial_function(20), check_shift_constant(2000), check_fk(20000), check_trace_inequality(20000)};
}

inline int cmd_selfcheck(const CommandContext& ctx) {
    bool all = true;
    for (const auto& c : selfcheck_results()) {
        *ctx.out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
    }
    return all ? exit_ok : exit_selfcheck_failed;
}

/// Loads the configuration and dispatches; maps error classes to exit codes.
inline int run_command(const std::string& name, const std::optional<std::string>& config_path,
                       const CommandContext& ctx) {
    try {
        if (name == "selfcheck")
            return cmd_selfcheck(ctx);
        if (!config_path)
            throw ConfigError("--config is required for '" + name + "'");
        const auto cfg = load_config(*config_path);
        if (name == "count")
            return cmd_count(cfg, ctx);
        if (name == "sweep")
            return cmd_sweep(cfg, ctx);
        if (name == "oracle")
            return cmd_oracle(cfg, ctx);
        throw ConfigError("unknown command '" + name + "'");
    } catch (const ConfigError& e) {
        *ctx.err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    } catch (const DomainError& e) {
        *ctx.err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    } catch (const MonotonicityError& e) {
        *ctx.err << "error: " << e.what() << '\n';
        return exit_inconsistent;
    }
}

} // namespace smilansky::harness
