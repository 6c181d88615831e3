#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../counting.hpp"
#include "../secular.hpp"

namespace smilansky::harness {

using nlohmann::json;

/// Non-finite values are written as null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json params_json(const ModelParams& p) {
    const auto c = mu_eta(p);
    return {{"alpha_plus", p.alpha_plus},   {"alpha_minus", p.alpha_minus},
            {"nu_plus", p.nu_plus},         {"nu_minus", p.nu_minus},
            {"mu_plus", number_or_null(c.mu_plus)},   {"mu_minus", number_or_null(c.mu_minus)},
            {"eta_plus", number_or_null(c.eta_plus)}, {"eta_minus", number_or_null(c.eta_minus)}};
}

inline json to_json(const CountReport& r) {
    json trace = json::array();
    for (const auto& t : r.trace)
        trace.push_back({{"L", t.L}, {"dimension", t.dimension}, {"count", t.count}, {"ambiguous", t.ambiguous}});
    return {{"target", name_of(r.target)},
            {"params", params_json(r.params)},
            {"scheme", name_of(r.scheme)},
            {"energy", r.energy},
            {"count", r.count},
            {"L_used", r.L_used},
            {"dimension", r.dimension},
            {"converged", r.converged},
            {"ambiguous", r.ambiguous},
            {"prediction", r.prediction},
            {"ratio", number_or_null(r.ratio)},
            {"extremal_eigenvalue", number_or_null(r.extremal_eigenvalue)},
            {"stall_evidence", r.stall_evidence},
            {"trace", trace}};
}

inline double double_or_nan(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

/// Inverse of to_json; throws nlohmann exceptions on malformed input.
inline CountReport count_report_from_json(const json& j) {
    CountReport r;
    r.target = j.at("target").get<std::string>() == "full" ? CountTarget::full : CountTarget::reduced;
    const auto& p = j.at("params");
    r.params = {p.at("alpha_plus").get<double>(), p.at("alpha_minus").get<double>(), p.at("nu_plus").get<double>(),
                p.at("nu_minus").get<double>()};
    r.scheme = j.at("scheme").get<std::string>() == "rectangle" ? Scheme::rectangle : Scheme::simplex;
    r.energy = j.at("energy").get<double>();
    r.count = j.at("count").get<std::int64_t>();
    r.L_used = j.at("L_used").get<int>();
    r.dimension = j.at("dimension").get<std::int64_t>();
    r.converged = j.at("converged").get<bool>();
    r.ambiguous = j.at("ambiguous").get<bool>();
    r.prediction = j.at("prediction").get<double>();
    r.ratio = double_or_nan(j.at("ratio"));
    r.extremal_eigenvalue = double_or_nan(j.at("extremal_eigenvalue"));
    r.stall_evidence = j.at("stall_evidence").get<std::vector<std::int64_t>>();
    for (const auto& t : j.at("trace"))
        r.trace.push_back({t.at("L").get<int>(), t.at("dimension").get<std::int64_t>(),
                           t.at("count").get<std::int64_t>(), t.at("ambiguous").get<bool>()});
    return r;
}

inline json to_json(const EnergyScan& s) {
    json grid = json::array();
    for (std::size_t i = 0; i < s.lambda_grid.size(); ++i) {
        const auto& top = s.top_eigenvalues[i];
        grid.push_back({{"lambda", s.lambda_grid[i]},
                        {"count", s.counts[i]},
                        {"top_eigenvalue", top.empty() ? json(nullptr) : json(top.front())},
                        {"top_eigenvalues", top}});
    }
    json crossings = json::array();
    for (const auto& c : s.crossings)
        crossings.push_back(
            {{"lambda", c.lambda}, {"lower", c.lower}, {"upper", c.upper}, {"multiplicity", c.multiplicity}});
    return {{"grid", grid},
            {"crossings", crossings},
            {"anomalies", s.anomalies},
            {"tolerance", s.tolerance},
            {"count_below_grid", s.count_below_grid()},
            {"oracle_count", s.oracle_count()}};
}

struct SweepRecord {
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    int L_used = 0;
    std::int64_t dim = 0;
    std::int64_t count = 0;
    double prediction = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::optional<std::int64_t> oracle_count;
    std::optional<std::int64_t> oracle_gap;
    double wall_seconds = 0.0;
    std::optional<std::string> error;
    std::optional<CountReport> report;
};

inline const char* sweep_csv_header() {
    return "eta_plus,eta_minus,mu_plus,mu_minus,L_used,dim,count,prediction,ratio,converged,oracle_count,oracle_gap,"
           "wall_seconds";
}

inline std::string csv_row(const SweepRecord& r) {
    auto num = [](double v) { return std::isnan(v) ? std::string() : fmt17(v); };
    auto opt = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); };
    std::string s;
    s += fmt17(r.eta_plus) + ',' + fmt17(r.eta_minus) + ',' + fmt17(r.mu_plus) + ',' + fmt17(r.mu_minus) + ',';
    s += std::to_string(r.L_used) + ',' + std::to_string(r.dim) + ',' + std::to_string(r.count) + ',';
    s += num(r.prediction) + ',' + num(r.ratio) + ',' + (r.converged ? "true" : "false") + ',';
    s += opt(r.oracle_count) + ',' + opt(r.oracle_gap) + ',' + fmt17(r.wall_seconds);
    return s;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << sweep_csv_header() << '\n';
    for (const auto& r : records)
        os << csv_row(r) << '\n';
}

inline json to_json(const SweepRecord& r) {
    json j{{"eta_plus", r.eta_plus},
           {"eta_minus", r.eta_minus},
           {"mu_plus", r.mu_plus},
           {"mu_minus", r.mu_minus},
           {"L_used", r.L_used},
           {"dim", r.dim},
           {"count", r.count},
           {"prediction", number_or_null(r.prediction)},
           {"ratio", number_or_null(r.ratio)},
           {"converged", r.converged},
           {"oracle_count", r.oracle_count ? json(*r.oracle_count) : json(nullptr)},
           {"oracle_gap", r.oracle_gap ? json(*r.oracle_gap) : json(nullptr)},
           {"wall_seconds", r.wall_seconds}};
    if (r.error)
        j["error"] = *r.error;
    if (r.report)
        j["report"] = to_json(*r.report);
    return j;
}

} // namespace smilansky::harness
