#pragma once

// Content-addressed cache of CountReports: out/cache/<sha256>.json.
// The key covers every numerical input at 17 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <openssl/evp.h>

#include "report.hpp"

namespace smilansky::harness {

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

/// Canonical text of all inputs that determine a CountReport.
inline std::string count_cache_material(const ModelParams& p, const Schedule& s, const SolverSettings& solver,
                                        CountTarget target) {
    std::ostringstream o;
    o << "count-report v1\n";
    o << "alpha " << fmt17(p.alpha_plus) << ' ' << fmt17(p.alpha_minus) << '\n';
    o << "nu " << fmt17(p.nu_plus) << ' ' << fmt17(p.nu_minus) << '\n';
    o << "target " << name_of(target) << '\n';
    o << "schedule " << name_of(s.scheme) << ' ' << s.L0 << ' ' << fmt17(s.growth) << ' ' << s.stall_window << ' '
      << s.cap << '\n';
    o << "solver " << name_of(solver.counting.method) << ' ' << fmt17(solver.counting.pivot_tol) << ' '
      << solver.counting.dense_limit << ' ' << fmt17(solver.margin) << ' ' << solver.lanczos_steps << ' '
      << solver.lanczos_max_dim << '\n';
    return o.str();
}

class ReportCache {
public:
    ReportCache(std::filesystem::path directory, bool enabled, std::ostream& warnings = std::cerr)
        : dir_(std::move(directory)), enabled_(enabled), warn_(&warnings) {}

    bool enabled() const { return enabled_; }

    std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".json"); }

    std::optional<CountReport> lookup(const std::string& key) const {
        if (!enabled_)
            return std::nullopt;
        const auto path = path_for(key);
        std::ifstream in(path);
        if (!in)
            return std::nullopt;
        try {
            const json j = json::parse(in);
            if (j.at("key").get<std::string>() != key)
                throw std::runtime_error("key mismatch");
            return count_report_from_json(j.at("report"));
        } catch (const std::exception& e) {
            *warn_ << "warning: ignoring corrupt cache entry " << path.string() << " (" << e.what() << ")\n";
            return std::nullopt;
        }
    }

    void store(const std::string& key, const CountReport& r) const {
        if (!enabled_)
            return;
        std::filesystem::create_directories(dir_);
        const auto path = path_for(key);
        const auto tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        {
            std::ofstream out(tmp);
            out << json{{"key", key}, {"report", to_json(r)}}.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path);
    }

private:
    std::filesystem::path dir_;
    bool enabled_;
    std::ostream* warn_;
};

} // namespace smilansky::harness
