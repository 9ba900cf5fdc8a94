#include "rsmoments/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fs = std::filesystem;

namespace rsmoments {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_line(const std::string& what, const std::string& line) {
    throw std::invalid_argument("config: " + what + " in line \"" + line + "\"");
}

double parse_double(const std::string& v, const std::string& line) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) bad_line("trailing characters after number", line);
        return d;
    } catch (const std::invalid_argument&) {
        bad_line("not a number", line);
    } catch (const std::out_of_range&) {
        bad_line("number out of range", line);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& line) {
    // accept scientific notation for convenience (n=1e7 reads better than
    // seven zeros) as long as the value is a nonnegative integer
    double d = parse_double(v, line);
    if (d < 0 || d > 1.8e19 || d != std::floor(d)) bad_line("not a whole number", line);
    return static_cast<std::uint64_t>(d);
}

} // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad_line("missing '='", raw);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) bad_line("empty key", raw);
        if (val.empty()) bad_line("empty value", raw);
        if (key == "n") {
            base.N = parse_u64(val, raw);
        } else if (key == "cache") {
            base.cache_dir = val;
        } else if (key == "kappa") {
            base.kappa = static_cast<int>(parse_u64(val, raw));
        } else if (key == "a") {
            base.A = parse_double(val, raw);
        } else if (key == "z0") {
            base.Z0 = parse_double(val, raw);
        } else if (key == "threads") {
            base.threads = static_cast<unsigned>(parse_u64(val, raw));
        } else if (key == "budget") {
            base.budget = parse_u64(val, raw);
        } else if (key == "format") {
            if (val != "csv" && val != "text") bad_line("format must be csv or text", raw);
            base.format = val;
        } else {
            bad_line("unknown key '" + key + "'", raw);
        }
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream all;
    all << in.rdbuf();
    return parse_config_text(all.str(), std::move(base));
}

std::string resolve_cache_dir(const RunConfig& cfg) {
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* env = std::getenv("RSMOMENTS_CACHE"); env && *env) return env;
    return ".";
}

std::string cache_file_path(const std::string& dir, int kappa, std::uint64_t n) {
    return dir + "/tau_v1_kappa" + std::to_string(kappa) + "_n" + std::to_string(n) + ".txt";
}

std::string find_cache_at_least(const std::string& dir, int kappa, std::uint64_t n) {
    const std::string prefix = "tau_v1_kappa" + std::to_string(kappa) + "_n";
    std::uint64_t best = 0;
    std::string best_path;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0 || name.size() <= prefix.size() + 4) continue;
        if (name.substr(name.size() - 4) != ".txt") continue;
        std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
        std::uint64_t size = 0;
        auto [p, err] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
        if (err != std::errc() || p != digits.data() + digits.size()) continue;
        if (size >= n && (best == 0 || size < best)) {
            best = size;
            best_path = entry.path().string();
        }
    }
    return best_path;
}

std::string fmt_double(double v) {
    char buf[32];
    auto [end, err] = std::to_chars(buf, buf + sizeof(buf), v);
    if (err != std::errc()) throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, end);
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

std::vector<std::string> config_echo(const RunConfig& cfg) {
    std::vector<std::string> lines;
    lines.push_back("# n=" + std::to_string(cfg.N));
    lines.push_back("# kappa=" + std::to_string(cfg.kappa));
    if (!cfg.cache_dir.empty()) lines.push_back("# cache=" + cfg.cache_dir);
    if (cfg.A) lines.push_back("# a=" + fmt_double(*cfg.A));
    if (cfg.Z0) lines.push_back("# z0=" + fmt_double(*cfg.Z0));
    lines.push_back("# budget=" + std::to_string(cfg.budget));
    lines.push_back("# format=" + cfg.format);
    return lines;
}

void save_calibration(const CalibrationConstants& cal, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("calibration: cannot write " + path);
    out << "A=" << fmt_double(cal.A) << '\n';
    out << "Z0=" << fmt_double(cal.Z0) << '\n';
    out << "method=" << (cal.method == CalibrationMethod::fitted ? "fitted" : "user") << '\n';
    out << "rho=" << cal.rho << '\n';
    out << "residual=" << fmt_double(cal.residual) << '\n';
    out << "a_stderr=" << fmt_double(cal.a_stderr) << '\n';
    out << "z0_stderr=" << fmt_double(cal.z0_stderr) << '\n';
    if (!out) throw std::runtime_error("calibration: write failed for " + path);
}

CalibrationConstants load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("calibration: cannot open " + path);
    CalibrationConstants cal;
    bool have_a = false, have_z0 = false, have_method = false;
    std::string raw;
    while (std::getline(in, raw)) {
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad_line("missing '='", raw);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "A") {
            cal.A = parse_double(val, raw);
            have_a = true;
        } else if (key == "Z0") {
            cal.Z0 = parse_double(val, raw);
            have_z0 = true;
        } else if (key == "method") {
            if (val == "fitted")
                cal.method = CalibrationMethod::fitted;
            else if (val == "user")
                cal.method = CalibrationMethod::user_supplied;
            else
                bad_line("method must be fitted or user", raw);
            have_method = true;
        } else if (key == "rho") {
            cal.rho = static_cast<int>(parse_u64(val, raw));
        } else if (key == "residual") {
            cal.residual = parse_double(val, raw);
        } else if (key == "a_stderr") {
            cal.a_stderr = parse_double(val, raw);
        } else if (key == "z0_stderr") {
            cal.z0_stderr = parse_double(val, raw);
        } else {
            bad_line("unknown key '" + key + "'", raw);
        }
    }
    if (!have_a || !have_z0 || !have_method)
        throw std::runtime_error("calibration: " + path + " is missing A, Z0 or method");
    return cal;
}

} // namespace rsmoments
