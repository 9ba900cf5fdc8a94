#pragma once
// Run configuration and report plumbing shared by the command line front end:
// key=value config files, the coefficient-cache directory convention, the
// calibration sidecar, and shortest round-trip decimal formatting (the CSV
// reports are meant to be diffed byte for byte).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsmoments/errterm.hpp"

namespace rsmoments {

// Settings resolve in three layers: built-in defaults, then the config file,
// then command line flags.  The thread count never changes any numeric
// output (all reductions are deterministic), so it is not part of the
// reproducibility echo.
struct RunConfig {
    std::uint64_t N = 100000; // coefficient bound for cache-building commands
    std::string cache_dir;    // empty: $RSMOMENTS_CACHE, else the working dir
    int kappa = 12;
    std::optional<double> A; // calibration overrides; both or neither
    std::optional<double> Z0;
    unsigned threads = 0;                // 0 = one worker per core
    std::uint64_t budget = 100000000;    // enumeration refusal threshold
    std::string format = "csv";          // csv | text
};

// key=value per line, '#' starts a comment, blank lines ignored; keys are
// n, cache, kappa, a, z0, threads, budget, format.  Unknown keys and
// malformed numbers are rejected with the offending line in the message.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

std::string resolve_cache_dir(const RunConfig& cfg);
// <dir>/tau_v1_kappa<kappa>_n<N>.txt
std::string cache_file_path(const std::string& dir, int kappa, std::uint64_t n);
// smallest cached table in dir holding at least n coefficients of the given
// weight; empty string when none qualifies
std::string find_cache_at_least(const std::string& dir, int kappa, std::uint64_t n);

// shortest decimal string that strtod parses back to the identical double
std::string fmt_double(double v);
std::string csv_row(const std::vector<std::string>& fields);

// '# key=value' comment lines echoing every numerics-relevant setting, so a
// report can be reproduced from its own header
std::vector<std::string> config_echo(const RunConfig& cfg);

// calibration sidecar: A=, Z0=, method=, rho=, residual=, a_stderr=,
// z0_stderr= in fmt_double form, so a round trip is bit exact
void save_calibration(const CalibrationConstants& cal, const std::string& path);
CalibrationConstants load_calibration(const std::string& path);

} // namespace rsmoments
