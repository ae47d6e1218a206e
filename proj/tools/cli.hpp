#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frak/bench.hpp"
#include "frak/codec.hpp"

namespace frak::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_io = 3,
};

struct CliConfig {
    SMode mode = SMode::proposed;
    int dn = 256;
    std::array<int, kLevels> strides = PoolParams{}.strides;
    std::array<double, 3> thresholds = EncoderConfig{}.thresholds;
    /// Thresholds for the baseline side of `bench`; unset means `thresholds`.
    std::optional<std::array<double, 3>> baseline_thresholds;
    /// Per-level s set overrides; unset levels use the mode's built-in sets.
    std::array<std::optional<std::vector<double>>, kLevels> s_sets;
    int settle_passes = EncoderConfig{}.settle_passes;
    int settle_rounds = EncoderConfig{}.settle_rounds;
    double settle_fraction = EncoderConfig{}.settle_fraction;
    int settle_min_fixes = EncoderConfig{}.settle_min_fixes;
    int iterations = DecodeOptions{}.iterations;
    int tolerance = DecodeOptions{}.tolerance;
    int threads = 1;
    bool crop = false;
    std::vector<int> pool_sizes = {32, 64, 144, 256};
    /// Directory for CSV files written by sweep, shist and bench. Empty
    /// means standard output.
    std::string output_dir;

    CliConfig();

    EncoderConfig encoder_config() const;
    EncoderConfig encoder_config(SMode m) const;
    DecodeOptions decode_options() const;
};

/// Applies one key=value setting. Keys match the long flag names with '-'
/// replaced by '_'. Throws Error(invalid_config) on unknown keys or bad values.
void apply_setting(CliConfig &config, std::string_view key, std::string_view value);

/// Reads a flat key=value file ('#' starts a comment) on top of `config`.
void apply_config_file(CliConfig &config, const std::filesystem::path &path);

/// Whole command line, argv[0] excluded. Returns the process exit status.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace frak::cli
