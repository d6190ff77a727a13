#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace heterocyl {

/// Bad configuration text or values (usage error).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One run's settings. Serialized as flat "key = value" lines.
struct RunConfig {
    int nx = 64;                 // cross-section intervals for solve
    int nz_per_unit = 0;         // slices per unit length in z; 0 means nx (hz == hx)
    std::vector<double> n_schedule{4.0, 6.0, 8.0, 12.0};
    double grad_tol = 1e-9;      // residual units
    double eps_tail = 1e-2;
    double eps_H = 1e-3;
    double lambda_tol = 1e-3;    // relative agreement of the two lambda* values
    std::optional<double> lambda_override;
    std::string output_dir;
    std::uint64_t seed = 0;
    int lambda_nx = 512;         // resolution of the lambda-star command
    double bisect_tol = 1e-17;   // bisection width; below ulp means "to resolution"
    double window_half_height = 8.0;    // theta/stagnation window [0,1] x [-w, w]
    double central_half_height = 2.0;   // non-shear and momentum window
    double momentum_order_min = 1.5;    // verify: order from subsampled flows

    int effective_nz_per_unit() const { return nz_per_unit > 0 ? nz_per_unit : nx; }

    bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError unless tolerances are positive, the schedule is
/// strictly increasing and positive, and the grid sizes are usable.
void validate(const RunConfig& config);

/// "key = value" lines in a fixed order; doubles with 17 significant digits.
std::string serialize(const RunConfig& config);

/// Parses serialize() output (blank lines and '#' comments allowed; keys may
/// be omitted and keep their defaults). Throws ConfigError on unknown keys,
/// malformed values or failed validation.
RunConfig parse_config(const std::string& text);

/// Applies one "key = value" assignment. Throws ConfigError.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

RunConfig load_config(const std::filesystem::path& path);

/// Environment override for output_dir (HETEROCYL_OUTPUT_DIR), if set and non-empty.
std::optional<std::string> output_dir_from_env();

}  // namespace heterocyl
