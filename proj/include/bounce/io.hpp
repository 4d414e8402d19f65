#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bounce/forcing.hpp"

namespace bounce {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Flat key-value run configuration; every field lands in the output manifest.
struct RunConfig {
    double g = 1.0;
    double mean_offset = 0.0;
    std::vector<Harmonic> harmonics; ///< index j-1 holds the frequency-j pair
    std::uint64_t seed = 12345;
    double tol_root = 1e-12;
    double tol_quad = 1e-10;
    double tol_el = 1e-12;
    int p = 9;
    int q = 2;
    int window = 40;      ///< heteroclinic half-window N
    int depth = 6;        ///< continued-fraction depth
    int multistarts = 16;
    int bounces = 200;        ///< orbit / agreement runs
    int accel_bounces = 10000; ///< acceleration search budget
    double t0 = 0.0;
    double w0 = 8.0;
    double alpha = 5.618033988749895; ///< probe target, 5 + (sqrt(5)-1)/2
    std::string out_dir = "out";
};

/**
 * Parse the flat key-value grammar: one `key value...` per line, `#` comments.
 * Keys: g, mean_offset, harmonic <j> <a> <b> (repeatable), seed, tol_root,
 * tol_quad, tol_el, ratio <p>/<q>, window, depth, multistarts, bounces, t0,
 * w0, alpha, out_dir. Unknown keys are errors.
 */
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Render a config back to its file grammar (write/read identity).
std::string config_text(const RunConfig& cfg);

ForcingFunction make_forcing(const RunConfig& cfg);

/// Shortest decimal that round-trips at 15 significant digits.
std::string format_double(double v);

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Write with parent-directory creation; failures carry the path.
void write_text_file(const std::string& path, const std::string& text);

ordered_json config_json(const RunConfig& cfg);

/// Manifest skeleton {config, seed, results, defects, timing}; timestamps
/// live only inside "timing" so everything else is byte-deterministic.
ordered_json make_manifest(const RunConfig& cfg, ordered_json results,
                           ordered_json defects, double wall_ms);

/// Manifest serialization with the "timing" field removed (hash checks).
std::string manifest_text_without_timing(ordered_json manifest);

} // namespace bounce
