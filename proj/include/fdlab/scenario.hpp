#pragma once

#include "fdlab/profile.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fdlab {

/// Experiment names accepted in the "experiment" field.
const std::vector<std::string>& known_experiments();

/// A parsed scenario file.  Parameters stay as JSON text until the
/// experiment-specific validation in run_scenario.
struct Scenario {
    std::string name;
    std::string experiment;
    ProfileDescriptor profile;
    std::string parameters_json = "{}";
    std::filesystem::path output_dir;
    std::filesystem::path base_dir;  ///< directory of the config file
    std::string canonical_json;  ///< the whole scenario, re-serialized; embedded in the manifest
};

/// Parses and validates the top-level fields.  Relative table paths resolve
/// against base_dir.  Throws ValidationError with a field path.
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir = {});

struct RunOptions {
    std::optional<std::filesystem::path> output_dir;  ///< overrides the scenario's output_dir
    bool verbose = false;
    std::ostream* log = nullptr;                      ///< progress lines when verbose
};

/// Validates the experiment parameters, runs the experiment and writes
/// output_dir/{manifest.json, *.csv, *.json}.  Returns the output directory.
std::filesystem::path run_scenario(const Scenario& s, const RunOptions& opt = {});

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io_error = 1;
inline constexpr int validation = 2;
inline constexpr int numerical = 3;
}  // namespace exit_code

/// Reads the config file, optionally requires a given experiment, runs it and
/// maps failures to exit codes: 2 with a field-path message, 3 with a JSON
/// diagnostic payload (both on `err`).
int run_scenario_file(const std::filesystem::path& config, const std::optional<std::string>& expected_experiment,
                      const RunOptions& opt, std::ostream& err);

}  // namespace fdlab
