#pragma once

#include "agelab/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agelab {

enum class ValueType { real, integer, text, real_list, graph };

struct KeySpec {
    std::string name;
    ValueType type = ValueType::real;
    std::optional<std::string> default_value;  // required when empty
    std::string help;
};

struct ExperimentSchema {
    std::string tag;
    std::string summary;
    std::vector<KeySpec> keys;  // experiment-specific; common keys are added by schema_keys()

    /// Common keys (experiment, seed, out, workers, max_events) followed by the specific ones.
    std::vector<KeySpec> schema_keys() const;
};

const std::vector<ExperimentSchema>& experiment_schemas();
const ExperimentSchema* find_schema(std::string_view tag);

struct ValidationReport {
    std::string experiment;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Schema and cross-field checks without running anything.
ValidationReport validate(const Config& config);

/// Config with every default filled in. Throws ConfigError when invalid.
Config resolve(const Config& config);

class BudgetRefused : public std::runtime_error {
public:
    BudgetRefused(double estimate, double cap);
    double estimate;
    double cap;
};

/// Rough operation count (chain events, SDE coordinate updates, quadrature
/// cells) predicted from scaling laws in the run parameters.
double estimate_budget(const Config& resolved);

struct RunOptions {
    std::filesystem::path out;  // overrides the `out` key when non-empty
    int workers = 0;            // overrides the `workers` key when > 0
};

struct RunResult {
    bool pass = false;
    std::string summary;  // same text as report.txt
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0.0;
};

/// Validates, checks the budget, runs, writes CSVs, report.txt and manifest.txt.
/// Throws ConfigError (invalid config) or BudgetRefused before any work starts.
RunResult run_experiment(const Config& config, const RunOptions& opt = {});

/// Code version written to manifests.
std::string agelab_version();

}  // namespace agelab
