#pragma once

// Named experiments driven by JSON configs. Each run writes CSV/PPM
// artifacts plus a manifest.json under output_dir; feeding the manifest back
// to run_experiment() reproduces the CSVs byte for byte.

#include "bohm/chaos.hpp"
#include "bohm/ensemble.hpp"
#include "bohm/nodes.hpp"
#include "bohm/pattern.hpp"
#include "bohm/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohm {

inline constexpr const char* version_string = "0.1.0";

enum class ExperimentKind {
    born_evolution,
    born_self_distance,
    cross_c2_finalpattern,
    single_chaotic_ergodicity,
    b_curve,
    proportion_law,
    nonborn_mixture,
    collision_snapshots,
    node_geometry,
};

const char* to_string(ExperimentKind k) noexcept;
std::optional<ExperimentKind> parse_experiment(const std::string& name);
const std::vector<ExperimentKind>& all_experiments();

enum class Preset { desk, paper };

struct Mixture {
    double p1 = 0.0;
    double p2 = 1.0;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::born_evolution;
    Preset preset = Preset::desk;
    std::string output_dir;
    std::uint64_t seed = 1;
    /// 0 = hardware concurrency; BOHM_WORKERS overrides either.
    unsigned workers = 0;

    WaveParams params;
    EnsembleSpec ensemble;
    IntegratorConfig integrator;
    std::vector<double> checkpoints;
    GridGeometry grid;
    Normalization normalization = Normalization::unit_frobenius;

    /// Sweeps (b_curve, born_self_distance, cross_c2_finalpattern,
    /// proportion_law, nonborn_mixture).
    std::vector<double> c2_values;
    double reference_c2 = 0.0;
    /// nonborn_mixture: one ensemble per entry; empty means use `ensemble` as is.
    std::vector<Mixture> mixtures;
    /// single_chaotic_ergodicity.
    std::vector<PhasePoint> starts;
    /// Times at which every particle position is written.
    std::vector<double> snapshots;
    /// Cells per side of the chi-square grid (born_evolution).
    int check_cells = 60;

    EscapeOptions escape;
    LcnOptions lcn;
    /// proportion_law: main-blob particles cross-checked with the LCN.
    std::int64_t lcn_sample = 0;

    double node_t_end = 10.0;
    double node_dt = 0.01;
    KRange node_k{-3, 3};

    bool render = true;
};

struct Diagnostic {
    enum class Level { error, warning };
    Level level = Level::error;
    /// JSON pointer-ish location, e.g. "integrator.sample_dt".
    std::string path;
    std::string message;
};

bool has_errors(const std::vector<Diagnostic>& d);
void print_diagnostics(std::ostream& out, const std::vector<Diagnostic>& d);

/// Defaults applied under a preset; everything else in a config must be
/// given explicitly.
nlohmann::json preset_defaults(ExperimentKind kind, Preset preset);

/// True for a run manifest (an object with a "config" object).
bool is_manifest(const nlohmann::json& doc);

/// Schema and physics checks. Never throws. A run manifest is accepted in
/// place of a config (its "config" member is used).
std::vector<Diagnostic> validate_config(const nlohmann::json& doc);

/// Throws ConfigError when validate_config() reports errors.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Fully resolved config, as echoed in the manifest.
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Diagnostic> d);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Raised when a run fails after writing some artifacts. The manifest is
/// still written, with "partial": true.
class PartialRunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOutcome {
    nlohmann::ordered_json manifest;
    /// Experiment-specific numbers (also manifest["results"]).
    nlohmann::ordered_json results;
    std::vector<std::string> artifacts;
    std::int64_t aborted = 0;
    double wall_seconds = 0.0;
};

/// Runs the experiment and writes artifacts. `log`, when given, receives one
/// progress line per stage.
RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace bohm
