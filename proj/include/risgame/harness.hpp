#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risgame/bsum.hpp"
#include "risgame/scene.hpp"

namespace risgame {

enum class Sweep { Cj, Cs, N, Xj };

const char* to_string(Sweep s);
std::optional<Sweep> parse_sweep(const std::string& name);
/// Default grid of a sweep.
std::vector<double> default_sweep_values(Sweep s);
/// Copy of `base` with the swept parameter set.  The x_J sweep keeps
/// y_J = 400.
SceneConfig apply_sweep(const SceneConfig& base, Sweep s, double value);

struct ExperimentSpec {
    Sweep sweep = Sweep::Cj;
    std::vector<double> values;
    std::vector<Scheme> schemes{Scheme::Robust, Scheme::Perfect, Scheme::NonRobust, Scheme::NoRis};
    int trials = 20;
    SceneConfig base;
    std::uint64_t seed = 42;
    std::string out;
    int workers = 1;
    BsumOptions solver;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Applies the "experiment" object of a JSON config (sweep, values,
/// schemes, trials, seed, out, workers) on top of `spec`.  The scene part
/// is read by scene_from_json.
void apply_experiment_json(ExperimentSpec& spec, const std::string& text);

struct ResultRow {
    std::string sweep;
    double value = 0.0;
    Scheme scheme = Scheme::Robust;
    int trial = 0;          // trial index; -1 marks a mean row
    bool failed = false;    // solve threw; numeric fields are NaN
    double u_L = 0.0;
    double u_J = 0.0;
    double u_L_worst = 0.0;
    double P_S = 0.0;
    double P_J = 0.0;
    double gamma = 0.0;
    double iters = 0.0;
    double ms = 0.0;
    std::string message;
};

inline constexpr const char* kCsvHeader = "sweep,value,scheme,trial,u_L,u_J,u_L_worst,P_S,P_J,gamma_sinr,iters,ms";

/// Seed of the channel draw for a trial; shared by every sweep point and
/// scheme.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

/// One paired draw: every scheme sees the same realization.
std::vector<ResultRow> run_trial(const SceneConfig& cfg, const std::vector<Scheme>& schemes, std::uint64_t seed,
                                 const BsumOptions& o);

struct ExperimentResult {
    std::vector<ResultRow> rows;  // per point: per scheme, trials then the mean row
    int failures = 0;
};

using ProgressFn = std::function<void(int done, int total)>;

/// Runs every sweep point x trial, writes the CSV to spec.out when set.
ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
/// Mean of the successful trials of one (point, scheme) group.
ResultRow mean_row(const std::vector<ResultRow>& group);

}  // namespace risgame
