#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sid/executor.hpp"
#include "sid/n4sid.hpp"

namespace sid {

struct ScalePoint {
    Index N = 0;
    Index j = 0;

    bool operator==(const ScalePoint&) const = default;
};

/// One experiment campaign: scale points, Monte Carlo repeats, and the
/// simulated cluster shape for the workflow runs.
struct ExperimentConfig {
    std::vector<ScalePoint> scale = {{10, 1000}, {20, 10000}};
    int repeats = 20;
    int mpt = 10;
    int nodes = 2;
    int cpus_per_node = 16;
    std::uint64_t seed = 1;
    double latency_ms = 0.0;
    double svd_task_cpu = 1.0;

    /// repeats >= 1 and j >= 10N on every point (the convergence guard the
    /// Hankel constructor only bounds loosely).
    void validate() const;
};

/// Averaged per-stage wall times of the sequential pipeline at one scale.
struct StageProfile {
    ScalePoint point;
    int repeats = 0;
    double oblique_s = 0.0;
    double svd_s = 0.0;
    double estimation_s = 0.0;
    double total_s = 0.0;
    double total_std_s = 0.0;
    double oblique_pct = 0.0;
    double svd_pct = 0.0;
    double estimation_pct = 0.0;
    std::string major_stage;
};

/// Runs identify() repeats times per scale point and averages the stage
/// times. One untimed warm-up run precedes each point.
std::vector<StageProfile> profile_stages(const ExperimentConfig& cfg,
                                         const StateSpaceModel& model = ball_beam());

/// Flop cost of the column-partitioned truncated SVD of an m x n matrix cut
/// into N blocks with per-merge rank k:
///   N(6ms^2 + 16s^3) + (N-1)(6mk^2 + 176k^3),   s = n/N.
/// N = 1 reduces to the complete-SVD cost 6mn^2 + 16n^3.
double flops_model(double m, double n, int blocks, double k);

/// Sequential over parallel processing time. Throws ZeroParallelTime.
double speedup(double sequential_s, double parallel_s);

/// Baseline-versus-workflow outcome at one scale point.
struct ComparisonRow {
    ScalePoint point;
    int repeats = 0;
    double baseline_s = 0.0;
    double baseline_std_s = 0.0;
    double workflow_s = 0.0;
    double workflow_std_s = 0.0;
    double reduction = 0.0;  // 1 - workflow/baseline
    double speedup = 0.0;    // baseline/workflow
    double baseline_oblique_s = 0.0;
    double baseline_svd_s = 0.0;
    double baseline_estimation_s = 0.0;
    /// Worst relative disagreement between the two routes, recorded so the
    /// acceleration can be shown to leave the answers unchanged.
    double max_singular_delta = 0.0;
    double max_markov_delta = 0.0;
};

struct BenchReport {
    ExperimentConfig config;
    std::vector<ComparisonRow> rows;
};

/// For each scale point and repeat: fresh-seed plant data, the sequential
/// baseline, and the workflow execution on the configured cluster. Baseline
/// time is the three-stage total; workflow time is the post-entry makespan,
/// so both exclude data preparation.
BenchReport run_comparison(const ExperimentConfig& cfg);

// External formats.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
std::string report_to_json(const BenchReport& report);
void write_report_csv(const BenchReport& report, const std::filesystem::path& path);
std::string format_report_table(const BenchReport& report);
std::string format_profile_table(const std::vector<StageProfile>& profiles);
std::string profile_to_json(const std::vector<StageProfile>& profiles);

/// Identification result as a JSON document: n, m, l, A..D row-major,
/// order, singular_values, stage_times_ms, residual.
std::string model_to_json(const IdentifyResult& result);

/// Run report as a JSON document (makespans, per-task and per-stage times,
/// schedule, events).
std::string run_report_to_json(const RunReport& report);

}  // namespace sid
