#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenediff/scenario.hpp"

namespace scenediff {

struct MetricCounts {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    bool degenerate = false;
};

/// Object-level confusion counts: an object counts as detected when any
/// changed-family verdict (including removed) was attributed to it.
MetricCounts compute_metrics(const std::map<int, sim::GroundTruthLabel>& labels,
                             const std::map<int, bool>& detected_changed);

struct VerdictRecord {
    ChangeVerdict verdict;
    int gt_id = -1;  // ground-truth attribution of the tree object
};

struct ObjectReport {
    int gt_id = -1;
    int shape_id = -1;
    int table = -1;
    sim::GroundTruthLabel label = sim::GroundTruthLabel::unchanged;
    std::string ours_verdict = "unobserved";
    std::string ours_evidence;
    bool ours_changed = false;
    bool nn_seen = false;
    bool nn_changed = false;
    double nn_fraction = 0.0;
};

struct RunReport {
    ScenarioConfig config;
    std::uint64_t seed = 0;
    std::string status = "ok";  // "ok" | "registration_failed"
    std::vector<ObjectReport> objects;
    MetricCounts ours;
    std::optional<MetricCounts> nn;
    std::vector<VerdictRecord> verdict_log;
    bool registered = false;
    RigidTransform estimated_t_rel;
    RigidTransform true_session_offset;
    // Timing lives apart from the deterministic payload.
    double total_seconds = 0.0;
    double mean_detect_ms = 0.0;
    int measurement_count = 0;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<ClassifyMode> classify_mode;
    std::optional<Eigen::Vector3d> post_registration_drift;
    std::optional<bool> baseline_enabled;
    std::optional<std::string> dump_clouds_dir;
    std::optional<std::string> tree_dump_path;
    std::optional<std::string> stream_dump_path;
};

/// Full pipeline: simulate both sessions, build the source tree, stream the
/// target through the detector, finalize removed objects, run the baseline,
/// compute metrics.
RunReport run_scenario(const ScenarioConfig& cfg, const RunOverrides& overrides = {});

/// Deterministic payload plus (optionally) the timing section.
nlohmann::ordered_json report_to_json(const RunReport& report, bool include_timing = true);

/// Verdicts as JSON-lines, one record per line.
std::string verdicts_to_jsonl(const RunReport& report);

}  // namespace scenediff
