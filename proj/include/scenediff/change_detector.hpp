#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenediff/object_tree.hpp"
#include "scenediff/registration.hpp"
#include "scenediff/transform.hpp"
#include "scenediff/types.hpp"

namespace scenediff {

/// Star graph of one neighborhood: directed edges from the center object to
/// every other member, each edge being the center difference.
struct ObjectGraph {
    ObjectInstance center_object;
    std::vector<ObjectInstance> vertices;

    struct Edge {
        ObjectId neighbor_id = -1;
        ShapeCode neighbor_code;
        Eigen::Vector3d vec = Eigen::Vector3d::Zero();  // t_neighbor - t_center
    };
    std::vector<Edge> edges;
};

ObjectGraph build_object_graph(const ObjectInstance& center,
                               const std::vector<const ObjectInstance*>& neighborhood);

enum class GraphVerdict { changed, unchanged };

/// Edge-wise layout comparison: edges correspond when their endpoint codes
/// clear delta_s; the layout is unchanged as soon as one corresponded pair is
/// within delta_e, changed otherwise (including zero corresponded pairs).
GraphVerdict compare_graphs(const ObjectGraph& target_graph, const ObjectGraph& source_graph,
                            double delta_s, double delta_e);

enum class VerdictKind {
    unchanged,
    changed_new_location,
    changed_new_shape,
    changed_moved,
    removed,
};

enum class VerdictEvidence {
    empty_source_neighborhood,
    no_shape_match,
    all_edges_differ,
    singleton_fallback,
    never_matched,
    edge_match,  // unchanged: a corresponded edge pair stayed within delta_e
};

constexpr bool is_changed_kind(VerdictKind k) { return k != VerdictKind::unchanged; }

std::string to_string(VerdictKind k);
std::string to_string(VerdictEvidence e);

struct ChangeVerdict {
    ObjectId object_id = -1;
    VerdictKind kind = VerdictKind::unchanged;
    VerdictEvidence evidence = VerdictEvidence::edge_match;
    int frame_index = 0;
    Session session = Session::target;  // removed verdicts carry source-tree ids
};

enum class ClassifyMode {
    graph,       // neighborhood layout comparison with singleton fallback
    objectwise,  // center distance + shape similarity only (ablation mode)
};

struct DetectorConfig {
    double delta_s = 0.9;   // minimum shape similarity
    double delta_d = 0.02;  // meters, association / fallback distance gate
    double delta_e = 0.03;  // meters, edge-difference gate
    double interval_length = 1.2;
    double neighbor_margin = 0.0;  // widened neighborhood queries; 0 = strict nodes
    std::size_t correspondence_count = 6;  // pairs accumulated before alignment
    RansacConfig ransac;
    ClassifyMode classify_mode = ClassifyMode::graph;
    // Diagnostic drift added to projected centers after registration; models
    // residual localization error that alignment cannot absorb.
    Eigen::Vector3d post_registration_drift = Eigen::Vector3d::Zero();
};

/// Online change detection over a frozen source tree and a growing target
/// tree. Single-writer: one stream consumer calls process_measurement.
class ChangeDetector {
  public:
    ChangeDetector(SpatialObjectTree source_tree, DetectorConfig cfg);

    struct ProcessResult {
        ObjectId object_id = -1;  // target-tree object this measurement landed in
        AssociationOutcome association;
        std::vector<ChangeVerdict> verdicts;
        bool registration_attempted = false;
        bool registration_failed = false;  // attempt ran and found no consensus
    };

    struct FrameResult {
        std::vector<AssociationOutcome> associations;  // one per measurement, in order
        std::vector<ChangeVerdict> verdicts;
        bool registration_attempted = false;
        bool registration_failed = false;
    };

    /// Frame granularity: first associates every measurement of the frame into
    /// the target tree, then classifies, so objects seen together share fully
    /// populated neighborhoods. Registration correspondences accumulate until
    /// alignment succeeds, at which point the pending queue is drained.
    FrameResult process_frame(const std::vector<Measurement>& frame);

    /// Single-measurement convenience wrapper around process_frame.
    ProcessResult process_measurement(const Measurement& m);

    /// Removed verdicts for source objects that were observed in some queried
    /// neighborhood but never cleared the shape threshold. Call at stream end.
    std::vector<ChangeVerdict> finalize_removed() const;

    const SpatialObjectTree& source_tree() const { return source_; }
    const SpatialObjectTree& target_tree() const { return target_; }
    const std::optional<RigidTransform>& t_rel() const { return t_rel_; }
    std::size_t pending_count() const { return pending_.size(); }
    const DetectorConfig& config() const { return cfg_; }

  private:
    std::optional<ChangeVerdict> classify_object(ObjectId target_id, int frame_index);
    void accumulate_correspondence(ObjectId target_id);

    DetectorConfig cfg_;
    SpatialObjectTree source_;
    SpatialObjectTree target_;
    std::optional<RigidTransform> t_rel_;
    CorrespondenceSet correspondences_;
    std::vector<ObjectId> pending_;  // insertion order, classified once aligned
    double inlier_spread_floor_ = 0.0;
    std::size_t last_attempt_size_ = 0;  // retry registration only on new pairs
};

}  // namespace scenediff
