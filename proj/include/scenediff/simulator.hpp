#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "scenediff/shape_library.hpp"
#include "scenediff/transform.hpp"
#include "scenediff/types.hpp"

namespace scenediff::sim {

struct TableSpec {
    Point3 center = Point3::Zero();  // z = surface height
    double placement_half_extent = 0.28;
};

struct SceneObject {
    int gt_id = -1;  // ground-truth identity, stable across sessions
    int shape_id = 0;
    Point3 center = Point3::Zero();  // world frame, object mid-height
    double yaw = 0.0;
    int table = 0;
};

struct Scene {
    SyntheticShapeLibrary library;
    std::vector<TableSpec> tables;
    std::vector<SceneObject> objects;
};

struct SceneConfig {
    int n_tables = 8;
    int objects_per_table_min = 3;
    int objects_per_table_max = 5;
    int total_objects_min = 35;  // <= 0 disables the total clamp
    int total_objects_max = 40;
    double table_spacing = 3.0;          // meters between table centers (grid layout)
    double placement_half_extent = 0.28; // placement square half width on a table
    double min_object_spacing = 0.08;    // meters between object centers
    double table_height = 0.75;
    int library_shapes = 20;
    int code_dim = 256;
    double max_pairwise_similarity = 0.8;
    std::uint64_t seed = 0;
};

Scene generate_scene(const SceneConfig& cfg);

// ---------------------------------------------------------------------------

enum class ChangeKind { add, remove, move, swap };

struct ChangeOp {
    ChangeKind kind = ChangeKind::add;
    int table = -1;
    // Optional explicit parameters; deterministic auto-selection otherwise.
    int gt_id = -1;             // remove / move / first swap partner
    int second_gt_id = -1;      // second swap partner
    int shape_id = -1;          // add
    std::optional<Point3> position;  // add / move destination
};

struct ChangeSpecList {
    std::vector<ChangeOp> ops;
    std::uint64_t seed = 0;
};

enum class GroundTruthLabel { unchanged, added, removed, moved };

std::string to_string(GroundTruthLabel label);

struct ChangedScene {
    Scene target;  // modified layout observed by the target session
    std::map<int, GroundTruthLabel> labels;  // covers source and target gt ids
};

/// Applies the ops to a copy of the scene and returns per-object labels
/// (swap yields two moved labels). Spacing violations raise PlacementError.
ChangedScene apply_changes(const Scene& scene, const ChangeSpecList& spec);

// ---------------------------------------------------------------------------

enum class OverlapProfile { same_side, opposite_side };

struct TrajectoryConfig {
    int poses_per_table = 5;
    double arc_degrees = 60.0;     // arc swept by the per-table camera segment
    double camera_distance = 1.1;  // meters from the table center
    double camera_height = 0.80;   // world z
    double fov_degrees = 90.0;
    std::vector<int> low_overlap_tables;  // opposite-side viewing in the target session
};

struct CameraPose {
    RigidTransform world_from_camera;  // +z of the camera frame is the optical axis
    int table = 0;
};

struct Trajectory {
    std::vector<CameraPose> poses;
    std::vector<OverlapProfile> table_profiles;  // per table
    double fov_degrees = 90.0;
};

/// Per-table camera arcs, each facing its table; the target session flips the
/// arc to the far side on low-overlap tables.
Trajectory make_trajectory(const Scene& scene, const TrajectoryConfig& cfg, Session session);

// ---------------------------------------------------------------------------

struct NoiseModel {
    DescriptorNoise descriptor;
    double sigma_rot = 0.0005;    // radians per frame, accumulated pose jitter
    double sigma_trans = 0.0005;  // meters per frame, accumulated pose jitter
    double offset_translation = 0.0;   // magnitude of the random inter-session offset
    double offset_rotation_deg = 0.0;
    std::optional<RigidTransform> explicit_offset;  // overrides the random offset
    double occlusion_bump = 0.15;        // structural occlusion on opposite-side views
    double occlusion_visible_max = 0.8;  // objects occluded past this are skipped
};

struct ObservationRecord {
    Measurement measurement;
    int gt_id = -1;
    int pose_index = 0;
    double occlusion = 0.0;
};

struct ObservationStream {
    std::vector<ObservationRecord> records;
    RigidTransform session_offset;  // identity for the source session
};

/// Deterministic measurement stream: per pose, every visible object yields one
/// synthetic measurement; target-session centers carry the inter-session
/// offset and both sessions accumulate per-frame pose jitter.
ObservationStream stream_observations(const Scene& scene, const Trajectory& traj,
                                      const NoiseModel& noise, Session session,
                                      std::uint64_t seed);

/// Fraction of the object's angular extent covered by closer same-table
/// objects, as seen from the camera position. Pure geometry.
double occlusion_fraction(const Scene& scene, std::size_t object_index,
                          const Point3& camera_position);

/// Back-face-culled surface samples of a posed primitive, world frame.
PointCloud sample_partial_cloud(const PrimitiveSpec& primitive, const RigidTransform& object_pose,
                                const RigidTransform& camera_pose, int n_points,
                                std::uint64_t seed = 0);

RigidTransform object_pose(const SceneObject& obj);

/// Deterministic random SE(3) offset with the given magnitudes.
RigidTransform random_offset(double translation, double rotation_deg, std::uint64_t seed);

}  // namespace scenediff::sim
