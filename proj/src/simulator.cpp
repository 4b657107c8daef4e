#include "scenediff/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "scenediff/rng.hpp"

namespace scenediff::sim {

namespace {

constexpr double kObjectMidHeight = 0.055;  // object centers sit this far above the table
constexpr double kMinMoveDistance = 0.15;   // meters, smallest auto-generated move
constexpr long kPlacementAttempts = 10'000;
constexpr double kMaxCameraRange = 1.5;  // meters; keeps each arc on its own table

Point3 table_surface(const TableSpec& t) { return t.center; }

bool spacing_ok(const Point3& candidate, const std::vector<SceneObject>& objects, int table,
                double min_spacing, int ignore_gt = -1) {
    for (const auto& o : objects) {
        if (o.table != table || o.gt_id == ignore_gt) continue;
        if ((o.center.head<2>() - candidate.head<2>()).norm() < min_spacing) return false;
    }
    return true;
}

Point3 sample_table_position(Rng& rng, const TableSpec& table) {
    const double x = rng.uniform(-table.placement_half_extent, table.placement_half_extent);
    const double y = rng.uniform(-table.placement_half_extent, table.placement_half_extent);
    return table_surface(table) + Point3{x, y, kObjectMidHeight};
}

}  // namespace

std::string to_string(GroundTruthLabel label) {
    switch (label) {
        case GroundTruthLabel::unchanged: return "unchanged";
        case GroundTruthLabel::added: return "added";
        case GroundTruthLabel::removed: return "removed";
        case GroundTruthLabel::moved: return "moved";
    }
    return "unknown";
}

Scene generate_scene(const SceneConfig& cfg) {
    if (cfg.n_tables < 1) throw InvalidInputError("need at least one table");
    if (cfg.objects_per_table_min < 1 || cfg.objects_per_table_max < cfg.objects_per_table_min)
        throw InvalidInputError("invalid objects-per-table range");
    if (cfg.objects_per_table_max > cfg.library_shapes)
        throw InvalidInputError("objects per table exceeds distinct library shapes");

    Rng rng(derive_seed(cfg.seed, 0x5ce9e));

    Scene scene;
    scene.library = generate_shape_library(cfg.library_shapes, cfg.code_dim,
                                           cfg.max_pairwise_similarity,
                                           derive_seed(cfg.seed, 0x11b));

    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.n_tables))));
    for (int t = 0; t < cfg.n_tables; ++t) {
        TableSpec table;
        table.center = {(t % cols) * cfg.table_spacing, (t / cols) * cfg.table_spacing,
                        cfg.table_height};
        table.placement_half_extent = cfg.placement_half_extent;
        scene.tables.push_back(table);
    }

    // Per-table counts, nudged into the configured total range when one is set.
    std::vector<int> counts(cfg.n_tables);
    for (auto& c : counts) c = rng.uniform_int(cfg.objects_per_table_min, cfg.objects_per_table_max);
    if (cfg.total_objects_min > 0) {
        const int lo = cfg.total_objects_min, hi = cfg.total_objects_max;
        if (cfg.n_tables * cfg.objects_per_table_max < lo ||
            cfg.n_tables * cfg.objects_per_table_min > hi)
            throw InvalidInputError("total object range is infeasible for the per-table range");
        int total = std::accumulate(counts.begin(), counts.end(), 0);
        while (total < lo) {
            const int t = rng.uniform_int(0, cfg.n_tables - 1);
            if (counts[t] < cfg.objects_per_table_max) {
                ++counts[t];
                ++total;
            }
        }
        while (total > hi) {
            const int t = rng.uniform_int(0, cfg.n_tables - 1);
            if (counts[t] > cfg.objects_per_table_min) {
                --counts[t];
                --total;
            }
        }
    }

    // Global instance budget: a reserved pool of single-instance shapes keeps
    // some objects globally unique (mirroring a scene of mostly-distinct items
    // with a few repeated models); the rest may appear a few times over.
    const int reserve = std::min(10, cfg.library_shapes / 2);
    std::vector<int> remaining(cfg.library_shapes);
    for (int s = 0; s < cfg.library_shapes; ++s) remaining[s] = s < reserve ? 1 : 4;

    int next_gt = 0;
    for (int t = 0; t < cfg.n_tables; ++t) {
        // Distinct shapes within a table, preferably from the global budget;
        // per-table distinctness survives even when the budget runs dry.
        std::vector<int> table_shapes;
        long shape_attempts = 0;
        while (static_cast<int>(table_shapes.size()) < counts[t]) {
            const bool relaxed = ++shape_attempts > kPlacementAttempts;
            const int s = rng.uniform_int(0, cfg.library_shapes - 1);
            if (!relaxed && remaining[s] <= 0) continue;
            if (std::find(table_shapes.begin(), table_shapes.end(), s) != table_shapes.end())
                continue;
            table_shapes.push_back(s);
            --remaining[s];
        }

        for (int j = 0; j < counts[t]; ++j) {
            SceneObject obj;
            obj.gt_id = next_gt++;
            obj.shape_id = table_shapes[j];
            obj.table = t;
            obj.yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
            long attempts = 0;
            while (true) {
                if (++attempts > kPlacementAttempts)
                    throw CapacityError("could not satisfy object spacing on table " +
                                        std::to_string(t));
                const Point3 candidate = sample_table_position(rng, scene.tables[t]);
                if (spacing_ok(candidate, scene.objects, t, cfg.min_object_spacing)) {
                    obj.center = candidate;
                    break;
                }
            }
            scene.objects.push_back(obj);
        }
    }
    return scene;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> table_members(const std::vector<SceneObject>& objects, int table,
                                       const std::map<int, GroundTruthLabel>& labels) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (objects[i].table != table) continue;
        auto it = labels.find(objects[i].gt_id);
        if (it != labels.end() && it->second != GroundTruthLabel::unchanged) continue;
        out.push_back(i);
    }
    return out;
}

std::size_t index_of_gt(const std::vector<SceneObject>& objects, int gt_id) {
    for (std::size_t i = 0; i < objects.size(); ++i)
        if (objects[i].gt_id == gt_id) return i;
    throw InvalidInputError("unknown gt id " + std::to_string(gt_id));
}

}  // namespace

ChangedScene apply_changes(const Scene& scene, const ChangeSpecList& spec) {
    ChangedScene out;
    out.target = scene;
    for (const auto& o : scene.objects) out.labels[o.gt_id] = GroundTruthLabel::unchanged;

    Rng rng(derive_seed(spec.seed, 0xc4a9e));
    auto& objects = out.target.objects;
    std::map<int, int> shape_count;  // global instance count per shape, source layout
    for (const auto& o : scene.objects) shape_count[o.shape_id]++;

    int next_gt = 0;
    for (const auto& o : scene.objects) next_gt = std::max(next_gt, o.gt_id + 1);

    for (const auto& op : spec.ops) {
        int table = op.table;
        if (table >= static_cast<int>(out.target.tables.size()))
            throw InvalidInputError("change op table index out of range");

        switch (op.kind) {
            case ChangeKind::remove: {
                std::size_t victim;
                if (op.gt_id >= 0) {
                    victim = index_of_gt(objects, op.gt_id);
                } else {
                    // Eligible: unchanged objects whose table keeps at least
                    // three unchanged members afterwards, so every neighbor
                    // retains stable layout edges. Prefer globally unique
                    // shapes so the removed instance cannot be shape-matched
                    // against a lookalike elsewhere.
                    std::vector<std::size_t> eligible;
                    for (std::size_t i = 0; i < objects.size(); ++i) {
                        if (table >= 0 && objects[i].table != table) continue;
                        auto it = out.labels.find(objects[i].gt_id);
                        if (it != out.labels.end() && it->second != GroundTruthLabel::unchanged)
                            continue;
                        int unchanged_here = 0;
                        for (const auto& o : objects) {
                            if (o.table != objects[i].table) continue;
                            auto lt = out.labels.find(o.gt_id);
                            if (lt == out.labels.end() || lt->second == GroundTruthLabel::unchanged)
                                ++unchanged_here;
                        }
                        if (unchanged_here < 4) continue;
                        eligible.push_back(i);
                    }
                    if (eligible.empty()) throw InvalidInputError("no removable object available");
                    std::vector<std::size_t> unique_shape;
                    for (std::size_t i : eligible)
                        if (shape_count[objects[i].shape_id] == 1) unique_shape.push_back(i);
                    const auto& pool = unique_shape.empty() ? eligible : unique_shape;
                    victim = pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
                }
                out.labels[objects[victim].gt_id] = GroundTruthLabel::removed;
                shape_count[objects[victim].shape_id]--;
                objects.erase(objects.begin() + static_cast<long>(victim));
                break;
            }
            case ChangeKind::move: {
                std::size_t idx;
                if (op.gt_id >= 0) {
                    idx = index_of_gt(objects, op.gt_id);
                } else {
                    if (table < 0) {
                        std::vector<int> candidates;
                        for (std::size_t t = 0; t < out.target.tables.size(); ++t)
                            if (!table_members(objects, static_cast<int>(t), out.labels).empty())
                                candidates.push_back(static_cast<int>(t));
                        if (candidates.empty()) throw InvalidInputError("no movable object");
                        table = candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
                    }
                    auto eligible = table_members(objects, table, out.labels);
                    if (eligible.empty()) throw InvalidInputError("no movable object on table");
                    idx = eligible[rng.uniform_int(0, static_cast<int>(eligible.size()) - 1)];
                }
                if (op.position) {
                    if (!spacing_ok(*op.position, objects, objects[idx].table, 0.08,
                                    objects[idx].gt_id))
                        throw PlacementError("explicit move destination violates spacing");
                    objects[idx].center = *op.position;
                } else {
                    long attempts = 0;
                    while (true) {
                        if (++attempts > kPlacementAttempts)
                            throw PlacementError("could not place moved object");
                        const Point3 candidate =
                            sample_table_position(rng, out.target.tables[objects[idx].table]);
                        if (!spacing_ok(candidate, objects, objects[idx].table, 0.08,
                                        objects[idx].gt_id))
                            continue;
                        if ((candidate.head<2>() - objects[idx].center.head<2>()).norm() <
                            kMinMoveDistance)
                            continue;
                        objects[idx].center = candidate;
                        break;
                    }
                }
                out.labels[objects[idx].gt_id] = GroundTruthLabel::moved;
                break;
            }
            case ChangeKind::swap: {
                std::size_t a, b;
                if (op.gt_id >= 0 && op.second_gt_id >= 0) {
                    a = index_of_gt(objects, op.gt_id);
                    b = index_of_gt(objects, op.second_gt_id);
                } else {
                    if (table < 0) {
                        std::vector<int> candidates;
                        for (std::size_t t = 0; t < out.target.tables.size(); ++t)
                            if (table_members(objects, static_cast<int>(t), out.labels).size() >= 2)
                                candidates.push_back(static_cast<int>(t));
                        if (candidates.empty()) throw InvalidInputError("no swappable table");
                        table = candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
                    }
                    auto eligible = table_members(objects, table, out.labels);
                    if (eligible.size() < 2)
                        throw InvalidInputError("swap needs two unchanged objects on the table");
                    const int ia = rng.uniform_int(0, static_cast<int>(eligible.size()) - 1);
                    int ib = rng.uniform_int(0, static_cast<int>(eligible.size()) - 2);
                    if (ib >= ia) ++ib;
                    a = eligible[ia];
                    b = eligible[ib];
                }
                std::swap(objects[a].center, objects[b].center);
                out.labels[objects[a].gt_id] = GroundTruthLabel::moved;
                out.labels[objects[b].gt_id] = GroundTruthLabel::moved;
                break;
            }
            case ChangeKind::add: {
                if (table < 0) table = rng.uniform_int(0, static_cast<int>(out.target.tables.size()) - 1);
                SceneObject fresh;
                fresh.gt_id = next_gt++;
                fresh.table = table;
                fresh.yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
                if (op.shape_id >= 0) {
                    fresh.shape_id = op.shape_id;
                } else {
                    // Prefer a shape absent from the whole original scene (a
                    // genuinely novel object); otherwise anything not on this
                    // table, so the new instance is not confused with a
                    // neighbor. Re-using a removed object's shape would make
                    // the removal look like a move.
                    std::vector<int> on_table, in_scene;
                    for (const auto& o : objects)
                        if (o.table == table) on_table.push_back(o.shape_id);
                    for (const auto& o : scene.objects) {
                        if (o.table == table) on_table.push_back(o.shape_id);
                        in_scene.push_back(o.shape_id);
                    }
                    for (const auto& o : objects) in_scene.push_back(o.shape_id);
                    std::vector<int> novel, local;
                    for (const auto& s : scene.library.shapes) {
                        if (std::find(on_table.begin(), on_table.end(), s.shape_id) !=
                            on_table.end())
                            continue;
                        local.push_back(s.shape_id);
                        if (std::find(in_scene.begin(), in_scene.end(), s.shape_id) ==
                            in_scene.end())
                            novel.push_back(s.shape_id);
                    }
                    const auto& candidates = novel.empty() ? local : novel;
                    if (candidates.empty())
                        throw InvalidInputError("no unused shape available for add");
                    fresh.shape_id =
                        candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
                }
                if (op.position) {
                    if (!spacing_ok(*op.position, objects, table, 0.08))
                        throw PlacementError("explicit add position violates spacing");
                    fresh.center = *op.position;
                } else {
                    long attempts = 0;
                    while (true) {
                        if (++attempts > kPlacementAttempts)
                            throw PlacementError("could not place added object");
                        const Point3 candidate =
                            sample_table_position(rng, out.target.tables[table]);
                        if (spacing_ok(candidate, objects, table, 0.08)) {
                            fresh.center = candidate;
                            break;
                        }
                    }
                }
                objects.push_back(fresh);
                out.labels[fresh.gt_id] = GroundTruthLabel::added;
                break;
            }
        }
    }

    std::size_t changed = 0;
    for (const auto& [id, label] : out.labels)
        if (label != GroundTruthLabel::unchanged) ++changed;
    if (changed * 2 >= scene.objects.size() && changed > 0)
        throw InvalidInputError("changed objects must stay below half the scene");
    return out;
}

// ---------------------------------------------------------------------------

namespace {

RigidTransform look_at(const Point3& eye, const Point3& target) {
    const Eigen::Vector3d forward = (target - eye).normalized();
    Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
    if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();
    right.normalize();
    const Eigen::Vector3d up = right.cross(forward);
    RigidTransform pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = up;
    pose.rotation.col(2) = forward;  // optical axis
    pose.translation = eye;
    return pose;
}

}  // namespace

Trajectory make_trajectory(const Scene& scene, const TrajectoryConfig& cfg, Session session) {
    Trajectory traj;
    traj.fov_degrees = cfg.fov_degrees;
    traj.table_profiles.assign(scene.tables.size(), OverlapProfile::same_side);
    if (session == Session::target) {
        for (int t : cfg.low_overlap_tables) {
            if (t >= 0 && t < static_cast<int>(scene.tables.size()))
                traj.table_profiles[t] = OverlapProfile::opposite_side;
        }
    }

    const double arc = cfg.arc_degrees * std::numbers::pi / 180.0;
    for (std::size_t t = 0; t < scene.tables.size(); ++t) {
        const double base = traj.table_profiles[t] == OverlapProfile::same_side
                                ? -std::numbers::pi / 2.0
                                : std::numbers::pi / 2.0;
        const Point3 center = scene.tables[t].center;
        for (int i = 0; i < cfg.poses_per_table; ++i) {
            const double phi = cfg.poses_per_table == 1
                                   ? base
                                   : base - arc / 2.0 + arc * i / (cfg.poses_per_table - 1);
            const Point3 eye{center.x() + cfg.camera_distance * std::cos(phi),
                             center.y() + cfg.camera_distance * std::sin(phi),
                             cfg.camera_height};
            const Point3 look{center.x(), center.y(), center.z() + kObjectMidHeight};
            traj.poses.push_back({look_at(eye, look), static_cast<int>(t)});
        }
    }
    return traj;
}

double occlusion_fraction(const Scene& scene, std::size_t object_index,
                          const Point3& camera_position) {
    const SceneObject& obj = scene.objects.at(object_index);
    const auto radius_of = [&](const SceneObject& o) {
        return scene.library.shape(o.shape_id).primitive.footprint_radius();
    };

    const Eigen::Vector2d to_obj = (obj.center - camera_position).head<2>();
    const double dist = to_obj.norm();
    if (dist < 1e-9) return 0.0;
    const double own_half = std::atan2(radius_of(obj), dist);
    const double own_angle = std::atan2(to_obj.y(), to_obj.x());
    if (own_half < 1e-12) return 0.0;

    // Angular intervals of closer same-table objects, centered on the target
    // object's bearing.
    std::vector<std::pair<double, double>> blockers;
    for (std::size_t j = 0; j < scene.objects.size(); ++j) {
        if (j == object_index || scene.objects[j].table != obj.table) continue;
        const Eigen::Vector2d v = (scene.objects[j].center - camera_position).head<2>();
        const double d = v.norm();
        if (d >= dist || d < 1e-9) continue;
        const double half = std::atan2(radius_of(scene.objects[j]), d);
        double rel = std::remainder(std::atan2(v.y(), v.x()) - own_angle, 2.0 * std::numbers::pi);
        blockers.push_back({rel - half, rel + half});
    }
    if (blockers.empty()) return 0.0;

    std::sort(blockers.begin(), blockers.end());
    double covered = 0.0;
    double cursor = -own_half;
    for (const auto& [lo, hi] : blockers) {
        const double a = std::max(lo, cursor);
        const double b = std::min(hi, own_half);
        if (b > a) {
            covered += b - a;
            cursor = b;
        }
    }
    return std::clamp(covered / (2.0 * own_half), 0.0, 1.0);
}

ObservationStream stream_observations(const Scene& scene, const Trajectory& traj,
                                      const NoiseModel& noise, Session session,
                                      std::uint64_t seed) {
    ObservationStream stream;
    stream.session_offset = RigidTransform::identity();
    if (session == Session::target) {
        if (noise.explicit_offset)
            stream.session_offset = *noise.explicit_offset;
        else if (noise.offset_translation > 0.0 || noise.offset_rotation_deg > 0.0)
            stream.session_offset = random_offset(noise.offset_translation,
                                                  noise.offset_rotation_deg,
                                                  derive_seed(seed, 0x0ff5e7));
    }

    Rng jitter_rng(derive_seed(seed, 0xd1f7));
    Eigen::Matrix3d drift_rot = Eigen::Matrix3d::Identity();
    Eigen::Vector3d drift_trans = Eigen::Vector3d::Zero();
    const double cos_half_fov = std::cos(traj.fov_degrees * std::numbers::pi / 360.0);

    for (std::size_t pose_index = 0; pose_index < traj.poses.size(); ++pose_index) {
        const CameraPose& pose = traj.poses[pose_index];

        if (noise.sigma_trans > 0.0) drift_trans += jitter_rng.normal3(noise.sigma_trans);
        if (noise.sigma_rot > 0.0) {
            Eigen::Vector3d axis = jitter_rng.normal3(1.0);
            if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
            drift_rot = Eigen::AngleAxisd(jitter_rng.normal(0.0, noise.sigma_rot),
                                          axis.normalized())
                            .toRotationMatrix() *
                        drift_rot;
        }

        const Point3 eye = pose.world_from_camera.translation;
        const Eigen::Vector3d optical = pose.world_from_camera.rotation.col(2);
        const OverlapProfile profile = traj.table_profiles[pose.table];
        // Accumulated pose error, rotating about the current camera position:
        // nearby geometry shifts gently instead of being levered by its
        // distance from the world origin.
        RigidTransform drift;
        drift.rotation = drift_rot;
        drift.translation = eye - drift_rot * eye + drift_trans;

        for (std::size_t i = 0; i < scene.objects.size(); ++i) {
            const SceneObject& obj = scene.objects[i];
            const Eigen::Vector3d to_obj = obj.center - eye;
            const double dist = to_obj.norm();
            if (dist > kMaxCameraRange || dist < 1e-9) continue;
            if (to_obj.dot(optical) / dist < cos_half_fov) continue;

            // Angular interposition over-states how much of a convex object a
            // same-height neighbor really hides; weigh it down accordingly.
            constexpr double kInterpositionWeight = 0.6;
            double occl = kInterpositionWeight * occlusion_fraction(scene, i, eye);
            if (profile == OverlapProfile::opposite_side) occl += noise.occlusion_bump;
            occl = std::clamp(occl, 0.0, 0.95);
            if (occl > noise.occlusion_visible_max) continue;

            ViewContext view{pose.world_from_camera, occl, dist};
            const std::uint64_t obs_seed =
                derive_seed(seed, pose_index * 4096 + static_cast<std::uint64_t>(obj.gt_id));
            Measurement m = synth_observe(scene.library, obj.shape_id, obj.center, view,
                                          noise.descriptor, obs_seed);
            // Re-base the noisy center onto the drifted, offset world estimate.
            const Point3 center_noise = m.center - obj.center;
            m.center = stream.session_offset.apply(drift.apply(obj.center)) + center_noise;
            m.session = session;
            m.frame_index = static_cast<int>(pose_index);
            stream.records.push_back({m, obj.gt_id, static_cast<int>(pose_index), occl});
        }
    }
    return stream;
}

// ---------------------------------------------------------------------------

namespace {

struct SurfaceSample {
    Point3 point;
    Eigen::Vector3d normal;
};

double signed_pow(double v, double e) {
    return v >= 0.0 ? std::pow(v, e) : -std::pow(-v, e);
}

SurfaceSample sample_box(Rng& rng, const Eigen::Vector3d& h) {
    const double ax = h.y() * h.z(), ay = h.x() * h.z(), az = h.x() * h.y();
    const double pick = rng.uniform(0.0, 2.0 * (ax + ay + az));
    SurfaceSample s;
    const double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
    if (pick < 2.0 * ax) {
        const double side = pick < ax ? 1.0 : -1.0;
        s.point = {side * h.x(), u * h.y(), v * h.z()};
        s.normal = {side, 0.0, 0.0};
    } else if (pick < 2.0 * (ax + ay)) {
        const double side = pick < 2.0 * ax + ay ? 1.0 : -1.0;
        s.point = {u * h.x(), side * h.y(), v * h.z()};
        s.normal = {0.0, side, 0.0};
    } else {
        const double side = pick < 2.0 * (ax + ay) + az ? 1.0 : -1.0;
        s.point = {u * h.x(), v * h.y(), side * h.z()};
        s.normal = {0.0, 0.0, side};
    }
    return s;
}

SurfaceSample sample_cylinder(Rng& rng, const Eigen::Vector3d& h) {
    const double r = h.x();
    const double lateral = 2.0 * std::numbers::pi * r * 2.0 * h.z();
    const double cap = std::numbers::pi * r * r;
    const double pick = rng.uniform(0.0, lateral + 2.0 * cap);
    SurfaceSample s;
    if (pick < lateral) {
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.point = {r * std::cos(phi), r * std::sin(phi), rng.uniform(-h.z(), h.z())};
        s.normal = {std::cos(phi), std::sin(phi), 0.0};
    } else {
        const double side = pick < lateral + cap ? 1.0 : -1.0;
        const double rho = r * std::sqrt(rng.uniform(0.0, 1.0));
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.point = {rho * std::cos(phi), rho * std::sin(phi), side * h.z()};
        s.normal = {0.0, 0.0, side};
    }
    return s;
}

SurfaceSample sample_superellipsoid(Rng& rng, const PrimitiveSpec& spec) {
    const auto& h = spec.half_extents;
    const double eta = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    const double omega = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double ce = std::cos(eta), se = std::sin(eta);
    const double co = std::cos(omega), so = std::sin(omega);
    SurfaceSample s;
    s.point = {h.x() * signed_pow(ce, spec.e1) * signed_pow(co, spec.e2),
               h.y() * signed_pow(ce, spec.e1) * signed_pow(so, spec.e2),
               h.z() * signed_pow(se, spec.e1)};
    s.normal = {signed_pow(ce, 2.0 - spec.e1) * signed_pow(co, 2.0 - spec.e2) / h.x(),
                signed_pow(ce, 2.0 - spec.e1) * signed_pow(so, 2.0 - spec.e2) / h.y(),
                signed_pow(se, 2.0 - spec.e1) / h.z()};
    const double n = s.normal.norm();
    if (n > 1e-12) s.normal /= n;
    return s;
}

}  // namespace

RigidTransform object_pose(const SceneObject& obj) {
    RigidTransform pose;
    pose.rotation = Eigen::AngleAxisd(obj.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    pose.translation = obj.center;
    return pose;
}

PointCloud sample_partial_cloud(const PrimitiveSpec& primitive, const RigidTransform& pose,
                                const RigidTransform& camera_pose, int n_points,
                                std::uint64_t seed) {
    if (n_points < 1) throw InvalidInputError("n_points must be >= 1");
    Rng rng(derive_seed(seed, 0xc1a0d));
    PointCloud cloud;
    cloud.frame = Frame::world;
    const Point3 eye = camera_pose.translation;

    long attempts = 0;
    const long cap = 64L * n_points;
    while (static_cast<int>(cloud.points.size()) < n_points && ++attempts <= cap) {
        SurfaceSample s;
        switch (primitive.kind) {
            case PrimitiveSpec::Kind::box: s = sample_box(rng, primitive.half_extents); break;
            case PrimitiveSpec::Kind::cylinder:
                s = sample_cylinder(rng, primitive.half_extents);
                break;
            case PrimitiveSpec::Kind::superellipsoid:
                s = sample_superellipsoid(rng, primitive);
                break;
        }
        const Point3 world_point = pose.apply(s.point);
        const Eigen::Vector3d world_normal = pose.rotation * s.normal;
        if (world_normal.dot(eye - world_point) > 0.0) cloud.points.push_back(world_point);
    }
    return cloud;
}

RigidTransform random_offset(double translation, double rotation_deg, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x0ff));
    RigidTransform t;
    if (rotation_deg > 0.0) {
        Eigen::Vector3d axis = rng.normal3(1.0);
        if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
        t.rotation = Eigen::AngleAxisd(rotation_deg * std::numbers::pi / 180.0, axis.normalized())
                         .toRotationMatrix();
    }
    if (translation > 0.0) {
        Eigen::Vector3d dir = rng.normal3(1.0);
        if (dir.norm() < 1e-12) dir = Eigen::Vector3d::UnitX();
        t.translation = translation * dir.normalized();
    }
    return t;
}

}  // namespace scenediff::sim
