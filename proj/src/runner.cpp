#include "scenediff/runner.hpp"

#include <chrono>
#include <fstream>

#include "scenediff/json_io.hpp"
#include "scenediff/rng.hpp"

namespace scenediff {

namespace {

// Sub-seed streams of a run seed.
enum : std::uint64_t {
    kSceneStream = 1,
    kChangeStream = 2,
    kSourceStream = 3,
    kTargetStream = 4,
    kRansacStream = 5,
    kSourceCloudStream = 6,
    kTargetCloudStream = 7,
};

int majority_gt(const std::map<int, int>& histogram) {
    int best_gt = -1;
    int best_count = 0;
    for (const auto& [gt, count] : histogram) {
        if (count > best_count) {
            best_gt = gt;
            best_count = count;
        }
    }
    return best_gt;
}

const sim::SceneObject* find_object(const sim::Scene& scene, int gt_id) {
    for (const auto& o : scene.objects)
        if (o.gt_id == gt_id) return &o;
    return nullptr;
}

}  // namespace

MetricCounts compute_metrics(const std::map<int, sim::GroundTruthLabel>& labels,
                             const std::map<int, bool>& detected_changed) {
    MetricCounts m;
    for (const auto& [gt, label] : labels) {
        const bool truly_changed = label != sim::GroundTruthLabel::unchanged;
        auto it = detected_changed.find(gt);
        const bool detected = it != detected_changed.end() && it->second;
        if (truly_changed && detected)
            ++m.tp;
        else if (!truly_changed && detected)
            ++m.fp;
        else if (truly_changed && !detected)
            ++m.fn;
    }
    m.degenerate = (m.tp + m.fp == 0) || (m.tp + m.fn == 0);
    m.precision = (m.tp + m.fp) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 1.0;
    m.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 1.0;
    return m;
}

RunReport run_scenario(const ScenarioConfig& input, const RunOverrides& overrides) {
    const auto wall_start = std::chrono::steady_clock::now();

    ScenarioConfig cfg = input;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.classify_mode) cfg.detector.classify_mode = *overrides.classify_mode;
    if (overrides.post_registration_drift)
        cfg.detector.post_registration_drift = *overrides.post_registration_drift;
    if (overrides.baseline_enabled) cfg.baseline.kind = *overrides.baseline_enabled ? "nn" : "none";

    RunReport report;
    report.config = cfg;
    report.seed = cfg.seed;

    sim::SceneConfig scene_cfg = cfg.scene;
    scene_cfg.seed = derive_seed(cfg.seed, kSceneStream);
    const sim::Scene scene = sim::generate_scene(scene_cfg);

    sim::ChangeSpecList change_spec = cfg.changes;
    change_spec.seed = derive_seed(cfg.seed, kChangeStream);
    const sim::ChangedScene changed = sim::apply_changes(scene, change_spec);

    const sim::Trajectory source_traj = sim::make_trajectory(scene, cfg.trajectory, Session::source);
    const sim::Trajectory target_traj =
        sim::make_trajectory(changed.target, cfg.trajectory, Session::target);
    const sim::ObservationStream source_stream = sim::stream_observations(
        scene, source_traj, cfg.noise, Session::source, derive_seed(cfg.seed, kSourceStream));
    const sim::ObservationStream target_stream =
        sim::stream_observations(changed.target, target_traj, cfg.noise, Session::target,
                                 derive_seed(cfg.seed, kTargetStream));
    report.true_session_offset = target_stream.session_offset;

    // Source session: intra-tree association only.
    SpatialObjectTree source_tree(cfg.detector.interval_length, cfg.detector.neighbor_margin);
    std::map<ObjectId, std::map<int, int>> source_provenance;
    for (const auto& rec : source_stream.records) {
        const auto outcome =
            source_tree.insert_or_associate(rec.measurement, cfg.detector.delta_d, cfg.detector.delta_s);
        source_provenance[outcome.id][rec.gt_id]++;
    }

    // Target session: online detection.
    DetectorConfig det_cfg = cfg.detector;
    det_cfg.ransac.seed = derive_seed(cfg.seed, kRansacStream);
    ChangeDetector detector(std::move(source_tree), det_cfg);
    std::map<ObjectId, std::map<int, int>> target_provenance;
    double detect_seconds = 0.0;
    std::size_t i = 0;
    while (i < target_stream.records.size()) {
        // One frame = all measurements of one camera pose.
        const int frame = target_stream.records[i].measurement.frame_index;
        std::vector<Measurement> batch;
        std::vector<int> batch_gt;
        while (i < target_stream.records.size() &&
               target_stream.records[i].measurement.frame_index == frame) {
            batch.push_back(target_stream.records[i].measurement);
            batch_gt.push_back(target_stream.records[i].gt_id);
            ++i;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = detector.process_frame(batch);
        detect_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (std::size_t k = 0; k < batch.size(); ++k)
            target_provenance[result.associations[k].id][batch_gt[k]]++;
        for (const auto& v : result.verdicts) report.verdict_log.push_back({v, -1});
    }
    for (const auto& v : detector.finalize_removed()) report.verdict_log.push_back({v, -1});

    report.measurement_count = static_cast<int>(target_stream.records.size());
    report.mean_detect_ms =
        report.measurement_count > 0 ? 1e3 * detect_seconds / report.measurement_count : 0.0;
    report.registered = detector.t_rel().has_value();
    if (report.registered) report.estimated_t_rel = *detector.t_rel();
    report.status = report.registered ? "ok" : "registration_failed";

    // Attribute tree objects to ground-truth objects by majority provenance.
    std::map<ObjectId, int> target_gt, source_gt;
    for (const auto& [id, hist] : target_provenance) target_gt[id] = majority_gt(hist);
    for (const auto& [id, hist] : source_provenance) source_gt[id] = majority_gt(hist);
    for (auto& rec : report.verdict_log) {
        const auto& lookup = rec.verdict.session == Session::target ? target_gt : source_gt;
        auto it = lookup.find(rec.verdict.object_id);
        rec.gt_id = it != lookup.end() ? it->second : -1;
    }

    std::map<int, bool> ours_changed;
    std::map<int, std::pair<std::string, std::string>> ours_decisive;  // gt -> kind, evidence
    std::map<int, bool> ours_seen;
    for (const auto& rec : report.verdict_log) {
        if (rec.gt_id < 0) continue;
        ours_seen[rec.gt_id] = true;
        if (is_changed_kind(rec.verdict.kind)) {
            if (!ours_changed[rec.gt_id])
                ours_decisive[rec.gt_id] = {to_string(rec.verdict.kind),
                                            to_string(rec.verdict.evidence)};
            ours_changed[rec.gt_id] = true;
        }
    }
    report.ours = compute_metrics(changed.labels, ours_changed);

    // NN baseline on ground-truth-aligned clouds with instance-id association.
    std::map<int, bool> nn_flags;
    std::map<int, NnResult> nn_states;
    if (cfg.baseline.kind == "nn") {
        NnBaselineDetector nn(cfg.baseline.nn);
        const std::uint64_t src_cloud_seed = derive_seed(cfg.seed, kSourceCloudStream);
        for (std::size_t i = 0; i < source_stream.records.size(); ++i) {
            const auto& rec = source_stream.records[i];
            const auto* obj = find_object(scene, rec.gt_id);
            const auto cloud = sim::sample_partial_cloud(
                scene.library.shape(obj->shape_id).primitive, sim::object_pose(*obj),
                source_traj.poses[rec.pose_index].world_from_camera, cfg.baseline.points_per_view,
                derive_seed(src_cloud_seed, i));
            nn.add_source_cloud(rec.gt_id, cloud);
        }
        const std::uint64_t tgt_cloud_seed = derive_seed(cfg.seed, kTargetCloudStream);
        for (std::size_t i = 0; i < target_stream.records.size(); ++i) {
            const auto& rec = target_stream.records[i];
            const auto* obj = find_object(changed.target, rec.gt_id);
            const auto cloud = sim::sample_partial_cloud(
                changed.target.library.shape(obj->shape_id).primitive, sim::object_pose(*obj),
                target_traj.poses[rec.pose_index].world_from_camera, cfg.baseline.points_per_view,
                derive_seed(tgt_cloud_seed, i));
            nn.observe_target(rec.gt_id, cloud);
        }
        nn_states = nn.states();
        for (const auto& [gt, state] : nn_states) nn_flags[gt] = state.changed;
        report.nn = compute_metrics(changed.labels, nn_flags);
    }

    for (const auto& [gt, label] : changed.labels) {
        ObjectReport row;
        row.gt_id = gt;
        row.label = label;
        const auto* obj = find_object(changed.target, gt);
        if (!obj) obj = find_object(scene, gt);
        if (obj) {
            row.shape_id = obj->shape_id;
            row.table = obj->table;
        }
        if (ours_changed.count(gt) && ours_changed.at(gt)) {
            row.ours_changed = true;
            row.ours_verdict = ours_decisive.at(gt).first;
            row.ours_evidence = ours_decisive.at(gt).second;
        } else if (ours_seen.count(gt)) {
            row.ours_verdict = "unchanged";
        }
        if (auto it = nn_states.find(gt); it != nn_states.end()) {
            row.nn_seen = true;
            row.nn_changed = it->second.changed;
            row.nn_fraction = it->second.fraction;
        }
        report.objects.push_back(row);
    }

    if (overrides.tree_dump_path) {
        nlohmann::ordered_json dump;
        dump["source"] = tree_to_json(detector.source_tree());
        dump["target"] = tree_to_json(detector.target_tree());
        std::ofstream out(*overrides.tree_dump_path);
        if (!out) throw Error("cannot open tree dump path");
        out << dump.dump(2) << "\n";
    }
    if (overrides.stream_dump_path) {
        std::ofstream out(*overrides.stream_dump_path);
        if (!out) throw Error("cannot open stream dump path");
        auto dump_stream = [&](const sim::ObservationStream& stream, const char* session) {
            for (const auto& rec : stream.records) {
                nlohmann::ordered_json line;
                line["type"] = "measurement";
                line["session"] = session;
                line["frame"] = rec.measurement.frame_index;
                line["gt_id"] = rec.gt_id;
                line["center"] = {rec.measurement.center.x(), rec.measurement.center.y(),
                                  rec.measurement.center.z()};
                line["quality"] = rec.measurement.quality;
                line["occlusion"] = rec.occlusion;
                out << line.dump() << "\n";
            }
        };
        dump_stream(source_stream, "source");
        dump_stream(target_stream, "target");
        for (const auto& [gt, label] : changed.labels) {
            nlohmann::ordered_json line;
            line["type"] = "label";
            line["gt_id"] = gt;
            line["label"] = sim::to_string(label);
            out << line.dump() << "\n";
        }
    }
    if (overrides.dump_clouds_dir) {
        std::filesystem::create_directories(*overrides.dump_clouds_dir);
        // One fused ground-truth-aligned cloud per object and session.
        auto dump_session = [&](const sim::Scene& layout, const sim::Trajectory& traj,
                                const sim::ObservationStream& stream, std::uint64_t base_seed,
                                const char* prefix) {
            std::map<int, PointCloud> fused;
            for (std::size_t i = 0; i < stream.records.size(); ++i) {
                const auto& rec = stream.records[i];
                const auto* obj = find_object(layout, rec.gt_id);
                const auto cloud = sim::sample_partial_cloud(
                    layout.library.shape(obj->shape_id).primitive, sim::object_pose(*obj),
                    traj.poses[rec.pose_index].world_from_camera, cfg.baseline.points_per_view,
                    derive_seed(base_seed, i));
                auto& f = fused[rec.gt_id];
                f.points.insert(f.points.end(), cloud.points.begin(), cloud.points.end());
            }
            for (const auto& [gt, cloud] : fused) {
                write_ply(std::filesystem::path(*overrides.dump_clouds_dir) /
                              (std::string(prefix) + "_" + std::to_string(gt) + ".ply"),
                          cloud);
            }
        };
        dump_session(scene, source_traj, source_stream, derive_seed(cfg.seed, kSourceCloudStream),
                     "source");
        dump_session(changed.target, target_traj, target_stream,
                     derive_seed(cfg.seed, kTargetCloudStream), "target");
    }

    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return report;
}

namespace {

nlohmann::ordered_json metrics_to_json(const MetricCounts& m) {
    return {{"tp", m.tp},         {"fp", m.fp},         {"fn", m.fn},
            {"precision", m.precision}, {"recall", m.recall}, {"degenerate", m.degenerate}};
}

nlohmann::ordered_json transform_to_json(const RigidTransform& t) {
    nlohmann::ordered_json j;
    j["rotation"] = nlohmann::ordered_json::array();
    for (int r = 0; r < 3; ++r)
        j["rotation"].push_back({t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2)});
    j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
    return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const RunReport& report, bool include_timing) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_to_json(report.config);
    j["seed"] = report.seed;
    j["status"] = report.status;
    j["registered"] = report.registered;
    if (report.registered) j["t_rel"] = transform_to_json(report.estimated_t_rel);
    j["true_session_offset"] = transform_to_json(report.true_session_offset);

    j["objects"] = nlohmann::ordered_json::array();
    for (const auto& row : report.objects) {
        nlohmann::ordered_json o;
        o["gt_id"] = row.gt_id;
        o["shape_id"] = row.shape_id;
        o["table"] = row.table;
        o["label"] = sim::to_string(row.label);
        o["ours"] = {{"verdict", row.ours_verdict},
                     {"evidence", row.ours_evidence},
                     {"changed", row.ours_changed}};
        if (report.nn)
            o["nn"] = {{"seen", row.nn_seen},
                       {"changed", row.nn_changed},
                       {"fraction", row.nn_fraction}};
        j["objects"].push_back(o);
    }
    j["metrics"]["ours"] = metrics_to_json(report.ours);
    if (report.nn) j["metrics"]["nn"] = metrics_to_json(*report.nn);

    j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& rec : report.verdict_log) {
        j["verdicts"].push_back({{"object_id", rec.verdict.object_id},
                                 {"gt_id", rec.gt_id},
                                 {"session",
                                  rec.verdict.session == Session::target ? "target" : "source"},
                                 {"kind", to_string(rec.verdict.kind)},
                                 {"evidence", to_string(rec.verdict.evidence)},
                                 {"frame", rec.verdict.frame_index}});
    }

    if (include_timing) {
        j["timing"] = {{"total_seconds", report.total_seconds},
                       {"mean_detect_ms", report.mean_detect_ms},
                       {"measurements", report.measurement_count}};
    }
    return j;
}

std::string verdicts_to_jsonl(const RunReport& report) {
    std::string out;
    for (const auto& rec : report.verdict_log) {
        nlohmann::ordered_json line = {
            {"object_id", rec.verdict.object_id},
            {"gt_id", rec.gt_id},
            {"session", rec.verdict.session == Session::target ? "target" : "source"},
            {"kind", to_string(rec.verdict.kind)},
            {"evidence", to_string(rec.verdict.evidence)},
            {"frame", rec.verdict.frame_index}};
        out += line.dump();
        out += "\n";
    }
    return out;
}

}  // namespace scenediff
