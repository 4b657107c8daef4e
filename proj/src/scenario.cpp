#include "scenediff/scenario.hpp"

#include <fstream>

namespace scenediff {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("field '" + key + "': " + e.what());
    }
}

sim::ChangeKind change_kind_from_string(const std::string& s) {
    if (s == "add") return sim::ChangeKind::add;
    if (s == "remove") return sim::ChangeKind::remove;
    if (s == "move") return sim::ChangeKind::move;
    if (s == "swap") return sim::ChangeKind::swap;
    throw ConfigError("unknown change kind: " + s);
}

std::string change_kind_to_string(sim::ChangeKind k) {
    switch (k) {
        case sim::ChangeKind::add: return "add";
        case sim::ChangeKind::remove: return "remove";
        case sim::ChangeKind::move: return "move";
        case sim::ChangeKind::swap: return "swap";
    }
    return "unknown";
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario document must be a JSON object");
    ScenarioConfig cfg;
    cfg.name = get_or<std::string>(j, "name", "scenario");
    cfg.seed_in_file = j.contains("seed");
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);

    if (j.contains("scene")) {
        const auto& s = j.at("scene");
        cfg.scene.n_tables = get_or(s, "n_tables", cfg.scene.n_tables);
        if (s.contains("objects_per_table")) {
            const auto range = s.at("objects_per_table").get<std::vector<int>>();
            if (range.size() != 2) throw ConfigError("objects_per_table needs [min, max]");
            cfg.scene.objects_per_table_min = range[0];
            cfg.scene.objects_per_table_max = range[1];
        }
        // A scenario that describes its own scene opts into the total clamp
        // explicitly; otherwise only the per-table range applies.
        cfg.scene.total_objects_min = 0;
        cfg.scene.total_objects_max = 0;
        if (s.contains("total_objects") && !s.at("total_objects").is_null()) {
            const auto range = s.at("total_objects").get<std::vector<int>>();
            if (range.size() != 2) throw ConfigError("total_objects needs [min, max]");
            cfg.scene.total_objects_min = range[0];
            cfg.scene.total_objects_max = range[1];
        }
        cfg.scene.table_spacing = get_or(s, "table_spacing", cfg.scene.table_spacing);
        cfg.scene.placement_half_extent =
            get_or(s, "placement_half_extent", cfg.scene.placement_half_extent);
        cfg.scene.min_object_spacing =
            get_or(s, "min_object_spacing", cfg.scene.min_object_spacing);
        cfg.scene.table_height = get_or(s, "table_height", cfg.scene.table_height);
        if (s.contains("library")) {
            const auto& lib = s.at("library");
            cfg.scene.library_shapes = get_or(lib, "shapes", cfg.scene.library_shapes);
            cfg.scene.code_dim = get_or(lib, "code_dim", cfg.scene.code_dim);
            cfg.scene.max_pairwise_similarity =
                get_or(lib, "max_pairwise_similarity", cfg.scene.max_pairwise_similarity);
        }
    }

    if (j.contains("changes")) {
        for (const auto& c : j.at("changes")) {
            sim::ChangeOp op;
            op.kind = change_kind_from_string(c.at("kind").get<std::string>());
            op.table = get_or(c, "table", -1);
            op.gt_id = get_or(c, "gt_id", -1);
            op.second_gt_id = get_or(c, "second_gt_id", -1);
            op.shape_id = get_or(c, "shape_id", -1);
            if (c.contains("position")) {
                const auto p = c.at("position").get<std::vector<double>>();
                if (p.size() != 3) throw ConfigError("change position needs [x, y, z]");
                op.position = Point3{p[0], p[1], p[2]};
            }
            cfg.changes.ops.push_back(op);
        }
    }

    if (j.contains("trajectories")) {
        const auto& t = j.at("trajectories");
        cfg.trajectory.poses_per_table = get_or(t, "poses_per_table", cfg.trajectory.poses_per_table);
        cfg.trajectory.arc_degrees = get_or(t, "arc_degrees", cfg.trajectory.arc_degrees);
        cfg.trajectory.camera_distance =
            get_or(t, "camera_distance", cfg.trajectory.camera_distance);
        cfg.trajectory.camera_height = get_or(t, "camera_height", cfg.trajectory.camera_height);
        cfg.trajectory.fov_degrees = get_or(t, "fov_degrees", cfg.trajectory.fov_degrees);
        cfg.trajectory.low_overlap_tables =
            get_or(t, "low_overlap_tables", cfg.trajectory.low_overlap_tables);
    }

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        cfg.noise.descriptor.sigma_code = get_or(n, "sigma_code", cfg.noise.descriptor.sigma_code);
        cfg.noise.descriptor.beta = get_or(n, "beta", cfg.noise.descriptor.beta);
        cfg.noise.descriptor.sigma_center =
            get_or(n, "sigma_center", cfg.noise.descriptor.sigma_center);
        cfg.noise.descriptor.q_max = get_or(n, "q_max", cfg.noise.descriptor.q_max);
        cfg.noise.descriptor.gamma = get_or(n, "gamma", cfg.noise.descriptor.gamma);
        cfg.noise.sigma_rot = get_or(n, "sigma_rot", cfg.noise.sigma_rot);
        cfg.noise.sigma_trans = get_or(n, "sigma_trans", cfg.noise.sigma_trans);
        cfg.noise.offset_translation =
            get_or(n, "offset_translation", cfg.noise.offset_translation);
        cfg.noise.offset_rotation_deg =
            get_or(n, "offset_rotation_deg", cfg.noise.offset_rotation_deg);
        cfg.noise.occlusion_bump = get_or(n, "occlusion_bump", cfg.noise.occlusion_bump);
        cfg.noise.occlusion_visible_max =
            get_or(n, "occlusion_visible_max", cfg.noise.occlusion_visible_max);
    }

    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        cfg.detector.delta_s = get_or(d, "delta_s", cfg.detector.delta_s);
        cfg.detector.delta_d = get_or(d, "delta_d", cfg.detector.delta_d);
        cfg.detector.delta_e = get_or(d, "delta_e", cfg.detector.delta_e);
        cfg.detector.interval_length = get_or(d, "interval_length", cfg.detector.interval_length);
        cfg.detector.neighbor_margin = get_or(d, "neighbor_margin", cfg.detector.neighbor_margin);
        cfg.detector.correspondence_count = get_or<std::size_t>(
            d, "n_correspondences", cfg.detector.correspondence_count);
        const std::string mode = get_or<std::string>(d, "classify_mode", "graph");
        if (mode == "graph")
            cfg.detector.classify_mode = ClassifyMode::graph;
        else if (mode == "objectwise")
            cfg.detector.classify_mode = ClassifyMode::objectwise;
        else
            throw ConfigError("classify_mode must be 'graph' or 'objectwise'");
        if (d.contains("ransac")) {
            const auto& r = d.at("ransac");
            cfg.detector.ransac.iterations = get_or(r, "iterations", cfg.detector.ransac.iterations);
            cfg.detector.ransac.inlier_threshold =
                get_or(r, "inlier_threshold", cfg.detector.ransac.inlier_threshold);
            cfg.detector.ransac.min_sample = get_or(r, "min_sample", cfg.detector.ransac.min_sample);
        }
    }

    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        cfg.baseline.kind = get_or<std::string>(b, "kind", cfg.baseline.kind);
        if (cfg.baseline.kind != "nn" && cfg.baseline.kind != "none")
            throw ConfigError("baseline kind must be 'nn' or 'none'");
        cfg.baseline.nn.d = get_or(b, "d", cfg.baseline.nn.d);
        cfg.baseline.nn.r = get_or(b, "r", cfg.baseline.nn.r);
        cfg.baseline.points_per_view = get_or(b, "points_per_view", cfg.baseline.points_per_view);
    }

    // Value sanity: fail configuration errors up front, not mid-run.
    if (cfg.detector.delta_s <= 0.0 || cfg.detector.delta_s >= 1.0)
        throw ConfigError("delta_s must be in (0, 1)");
    if (cfg.detector.delta_d <= 0.0) throw ConfigError("delta_d must be positive");
    if (cfg.detector.delta_e <= 0.0) throw ConfigError("delta_e must be positive");
    if (cfg.detector.interval_length <= 0.0)
        throw ConfigError("interval_length must be positive");
    if (cfg.detector.correspondence_count < 3)
        throw ConfigError("n_correspondences must be >= 3");
    if (cfg.baseline.nn.d <= 0.0) throw ConfigError("baseline d must be positive");
    if (cfg.baseline.nn.r <= 0.0 || cfg.baseline.nn.r >= 1.0)
        throw ConfigError("baseline r must be in (0, 1)");
    return cfg;
}

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::ordered_json j;
    j["name"] = cfg.name;
    j["seed"] = cfg.seed;
    j["scene"] = {
        {"n_tables", cfg.scene.n_tables},
        {"objects_per_table", {cfg.scene.objects_per_table_min, cfg.scene.objects_per_table_max}},
        {"table_spacing", cfg.scene.table_spacing},
        {"placement_half_extent", cfg.scene.placement_half_extent},
        {"min_object_spacing", cfg.scene.min_object_spacing},
        {"table_height", cfg.scene.table_height},
        {"library",
         {{"shapes", cfg.scene.library_shapes},
          {"code_dim", cfg.scene.code_dim},
          {"max_pairwise_similarity", cfg.scene.max_pairwise_similarity}}}};
    if (cfg.scene.total_objects_min > 0)
        j["scene"]["total_objects"] = {cfg.scene.total_objects_min, cfg.scene.total_objects_max};

    j["changes"] = nlohmann::ordered_json::array();
    for (const auto& op : cfg.changes.ops) {
        nlohmann::ordered_json c;
        c["kind"] = change_kind_to_string(op.kind);
        c["table"] = op.table;
        if (op.gt_id >= 0) c["gt_id"] = op.gt_id;
        if (op.second_gt_id >= 0) c["second_gt_id"] = op.second_gt_id;
        if (op.shape_id >= 0) c["shape_id"] = op.shape_id;
        if (op.position) c["position"] = {op.position->x(), op.position->y(), op.position->z()};
        j["changes"].push_back(c);
    }

    j["trajectories"] = {{"poses_per_table", cfg.trajectory.poses_per_table},
                         {"arc_degrees", cfg.trajectory.arc_degrees},
                         {"camera_distance", cfg.trajectory.camera_distance},
                         {"camera_height", cfg.trajectory.camera_height},
                         {"fov_degrees", cfg.trajectory.fov_degrees},
                         {"low_overlap_tables", cfg.trajectory.low_overlap_tables}};
    j["noise"] = {{"sigma_code", cfg.noise.descriptor.sigma_code},
                  {"beta", cfg.noise.descriptor.beta},
                  {"sigma_center", cfg.noise.descriptor.sigma_center},
                  {"q_max", cfg.noise.descriptor.q_max},
                  {"gamma", cfg.noise.descriptor.gamma},
                  {"sigma_rot", cfg.noise.sigma_rot},
                  {"sigma_trans", cfg.noise.sigma_trans},
                  {"offset_translation", cfg.noise.offset_translation},
                  {"offset_rotation_deg", cfg.noise.offset_rotation_deg},
                  {"occlusion_bump", cfg.noise.occlusion_bump},
                  {"occlusion_visible_max", cfg.noise.occlusion_visible_max}};
    j["detector"] = {{"delta_s", cfg.detector.delta_s},
                     {"delta_d", cfg.detector.delta_d},
                     {"delta_e", cfg.detector.delta_e},
                     {"interval_length", cfg.detector.interval_length},
                     {"neighbor_margin", cfg.detector.neighbor_margin},
                     {"n_correspondences", cfg.detector.correspondence_count},
                     {"classify_mode",
                      cfg.detector.classify_mode == ClassifyMode::graph ? "graph" : "objectwise"},
                     {"ransac",
                      {{"iterations", cfg.detector.ransac.iterations},
                       {"inlier_threshold", cfg.detector.ransac.inlier_threshold},
                       {"min_sample", cfg.detector.ransac.min_sample}}}};
    j["baseline"] = {{"kind", cfg.baseline.kind},
                     {"d", cfg.baseline.nn.d},
                     {"r", cfg.baseline.nn.r},
                     {"points_per_view", cfg.baseline.points_per_view}};
    return j;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace scenediff
