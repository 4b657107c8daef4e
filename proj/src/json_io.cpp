#include "scenediff/json_io.hpp"

#include <fstream>

namespace scenediff {

namespace {

std::string kind_name(PrimitiveSpec::Kind kind) {
    switch (kind) {
        case PrimitiveSpec::Kind::box: return "box";
        case PrimitiveSpec::Kind::cylinder: return "cylinder";
        case PrimitiveSpec::Kind::superellipsoid: return "superellipsoid";
    }
    return "unknown";
}

PrimitiveSpec::Kind kind_from_name(const std::string& name) {
    if (name == "box") return PrimitiveSpec::Kind::box;
    if (name == "cylinder") return PrimitiveSpec::Kind::cylinder;
    if (name == "superellipsoid") return PrimitiveSpec::Kind::superellipsoid;
    throw InvalidInputError("unknown primitive kind: " + name);
}

}  // namespace

nlohmann::ordered_json library_to_json(const SyntheticShapeLibrary& lib) {
    nlohmann::ordered_json j;
    j["k"] = lib.k;
    j["max_pairwise_similarity"] = lib.max_pairwise_similarity;
    j["shapes"] = nlohmann::ordered_json::array();
    for (const auto& s : lib.shapes) {
        nlohmann::ordered_json shape;
        shape["shape_id"] = s.shape_id;
        shape["code"] = std::vector<double>(s.canonical_code.values.data(),
                                            s.canonical_code.values.data() +
                                                s.canonical_code.values.size());
        shape["primitive"] = {{"kind", kind_name(s.primitive.kind)},
                              {"half_extents",
                               {s.primitive.half_extents.x(), s.primitive.half_extents.y(),
                                s.primitive.half_extents.z()}},
                              {"e1", s.primitive.e1},
                              {"e2", s.primitive.e2}};
        j["shapes"].push_back(shape);
    }
    return j;
}

SyntheticShapeLibrary library_from_json(const nlohmann::json& j) {
    SyntheticShapeLibrary lib;
    lib.k = j.at("k").get<int>();
    lib.max_pairwise_similarity = j.at("max_pairwise_similarity").get<double>();
    for (const auto& shape : j.at("shapes")) {
        LibraryShape s;
        s.shape_id = shape.at("shape_id").get<int>();
        const auto values = shape.at("code").get<std::vector<double>>();
        s.canonical_code = ShapeCode(
            Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<long>(values.size())));
        const auto& prim = shape.at("primitive");
        s.primitive.kind = kind_from_name(prim.at("kind").get<std::string>());
        const auto he = prim.at("half_extents").get<std::vector<double>>();
        if (he.size() != 3) throw InvalidInputError("half_extents needs 3 entries");
        s.primitive.half_extents = {he[0], he[1], he[2]};
        s.primitive.e1 = prim.value("e1", 1.0);
        s.primitive.e2 = prim.value("e2", 1.0);
        lib.shapes.push_back(std::move(s));
    }
    return lib;
}

namespace {

nlohmann::ordered_json axis_to_json(const CoordinateIntervalTree& tree) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    tree.for_each([&](const CoordinateIntervalTree::Node& n) {
        nodes.push_back({{"lo", n.lo}, {"hi", n.hi}, {"members", n.members}});
    });
    return nodes;
}

}  // namespace

nlohmann::ordered_json tree_to_json(const SpatialObjectTree& tree) {
    nlohmann::ordered_json j;
    j["interval_length"] = tree.interval_length();
    j["nodes_x"] = axis_to_json(tree.x_tree());
    j["nodes_y"] = axis_to_json(tree.y_tree());
    j["objects"] = nlohmann::ordered_json::array();
    for (const auto& o : tree.all_objects()) {
        j["objects"].push_back(
            {{"id", o.id},
             {"center", {o.center.x(), o.center.y(), o.center.z()}},
             {"quality", o.quality},
             {"marked_changed", o.marked_changed},
             {"observed", o.observed},
             {"matched", o.matched},
             {"code", std::vector<double>(o.shape_code.values.data(),
                                          o.shape_code.values.data() + o.shape_code.size())}});
    }
    return j;
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.points.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "end_header\n";
    out.precision(17);
    for (const auto& p : cloud.points) out << p.x() << " " << p.y() << " " << p.z() << "\n";
}

}  // namespace scenediff
