#include "scenediff/object_tree.hpp"

#include <algorithm>
#include <cmath>

#include "scenediff/descriptor.hpp"

namespace scenediff {

SpatialObjectTree::SpatialObjectTree(double interval_length, double neighbor_margin)
    : tx_(interval_length), ty_(interval_length), neighbor_margin_(neighbor_margin) {
    if (neighbor_margin < 0.0) throw InvalidInputError("neighbor_margin must be >= 0");
}

namespace {

// Sorted-unique union of the member lists of all matched nodes.
std::vector<ObjectId> axis_members(const CoordinateIntervalTree& tree, double coord,
                                   double margin) {
    std::vector<ObjectId> out;
    for (const auto* node : tree.find_within(coord, margin)) {
        std::vector<ObjectId> merged;
        merged.reserve(out.size() + node->members.size());
        std::set_union(out.begin(), out.end(), node->members.begin(), node->members.end(),
                       std::back_inserter(merged));
        out = std::move(merged);
    }
    return out;
}

}  // namespace

std::vector<const ObjectInstance*> SpatialObjectTree::query_neighborhood(const Point3& p) const {
    std::vector<const ObjectInstance*> out;
    const auto xs = axis_members(tx_, p.x(), neighbor_margin_);
    if (xs.empty()) return out;
    const auto ys = axis_members(ty_, p.y(), neighbor_margin_);
    if (ys.empty()) return out;
    auto ix = xs.begin();
    auto iy = ys.begin();
    while (ix != xs.end() && iy != ys.end()) {
        if (*ix < *iy)
            ++ix;
        else if (*iy < *ix)
            ++iy;
        else {
            out.push_back(&objects_.at(*ix));
            ++ix;
            ++iy;
        }
    }
    return out;
}

std::vector<ObjectInstance*> SpatialObjectTree::query_neighborhood(const Point3& p) {
    std::vector<ObjectInstance*> out;
    for (const auto* o : std::as_const(*this).query_neighborhood(p))
        out.push_back(const_cast<ObjectInstance*>(o));
    return out;
}

void SpatialObjectTree::place(ObjectId id, const Point3& center) {
    auto* nx = tx_.find_or_create(center.x());
    auto* ny = ty_.find_or_create(center.y());
    insert_member(*nx, id);
    insert_member(*ny, id);
    homes_[id] = {nx, ny};
}

AssociationOutcome SpatialObjectTree::insert_or_associate(const Measurement& m, double delta_d,
                                                          double delta_s) {
    if (!m.center.allFinite()) throw InvalidInputError("measurement center is not finite");
    if (!(m.quality > 0.0 && m.quality <= 1.0))
        throw InvalidInputError("measurement quality must be in (0, 1]");
    if (!m.shape_code.valid()) throw InvalidInputError("measurement shape code is invalid");
    if (!(delta_d > 0.0)) throw InvalidInputError("delta_d must be positive");
    if (!(delta_s > 0.0 && delta_s < 1.0)) throw InvalidInputError("delta_s must be in (0, 1)");

    ObjectInstance* best = nullptr;
    double best_sim = 0.0;
    double best_dist = 0.0;
    for (auto* o : query_neighborhood(m.center)) {
        const double dist = (o->center - m.center).norm();
        if (!(dist < delta_d)) continue;
        const double sim = cosine_similarity(o->shape_code, m.shape_code);
        if (!(sim > delta_s)) continue;
        const bool wins = !best || sim > best_sim || (sim == best_sim && dist < best_dist) ||
                          (sim == best_sim && dist == best_dist && o->id < best->id);
        if (wins) {
            best = o;
            best_sim = sim;
            best_dist = dist;
        }
    }

    if (best) {
        AssociationOutcome outcome{AssociationOutcome::Kind::associated, best->id, false};
        if (m.quality > best->quality) {
            best->shape_code = m.shape_code;
            best->center = m.center;
            best->quality = m.quality;
            outcome.updated = true;
            // The refreshed center may have crossed a node boundary; re-home so
            // node intervals keep containing their members' coordinates.
            auto& [nx, ny] = homes_.at(best->id);
            if (m.center.x() < nx->lo || m.center.x() > nx->hi || m.center.y() < ny->lo ||
                m.center.y() > ny->hi) {
                erase_member(*nx, best->id);
                erase_member(*ny, best->id);
                place(best->id, m.center);
            }
        }
        return outcome;
    }

    ObjectInstance fresh;
    fresh.id = next_id_++;
    fresh.shape_code = m.shape_code;
    fresh.center = m.center;
    fresh.quality = m.quality;
    objects_.emplace(fresh.id, fresh);
    place(fresh.id, fresh.center);
    return {AssociationOutcome::Kind::instantiated, fresh.id, false};
}

std::vector<ObjectInstance> SpatialObjectTree::all_objects() const {
    std::vector<ObjectInstance> out;
    out.reserve(objects_.size());
    for (const auto& [id, o] : objects_) out.push_back(o);
    return out;
}

std::vector<ObjectId> SpatialObjectTree::ids() const {
    std::vector<ObjectId> out;
    out.reserve(objects_.size());
    for (const auto& [id, o] : objects_) out.push_back(id);
    return out;
}

const ObjectInstance* SpatialObjectTree::object(ObjectId id) const {
    auto it = objects_.find(id);
    return it == objects_.end() ? nullptr : &it->second;
}

ObjectInstance* SpatialObjectTree::object(ObjectId id) {
    auto it = objects_.find(id);
    return it == objects_.end() ? nullptr : &it->second;
}

void SpatialObjectTree::validate() const {
    tx_.validate();
    ty_.validate();

    std::map<ObjectId, int> seen_x, seen_y;
    tx_.for_each([&](const CoordinateIntervalTree::Node& n) {
        for (ObjectId id : n.members) {
            seen_x[id]++;
            const auto& o = objects_.at(id);
            if (o.center.x() < n.lo || o.center.x() > n.hi)
                throw Error("object tree: center.x outside its node interval");
        }
    });
    ty_.for_each([&](const CoordinateIntervalTree::Node& n) {
        for (ObjectId id : n.members) {
            seen_y[id]++;
            const auto& o = objects_.at(id);
            if (o.center.y() < n.lo || o.center.y() > n.hi)
                throw Error("object tree: center.y outside its node interval");
        }
    });
    for (const auto& [id, o] : objects_) {
        if (seen_x[id] != 1 || seen_y[id] != 1)
            throw Error("object tree: object not in exactly one node per axis");
    }
    if (seen_x.size() != objects_.size() || seen_y.size() != objects_.size())
        throw Error("object tree: member sets disagree with the registry");
}

}  // namespace scenediff
