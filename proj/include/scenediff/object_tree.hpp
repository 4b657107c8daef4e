#pragma once

#include <map>
#include <vector>

#include "scenediff/interval_tree.hpp"
#include "scenediff/types.hpp"

namespace scenediff {

struct AssociationOutcome {
    enum class Kind { associated, instantiated };
    Kind kind = Kind::instantiated;
    ObjectId id = -1;
    bool updated = false;  // associated only: measurement quality beat the stored one
};

/// Spatial object tree T = (T_x, T_y): two coordinate interval trees over
/// object-center coordinates plus an id-indexed registry. An object's
/// neighborhood is the intersection of its x-node and y-node member sets.
class SpatialObjectTree {
  public:
    /// neighbor_margin widens coordinate queries to nodes within that distance
    /// of the query, reuniting neighborhoods that straddle a node boundary.
    /// Zero keeps the strict one-node-per-axis semantics.
    explicit SpatialObjectTree(double interval_length = 1.2, double neighbor_margin = 0.0);

    /// Objects in node_x(p.x) ∩ node_y(p.y); empty when either node is absent.
    std::vector<const ObjectInstance*> query_neighborhood(const Point3& p) const;
    std::vector<ObjectInstance*> query_neighborhood(const Point3& p);

    /// Associates the measurement with the best neighborhood candidate passing
    /// the distance/similarity gate (ties: higher similarity, then smaller
    /// distance, then lower id), replacing the stored code and center when the
    /// measurement's quality is higher. Instantiates a new object otherwise.
    AssociationOutcome insert_or_associate(const Measurement& m, double delta_d, double delta_s);

    /// Every registered object exactly once, ordered by id.
    std::vector<ObjectInstance> all_objects() const;

    /// Registered ids in ascending order.
    std::vector<ObjectId> ids() const;

    const ObjectInstance* object(ObjectId id) const;
    ObjectInstance* object(ObjectId id);

    std::size_t size() const { return objects_.size(); }
    double interval_length() const { return tx_.interval_length(); }
    double neighbor_margin() const { return neighbor_margin_; }

    const CoordinateIntervalTree& x_tree() const { return tx_; }
    const CoordinateIntervalTree& y_tree() const { return ty_; }

    /// Full structural check: BST/disjointness per axis, membership agreement
    /// between axes, and every center inside its node intervals. Test support.
    void validate() const;

  private:
    void place(ObjectId id, const Point3& center);

    CoordinateIntervalTree tx_;
    CoordinateIntervalTree ty_;
    double neighbor_margin_ = 0.0;
    std::map<ObjectId, ObjectInstance> objects_;
    std::map<ObjectId, std::pair<CoordinateIntervalTree::Node*, CoordinateIntervalTree::Node*>>
        homes_;
    ObjectId next_id_ = 0;
};

}  // namespace scenediff
