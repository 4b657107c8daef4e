#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "scenediff/types.hpp"

namespace scenediff {

/// Binary search tree of pairwise-disjoint coordinate intervals of fixed
/// length l. A node is created lazily from the first coordinate that lands
/// outside every existing interval, centered on that coordinate and clipped
/// to the free gap between its neighbors. Append-only: no deletion, no
/// rebalancing.
class CoordinateIntervalTree {
  public:
    struct Node {
        double lo = 0.0;
        double hi = 0.0;
        std::vector<ObjectId> members;  // kept sorted
        std::unique_ptr<Node> left;
        std::unique_ptr<Node> right;
    };

    explicit CoordinateIntervalTree(double interval_length);

    /// Node whose closed interval contains the coordinate; nullptr if none.
    const Node* find(double coord) const;
    Node* find(double coord);

    /// Nodes whose interval widened by `margin` contains the coordinate, in
    /// ascending interval order. margin = 0 yields at most the exact node.
    std::vector<const Node*> find_within(double coord, double margin) const;

    /// Containing node, created on demand.
    Node* find_or_create(double coord);

    /// In-order traversal (ascending intervals).
    void for_each(const std::function<void(const Node&)>& fn) const;

    double interval_length() const { return length_; }
    std::size_t node_count() const { return node_count_; }

    /// Walks the whole tree checking BST order and disjointness; throws Error
    /// on any violation. Test support.
    void validate() const;

  private:
    double length_;
    std::size_t node_count_ = 0;
    std::unique_ptr<Node> root_;
};

void insert_member(CoordinateIntervalTree::Node& node, ObjectId id);
bool erase_member(CoordinateIntervalTree::Node& node, ObjectId id);

}  // namespace scenediff
