#include "scenediff/interval_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenediff {

CoordinateIntervalTree::CoordinateIntervalTree(double interval_length) : length_(interval_length) {
    if (!(interval_length > 0.0)) throw InvalidInputError("interval length must be positive");
}

const CoordinateIntervalTree::Node* CoordinateIntervalTree::find(double coord) const {
    const Node* n = root_.get();
    while (n) {
        if (coord < n->lo)
            n = n->left.get();
        else if (coord > n->hi)
            n = n->right.get();
        else
            return n;
    }
    return nullptr;
}

CoordinateIntervalTree::Node* CoordinateIntervalTree::find(double coord) {
    return const_cast<Node*>(std::as_const(*this).find(coord));
}

std::vector<const CoordinateIntervalTree::Node*> CoordinateIntervalTree::find_within(
    double coord, double margin) const {
    std::vector<const Node*> out;
    std::function<void(const Node*)> walk = [&](const Node* n) {
        if (!n) return;
        if (coord < n->lo + margin) walk(n->left.get());
        if (coord >= n->lo - margin && coord <= n->hi + margin) out.push_back(n);
        if (coord > n->hi - margin) walk(n->right.get());
    };
    walk(root_.get());
    return out;
}

CoordinateIntervalTree::Node* CoordinateIntervalTree::find_or_create(double coord) {
    if (!std::isfinite(coord)) throw InvalidInputError("non-finite coordinate");

    double gap_lo = -std::numeric_limits<double>::infinity();
    double gap_hi = std::numeric_limits<double>::infinity();
    std::unique_ptr<Node>* slot = &root_;
    while (*slot) {
        Node* n = slot->get();
        if (coord < n->lo) {
            gap_hi = n->lo;
            slot = &n->left;
        } else if (coord > n->hi) {
            gap_lo = n->hi;
            slot = &n->right;
        } else {
            return n;
        }
    }

    // Fixed-length interval centered on the first coordinate, clipped (one ulp
    // inside) to the free gap so intervals stay strictly disjoint.
    double lo = coord - 0.5 * length_;
    double hi = coord + 0.5 * length_;
    if (lo <= gap_lo) lo = std::nextafter(gap_lo, std::numeric_limits<double>::infinity());
    if (hi >= gap_hi) hi = std::nextafter(gap_hi, -std::numeric_limits<double>::infinity());

    *slot = std::make_unique<Node>();
    (*slot)->lo = lo;
    (*slot)->hi = hi;
    ++node_count_;
    return slot->get();
}

void CoordinateIntervalTree::for_each(const std::function<void(const Node&)>& fn) const {
    std::function<void(const Node*)> walk = [&](const Node* n) {
        if (!n) return;
        walk(n->left.get());
        fn(*n);
        walk(n->right.get());
    };
    walk(root_.get());
}

void CoordinateIntervalTree::validate() const {
    std::function<void(const Node*, double, double)> walk = [&](const Node* n, double lo_bound,
                                                                double hi_bound) {
        if (!n) return;
        if (!(n->lo <= n->hi)) throw Error("interval tree: empty interval");
        if (!(n->lo > lo_bound) || !(n->hi < hi_bound))
            throw Error("interval tree: BST order violated");
        if (n->hi - n->lo > length_ + 1e-12)
            throw Error("interval tree: interval longer than the configured length");
        walk(n->left.get(), lo_bound, n->lo);
        walk(n->right.get(), n->hi, hi_bound);
    };
    walk(root_.get(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity());

    double prev_hi = -std::numeric_limits<double>::infinity();
    for_each([&](const Node& n) {
        if (!(n.lo > prev_hi)) throw Error("interval tree: overlapping intervals");
        prev_hi = n.hi;
    });
}

void insert_member(CoordinateIntervalTree::Node& node, ObjectId id) {
    auto it = std::lower_bound(node.members.begin(), node.members.end(), id);
    if (it == node.members.end() || *it != id) node.members.insert(it, id);
}

bool erase_member(CoordinateIntervalTree::Node& node, ObjectId id) {
    auto it = std::lower_bound(node.members.begin(), node.members.end(), id);
    if (it == node.members.end() || *it != id) return false;
    node.members.erase(it);
    return true;
}

}  // namespace scenediff
