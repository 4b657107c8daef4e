#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "scenediff/transform.hpp"
#include "scenediff/types.hpp"

namespace scenediff {

/// One shape-matched center pair used for inter-session alignment.
struct Correspondence {
    Point3 source_center = Point3::Zero();
    Point3 target_center = Point3::Zero();
    double similarity = 0.0;
};

/// Accumulates shape-matched pairs from distinct target objects until the
/// configured count is reached.
class CorrespondenceSet {
  public:
    explicit CorrespondenceSet(std::size_t capacity = 6) : capacity_(capacity) {}

    /// Rejects duplicates from the same target object.
    bool add(ObjectId target_id, const Correspondence& pair);

    bool ready() const { return pairs_.size() >= capacity_; }
    std::size_t size() const { return pairs_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::vector<Correspondence>& pairs() const { return pairs_; }

  private:
    std::size_t capacity_;
    std::vector<Correspondence> pairs_;
    std::vector<ObjectId> contributors_;
};

struct RansacConfig {
    int iterations = 200;
    double inlier_threshold = 0.01;  // meters
    int min_sample = 3;
    std::uint64_t seed = 0;
};

struct RansacResult {
    RigidTransform transform;          // maps target-frame points into the source frame
    std::vector<bool> inlier_mask;     // per input pair
    int inlier_count = 0;
};

/// Source object with the highest shape similarity above the threshold, if any.
const ObjectInstance* best_shape_match(const ObjectInstance& target,
                                       const std::vector<const ObjectInstance*>& source_objects,
                                       double delta_s);

/// Least-squares rigid transform mapping target points onto source points
/// (Kabsch with reflection correction). Throws InsufficientDataError for
/// fewer than 3 pairs and DegenerateGeometryError for collinear inputs.
RigidTransform estimate_rigid_svd(const std::vector<std::pair<Point3, Point3>>& source_target_pairs);

/// Consensus fit: repeatedly samples minimal pair subsets, keeps the transform
/// with the most inliers, refits on the consensus set. Deterministic per seed.
/// Returns nullopt when no model gathers min_sample inliers.
std::optional<RansacResult> ransac_register(const CorrespondenceSet& correspondences,
                                            const RansacConfig& cfg);

}  // namespace scenediff
