#pragma once

#include <map>

#include "scenediff/types.hpp"

namespace scenediff {

struct NnParams {
    double d = 0.002;  // meters, neighbor radius
    double r = 0.3;    // changed-fraction threshold
};

struct NnResult {
    bool changed = false;
    double fraction = 0.0;  // share of target points with no source neighbor within d
};

/// Point-differencing change test: the object is changed when more than
/// fraction r of the target points have no source point within radius d.
/// Empty source means everything is new (changed, fraction 1). Uses a voxel
/// grid over the source cloud; results match the exhaustive double loop.
NnResult nn_changed(const PointCloud& target_cloud, const PointCloud& source_cloud,
                    const NnParams& params);

/// Online object-level adaptation: fuses source clouds per object id, then
/// permanently marks a target object changed the first time a frame cloud
/// exceeds the threshold. Objects observed without any source reference count
/// as changed with fraction 1.
class NnBaselineDetector {
  public:
    explicit NnBaselineDetector(NnParams params) : params_(params) {}

    void add_source_cloud(int object_id, const PointCloud& cloud);
    NnResult observe_target(int object_id, const PointCloud& frame_cloud);

    bool is_changed(int object_id) const;
    const std::map<int, NnResult>& states() const { return states_; }
    const NnParams& params() const { return params_; }

  private:
    NnParams params_;
    std::map<int, PointCloud> fused_sources_;
    std::map<int, NnResult> states_;  // latest/locked result per observed target object
};

}  // namespace scenediff
