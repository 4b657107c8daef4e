#include "scenediff/nn_baseline.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace scenediff {

namespace {

// Voxel hash over source points with cell size d; any point within distance d
// of a query lies in one of the 27 cells around the query's cell.
class VoxelIndex {
  public:
    VoxelIndex(const std::vector<Point3>& points, double cell) : points_(points), cell_(cell) {
        cells_.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            cells_[key(points[i])].push_back(i);
    }

    bool has_neighbor_within(const Point3& q, double d) const {
        const double d2 = d * d;
        const std::int64_t cx = coord(q.x()), cy = coord(q.y()), cz = coord(q.z());
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
                    if (it == cells_.end()) continue;
                    for (std::size_t i : it->second) {
                        if ((points_[i] - q).squaredNorm() <= d2) return true;
                    }
                }
            }
        }
        return false;
    }

  private:
    std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) const {
        auto u = [](std::int64_t v) { return static_cast<std::uint64_t>(v + (1LL << 20)); };
        return (u(x) << 42) ^ (u(y) << 21) ^ u(z);
    }
    std::uint64_t key(const Point3& p) const {
        return pack(coord(p.x()), coord(p.y()), coord(p.z()));
    }

    const std::vector<Point3>& points_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

NnResult nn_changed(const PointCloud& target_cloud, const PointCloud& source_cloud,
                    const NnParams& params) {
    if (target_cloud.empty()) throw InvalidInputError("nn_changed needs a non-empty target cloud");
    if (!(params.d > 0.0)) throw InvalidInputError("neighbor radius must be positive");
    if (source_cloud.empty()) return {true, 1.0};

    const VoxelIndex index(source_cloud.points, params.d);
    std::size_t orphans = 0;
    for (const auto& p : target_cloud.points) {
        // Changed set uses strict ||p - s|| > d, so the neighbor test is <= d.
        if (!index.has_neighbor_within(p, params.d)) ++orphans;
    }
    const double fraction =
        static_cast<double>(orphans) / static_cast<double>(target_cloud.points.size());
    return {fraction > params.r, fraction};
}

void NnBaselineDetector::add_source_cloud(int object_id, const PointCloud& cloud) {
    auto& fused = fused_sources_[object_id];
    fused.frame = cloud.frame;
    fused.points.insert(fused.points.end(), cloud.points.begin(), cloud.points.end());
}

NnResult NnBaselineDetector::observe_target(int object_id, const PointCloud& frame_cloud) {
    auto locked = states_.find(object_id);
    if (locked != states_.end() && locked->second.changed) return locked->second;

    NnResult result;
    auto src = fused_sources_.find(object_id);
    if (src == fused_sources_.end() || src->second.empty()) {
        result = {true, 1.0};
    } else if (frame_cloud.empty()) {
        return states_.count(object_id) ? states_[object_id] : NnResult{};
    } else {
        result = nn_changed(frame_cloud, src->second, params_);
    }
    states_[object_id] = result;
    return result;
}

bool NnBaselineDetector::is_changed(int object_id) const {
    auto it = states_.find(object_id);
    return it != states_.end() && it->second.changed;
}

}  // namespace scenediff
