#pragma once

#include <functional>

#include "scenediff/types.hpp"

namespace scenediff {

/// Occupancy predictor contract: world/camera point -> occupancy value in [0, 1].
using OccupancyField = std::function<double(const Point3&)>;

/// Per-row Euclidean norms of the latent matrix; rotation-invariant by construction.
ShapeCode shape_code_from_latent(const LatentMatrix& z);

/// Cosine similarity of two codes; in [0, 1] for non-negative codes.
double cosine_similarity(const ShapeCode& a, const ShapeCode& b);

/// Thresholds an occupancy field over a regular grid spanning the bounding box
/// of `partial` scaled by `box_scale` about its center. Keeps points with
/// field(x) > v0. Throws EmptyReconstructionError when nothing clears v0.
PointCloud reconstruct_full_cloud(const OccupancyField& field, const PointCloud& partial,
                                  double box_scale = 1.5, int samples_per_axis = 24,
                                  double v0 = 0.5);

/// Arithmetic mean of the cloud points (the recovered object center).
Point3 recover_center(const PointCloud& cloud);

}  // namespace scenediff
