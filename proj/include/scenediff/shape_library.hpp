#pragma once

#include <cstdint>
#include <vector>

#include "scenediff/transform.hpp"
#include "scenediff/types.hpp"

namespace scenediff {

/// Geometric primitive backing a synthetic shape: enough structure to model
/// visibility, occlusion footprints, and partial surface clouds.
struct PrimitiveSpec {
    enum class Kind { box, cylinder, superellipsoid };

    Kind kind = Kind::cylinder;
    Eigen::Vector3d half_extents{0.04, 0.04, 0.05};  // meters; cylinder: x=y=radius, z=half height
    double e1 = 1.0;  // superellipsoid north-south exponent
    double e2 = 1.0;  // superellipsoid east-west exponent

    /// Horizontal footprint radius, used for occlusion and spacing checks.
    double footprint_radius() const { return std::max(half_extents.x(), half_extents.y()); }
};

struct LibraryShape {
    int shape_id = 0;
    ShapeCode canonical_code;
    PrimitiveSpec primitive;
};

struct SyntheticShapeLibrary {
    int k = 256;
    double max_pairwise_similarity = 0.8;
    std::vector<LibraryShape> shapes;

    const LibraryShape& shape(int shape_id) const;
    bool contains(int shape_id) const;
};

/// Deterministically samples n unit-norm non-negative canonical codes whose
/// pairwise cosine similarities stay below the threshold (rejection sampling,
/// capped at 1e6 attempts), each paired with a randomized primitive.
SyntheticShapeLibrary generate_shape_library(int n_shapes, int k, double max_pairwise_similarity,
                                             std::uint64_t seed);

/// Descriptor-side noise parameters of the synthetic observation model.
struct DescriptorNoise {
    double sigma_code = 0.02;    // per-entry code noise at zero occlusion
    double beta = 3.0;           // occlusion multiplier on code noise variance
    double sigma_center = 0.005; // meters, isotropic center noise
    double q_max = 0.95;         // quality at zero occlusion
    double gamma = 0.5;          // quality drop per unit occlusion
};

struct ViewContext {
    RigidTransform camera_pose;      // world_from_camera
    double occlusion_fraction = 0.0; // in [0, 1)
    double distance = 1.0;           // meters, camera to object
};

/// One synthetic measurement of a library shape: rectified-Gaussian-perturbed
/// renormalized code, Gaussian-perturbed center, occlusion-degraded quality.
/// Pure function of its arguments for a fixed seed.
Measurement synth_observe(const SyntheticShapeLibrary& lib, int shape_id, const Point3& true_center,
                          const ViewContext& view, const DescriptorNoise& noise, std::uint64_t seed);

}  // namespace scenediff
