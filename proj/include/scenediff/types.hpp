#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenediff {

using Point3 = Eigen::Vector3d;

/// Coordinate frame a point cloud is expressed in.
enum class Frame { camera, world };

struct PointCloud {
    std::vector<Point3> points;
    Frame frame = Frame::world;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// k x 3 latent matrix; each row is one latent point.
using LatentMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// k-dimensional non-negative full-shape descriptor (per-row norms of a latent matrix).
struct ShapeCode {
    Eigen::VectorXd values;

    ShapeCode() = default;
    explicit ShapeCode(Eigen::VectorXd v) : values(std::move(v)) {}

    Eigen::Index size() const { return values.size(); }
    double norm() const { return values.norm(); }
    bool valid() const {
        return values.size() > 0 && (values.array() >= 0.0).all() &&
               values.array().isFinite().all() && values.squaredNorm() > 0.0;
    }
};

enum class Session { source, target };

/// One per-frame object observation: descriptor, recovered world center, quality score.
struct Measurement {
    ShapeCode shape_code;
    Point3 center = Point3::Zero();
    double quality = 1.0;  // in (0, 1], mean occupancy of the reconstructed cloud
    int frame_index = 0;
    Session session = Session::source;
};

using ObjectId = std::int64_t;

/// Persistent object record stored in a spatial object tree.
struct ObjectInstance {
    ObjectId id = -1;
    ShapeCode shape_code;
    Point3 center = Point3::Zero();
    double quality = 0.0;
    bool marked_changed = false;
    bool observed = false;  // source-side: appeared in a queried neighborhood
    bool matched = false;   // source-side: cleared the shape threshold vs a target object
};

// ---------------------------------------------------------------------------
// Error types. Hard contract violations throw; expected mid-stream conditions
// (failed registration attempt, no shape match) are reported by value instead.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInputError : Error {
    using Error::Error;
};

struct EmptyReconstructionError : Error {
    using Error::Error;
};

struct CapacityError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct DegenerateGeometryError : Error {
    using Error::Error;
};

struct PlacementError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace scenediff
