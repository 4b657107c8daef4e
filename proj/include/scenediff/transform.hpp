#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "scenediff/types.hpp"

namespace scenediff {

/// SE(3) transform: p -> rotation * p + translation.
struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static RigidTransform identity() { return {}; }

    Point3 apply(const Point3& p) const { return rotation * p + translation; }

    RigidTransform inverse() const {
        RigidTransform inv;
        inv.rotation = rotation.transpose();
        inv.translation = -(inv.rotation * translation);
        return inv;
    }
};

/// compose(a, b) applies b first, then a.
inline RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

inline Point3 apply(const RigidTransform& t, const Point3& p) { return t.apply(p); }

inline PointCloud apply(const RigidTransform& t, const PointCloud& cloud) {
    PointCloud out;
    out.frame = cloud.frame;
    out.points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
    return out;
}

/// Orthonormality and det(+1) check against the stated tolerance.
inline bool is_rigid(const RigidTransform& t, double tol = 1e-9) {
    const Eigen::Matrix3d err = t.rotation.transpose() * t.rotation - Eigen::Matrix3d::Identity();
    if (err.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(t.rotation.determinant() - 1.0) <= tol;
}

/// Angle of the relative rotation between two transforms, in radians.
inline double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    const Eigen::Matrix3d rel = a * b.transpose();
    return Eigen::AngleAxisd(rel).angle();
}

}  // namespace scenediff
