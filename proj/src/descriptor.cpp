#include "scenediff/descriptor.hpp"

#include <cmath>
#include <limits>

namespace scenediff {

ShapeCode shape_code_from_latent(const LatentMatrix& z) {
    if (z.rows() == 0) throw InvalidInputError("latent matrix has no rows");
    if (!z.array().isFinite().all()) throw InvalidInputError("latent matrix has non-finite entries");
    Eigen::VectorXd norms(z.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i) norms[i] = z.row(i).norm();
    return ShapeCode(std::move(norms));
}

double cosine_similarity(const ShapeCode& a, const ShapeCode& b) {
    if (a.size() != b.size()) throw InvalidInputError("shape code dimensions differ");
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw InvalidInputError("zero-norm shape code");
    return a.values.dot(b.values) / (na * nb);
}

PointCloud reconstruct_full_cloud(const OccupancyField& field, const PointCloud& partial,
                                  double box_scale, int samples_per_axis, double v0) {
    if (partial.empty()) throw InvalidInputError("partial cloud is empty");
    if (samples_per_axis < 2) throw InvalidInputError("samples_per_axis must be >= 2");
    if (!(v0 > 0.0 && v0 < 1.0)) throw InvalidInputError("v0 must be in (0, 1)");

    Point3 lo = partial.points.front();
    Point3 hi = lo;
    for (const auto& p : partial.points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Point3 center = 0.5 * (lo + hi);
    const Point3 half = 0.5 * box_scale * (hi - lo);
    lo = center - half;
    hi = center + half;

    PointCloud out;
    out.frame = partial.frame;
    const int n = samples_per_axis;
    for (int ix = 0; ix < n; ++ix) {
        const double x = lo.x() + (hi.x() - lo.x()) * ix / (n - 1);
        for (int iy = 0; iy < n; ++iy) {
            const double y = lo.y() + (hi.y() - lo.y()) * iy / (n - 1);
            for (int iz = 0; iz < n; ++iz) {
                const double z = lo.z() + (hi.z() - lo.z()) * iz / (n - 1);
                const Point3 q{x, y, z};
                if (field(q) > v0) out.points.push_back(q);
            }
        }
    }
    if (out.empty()) throw EmptyReconstructionError("no grid point cleared the occupancy threshold");
    return out;
}

Point3 recover_center(const PointCloud& cloud) {
    if (cloud.empty()) throw InvalidInputError("cannot recover center of an empty cloud");
    Point3 sum = Point3::Zero();
    for (const auto& p : cloud.points) sum += p;
    return sum / static_cast<double>(cloud.points.size());
}

}  // namespace scenediff
