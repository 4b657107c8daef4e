#include "scenediff/registration.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "scenediff/descriptor.hpp"
#include "scenediff/rng.hpp"

namespace scenediff {

bool CorrespondenceSet::add(ObjectId target_id, const Correspondence& pair) {
    if (std::find(contributors_.begin(), contributors_.end(), target_id) != contributors_.end())
        return false;
    contributors_.push_back(target_id);
    pairs_.push_back(pair);
    return true;
}

const ObjectInstance* best_shape_match(const ObjectInstance& target,
                                       const std::vector<const ObjectInstance*>& source_objects,
                                       double delta_s) {
    const ObjectInstance* best = nullptr;
    double best_sim = delta_s;
    for (const auto* src : source_objects) {
        const double sim = cosine_similarity(target.shape_code, src->shape_code);
        if (sim > best_sim || (best && sim == best_sim && src->id < best->id)) {
            best = src;
            best_sim = sim;
        }
    }
    return best;
}

RigidTransform estimate_rigid_svd(
    const std::vector<std::pair<Point3, Point3>>& source_target_pairs) {
    const std::size_t n = source_target_pairs.size();
    if (n < 3) throw InsufficientDataError("rigid fit needs at least 3 point pairs");

    Point3 centroid_src = Point3::Zero();
    Point3 centroid_tgt = Point3::Zero();
    for (const auto& [src, tgt] : source_target_pairs) {
        centroid_src += src;
        centroid_tgt += tgt;
    }
    centroid_src /= static_cast<double>(n);
    centroid_tgt /= static_cast<double>(n);

    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    for (const auto& [src, tgt] : source_target_pairs)
        cross += (tgt - centroid_tgt) * (src - centroid_src).transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d& sigma = svd.singularValues();
    if (sigma[1] < 1e-9 && sigma[2] < 1e-9)
        throw DegenerateGeometryError("point pairs are collinear; rotation is unconstrained");

    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;

    RigidTransform out;
    out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    out.translation = centroid_src - out.rotation * centroid_tgt;
    return out;
}

namespace {

std::vector<bool> inlier_mask(const std::vector<Correspondence>& pairs, const RigidTransform& t,
                              double threshold, int* count) {
    std::vector<bool> mask(pairs.size(), false);
    *count = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double residual = (t.apply(pairs[i].target_center) - pairs[i].source_center).norm();
        if (residual < threshold) {
            mask[i] = true;
            ++(*count);
        }
    }
    return mask;
}

std::vector<std::pair<Point3, Point3>> select_pairs(const std::vector<Correspondence>& pairs,
                                                    const std::vector<bool>& mask) {
    std::vector<std::pair<Point3, Point3>> out;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (mask[i]) out.push_back({pairs[i].source_center, pairs[i].target_center});
    return out;
}

}  // namespace

std::optional<RansacResult> ransac_register(const CorrespondenceSet& correspondences,
                                            const RansacConfig& cfg) {
    const auto& pairs = correspondences.pairs();
    const int n = static_cast<int>(pairs.size());
    if (cfg.min_sample < 3) throw InvalidInputError("min_sample must be >= 3");
    if (n < cfg.min_sample)
        throw InsufficientDataError("fewer correspondences than the minimal sample");

    std::optional<RansacResult> best;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // Per-iteration sub-seed, so results do not depend on execution order.
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(iter)));
        std::vector<int> sample;
        while (static_cast<int>(sample.size()) < cfg.min_sample) {
            const int idx = rng.uniform_int(0, n - 1);
            if (std::find(sample.begin(), sample.end(), idx) == sample.end())
                sample.push_back(idx);
        }
        std::vector<std::pair<Point3, Point3>> minimal;
        for (int idx : sample)
            minimal.push_back({pairs[idx].source_center, pairs[idx].target_center});

        RigidTransform candidate;
        try {
            candidate = estimate_rigid_svd(minimal);
        } catch (const DegenerateGeometryError&) {
            continue;
        }

        int count = 0;
        auto mask = inlier_mask(pairs, candidate, cfg.inlier_threshold, &count);
        if (count >= cfg.min_sample && (!best || count > best->inlier_count)) {
            best = RansacResult{candidate, std::move(mask), count};
        }
    }
    if (!best) return std::nullopt;

    // Refit on the consensus set and refresh the mask against the refit model.
    try {
        const RigidTransform refit = estimate_rigid_svd(select_pairs(pairs, best->inlier_mask));
        int count = 0;
        auto mask = inlier_mask(pairs, refit, cfg.inlier_threshold, &count);
        if (count >= cfg.min_sample) {
            best->transform = refit;
            best->inlier_mask = std::move(mask);
            best->inlier_count = count;
        }
    } catch (const DegenerateGeometryError&) {
        // Keep the consensus model from the sampling loop.
    }
    return best;
}

}  // namespace scenediff
