#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "scenediff/types.hpp"

namespace scenediff {

/// Training batch: (object id, shape code) samples; every object id must
/// appear at least twice and at least two distinct ids must be present.
struct LabeledBatch {
    std::vector<std::pair<int, ShapeCode>> samples;
};

/// Mean binary cross-entropy over predicted occupancies, with predictions
/// clamped to [1e-7, 1 - 1e-7].
double occupancy_loss(const std::vector<double>& predicted, const std::vector<double>& truth);

/// -D(anchor, positive) + D(anchor, negative), D = cosine similarity.
double triplet_shape_loss(const ShapeCode& anchor, const ShapeCode& positive,
                          const ShapeCode& negative);

/// Batch-hard form: per sample, the least similar same-object sample (self
/// excluded) and the most similar other-object sample, averaged over the batch.
double batch_hard_loss(const LabeledBatch& batch);

/// l_occ + alpha * l_shape.
double combined_loss(double l_occ, double l_shape, double alpha);

// ---------------------------------------------------------------------------
// Numerical verification: analytic partials against central finite differences.

struct GradientCheckResult {
    bool skipped = false;          // non-differentiable point (ties in min/max)
    double max_relative_error = 0.0;
};

std::vector<double> occupancy_loss_gradient(const std::vector<double>& predicted,
                                            const std::vector<double>& truth);

/// Partials of triplet_shape_loss w.r.t. every entry of anchor, positive, negative.
struct TripletGradient {
    Eigen::VectorXd d_anchor;
    Eigen::VectorXd d_positive;
    Eigen::VectorXd d_negative;
};
TripletGradient triplet_shape_loss_gradient(const ShapeCode& anchor, const ShapeCode& positive,
                                            const ShapeCode& negative);

GradientCheckResult gradient_check_occupancy(const std::vector<double>& predicted,
                                             const std::vector<double>& truth, double h);

GradientCheckResult gradient_check_triplet(const ShapeCode& anchor, const ShapeCode& positive,
                                           const ShapeCode& negative, double h);

/// Batch-hard check: reports skipped=true at tie points of the inner min/max;
/// otherwise compares the selected-pair analytic gradient against differences.
GradientCheckResult gradient_check_batch_hard(const LabeledBatch& batch, double h,
                                              double tie_tolerance = 1e-9);

}  // namespace scenediff
