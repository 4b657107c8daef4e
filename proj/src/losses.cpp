#include "scenediff/losses.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scenediff/descriptor.hpp"

namespace scenediff {

namespace {

constexpr double kClampEps = 1e-7;

double clamp_prediction(double p) { return std::clamp(p, kClampEps, 1.0 - kClampEps); }

double relative_error(double analytic, double numeric) {
    const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    return std::abs(analytic - numeric) / denom;
}

void validate_step(double h) {
    if (!(h > 0.0 && h <= 1e-3))
        throw InvalidInputError("finite-difference step must be in (0, 1e-3]");
}

// Samples grouped by object id, as index lists into batch.samples.
std::map<int, std::vector<std::size_t>> group_by_object(const LabeledBatch& batch) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < batch.samples.size(); ++i)
        groups[batch.samples[i].first].push_back(i);
    if (groups.size() < 2)
        throw InvalidInputError("batch needs at least two distinct object ids");
    for (const auto& [id, idx] : groups) {
        if (idx.size() < 2)
            throw InvalidInputError("object " + std::to_string(id) +
                                    " has a single sample; batch-hard needs >= 2");
    }
    return groups;
}

}  // namespace

double occupancy_loss(const std::vector<double>& predicted, const std::vector<double>& truth) {
    if (predicted.size() != truth.size())
        throw InvalidInputError("prediction/label length mismatch");
    if (predicted.empty()) throw InvalidInputError("empty batch");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double p = clamp_prediction(predicted[i]);
        const double v = truth[i];
        sum += -(v * std::log(p) + (1.0 - v) * std::log(1.0 - p));
    }
    return sum / static_cast<double>(predicted.size());
}

double triplet_shape_loss(const ShapeCode& anchor, const ShapeCode& positive,
                          const ShapeCode& negative) {
    return -cosine_similarity(anchor, positive) + cosine_similarity(anchor, negative);
}

double batch_hard_loss(const LabeledBatch& batch) {
    const auto groups = group_by_object(batch);
    const auto& samples = batch.samples;
    double sum = 0.0;
    for (const auto& [id, members] : groups) {
        for (std::size_t j : members) {
            double hardest_positive = std::numeric_limits<double>::infinity();
            for (std::size_t k : members) {
                if (k == j) continue;
                hardest_positive =
                    std::min(hardest_positive,
                             cosine_similarity(samples[j].second, samples[k].second));
            }
            double hardest_negative = -std::numeric_limits<double>::infinity();
            for (std::size_t n = 0; n < samples.size(); ++n) {
                if (samples[n].first == id) continue;
                hardest_negative =
                    std::max(hardest_negative,
                             cosine_similarity(samples[j].second, samples[n].second));
            }
            sum += -hardest_positive + hardest_negative;
        }
    }
    return sum / static_cast<double>(samples.size());
}

double combined_loss(double l_occ, double l_shape, double alpha) {
    if (alpha < 0.0) throw InvalidInputError("alpha must be >= 0");
    return l_occ + alpha * l_shape;
}

// ---------------------------------------------------------------------------

std::vector<double> occupancy_loss_gradient(const std::vector<double>& predicted,
                                            const std::vector<double>& truth) {
    if (predicted.size() != truth.size())
        throw InvalidInputError("prediction/label length mismatch");
    const double n = static_cast<double>(predicted.size());
    std::vector<double> grad(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double p = clamp_prediction(predicted[i]);
        const double v = truth[i];
        grad[i] = (-v / p + (1.0 - v) / (1.0 - p)) / n;
    }
    return grad;
}

namespace {

// d/da of cosine(a, b); the companion d/db follows by symmetry.
Eigen::VectorXd cosine_grad_wrt_first(const ShapeCode& a, const ShapeCode& b) {
    const double na = a.norm(), nb = b.norm();
    const double d = a.values.dot(b.values) / (na * nb);
    return (b.values / nb - d * a.values / na) / na;
}

}  // namespace

TripletGradient triplet_shape_loss_gradient(const ShapeCode& anchor, const ShapeCode& positive,
                                            const ShapeCode& negative) {
    TripletGradient g;
    g.d_anchor = -cosine_grad_wrt_first(anchor, positive) + cosine_grad_wrt_first(anchor, negative);
    g.d_positive = -cosine_grad_wrt_first(positive, anchor);
    g.d_negative = cosine_grad_wrt_first(negative, anchor);
    return g;
}

GradientCheckResult gradient_check_occupancy(const std::vector<double>& predicted,
                                             const std::vector<double>& truth, double h) {
    validate_step(h);
    const auto analytic = occupancy_loss_gradient(predicted, truth);
    GradientCheckResult result;
    std::vector<double> probe = predicted;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        probe[i] = predicted[i] + h;
        const double plus = occupancy_loss(probe, truth);
        probe[i] = predicted[i] - h;
        const double minus = occupancy_loss(probe, truth);
        probe[i] = predicted[i];
        const double fd = (plus - minus) / (2.0 * h);
        result.max_relative_error = std::max(result.max_relative_error,
                                             relative_error(analytic[i], fd));
    }
    return result;
}

GradientCheckResult gradient_check_triplet(const ShapeCode& anchor, const ShapeCode& positive,
                                           const ShapeCode& negative, double h) {
    validate_step(h);
    const TripletGradient analytic = triplet_shape_loss_gradient(anchor, positive, negative);
    GradientCheckResult result;

    auto check_block = [&](const ShapeCode& base, const Eigen::VectorXd& grad, int which) {
        for (Eigen::Index i = 0; i < base.size(); ++i) {
            ShapeCode probe = base;
            auto eval = [&](double delta) {
                probe.values[i] = base.values[i] + delta;
                const ShapeCode& a = (which == 0) ? probe : anchor;
                const ShapeCode& p = (which == 1) ? probe : positive;
                const ShapeCode& n = (which == 2) ? probe : negative;
                return triplet_shape_loss(a, p, n);
            };
            const double fd = (eval(h) - eval(-h)) / (2.0 * h);
            result.max_relative_error =
                std::max(result.max_relative_error, relative_error(grad[i], fd));
        }
    };
    check_block(anchor, analytic.d_anchor, 0);
    check_block(positive, analytic.d_positive, 1);
    check_block(negative, analytic.d_negative, 2);
    return result;
}

GradientCheckResult gradient_check_batch_hard(const LabeledBatch& batch, double h,
                                              double tie_tolerance) {
    validate_step(h);
    const auto groups = group_by_object(batch);
    const auto& samples = batch.samples;
    const std::size_t n = samples.size();
    const Eigen::Index k = samples.front().second.size();

    // Selected hardest positive/negative per sample, with tie detection.
    std::vector<std::size_t> sel_min(n), sel_max(n);
    for (const auto& [id, members] : groups) {
        for (std::size_t j : members) {
            std::vector<std::pair<double, std::size_t>> pos, neg;
            for (std::size_t m : members)
                if (m != j) pos.push_back({cosine_similarity(samples[j].second, samples[m].second), m});
            for (std::size_t m = 0; m < n; ++m)
                if (samples[m].first != id)
                    neg.push_back({cosine_similarity(samples[j].second, samples[m].second), m});
            std::sort(pos.begin(), pos.end());
            std::sort(neg.begin(), neg.end());
            if (pos.size() > 1 && pos[1].first - pos[0].first < tie_tolerance)
                return {.skipped = true, .max_relative_error = 0.0};
            if (neg.size() > 1 && neg[neg.size() - 1].first - neg[neg.size() - 2].first < tie_tolerance)
                return {.skipped = true, .max_relative_error = 0.0};
            sel_min[j] = pos.front().second;
            sel_max[j] = neg.back().second;
        }
    }

    // Analytic gradient through the fixed selections.
    std::vector<Eigen::VectorXd> grad(n, Eigen::VectorXd::Zero(k));
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& xj = samples[j].second;
        const auto& xmin = samples[sel_min[j]].second;
        const auto& xmax = samples[sel_max[j]].second;
        grad[j] += scale * (-cosine_grad_wrt_first(xj, xmin) + cosine_grad_wrt_first(xj, xmax));
        grad[sel_min[j]] += scale * -cosine_grad_wrt_first(xmin, xj);
        grad[sel_max[j]] += scale * cosine_grad_wrt_first(xmax, xj);
    }

    GradientCheckResult result;
    LabeledBatch probe = batch;
    for (std::size_t j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
            const double base = batch.samples[j].second.values[i];
            probe.samples[j].second.values[i] = base + h;
            const double plus = batch_hard_loss(probe);
            probe.samples[j].second.values[i] = base - h;
            const double minus = batch_hard_loss(probe);
            probe.samples[j].second.values[i] = base;
            const double fd = (plus - minus) / (2.0 * h);
            result.max_relative_error =
                std::max(result.max_relative_error, relative_error(grad[j][i], fd));
        }
    }
    return result;
}

}  // namespace scenediff
