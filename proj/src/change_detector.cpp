#include "scenediff/change_detector.hpp"

#include <algorithm>
#include <limits>

#include "scenediff/descriptor.hpp"

namespace scenediff {

std::string to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::unchanged: return "unchanged";
        case VerdictKind::changed_new_location: return "changed_new_location";
        case VerdictKind::changed_new_shape: return "changed_new_shape";
        case VerdictKind::changed_moved: return "changed_moved";
        case VerdictKind::removed: return "removed";
    }
    return "unknown";
}

std::string to_string(VerdictEvidence e) {
    switch (e) {
        case VerdictEvidence::empty_source_neighborhood: return "empty_source_neighborhood";
        case VerdictEvidence::no_shape_match: return "no_shape_match";
        case VerdictEvidence::all_edges_differ: return "all_edges_differ";
        case VerdictEvidence::singleton_fallback: return "singleton_fallback";
        case VerdictEvidence::never_matched: return "never_matched";
        case VerdictEvidence::edge_match: return "edge_match";
    }
    return "unknown";
}

ObjectGraph build_object_graph(const ObjectInstance& center,
                               const std::vector<const ObjectInstance*>& neighborhood) {
    const bool center_present =
        std::any_of(neighborhood.begin(), neighborhood.end(),
                    [&](const ObjectInstance* o) { return o->id == center.id; });
    if (!center_present)
        throw InvalidInputError("graph center must be a member of its neighborhood");

    ObjectGraph g;
    g.center_object = center;
    for (const auto* o : neighborhood) {
        g.vertices.push_back(*o);
        if (o->id == center.id) continue;
        g.edges.push_back({o->id, o->shape_code, o->center - center.center});
    }
    return g;
}

GraphVerdict compare_graphs(const ObjectGraph& target_graph, const ObjectGraph& source_graph,
                            double delta_s, double delta_e) {
    if (target_graph.edges.empty() || source_graph.edges.empty())
        throw InvalidInputError("compare_graphs needs non-empty edge sets");
    for (const auto& te : target_graph.edges) {
        for (const auto& se : source_graph.edges) {
            if (cosine_similarity(te.neighbor_code, se.neighbor_code) <= delta_s) continue;
            if ((te.vec - se.vec).norm() <= delta_e) return GraphVerdict::unchanged;
        }
    }
    return GraphVerdict::changed;
}

ChangeDetector::ChangeDetector(SpatialObjectTree source_tree, DetectorConfig cfg)
    : cfg_(cfg), source_(std::move(source_tree)),
      target_(cfg.interval_length, cfg.neighbor_margin),
      correspondences_(cfg.correspondence_count) {
    // Registration inliers must cover a decent share of the source extent (or
    // one interval length, whichever is smaller) before a model is trusted.
    Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
    Point3 hi = -lo;
    for (const auto& obj : source_.all_objects()) {
        lo = lo.cwiseMin(obj.center);
        hi = hi.cwiseMax(obj.center);
    }
    const double source_extent =
        source_.size() < 2 ? 0.0 : std::min((hi - lo).x(), (hi - lo).y());
    inlier_spread_floor_ = std::min(cfg.interval_length, 0.5 * source_extent);
}

void ChangeDetector::accumulate_correspondence(ObjectId target_id) {
    const ObjectInstance* obj = target_.object(target_id);
    std::vector<const ObjectInstance*> sources;
    for (ObjectId id : source_.ids()) sources.push_back(source_.object(id));

    const ObjectInstance* match = best_shape_match(*obj, sources, cfg_.delta_s);
    if (!match) return;
    const double best_sim = cosine_similarity(obj->shape_code, match->shape_code);

    if (correspondences_.add(target_id, {match->center, obj->center, best_sim})) {
        // A registration-time shape match also counts toward removed-object
        // bookkeeping on the source side.
        source_.object(match->id)->matched = true;
    }
}

ChangeDetector::FrameResult ChangeDetector::process_frame(const std::vector<Measurement>& frame) {
    FrameResult result;
    if (frame.empty()) return result;

    const int frame_index = frame.front().frame_index;
    std::vector<ObjectId> frame_objects;
    const bool was_aligned = t_rel_.has_value();

    for (const auto& m : frame) {
        if (m.session != Session::target)
            throw InvalidInputError("change detection consumes target-session measurements");
        const auto outcome = target_.insert_or_associate(m, cfg_.delta_d, cfg_.delta_s);
        result.associations.push_back(outcome);
        if (std::find(frame_objects.begin(), frame_objects.end(), outcome.id) ==
            frame_objects.end())
            frame_objects.push_back(outcome.id);
        if (!t_rel_) {
            if (std::find(pending_.begin(), pending_.end(), outcome.id) == pending_.end())
                pending_.push_back(outcome.id);
            accumulate_correspondence(outcome.id);
        }
    }

    if (!t_rel_ && correspondences_.ready() && correspondences_.size() > last_attempt_size_) {
        last_attempt_size_ = correspondences_.size();
        result.registration_attempted = true;
        auto fit = ransac_register(correspondences_, cfg_.ransac);
        // Repeated shape instances make a share of the pairs wrong-instance
        // outliers, and a cluster of pairs from a single neighborhood can
        // always support a tilted wrong fit. Trust a model only when its
        // consensus clearly exceeds the minimal sample and its inliers span
        // more than one neighborhood; otherwise keep accumulating and retry.
        const int n_pairs = static_cast<int>(correspondences_.size());
        const int required = std::min(n_pairs, cfg_.ransac.min_sample + 2);
        if (fit && fit->inlier_count < required) fit.reset();
        if (fit) {
            Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
            Point3 hi = -lo;
            for (std::size_t k = 0; k < fit->inlier_mask.size(); ++k) {
                if (!fit->inlier_mask[k]) continue;
                lo = lo.cwiseMin(correspondences_.pairs()[k].source_center);
                hi = hi.cwiseMax(correspondences_.pairs()[k].source_center);
            }
            // Both ground axes: a consensus strung along one line leaves the
            // rotation about that line at the mercy of center noise.
            const Point3 extent = hi - lo;
            if (std::min(extent.x(), extent.y()) < inlier_spread_floor_) fit.reset();
        }
        if (fit) {
            t_rel_ = fit->transform;
            for (ObjectId id : pending_) {
                if (auto verdict = classify_object(id, frame_index))
                    result.verdicts.push_back(*verdict);
            }
            pending_.clear();
        } else {
            // No consensus yet; objects stay pending and the correspondence
            // set keeps growing with later target objects.
            result.registration_failed = true;
        }
        return result;
    }

    if (was_aligned) {
        for (ObjectId id : frame_objects) {
            if (auto verdict = classify_object(id, frame_index))
                result.verdicts.push_back(*verdict);
        }
    }
    return result;
}

ChangeDetector::ProcessResult ChangeDetector::process_measurement(const Measurement& m) {
    const FrameResult frame = process_frame({m});
    ProcessResult result;
    result.association = frame.associations.front();
    result.object_id = result.association.id;
    result.verdicts = frame.verdicts;
    result.registration_attempted = frame.registration_attempted;
    result.registration_failed = frame.registration_failed;
    return result;
}

std::optional<ChangeVerdict> ChangeDetector::classify_object(ObjectId target_id, int frame_index) {
    ObjectInstance* obj = target_.object(target_id);
    if (!obj || obj->marked_changed) return std::nullopt;

    ChangeVerdict verdict;
    verdict.object_id = target_id;
    verdict.frame_index = frame_index;
    verdict.session = Session::target;

    const Point3 projected = t_rel_->apply(obj->center) + cfg_.post_registration_drift;
    auto source_neighborhood = source_.query_neighborhood(projected);
    for (auto* src : source_neighborhood) src->observed = true;

    if (source_neighborhood.empty()) {
        verdict.kind = VerdictKind::changed_new_location;
        verdict.evidence = VerdictEvidence::empty_source_neighborhood;
        obj->marked_changed = true;
        return verdict;
    }

    std::vector<ObjectInstance*> matches;
    for (auto* src : source_neighborhood) {
        if (cosine_similarity(obj->shape_code, src->shape_code) > cfg_.delta_s) {
            src->matched = true;
            matches.push_back(src);
        }
    }
    if (matches.empty()) {
        verdict.kind = VerdictKind::changed_new_shape;
        verdict.evidence = VerdictEvidence::no_shape_match;
        obj->marked_changed = true;
        return verdict;
    }

    if (cfg_.classify_mode == ClassifyMode::objectwise) {
        for (const auto* src : matches) {
            if ((src->center - projected).norm() < cfg_.delta_d) {
                verdict.kind = VerdictKind::unchanged;
                verdict.evidence = VerdictEvidence::singleton_fallback;
                return verdict;
            }
        }
        verdict.kind = VerdictKind::changed_moved;
        verdict.evidence = VerdictEvidence::singleton_fallback;
        obj->marked_changed = true;
        return verdict;
    }

    // A stored lookalike within association range of the center is a duplicate
    // record of the same physical object; as a graph vertex it would
    // contribute a zero-length edge that travels with the object and masks
    // real motion.
    const auto is_self_duplicate = [&](const ObjectInstance& member,
                                       const ObjectInstance& center) {
        if (member.id == center.id) return false;
        if ((member.center - center.center).norm() >= 2.0 * cfg_.delta_d) return false;
        return cosine_similarity(member.shape_code, center.shape_code) > cfg_.delta_s;
    };

    // Graphs are compared in the source frame: project the whole target
    // neighborhood through the alignment so a rotational session offset
    // cannot masquerade as edge change.
    const auto target_neighborhood_raw = target_.query_neighborhood(obj->center);
    std::vector<ObjectInstance> projected_neighborhood;
    projected_neighborhood.reserve(target_neighborhood_raw.size());
    const ObjectInstance* projected_center = nullptr;
    for (const auto* t : target_neighborhood_raw) {
        if (is_self_duplicate(*t, *obj)) continue;
        ObjectInstance copy = *t;
        copy.center = t_rel_->apply(t->center) + cfg_.post_registration_drift;
        projected_neighborhood.push_back(std::move(copy));
    }
    std::vector<const ObjectInstance*> target_neighborhood;
    for (const auto& t : projected_neighborhood) {
        target_neighborhood.push_back(&t);
        if (t.id == target_id) projected_center = &t;
    }

    bool compared_any_graph = false;
    for (const auto* src : matches) {
        std::vector<const ObjectInstance*> src_neighborhood;
        for (const auto* s : source_.query_neighborhood(src->center)) {
            if (!is_self_duplicate(*s, *src)) src_neighborhood.push_back(s);
        }
        if (target_neighborhood.size() <= 1 || src_neighborhood.size() <= 1) {
            // Singleton on either side: revert to object-wise comparison.
            if ((src->center - projected).norm() < cfg_.delta_d) {
                verdict.kind = VerdictKind::unchanged;
                verdict.evidence = VerdictEvidence::singleton_fallback;
                return verdict;
            }
            continue;
        }
        compared_any_graph = true;
        const ObjectGraph target_graph = build_object_graph(*projected_center, target_neighborhood);
        const ObjectGraph source_graph = build_object_graph(*src, src_neighborhood);
        if (compare_graphs(target_graph, source_graph, cfg_.delta_s, cfg_.delta_e) ==
            GraphVerdict::unchanged) {
            verdict.kind = VerdictKind::unchanged;
            verdict.evidence = VerdictEvidence::edge_match;
            return verdict;
        }
    }

    verdict.kind = VerdictKind::changed_moved;
    verdict.evidence = compared_any_graph ? VerdictEvidence::all_edges_differ
                                          : VerdictEvidence::singleton_fallback;
    obj->marked_changed = true;
    return verdict;
}

std::vector<ChangeVerdict> ChangeDetector::finalize_removed() const {
    std::vector<ChangeVerdict> out;
    for (const auto& src : source_.all_objects()) {
        if (src.observed && !src.matched) {
            ChangeVerdict v;
            v.object_id = src.id;
            v.kind = VerdictKind::removed;
            v.evidence = VerdictEvidence::never_matched;
            v.session = Session::source;
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace scenediff
