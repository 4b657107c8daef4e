#include "scenediff/shape_library.hpp"

#include <algorithm>
#include <cmath>

#include "scenediff/descriptor.hpp"
#include "scenediff/rng.hpp"

namespace scenediff {

const LibraryShape& SyntheticShapeLibrary::shape(int shape_id) const {
    for (const auto& s : shapes) {
        if (s.shape_id == shape_id) return s;
    }
    throw InvalidInputError("unknown shape id " + std::to_string(shape_id));
}

bool SyntheticShapeLibrary::contains(int shape_id) const {
    return std::any_of(shapes.begin(), shapes.end(),
                       [&](const LibraryShape& s) { return s.shape_id == shape_id; });
}

namespace {

// Sparse non-negative unit codes: a handful of strong entries per code keeps
// same-shape observations well separated from the noise floor while distinct
// codes overlap on at most a few support indices.
ShapeCode sample_code(Rng& rng, int k) {
    const int support = std::clamp(k / 16, 1, k);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    int placed = 0;
    while (placed < support) {
        const int idx = rng.uniform_int(0, k - 1);
        if (v[idx] == 0.0) {
            v[idx] = rng.uniform(0.5, 1.5);
            ++placed;
        }
    }
    v /= v.norm();
    return ShapeCode(std::move(v));
}

PrimitiveSpec sample_primitive(Rng& rng, int index) {
    PrimitiveSpec spec;
    switch (index % 3) {
        case 0: {
            spec.kind = PrimitiveSpec::Kind::cylinder;
            const double r = rng.uniform(0.030, 0.050);
            spec.half_extents = {r, r, rng.uniform(0.040, 0.070)};
            break;
        }
        case 1:
            spec.kind = PrimitiveSpec::Kind::box;
            spec.half_extents = {rng.uniform(0.030, 0.060), rng.uniform(0.030, 0.060),
                                 rng.uniform(0.040, 0.070)};
            break;
        default:
            spec.kind = PrimitiveSpec::Kind::superellipsoid;
            spec.half_extents = {rng.uniform(0.030, 0.055), rng.uniform(0.030, 0.055),
                                 rng.uniform(0.040, 0.070)};
            spec.e1 = rng.uniform(0.4, 1.6);
            spec.e2 = rng.uniform(0.4, 1.6);
            break;
    }
    return spec;
}

}  // namespace

SyntheticShapeLibrary generate_shape_library(int n_shapes, int k, double max_pairwise_similarity,
                                             std::uint64_t seed) {
    if (n_shapes < 1) throw InvalidInputError("n_shapes must be >= 1");
    if (k < 1) throw InvalidInputError("k must be >= 1");
    if (!(max_pairwise_similarity > 0.0 && max_pairwise_similarity < 1.0))
        throw InvalidInputError("max_pairwise_similarity must be in (0, 1)");

    constexpr long kMaxAttempts = 1'000'000;

    SyntheticShapeLibrary lib;
    lib.k = k;
    lib.max_pairwise_similarity = max_pairwise_similarity;
    Rng rng(derive_seed(seed, 0x5eed11b));

    long attempts = 0;
    while (static_cast<int>(lib.shapes.size()) < n_shapes) {
        if (++attempts > kMaxAttempts)
            throw CapacityError("shape library rejection sampling exceeded attempt cap; "
                                "n_shapes too large for k and the similarity threshold");
        ShapeCode candidate = sample_code(rng, k);
        bool ok = true;
        for (const auto& existing : lib.shapes) {
            if (cosine_similarity(candidate, existing.canonical_code) > max_pairwise_similarity) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        const int id = static_cast<int>(lib.shapes.size());
        lib.shapes.push_back({id, std::move(candidate), sample_primitive(rng, id)});
    }
    return lib;
}

Measurement synth_observe(const SyntheticShapeLibrary& lib, int shape_id, const Point3& true_center,
                          const ViewContext& view, const DescriptorNoise& noise, std::uint64_t seed) {
    const LibraryShape& shape = lib.shape(shape_id);
    Rng rng(derive_seed(seed, 0x0b5e7e));

    Measurement m;
    const double sigma =
        noise.sigma_code * std::sqrt(1.0 + noise.beta * view.occlusion_fraction);
    Eigen::VectorXd code = shape.canonical_code.values;
    if (sigma > 0.0) {
        for (Eigen::Index i = 0; i < code.size(); ++i)
            code[i] = std::max(0.0, code[i] + rng.normal(0.0, sigma));
        const double n = code.norm();
        if (n > 0.0)
            code /= n;
        else
            code = shape.canonical_code.values;  // all entries clipped away; keep the prior
    }
    m.shape_code = ShapeCode(std::move(code));

    m.center = true_center;
    if (noise.sigma_center > 0.0) m.center += rng.normal3(noise.sigma_center);

    m.quality = std::clamp(noise.q_max - noise.gamma * view.occlusion_fraction, 1e-3, 1.0);
    return m;
}

}  // namespace scenediff
