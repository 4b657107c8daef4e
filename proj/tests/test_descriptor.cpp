#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "scenediff/descriptor.hpp"
#include "scenediff/rng.hpp"
#include "scenediff/shape_library.hpp"
#include "scenediff/transform.hpp"

using namespace scenediff;

namespace {

Eigen::Matrix3d random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1));
    q.normalize();
    return q.toRotationMatrix();
}

}  // namespace

TEST_CASE("shape code: row norms") {
    LatentMatrix z(2, 3);
    z << 3, 4, 0, 0, 0, 0;
    const ShapeCode code = shape_code_from_latent(z);
    CHECK(code.values[0] == doctest::Approx(5.0));
    CHECK(code.values[1] == doctest::Approx(0.0));
}

TEST_CASE("shape code: rotation invariance within 1e-12") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        LatentMatrix z(256, 3);
        for (int i = 0; i < z.rows(); ++i)
            for (int c = 0; c < 3; ++c) z(i, c) = rng.normal(0, 1);
        const Eigen::Matrix3d r = random_rotation(rng);
        const LatentMatrix rotated = z * r.transpose();
        const ShapeCode a = shape_code_from_latent(z);
        const ShapeCode b = shape_code_from_latent(rotated);
        CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("shape code: matches a per-row norm oracle") {
    Rng rng(13);
    LatentMatrix z(256, 3);
    for (int i = 0; i < z.rows(); ++i)
        for (int c = 0; c < 3; ++c) z(i, c) = rng.normal(0, 2);
    const ShapeCode code = shape_code_from_latent(z);
    for (int i = 0; i < z.rows(); ++i) {
        const double oracle = std::sqrt(z(i, 0) * z(i, 0) + z(i, 1) * z(i, 1) + z(i, 2) * z(i, 2));
        CHECK(std::abs(code.values[i] - oracle) < 1e-12);
    }
}

TEST_CASE("shape code: rejects non-finite input") {
    LatentMatrix z(2, 3);
    z.setZero();
    z(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(shape_code_from_latent(z), InvalidInputError);
}

TEST_CASE("cosine similarity: axis cases and formula oracle") {
    ShapeCode ex(Eigen::Vector2d{1, 0});
    ShapeCode ey(Eigen::Vector2d{0, 1});
    CHECK(cosine_similarity(ex, ex) == doctest::Approx(1.0));
    CHECK(cosine_similarity(ex, ey) == doctest::Approx(0.0));
    CHECK_THROWS_AS(cosine_similarity(ex, ShapeCode(Eigen::Vector2d{0, 0})), InvalidInputError);

    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd a(32), b(32);
        for (int i = 0; i < 32; ++i) {
            a[i] = std::abs(rng.normal(0, 1));
            b[i] = std::abs(rng.normal(0, 1));
        }
        const double oracle = a.dot(b) / (a.norm() * b.norm());
        const double got = cosine_similarity(ShapeCode(a), ShapeCode(b));
        CHECK(std::abs(got - oracle) < 1e-12);
        CHECK(got == cosine_similarity(ShapeCode(b), ShapeCode(a)));  // symmetry
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("cosine similarity equals 1 iff positive scalar multiples") {
    Rng rng(19);
    Eigen::VectorXd a(16);
    for (int i = 0; i < 16; ++i) a[i] = std::abs(rng.normal(0, 1)) + 0.1;
    CHECK(cosine_similarity(ShapeCode(a), ShapeCode(Eigen::VectorXd(3.5 * a))) ==
          doctest::Approx(1.0).epsilon(1e-9));
    Eigen::VectorXd b = a;
    b[0] += 1.0;
    CHECK(cosine_similarity(ShapeCode(a), ShapeCode(b)) < 1.0 - 1e-9);
}

TEST_CASE("reconstruct_full_cloud: indicator thresholding inside the unit ball") {
    const OccupancyField ball = [](const Point3& p) { return p.norm() <= 1.0 ? 1.0 : 0.0; };
    PointCloud partial;
    for (int i = 0; i < 64; ++i) {
        const double phi = 2.0 * M_PI * i / 64.0;
        partial.points.push_back({std::cos(phi), std::sin(phi), 0.0});
    }
    const PointCloud full = reconstruct_full_cloud(ball, partial, 1.5, 16, 0.5);
    CHECK(!full.empty());
    for (const auto& p : full.points) CHECK(p.norm() <= 1.0 + 1e-12);
}

TEST_CASE("reconstruct_full_cloud: empty field raises the empty-reconstruction error") {
    const OccupancyField zero = [](const Point3&) { return 0.0; };
    PointCloud partial;
    partial.points = {{0, 0, 0}, {1, 1, 1}};
    CHECK_THROWS_AS(reconstruct_full_cloud(zero, partial, 1.5, 8, 0.5), EmptyReconstructionError);
}

TEST_CASE("reconstruct_full_cloud: half-space centroid vs grid-sum oracle") {
    const OccupancyField half = [](const Point3& p) { return p.x() > 0.0 ? 1.0 : 0.0; };
    PointCloud partial;
    partial.points = {{-1, -1, -1}, {1, 1, 1}};
    const int n = 24;
    const PointCloud full = reconstruct_full_cloud(half, partial, 1.0, n, 0.5);

    // Independent oracle: iterate the same grid definition and average.
    Point3 oracle_sum = Point3::Zero();
    int count = 0;
    for (int ix = 0; ix < n; ++ix) {
        for (int iy = 0; iy < n; ++iy) {
            for (int iz = 0; iz < n; ++iz) {
                const Point3 q{-1.0 + 2.0 * ix / (n - 1), -1.0 + 2.0 * iy / (n - 1),
                               -1.0 + 2.0 * iz / (n - 1)};
                if (q.x() > 0.0) {
                    oracle_sum += q;
                    ++count;
                }
            }
        }
    }
    const Point3 centroid = recover_center(full);
    const Point3 oracle = oracle_sum / count;
    CHECK((centroid - oracle).norm() < 1e-12);
    CHECK(centroid.x() > 0.0);
    const double spacing = 2.0 / (n - 1);
    CHECK(std::abs(centroid.y()) <= spacing);
    CHECK(std::abs(centroid.z()) <= spacing);
}

TEST_CASE("reconstruct_full_cloud is deterministic and a subset of the grid") {
    const OccupancyField ball = [](const Point3& p) { return p.norm() <= 0.8 ? 0.9 : 0.1; };
    PointCloud partial;
    partial.points = {{-1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const PointCloud a = reconstruct_full_cloud(ball, partial, 1.2, 10, 0.5);
    const PointCloud b = reconstruct_full_cloud(ball, partial, 1.2, 10, 0.5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);
}

TEST_CASE("recover_center: mean, single point, summation oracle, rigid commutation") {
    PointCloud two;
    two.points = {{0, 0, 0}, {2, 0, 0}};
    CHECK(recover_center(two).isApprox(Point3{1, 0, 0}));

    PointCloud one;
    one.points = {{4, -2, 7}};
    CHECK(recover_center(one).isApprox(Point3{4, -2, 7}));

    PointCloud empty;
    CHECK_THROWS_AS(recover_center(empty), InvalidInputError);

    Rng rng(23);
    PointCloud cloud;
    Point3 sum = Point3::Zero();
    for (int i = 0; i < 1000; ++i) {
        cloud.points.push_back(rng.normal3(2.0));
        sum += cloud.points.back();
    }
    CHECK((recover_center(cloud) - sum / 1000.0).norm() < 1e-12);

    RigidTransform t;
    t.rotation = random_rotation(rng);
    t.translation = rng.normal3(1.0);
    const Point3 direct = recover_center(apply(t, cloud));
    const Point3 mapped = apply(t, recover_center(cloud));
    CHECK((direct - mapped).norm() < 1e-12);
}

TEST_CASE("generate_shape_library: determinism, norms, pairwise bound") {
    const auto lib = generate_shape_library(20, 256, 0.8, 99);
    REQUIRE(lib.shapes.size() == 20);
    for (const auto& s : lib.shapes) {
        CHECK(s.canonical_code.norm() == doctest::Approx(1.0));
        CHECK((s.canonical_code.values.array() >= 0.0).all());
    }
    for (std::size_t i = 0; i < lib.shapes.size(); ++i) {
        for (std::size_t j = i + 1; j < lib.shapes.size(); ++j) {
            CHECK(cosine_similarity(lib.shapes[i].canonical_code, lib.shapes[j].canonical_code) <=
                  0.8);
        }
    }

    const auto again = generate_shape_library(20, 256, 0.8, 99);
    for (std::size_t i = 0; i < lib.shapes.size(); ++i)
        CHECK(lib.shapes[i].canonical_code.values == again.shapes[i].canonical_code.values);

    const auto single = generate_shape_library(1, 64, 0.5, 3);
    CHECK(single.shapes.size() == 1);
    CHECK(single.shapes[0].canonical_code.norm() == doctest::Approx(1.0));
}

TEST_CASE("generate_shape_library: infeasible demand hits the capacity error") {
    // k = 1 admits exactly one non-negative unit code; a second one can never
    // clear any similarity bound below 1.
    CHECK_THROWS_AS(generate_shape_library(2, 1, 0.5, 1), CapacityError);
}

TEST_CASE("synth_observe: zero noise reproduces the canonical observation") {
    const auto lib = generate_shape_library(5, 256, 0.8, 7);
    DescriptorNoise noise;
    noise.sigma_code = 0.0;
    noise.sigma_center = 0.0;
    ViewContext view;
    view.occlusion_fraction = 0.0;
    const Point3 center{1.0, 2.0, 0.8};
    const Measurement m = synth_observe(lib, 3, center, view, noise, 42);
    CHECK(m.shape_code.values == lib.shape(3).canonical_code.values);
    CHECK(m.center == center);
    CHECK(m.quality == doctest::Approx(noise.q_max));
}

TEST_CASE("synth_observe: deterministic per seed") {
    const auto lib = generate_shape_library(5, 256, 0.8, 7);
    DescriptorNoise noise;
    ViewContext view;
    view.occlusion_fraction = 0.3;
    const Measurement a = synth_observe(lib, 1, {0, 0, 0}, view, noise, 1234);
    const Measurement b = synth_observe(lib, 1, {0, 0, 0}, view, noise, 1234);
    CHECK(a.shape_code.values == b.shape_code.values);
    CHECK(a.center == b.center);
    const Measurement c = synth_observe(lib, 1, {0, 0, 0}, view, noise, 1235);
    CHECK(a.shape_code.values != c.shape_code.values);
}

TEST_CASE("synth_observe: same-shape similarity clears 0.9 at default noise") {
    const auto lib = generate_shape_library(20, 256, 0.8, 2024);
    DescriptorNoise noise;  // defaults: sigma_code 0.02, beta 3
    ViewContext view;
    view.occlusion_fraction = 0.0;
    const int trials = 10'000;
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
        const int shape = i % 20;
        const Measurement a = synth_observe(lib, shape, {0, 0, 0}, view, noise, 2 * i);
        const Measurement b = synth_observe(lib, shape, {0, 0, 0}, view, noise, 2 * i + 1);
        if (cosine_similarity(a.shape_code, b.shape_code) > 0.9) ++hits;
    }
    CHECK(static_cast<double>(hits) / trials >= 0.99);
}

TEST_CASE("synth_observe: distinct shapes almost never clear 0.9") {
    const auto lib = generate_shape_library(20, 256, 0.8, 2024);
    DescriptorNoise noise;
    ViewContext view;
    Rng pick(55);
    const int trials = 10'000;
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
        const int sa = pick.uniform_int(0, 19);
        int sb = pick.uniform_int(0, 18);
        if (sb >= sa) ++sb;
        const Measurement a = synth_observe(lib, sa, {0, 0, 0}, view, noise, 2 * i);
        const Measurement b = synth_observe(lib, sb, {0, 0, 0}, view, noise, 2 * i + 1);
        if (cosine_similarity(a.shape_code, b.shape_code) > 0.9) ++hits;
    }
    CHECK(static_cast<double>(hits) / trials <= 0.01);
}
