#include <doctest.h>

#include <Eigen/Geometry>

#include "scenediff/nn_baseline.hpp"
#include "scenediff/rng.hpp"
#include "scenediff/simulator.hpp"
#include "scenediff/transform.hpp"

using namespace scenediff;

namespace {

PointCloud random_cloud(Rng& rng, int n, double spread) {
    PointCloud c;
    for (int i = 0; i < n; ++i) c.points.push_back(rng.normal3(spread));
    return c;
}

// The contract: exhaustive O(|T| * |S|) scan.
double fraction_oracle(const PointCloud& target, const PointCloud& source, double d) {
    int orphans = 0;
    for (const auto& p : target.points) {
        bool has_neighbor = false;
        for (const auto& s : source.points) {
            if ((p - s).norm() <= d) {
                has_neighbor = true;
                break;
            }
        }
        if (!has_neighbor) ++orphans;
    }
    return static_cast<double>(orphans) / static_cast<double>(target.points.size());
}

}  // namespace

TEST_CASE("nn_changed: identical clouds are unchanged with zero fraction") {
    Rng rng(1);
    const PointCloud cloud = random_cloud(rng, 200, 0.05);
    const auto result = nn_changed(cloud, cloud, {});
    CHECK_FALSE(result.changed);
    CHECK(result.fraction == 0.0);
}

TEST_CASE("nn_changed: disjoint clouds a meter apart are fully changed") {
    Rng rng(2);
    PointCloud target = random_cloud(rng, 100, 0.05);
    PointCloud source = random_cloud(rng, 100, 0.05);
    for (auto& p : source.points) p += Point3{1.0, 0, 0};
    const auto result = nn_changed(target, source, {});
    CHECK(result.changed);
    CHECK(result.fraction == 1.0);
}

TEST_CASE("nn_changed: error and empty-source conventions") {
    Rng rng(3);
    const PointCloud cloud = random_cloud(rng, 10, 0.05);
    CHECK_THROWS_AS(nn_changed(PointCloud{}, cloud, {}), InvalidInputError);
    const auto result = nn_changed(cloud, PointCloud{}, {});
    CHECK(result.changed);
    CHECK(result.fraction == 1.0);
}

TEST_CASE("nn_changed: grid implementation equals the exhaustive double loop") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const PointCloud target = random_cloud(rng, 60, 0.02);
        PointCloud source = random_cloud(rng, 80, 0.02);
        NnParams params;
        params.d = rng.uniform(0.001, 0.02);
        params.r = rng.uniform(0.1, 0.9);
        const auto got = nn_changed(target, source, params);
        const double oracle = fraction_oracle(target, source, params.d);
        CHECK(std::abs(got.fraction - oracle) <= 1e-12);
        CHECK(got.changed == (oracle > params.r));
    }
}

TEST_CASE("nn_changed: fraction is monotonically non-increasing in d") {
    Rng rng(5);
    const PointCloud target = random_cloud(rng, 100, 0.03);
    const PointCloud source = random_cloud(rng, 100, 0.03);
    double previous = 1.0;
    for (double d : {0.001, 0.003, 0.01, 0.03, 0.1}) {
        NnParams params;
        params.d = d;
        const double fraction = nn_changed(target, source, params).fraction;
        CHECK(fraction <= previous);
        previous = fraction;
    }
}

TEST_CASE("nn_changed: invariant under a shared rigid transform") {
    Rng rng(6);
    const PointCloud target = random_cloud(rng, 80, 0.03);
    const PointCloud source = random_cloud(rng, 80, 0.03);
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(0.8, Eigen::Vector3d{1, 1, 0.2}.normalized()).toRotationMatrix();
    t.translation = {0.5, -0.7, 0.2};
    NnParams params;
    params.d = 0.01;
    const auto plain = nn_changed(target, source, params);
    const auto moved = nn_changed(apply(t, target), apply(t, source), params);
    CHECK(plain.fraction == doctest::Approx(moved.fraction).epsilon(1e-12));
}

TEST_CASE("nn_changed: opposite-view partials of the same object read as changed") {
    PrimitiveSpec cyl;
    cyl.kind = PrimitiveSpec::Kind::cylinder;
    cyl.half_extents = {0.04, 0.04, 0.05};
    RigidTransform pose;
    RigidTransform cam_a, cam_b;
    cam_a.translation = {1.0, 0.0, 0.0};
    cam_b.translation = {-1.0, 0.0, 0.0};
    const PointCloud source = sim::sample_partial_cloud(cyl, pose, cam_a, 1500, 21);
    const PointCloud target = sim::sample_partial_cloud(cyl, pose, cam_b, 1500, 22);

    const auto result = nn_changed(target, source, {});  // d = 0.002, r = 0.3
    CHECK(result.changed);
    CHECK(result.fraction >= 0.9);  // the baseline's false-positive mode
}

TEST_CASE("online detector: first exceedance is permanent") {
    Rng rng(7);
    const PointCloud reference = random_cloud(rng, 300, 0.04);
    PointCloud far = reference;
    for (auto& p : far.points) p += Point3{1, 0, 0};

    NnBaselineDetector detector({});
    detector.add_source_cloud(0, reference);

    CHECK_FALSE(detector.observe_target(0, reference).changed);
    CHECK(detector.observe_target(0, far).changed);
    // A later perfectly-matching view cannot clear the mark.
    CHECK(detector.observe_target(0, reference).changed);
    CHECK(detector.is_changed(0));
}

TEST_CASE("online detector: objects without any source reference are changed") {
    Rng rng(8);
    NnBaselineDetector detector({});
    const auto result = detector.observe_target(5, random_cloud(rng, 50, 0.05));
    CHECK(result.changed);
    CHECK(result.fraction == 1.0);
}
