// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Scenario files come from the repository's scenarios/ directory.

#include <Eigen/Geometry>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <vector>

#include "scenediff/descriptor.hpp"
#include "scenediff/losses.hpp"
#include "scenediff/nn_baseline.hpp"
#include "scenediff/rng.hpp"
#include "scenediff/runner.hpp"

using namespace scenediff;

namespace {

const std::filesystem::path kScenarioDir{SCENEDIFF_SCENARIO_DIR};

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %-24s  %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

// --- 1: Table-I reproduction (scaled) ---------------------------------------

double g_table1_max_detect_ms = 0.0;  // reused by criterion 7

void criterion_table1() {
    const auto cfg = load_scenario(kScenarioDir / "paper_table1.json");
    const auto start = std::chrono::steady_clock::now();
    double ours_p = 0.0, ours_r = 0.0, nn_p = 0.0, nn_r = 0.0;
    int registered = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RunOverrides ov;
        ov.seed = seed;
        const RunReport run = run_scenario(cfg, ov);
        ours_p += run.ours.precision;
        ours_r += run.ours.recall;
        if (run.nn) {
            nn_p += run.nn->precision;
            nn_r += run.nn->recall;
        }
        if (run.registered) ++registered;
        g_table1_max_detect_ms = std::max(g_table1_max_detect_ms, run.mean_detect_ms);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ours_p /= 10.0;
    ours_r /= 10.0;
    nn_p /= 10.0;
    nn_r /= 10.0;

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "ours P=%.3f R=%.3f (need >=0.95), nn P=%.3f R=%.3f (need <=0.80), %.1f s "
                  "(need <=60), %d/10 registered",
                  ours_p, ours_r, nn_p, nn_r, wall, registered);
    const bool pass = ours_p >= 0.95 && ours_r >= 0.95 && nn_p <= 0.80 && nn_r <= 0.80 &&
                      wall <= 60.0 && registered == 10;
    report(1, "table-1 reproduction", pass, detail);
}

// --- 2: low-overlap false positives -----------------------------------------

void criterion_low_overlap() {
    const auto cfg = load_scenario(kScenarioDir / "low_overlap_pairs.json");
    const RunReport run = run_scenario(cfg);
    int ours_unchanged = 0, nn_changed = 0, pairs = 0;
    for (const auto& row : run.objects) {
        if (row.table != 2 && row.table != 3) continue;
        ++pairs;
        if (!row.ours_changed && row.ours_verdict == "unchanged") ++ours_unchanged;
        if (row.nn_changed) ++nn_changed;
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "ours unchanged %d/%d (need 10/10), nn changed %d/%d (need >=8)", ours_unchanged,
                  pairs, nn_changed, pairs);
    report(2, "low-overlap pairs", pairs == 10 && ours_unchanged == 10 && nn_changed >= 8, detail);
}

// --- 3: localization-drift robustness ---------------------------------------

void criterion_drift() {
    const auto cfg = load_scenario(kScenarioDir / "drift_robustness.json");
    const Eigen::Vector3d drift{0.04, 0.0, 0.0};  // 2 x delta_d

    RunOverrides graph_ov;
    graph_ov.post_registration_drift = drift;
    const RunReport graph_run = run_scenario(cfg, graph_ov);

    RunOverrides object_ov = graph_ov;
    object_ov.classify_mode = ClassifyMode::objectwise;
    const RunReport object_run = run_scenario(cfg, object_ov);

    int total = 0, graph_unchanged = 0, object_changed = 0;
    for (const auto& row : graph_run.objects) {
        ++total;
        if (!row.ours_changed) ++graph_unchanged;
    }
    for (const auto& row : object_run.objects) {
        if (row.ours_changed) ++object_changed;
    }
    const double flipped = total > 0 ? static_cast<double>(object_changed) / total : 0.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "graph mode unchanged %d/%d (need all), object-wise flipped %.0f%% (need >=90%%)",
                  graph_unchanged, total, 100.0 * flipped);
    report(3, "drift robustness", graph_unchanged == total && total > 0 && flipped >= 0.90, detail);
}

// --- 4: registration accuracy with outliers ---------------------------------

void criterion_registration() {
    int successes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(seed, 0xacc4));
        RigidTransform truth;
        Eigen::Vector3d axis = rng.normal3(1.0).normalized();
        truth.rotation = Eigen::AngleAxisd(rng.uniform(-0.3, 0.3), axis).toRotationMatrix();
        truth.translation = rng.normal3(0.2);

        CorrespondenceSet set(6);
        for (int i = 0; i < 4; ++i) {
            const Point3 target = rng.normal3(1.0);
            set.add(i, {truth.apply(target) + rng.normal3(0.002), target, 0.95});
        }
        for (int i = 4; i < 6; ++i) {
            const Point3 target = rng.normal3(1.0);
            set.add(i, {truth.apply(target) + Point3{5.0, 0.0, 0.0}, target, 0.95});
        }
        RansacConfig rcfg;  // defaults: 200 iterations, 0.01 m, minimal sample 3
        rcfg.seed = seed;
        const auto fit = ransac_register(set, rcfg);
        if (!fit) continue;
        const double trans_err = (fit->transform.translation - truth.translation).norm();
        const double rot_err =
            rotation_angle_between(fit->transform.rotation, truth.rotation) * 180.0 / M_PI;
        if (trans_err <= 0.01 && rot_err <= 0.5) ++successes;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d/100 within 0.01 m and 0.5 deg (need >=99)",
                  successes);
    report(4, "registration accuracy", successes >= 99, detail);
}

// --- 5: oracle-equivalence suites --------------------------------------------

void criterion_oracles() {
    // (a) query_neighborhood vs linear scan over the stored intervals.
    Rng rng(0x5a);
    SpatialObjectTree tree(1.2);
    const auto lib = generate_shape_library(16, 64, 0.8, 909);
    for (int i = 0; i < 1000; ++i) {
        Measurement m;
        m.shape_code = lib.shape(rng.uniform_int(0, 15)).canonical_code;
        m.center = {rng.uniform(-8, 8), rng.uniform(-8, 8), 0.0};
        m.quality = rng.uniform(0.05, 1.0);
        tree.insert_or_associate(m, 0.02, 0.9);
    }
    struct FlatInterval {
        double lo, hi;
        std::vector<ObjectId> members;
    };
    std::vector<FlatInterval> xs, ys;
    tree.x_tree().for_each([&](const CoordinateIntervalTree::Node& n) {
        xs.push_back({n.lo, n.hi, n.members});
    });
    tree.y_tree().for_each([&](const CoordinateIntervalTree::Node& n) {
        ys.push_back({n.lo, n.hi, n.members});
    });
    int mismatches_a = 0;
    for (int q = 0; q < 200; ++q) {
        const Point3 p{rng.uniform(-9, 9), rng.uniform(-9, 9), 0.0};
        std::vector<ObjectId> oracle;
        for (const auto& ix : xs) {
            if (p.x() < ix.lo || p.x() > ix.hi) continue;
            for (const auto& iy : ys) {
                if (p.y() < iy.lo || p.y() > iy.hi) continue;
                for (ObjectId id : ix.members)
                    if (std::find(iy.members.begin(), iy.members.end(), id) != iy.members.end())
                        oracle.push_back(id);
            }
        }
        std::sort(oracle.begin(), oracle.end());
        std::vector<ObjectId> got;
        for (const auto* o : tree.query_neighborhood(p)) got.push_back(o->id);
        std::sort(got.begin(), got.end());
        if (got != oracle) ++mismatches_a;
    }

    // (b) compare_graphs vs brute-force all-pairs on small graphs.
    int mismatches_b = 0;
    Rng grng(0x6b);
    const auto glib = generate_shape_library(6, 64, 0.8, 11);
    auto make_instance = [&](ObjectId id, int shape, const Point3& c) {
        ObjectInstance o;
        o.id = id;
        o.shape_code = glib.shape(shape).canonical_code;
        o.center = c;
        o.quality = 0.5;
        return o;
    };
    for (int trial = 0; trial < 10'000; ++trial) {
        auto make_graph = [&](int n) {
            std::vector<ObjectInstance> objs;
            for (int i = 0; i < n; ++i)
                objs.push_back(make_instance(
                    i, grng.uniform_int(0, 5),
                    {grng.uniform(-0.5, 0.5), grng.uniform(-0.5, 0.5), 0.0}));
            std::vector<const ObjectInstance*> hood;
            for (const auto& o : objs) hood.push_back(&o);
            return build_object_graph(objs[0], hood);
        };
        const auto gt = make_graph(grng.uniform_int(2, 6));
        const auto gs = make_graph(grng.uniform_int(2, 6));
        const double delta_e = grng.uniform(0.01, 0.6);
        bool oracle_unchanged = false;
        for (const auto& te : gt.edges)
            for (const auto& se : gs.edges)
                if (cosine_similarity(te.neighbor_code, se.neighbor_code) > 0.9 &&
                    (te.vec - se.vec).norm() <= delta_e)
                    oracle_unchanged = true;
        if ((compare_graphs(gt, gs, 0.9, delta_e) == GraphVerdict::unchanged) != oracle_unchanged)
            ++mismatches_b;
    }

    // (c) nn_changed vs the exhaustive double loop.
    int mismatches_c = 0;
    Rng nrng(0x7c);
    for (int trial = 0; trial < 100; ++trial) {
        PointCloud target, source;
        for (int i = 0; i < 80; ++i) target.points.push_back(nrng.normal3(0.02));
        for (int i = 0; i < 90; ++i) source.points.push_back(nrng.normal3(0.02));
        NnParams params;
        params.d = nrng.uniform(0.001, 0.02);
        params.r = nrng.uniform(0.1, 0.9);
        int orphans = 0;
        for (const auto& p : target.points) {
            bool near = false;
            for (const auto& s : source.points)
                if ((p - s).norm() <= params.d) {
                    near = true;
                    break;
                }
            if (!near) ++orphans;
        }
        const double oracle = static_cast<double>(orphans) / target.points.size();
        if (std::abs(nn_changed(target, source, params).fraction - oracle) > 1e-12)
            ++mismatches_c;
    }

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "neighborhood %d, graphs %d, nn %d mismatches (need 0/0/0)", mismatches_a,
                  mismatches_b, mismatches_c);
    report(5, "oracle equivalence", mismatches_a == 0 && mismatches_b == 0 && mismatches_c == 0,
           detail);
}

// --- 6: numerical checks ------------------------------------------------------

void criterion_numerics() {
    Rng rng(0x86);
    auto random_code = [&](int k) {
        Eigen::VectorXd v(k);
        for (int i = 0; i < k; ++i) v[i] = std::abs(rng.normal(0, 1)) + 0.05;
        return ShapeCode(v);
    };

    double worst_gradient = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p, v;
        for (int i = 0; i < 8; ++i) {
            p.push_back(rng.uniform(0.05, 0.95));
            v.push_back(rng.uniform_int(0, 1));
        }
        worst_gradient =
            std::max(worst_gradient, gradient_check_occupancy(p, v, 1e-5).max_relative_error);
        worst_gradient = std::max(
            worst_gradient,
            gradient_check_triplet(random_code(8), random_code(8), random_code(8), 1e-5)
                .max_relative_error);
    }

    double worst_batch = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        LabeledBatch batch;
        const int objects = 2 + rng.uniform_int(0, 2);
        for (int o = 0; o < objects; ++o) {
            const int samples = 2 + rng.uniform_int(0, 2);
            for (int s = 0; s < samples; ++s) batch.samples.push_back({o, random_code(8)});
        }
        double oracle = 0.0;
        for (std::size_t j = 0; j < batch.samples.size(); ++j) {
            double min_same = 2.0, max_other = -2.0;
            for (std::size_t m = 0; m < batch.samples.size(); ++m) {
                const double d =
                    cosine_similarity(batch.samples[j].second, batch.samples[m].second);
                if (batch.samples[m].first == batch.samples[j].first) {
                    if (m != j) min_same = std::min(min_same, d);
                } else {
                    max_other = std::max(max_other, d);
                }
            }
            oracle += -min_same + max_other;
        }
        oracle /= static_cast<double>(batch.samples.size());
        worst_batch = std::max(worst_batch, std::abs(batch_hard_loss(batch) - oracle));
    }

    double worst_rotation = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        LatentMatrix z(256, 3);
        for (int i = 0; i < z.rows(); ++i)
            for (int c = 0; c < 3; ++c) z(i, c) = rng.normal(0, 1);
        Eigen::Quaterniond q(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1),
                             rng.normal(0, 1));
        q.normalize();
        const LatentMatrix rotated = z * q.toRotationMatrix().transpose();
        worst_rotation = std::max(worst_rotation, (shape_code_from_latent(z).values -
                                                   shape_code_from_latent(rotated).values)
                                                      .cwiseAbs()
                                                      .maxCoeff());
    }

    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "gradients %.2e (<=1e-5), batch-hard %.2e (<=1e-12), rotation %.2e (<=1e-12)",
                  worst_gradient, worst_batch, worst_rotation);
    report(6, "numerical checks",
           worst_gradient <= 1e-5 && worst_batch <= 1e-12 && worst_rotation <= 1e-12, detail);
}

// --- 7: throughput -------------------------------------------------------------

void criterion_throughput() {
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%.3f ms worst mean per measurement (need <=1.0)",
                  g_table1_max_detect_ms);
    report(7, "throughput", g_table1_max_detect_ms > 0.0 && g_table1_max_detect_ms <= 1.0, detail);
}

// --- 8: determinism --------------------------------------------------------------

void criterion_determinism() {
    const auto cfg = load_scenario(kScenarioDir / "paper_table1.json");
    const RunReport a = run_scenario(cfg);
    const RunReport b = run_scenario(cfg);
    const bool reports_equal = report_to_json(a, false).dump() == report_to_json(b, false).dump();
    const bool verdicts_equal = verdicts_to_jsonl(a) == verdicts_to_jsonl(b);
    report(8, "determinism", reports_equal && verdicts_equal,
           reports_equal ? "byte-identical reports (timing excluded)" : "reports differ");
}

}  // namespace

int main() {
    try {
        criterion_table1();
        criterion_low_overlap();
        criterion_drift();
        criterion_registration();
        criterion_oracles();
        criterion_numerics();
        criterion_throughput();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << "\n";
        return 2;
    }
    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
