#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "scenediff/runner.hpp"

namespace {

using scenediff::ClassifyMode;
using scenediff::RunOverrides;
using scenediff::RunReport;
using scenediff::ScenarioConfig;

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("SCENE_DIFF_SEED");
    if (!raw || !*raw) return std::nullopt;
    try {
        return std::stoull(raw);
    } catch (const std::exception&) {
        throw scenediff::ConfigError("SCENE_DIFF_SEED is not a valid integer");
    }
}

struct RunFlags {
    std::string scenario_path;
    std::int64_t seed = -1;
    std::string out_path;
    std::string verdict_log_path;
    std::string baseline = "";
    std::string dump_clouds_dir;
    std::string tree_dump_path;
    std::string stream_dump_path;
    std::string classify_mode;
    bool verbose = false;
};

RunReport execute(const RunFlags& flags) {
    ScenarioConfig cfg = scenediff::load_scenario(flags.scenario_path);

    // Seed precedence: --seed, scenario file, SCENE_DIFF_SEED, 0.
    RunOverrides overrides;
    if (flags.seed >= 0) {
        overrides.seed = static_cast<std::uint64_t>(flags.seed);
    } else if (!cfg.seed_in_file) {
        if (auto seed = env_seed()) overrides.seed = *seed;
    }
    if (!flags.baseline.empty()) {
        if (flags.baseline != "nn" && flags.baseline != "none")
            throw scenediff::ConfigError("--baseline must be nn or none");
        overrides.baseline_enabled = flags.baseline == "nn";
    }
    if (!flags.classify_mode.empty()) {
        if (flags.classify_mode == "graph")
            overrides.classify_mode = ClassifyMode::graph;
        else if (flags.classify_mode == "objectwise")
            overrides.classify_mode = ClassifyMode::objectwise;
        else
            throw scenediff::ConfigError("--classify-mode must be graph or objectwise");
    }
    if (!flags.dump_clouds_dir.empty()) overrides.dump_clouds_dir = flags.dump_clouds_dir;
    if (!flags.tree_dump_path.empty()) overrides.tree_dump_path = flags.tree_dump_path;
    if (!flags.stream_dump_path.empty()) overrides.stream_dump_path = flags.stream_dump_path;

    RunReport report = scenediff::run_scenario(cfg, overrides);

    if (!flags.out_path.empty()) {
        std::ofstream out(flags.out_path);
        if (!out) throw scenediff::Error("cannot open " + flags.out_path);
        out << scenediff::report_to_json(report).dump(2) << "\n";
    }
    if (!flags.verdict_log_path.empty()) {
        std::ofstream out(flags.verdict_log_path);
        if (!out) throw scenediff::Error("cannot open " + flags.verdict_log_path);
        out << scenediff::verdicts_to_jsonl(report);
    }

    std::cout << report.config.name << " seed=" << report.seed << " status=" << report.status
              << " ours: P=" << report.ours.precision << " R=" << report.ours.recall << " ("
              << report.ours.tp << "/" << report.ours.fp << "/" << report.ours.fn << ")";
    if (report.nn)
        std::cout << " nn: P=" << report.nn->precision << " R=" << report.nn->recall << " ("
                  << report.nn->tp << "/" << report.nn->fp << "/" << report.nn->fn << ")";
    std::cout << " [" << report.total_seconds << " s]\n";
    if (flags.verbose) {
        for (const auto& rec : report.verdict_log) {
            std::cout << "  frame " << rec.verdict.frame_index << " obj " << rec.verdict.object_id
                      << " gt " << rec.gt_id << " -> " << to_string(rec.verdict.kind) << " ("
                      << to_string(rec.verdict.evidence) << ")\n";
        }
    }
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object-level scene change detection over simulated sessions"};
    app.require_subcommand(1);

    RunFlags flags;
    auto* run = app.add_subcommand("run", "Run one scenario file");
    run->add_option("scenario", flags.scenario_path, "Scenario JSON file")->required();
    run->add_option("--seed", flags.seed, "Seed override (highest precedence)");
    run->add_option("--out", flags.out_path, "Write the full JSON report here");
    run->add_option("--verdict-log", flags.verdict_log_path, "Write verdicts as JSON-lines");
    run->add_option("--baseline", flags.baseline, "Baseline selection: nn or none");
    run->add_option("--dump-clouds", flags.dump_clouds_dir, "Dump fused per-object PLY clouds");
    run->add_option("--tree-dump", flags.tree_dump_path, "Dump both object trees as JSON");
    run->add_option("--dump-stream", flags.stream_dump_path,
                    "Dump measurement streams and labels as JSON-lines");
    run->add_option("--classify-mode", flags.classify_mode, "graph (default) or objectwise");
    run->add_flag("--verbose", flags.verbose, "Print the verdict log");

    std::vector<std::string> batch_paths;
    std::string batch_out_dir = ".";
    int jobs = 2;
    auto* batch = app.add_subcommand("run-batch", "Run several scenarios concurrently");
    batch->add_option("scenarios", batch_paths, "Scenario JSON files")->required();
    batch->add_option("--out-dir", batch_out_dir, "Directory for per-scenario reports");
    batch->add_option("--jobs", jobs, "Concurrent scenarios")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            execute(flags);
            return 0;
        }
        if (batch->parsed()) {
            std::filesystem::create_directories(batch_out_dir);
            std::vector<std::future<void>> inflight;
            for (const auto& path : batch_paths) {
                auto task = [&, path]() {
                    RunFlags f;
                    f.scenario_path = path;
                    f.out_path = (std::filesystem::path(batch_out_dir) /
                                  (std::filesystem::path(path).stem().string() + "_report.json"))
                                     .string();
                    execute(f);
                };
                if (static_cast<int>(inflight.size()) >= jobs) {
                    inflight.front().get();
                    inflight.erase(inflight.begin());
                }
                inflight.push_back(std::async(std::launch::async, task));
            }
            for (auto& f : inflight) f.get();
            return 0;
        }
    } catch (const scenediff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
