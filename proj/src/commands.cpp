#include "roam/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "roam/config.hpp"
#include "roam/dataset.hpp"
#include "roam/metrics.hpp"
#include "roam/trainer.hpp"

namespace roam {

namespace fs = std::filesystem;

namespace {

RunConfig load_config_or_default(const fs::path& path) {
    if (path.empty()) {
        return RunConfig{};
    }
    return load_run_config(path);
}

std::string seq_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "seq_%03d", index);
    return buf;
}

std::string clip_dir_name(size_t clip) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "clip_%04zu", clip);
    return buf;
}

std::vector<std::string> pick_split(const fs::path& data, const std::string& split,
                                    std::uint64_t seed) {
    std::vector<std::string> names = list_sequences(data);
    if (names.empty()) {
        throw std::runtime_error("no seq_* directories under " + data.string());
    }
    if (split == "all" || names.size() < 2) {
        return names;
    }
    auto [train, test] = split_train_test(names, {20, 5}, seed);
    if (split == "train") return train;
    if (split == "test") return test;
    throw std::runtime_error("unknown split '" + split + "' (use train|test|all)");
}

Frame montage_grid(const std::vector<std::vector<Frame>>& rows) {
    const int h = rows[0][0].height, w = rows[0][0].width;
    const int n_cols = int(rows[0].size());
    const int n_rows = int(rows.size());
    Frame out(n_cols * (w + 1) + 1, n_rows * (h + 1) + 1);
    std::fill(out.px.begin(), out.px.end(), 1.0);
    for (int gr = 0; gr < n_rows; ++gr) {
        for (int gc = 0; gc < n_cols; ++gc) {
            const Frame& src = rows[size_t(gr)][size_t(gc)];
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    for (int ch = 0; ch < 3; ++ch) {
                        out.at(gr * (h + 1) + 1 + r, gc * (w + 1) + 1 + c, ch) = src.at(r, c, ch);
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace

int cmd_generate(const GenerateOptions& opt) {
    RunConfig cfg;
    try {
        cfg = load_config_or_default(opt.config);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (opt.sequences < 1 || opt.frames < 1 || opt.out.empty()) {
        std::cerr << "generate: need --sequences >= 1, --frames >= 1 and --out\n";
        return kExitUsage;
    }
    fs::create_directories(opt.out);

    struct Result {
        std::string line;
        bool ok = false;
    };
    std::vector<Result> results(size_t(opt.sequences));
    std::mutex err_mutex;

    auto run_one = [&](int i) {
        Result& res = results[size_t(i)];
        try {
            const std::uint64_t seed = opt.seed + std::uint64_t(i);
            const World world = generate_world(seed, cfg.world);
            SafetyStats stats;
            SequenceRecord rec = simulate_sequence(world, world.spawn, opt.frames,
                                                   cfg.sim_config(), seed, seq_name(i), &stats);
            write_sequence(rec, opt.out, opt.force);
            {
                std::ofstream scene(opt.out / rec.name / "scene.txt");
                write_scene(scene, world);
            }
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "[%s] seed=%llu frames=%d min_wall_dist=%.3f m min_agent_clearance=%s",
                          rec.name.c_str(), static_cast<unsigned long long>(seed), opt.frames,
                          stats.min_wall_distance,
                          world.agents.empty()
                              ? "n/a"
                              : (std::to_string(stats.min_agent_clearance) + " m").c_str());
            res.line = buf;
            res.ok = true;
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            res.line = std::string("[") + seq_name(i) + "] FAILED: " + e.what();
            res.ok = false;
        }
    };

    const int threads = std::min(thread_budget(), opt.sequences);
    if (threads <= 1) {
        for (int i = 0; i < opt.sequences; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int i = t; i < opt.sequences; i += threads) run_one(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    bool all_ok = true;
    for (const Result& r : results) {
        std::cout << r.line << "\n";
        all_ok = all_ok && r.ok;
    }
    return all_ok ? kExitOk : kExitFailure;
}

int cmd_validate(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        std::cerr << "validate: " << dir.string() << " is not a directory\n";
        return kExitUsage;
    }
    const ValidationReport report = validate(dir);
    std::cout << report.to_string();
    return report.ok() ? kExitOk : kExitFailure;
}

int cmd_train(const TrainOptions& opt) {
    RunConfig cfg;
    try {
        cfg = load_config_or_default(opt.config);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (opt.data.empty() || opt.out.empty() || !fs::is_directory(opt.data)) {
        std::cerr << "train: need --data (existing dir) and --out\n";
        return kExitUsage;
    }
    if (opt.iterations_override >= 0) {
        cfg.train.iterations = opt.iterations_override;
    }

    std::vector<std::string> train_names;
    try {
        train_names = pick_split(opt.data, list_sequences(opt.data).size() >= 2 ? "train" : "all",
                                 cfg.seed_split);
    } catch (const std::exception& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitUsage;
    }

    std::vector<LoadedSequence> sequences;
    for (const std::string& name : train_names) {
        sequences.push_back(load_sequence_frames(opt.data, name));
    }
    ClipSampler sampler(std::move(sequences));

    Trainer trainer = opt.resume.empty() ? Trainer(cfg.train, cfg.seed_train, opt.ablation)
                                         : load_checkpoint(opt.resume);
    trainer.cfg = cfg.train;
    if (!opt.resume.empty() && trainer.params.action_blind != opt.ablation) {
        std::cout << "note: resuming with ablation="
                  << (trainer.params.action_blind ? "on" : "off") << " from checkpoint\n";
    }

    std::vector<LossTerms> log;
    const int total = cfg.train.iterations;
    while (int(trainer.iteration) < total) {
        const auto batch = trainer.sample_batch(sampler);
        const LossTerms terms = trainer.train_step(batch);
        log.push_back(terms);
        if (trainer.iteration % 100 == 0 || int(trainer.iteration) == total) {
            std::printf("iter %6llu  loss %.6f  mse %.6f  gdl %.6f\n",
                        static_cast<unsigned long long>(trainer.iteration), terms.loss, terms.mse,
                        terms.gdl);
            std::fflush(stdout);
        }
    }
    save_checkpoint(opt.out, trainer);
    write_loss_log(fs::path(opt.out.string() + ".loss.csv"), log);
    std::cout << "checkpoint " << opt.out.string() << " (clips " << sampler.clip_count()
              << ", params " << trainer.params.param_count() << ")\n";
    return kExitOk;
}

int cmd_predict(const PredictOptions& opt) {
    RunConfig cfg;
    try {
        cfg = load_config_or_default(opt.config);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (opt.ckpt.empty() || opt.data.empty() || opt.out.empty() || opt.horizon < 1) {
        std::cerr << "predict: need --ckpt, --data, --out and --horizon >= 1\n";
        return kExitUsage;
    }

    Trainer trainer = load_checkpoint(opt.ckpt);
    const int context = cfg.train.context;
    const int window = context + opt.horizon;

    std::vector<LoadedSequence> sequences;
    for (const std::string& name : pick_split(opt.data, opt.split, cfg.seed_split)) {
        sequences.push_back(load_sequence_frames(opt.data, name));
    }
    ClipSampler sampler(std::move(sequences));

    std::vector<size_t> clip_ids;
    if (opt.clip == "all") {
        for (size_t i = 0; i < sampler.clip_count(); ++i) clip_ids.push_back(i);
    } else {
        clip_ids.push_back(size_t(std::stoul(opt.clip)));
    }

    fs::create_directories(opt.out / "pred");
    fs::create_directories(opt.out / "gt");
    std::ofstream metrics_csv(opt.out / "metrics.csv");
    metrics_csv << "clip,t,psnr,ssim\n";

    Workspace<float> ws;
    for (size_t clip : clip_ids) {
        const TrainSample window_data = sampler.clip_window(clip, window, 0);
        std::vector<Tensor<float>> ctx(window_data.frames.begin(),
                                       window_data.frames.begin() + context);
        Rollout<float> ro;
        const auto& preds =
            rollout_forward(trainer.params, ctx, window_data.actions, opt.horizon, ro, ws);

        const fs::path pdir = opt.out / "pred" / clip_dir_name(clip);
        const fs::path gdir = opt.out / "gt" / clip_dir_name(clip);
        fs::create_directories(pdir);
        fs::create_directories(gdir);
        char buf[32];
        for (int t = 0; t < opt.horizon; ++t) {
            std::snprintf(buf, sizeof(buf), "%06d.ppm", t);
            const Frame pf = frame_from_tensor(preds[size_t(t)]);
            const Frame gf = frame_from_tensor(window_data.frames[size_t(context + t)]);
            write_ppm(pdir / buf, pf);
            write_ppm(gdir / buf, gf);
            char row[128];
            std::snprintf(row, sizeof(row), "%zu,%d,%.9g,%.9g\n", clip, t + 1, psnr(pf, gf),
                          ssim(pf, gf));
            metrics_csv << row;
        }
    }
    std::cout << "predicted " << clip_ids.size() << " clip(s), horizon " << opt.horizon << "\n";
    return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& opt) {
    if (!fs::is_directory(opt.pred) || !fs::is_directory(opt.gt) || opt.report.empty()) {
        std::cerr << "evaluate: need --pred and --gt directories plus --report\n";
        return kExitUsage;
    }
    std::vector<std::string> clips;
    for (const auto& e : fs::directory_iterator(opt.pred)) {
        if (e.is_directory() && e.path().filename().string().rfind("clip_", 0) == 0) {
            clips.push_back(e.path().filename().string());
        }
    }
    std::sort(clips.begin(), clips.end());
    if (clips.empty()) {
        std::cerr << "evaluate: no clip_* directories under " << opt.pred.string() << "\n";
        return kExitFailure;
    }

    auto read_clip = [](const fs::path& dir) {
        Clip clip;
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(dir)) {
            names.push_back(e.path().filename().string());
        }
        std::sort(names.begin(), names.end());
        for (const std::string& n : names) {
            clip.push_back(read_ppm(dir / n));
        }
        return clip;
    };

    std::vector<Clip> pred, gt;
    for (const std::string& name : clips) {
        if (!fs::is_directory(opt.gt / name)) {
            std::cerr << "evaluate: clip mismatch, " << name << " missing under "
                      << opt.gt.string() << "\n";
            return kExitFailure;
        }
        pred.push_back(read_clip(opt.pred / name));
        gt.push_back(read_clip(opt.gt / name));
        if (pred.back().size() != gt.back().size() || pred.back().empty()) {
            std::cerr << "evaluate: clip length mismatch in " << name << "\n";
            return kExitFailure;
        }
    }

    MetricCurve curve;
    try {
        curve = evaluate(pred, gt);
    } catch (const std::exception& e) {
        std::cerr << "evaluate: " << e.what() << "\n";
        return kExitFailure;
    }
    write_metric_csv(opt.report, curve);
    const std::string report = metric_report(curve);
    std::ofstream(fs::path(opt.report.string() + ".txt")) << report;
    std::cout << report;

    if (!opt.montage.empty()) {
        const int horizon = int(pred[0].size());
        std::vector<int> picks;
        for (int t : {0, 2, 4, 7, 11, 15, horizon - 1}) {
            if (t >= 0 && t < horizon && (picks.empty() || picks.back() != t)) picks.push_back(t);
        }
        std::vector<std::vector<Frame>> rows(2);
        for (int t : picks) {
            rows[0].push_back(gt[0][size_t(t)]);
            rows[1].push_back(pred[0][size_t(t)]);
        }
        write_ppm(opt.montage, montage_grid(rows));
    }
    return kExitOk;
}

}  // namespace roam
