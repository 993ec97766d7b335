// roamsim: generate / validate / train / predict / evaluate.
#include <CLI11.hpp>

#include <iostream>

#include "roam/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"roamsim: deterministic ego-vision navigation data simulator and "
                 "action-conditioned video predictor"};
    app.require_subcommand(1);

    roam::GenerateOptions gen;
    auto* c_gen = app.add_subcommand("generate", "Simulate sequences and write a dataset");
    c_gen->add_option("--config", gen.config, "Run config file (key=value); defaults when absent");
    c_gen->add_option("--seed", gen.seed, "Base world seed; sequence i uses seed+i")
        ->default_val(1);
    c_gen->add_option("--sequences", gen.sequences, "Number of sequences")->default_val(1);
    c_gen->add_option("--frames", gen.frames, "Frames per sequence (15 fps)")->default_val(150);
    c_gen->add_option("--out", gen.out, "Output dataset root")->required();
    c_gen->add_flag("--force", gen.force, "Overwrite existing sequence directories");

    std::string validate_dir;
    auto* c_val = app.add_subcommand("validate", "Check dataset layout and stream invariants");
    c_val->add_option("dir", validate_dir, "Dataset root")->required();

    roam::TrainOptions train;
    auto* c_train = app.add_subcommand("train", "Train the predictor on a dataset");
    c_train->add_option("--data", train.data, "Dataset root")->required();
    c_train->add_option("--config", train.config, "Run config file");
    c_train->add_option("--out", train.out, "Checkpoint output path")->required();
    std::string ablation = "off";
    c_train->add_option("--ablation", ablation, "on|off: train the action-blind variant")
        ->default_val("off");
    c_train->add_option("--resume", train.resume, "Resume from an existing checkpoint");
    c_train->add_option("--iterations", train.iterations_override,
                        "Override train.iterations from the config");

    roam::PredictOptions pred;
    auto* c_pred = app.add_subcommand("predict", "Roll out future frames for dataset clips");
    c_pred->add_option("--ckpt", pred.ckpt, "Checkpoint path")->required();
    c_pred->add_option("--data", pred.data, "Dataset root")->required();
    c_pred->add_option("--config", pred.config, "Run config file");
    c_pred->add_option("--clip", pred.clip, "Clip id or 'all'")->default_val("all");
    c_pred->add_option("--split", pred.split, "train|test|all clip source")->default_val("all");
    c_pred->add_option("--horizon", pred.horizon, "Future frames to generate")->default_val(20);
    c_pred->add_option("--out", pred.out, "Output dir (pred/, gt/, metrics.csv)")->required();

    roam::EvaluateOptions eval;
    auto* c_eval = app.add_subcommand("evaluate", "Compare prediction and ground-truth clips");
    c_eval->add_option("--pred", eval.pred, "Directory of predicted clip_* dirs")->required();
    c_eval->add_option("--gt", eval.gt, "Directory of ground-truth clip_* dirs")->required();
    c_eval->add_option("--report", eval.report, "Metric curve CSV output path")->required();
    c_eval->add_option("--montage", eval.montage, "Optional GT-vs-prediction PPM strip");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return roam::kExitUsage;
    }

    try {
        if (c_gen->parsed()) return roam::cmd_generate(gen);
        if (c_val->parsed()) return roam::cmd_validate(validate_dir);
        if (c_train->parsed()) {
            train.ablation = ablation == "on";
            if (ablation != "on" && ablation != "off") {
                std::cerr << "train: --ablation must be on or off\n";
                return roam::kExitUsage;
            }
            return roam::cmd_train(train);
        }
        if (c_pred->parsed()) return roam::cmd_predict(pred);
        if (c_eval->parsed()) return roam::cmd_evaluate(eval);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return roam::kExitFailure;
    }
    return roam::kExitUsage;
}
