#include <doctest.h>

#include "roam/config.hpp"

using namespace roam;

TEST_SUITE("config") {

TEST_CASE("defaults match the documented values") {
    const RunConfig cfg;
    CHECK(cfg.train.lr == 1e-4);
    CHECK(cfg.train.batch == 8);
    CHECK(cfg.train.beta1 == 0.5);
    CHECK(cfg.train.context == 5);
    CHECK(cfg.train.train_horizon == 10);
    CHECK(cfg.train.infer_horizon == 20);
    CHECK(cfg.planner.r_safe == 0.3);
    CHECK(cfg.planner.stop_range == 0.35);
    CHECK(cfg.camera.width == 64);
    CHECK(cfg.camera.baseline == 0.063);
    CHECK(cfg.lidar.min_range == 0.12);
    CHECK(cfg.lidar.max_range == 3.5);
}

TEST_CASE("parse and round trip") {
    const std::string text =
        "# comment\n"
        "world.agent_count=7\n"
        "camera.width=32\n"
        "camera.height=32\n"
        "train.lr=0.001\n"
        "seed.train=99\n";
    const RunConfig cfg = parse_run_config(text);
    CHECK(cfg.world.agent_count == 7);
    CHECK(cfg.camera.width == 32);
    CHECK(cfg.train.lr == 0.001);
    CHECK(cfg.seed_train == 99);
    CHECK(cfg.train.batch == 8);  // untouched default

    const RunConfig again = parse_run_config(run_config_to_string(cfg));
    CHECK(run_config_to_string(again) == run_config_to_string(cfg));
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_run_config("bogus.key=1\n"),
                         doctest::Contains("unknown key"), std::runtime_error);
    CHECK_THROWS_AS(parse_run_config("train.lr 0.1\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_run_config("train.lr=abc\n"), std::runtime_error);
}

TEST_CASE("every key appears in the dump with a value") {
    const std::string dump = run_config_to_string(RunConfig{});
    for (const char* key : {"world.corridor_count", "planner.k_turn", "camera.hfov",
                            "train.weight_decay", "train.p_norm", "seed.split"}) {
        CHECK(dump.find(std::string(key) + "=") != std::string::npos);
    }
}

}  // TEST_SUITE
