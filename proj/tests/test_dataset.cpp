#include <doctest.h>

#include <fstream>
#include <sstream>

#include "roam/dataset.hpp"

using namespace roam;
namespace fs = std::filesystem;

namespace {

fs::path temp_root(const char* tag) {
    const fs::path p = fs::temp_directory_path() / (std::string("roam_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

SequenceRecord make_record(int frames, std::uint64_t seed, int side = 16) {
    WorldParams wp;
    wp.agent_count = 3;
    const World w = generate_world(seed, wp);
    SimConfig cfg;
    cfg.camera.width = side;
    cfg.camera.height = side;
    return simulate_sequence(w, w.spawn, frames, cfg, seed, "seq_000");
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string tree_bytes(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) {
        all += f.lexically_relative(root).string();
        all += '\0';
        all += slurp(f);
        all += '\0';
    }
    return all;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("one-frame record writes one file per stream line") {
    const fs::path root = temp_root("single");
    const SequenceRecord rec = make_record(1, 5);
    write_sequence(rec, root);
    int left = 0, right = 0, depth = 0;
    for (const auto& e : fs::directory_iterator(root / "seq_000" / "left")) ++left, (void)e;
    for (const auto& e : fs::directory_iterator(root / "seq_000" / "right")) ++right, (void)e;
    for (const auto& e : fs::directory_iterator(root / "seq_000" / "depth")) ++depth, (void)e;
    CHECK(left == 1);
    CHECK(right == 1);
    CHECK(depth == 1);
    for (const char* name : {"timestamps.txt", "actions.txt", "odom.txt", "imu.txt"}) {
        std::istringstream is(slurp(root / "seq_000" / name));
        int lines = 0;
        std::string line;
        while (std::getline(is, line)) ++lines;
        CHECK(lines == 1);
    }
    fs::remove_all(root);
}

TEST_CASE("depth header bytes are exactly as specified") {
    DepthMap d{64, 64};
    const fs::path root = temp_root("depthhdr");
    write_depth(root / "d.dpt", d);
    const std::string data = slurp(root / "d.dpt");
    REQUIRE(data.size() == 16 + 64 * 64 * 4);
    CHECK(data.substr(0, 8) == "ROAMDPTH");
    const unsigned char expect[8] = {0x40, 0, 0, 0, 0x40, 0, 0, 0};
    for (int i = 0; i < 8; ++i) {
        CHECK(static_cast<unsigned char>(data[8 + i]) == expect[i]);
    }
    fs::remove_all(root);
}

TEST_CASE("write-read round trip") {
    const fs::path root = temp_root("roundtrip");
    const SequenceRecord rec = make_record(12, 6);
    write_sequence(rec, root);
    const SequenceRecord back = read_sequence(root, "seq_000");

    CHECK(back.timestamps == rec.timestamps);  // lossless
    REQUIRE(back.scans.size() == rec.scans.size());
    for (size_t i = 0; i < rec.scans.size(); ++i) {
        CHECK(back.scans[i].ranges == rec.scans[i].ranges);  // lossless
    }
    REQUIRE(back.odom.size() == rec.odom.size());
    for (size_t i = 0; i < rec.odom.size(); ++i) {
        CHECK(back.odom[i].pose == rec.odom[i].pose);
        CHECK(back.odom[i].twist == rec.odom[i].twist);
    }
    REQUIRE(back.imu.size() == rec.imu.size());
    for (size_t i = 0; i < rec.imu.size(); ++i) {
        CHECK(back.imu[i].yaw_rate == rec.imu[i].yaw_rate);
        CHECK(back.imu[i].forward_accel == rec.imu[i].forward_accel);
    }
    for (size_t i = 0; i < rec.actions.size(); ++i) {
        CHECK(back.actions[i].v == doctest::Approx(rec.actions[i].v).epsilon(1e-6));
        CHECK(back.actions[i].omega == doctest::Approx(rec.actions[i].omega).epsilon(1e-6));
    }
    for (size_t i = 0; i < rec.left.size(); ++i) {
        for (size_t j = 0; j < rec.left[i].px.size(); ++j) {
            CHECK(std::abs(back.left[i].px[j] - rec.left[i].px[j]) <= 0.5 / 255.0 + 1e-12);
        }
    }
    CHECK(back.camera == rec.camera);
    CHECK(back.seed == rec.seed);
    fs::remove_all(root);
}

TEST_CASE("write-read-write is byte-identical") {
    const fs::path root1 = temp_root("wrw1");
    const fs::path root2 = temp_root("wrw2");
    const SequenceRecord rec = make_record(10, 777);
    write_sequence(rec, root1);
    const SequenceRecord back = read_sequence(root1, "seq_000");
    write_sequence(back, root2);
    CHECK(tree_bytes(root1) == tree_bytes(root2));
    fs::remove_all(root1);
    fs::remove_all(root2);
}

TEST_CASE("overwrite requires force") {
    const fs::path root = temp_root("force");
    const SequenceRecord rec = make_record(2, 8);
    write_sequence(rec, root);
    CHECK_THROWS(write_sequence(rec, root));
    write_sequence(rec, root, true);
    fs::remove_all(root);
}

TEST_CASE("corrupted depth magic is reported with the file name") {
    const fs::path root = temp_root("magic");
    const SequenceRecord rec = make_record(3, 9);
    write_sequence(rec, root);
    const fs::path victim = root / "seq_000" / "depth" / "000001.dpt";
    {
        std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
        f.write("WRONGMAG", 8);
    }
    try {
        read_sequence(root, "seq_000");
        FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
        CHECK(e.path() == victim);
        CHECK(std::string(e.what()).find("000001.dpt") != std::string::npos);
    }
    const ValidationReport report = validate(root);
    CHECK(report.violations.size() == 1);
    fs::remove_all(root);
}

TEST_CASE("validator passes fresh datasets across seeds") {
    const fs::path root = temp_root("fresh");
    for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
        WorldParams wp;
        wp.agent_count = int(seed % 5);
        const World w = generate_world(seed, wp);
        SimConfig cfg;
        cfg.camera.width = 16;
        cfg.camera.height = 16;
        char name[16];
        std::snprintf(name, sizeof(name), "seq_%03d", int(seed % 100));
        write_sequence(simulate_sequence(w, w.spawn, 30, cfg, seed, name), root);
    }
    const ValidationReport report = validate(root);
    CHECK(report.ok());
    CHECK(report.sequences_checked == 3);
    fs::remove_all(root);
}

TEST_CASE("validator flags a single out-of-bounds action edit") {
    const fs::path root = temp_root("bounds");
    write_sequence(make_record(10, 12), root);
    const fs::path actions = root / "seq_000" / "actions.txt";
    std::istringstream is(slurp(actions));
    std::string out, line;
    int i = 0;
    while (std::getline(is, line)) {
        if (i++ == 4) {
            const size_t sp = line.find(' ');
            line = line.substr(0, sp) + " 0.500000 0.000000";
        }
        out += line + "\n";
    }
    std::ofstream(actions) << out;
    const ValidationReport report = validate(root);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].message.find("v out of bounds") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("validator flags a deleted trailing frame as a length mismatch") {
    const fs::path root = temp_root("missing");
    write_sequence(make_record(10, 13), root);
    fs::remove(root / "seq_000" / "left" / "000009.ppm");
    const ValidationReport report = validate(root);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].message.find("left") != std::string::npos);
    CHECK(report.violations[0].message.find("expected 10") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("validator flags broken timestamp strides") {
    const fs::path root = temp_root("stride");
    write_sequence(make_record(5, 14), root);
    const fs::path ts = root / "seq_000" / "timestamps.txt";
    std::string text = slurp(ts);
    text.replace(text.find("66666667"), 8, "66666700");
    std::ofstream(ts) << text;
    const ValidationReport report = validate(root);
    bool found = false;
    for (const auto& v : report.violations) {
        found = found || v.message.find("stride") != std::string::npos ||
                v.message.find("timestamp") != std::string::npos;
    }
    CHECK(found);
    fs::remove_all(root);
}

TEST_CASE("clip_index examples") {
    CHECK(clip_index(50) == std::vector<int>{0});
    CHECK(clip_index(49) == std::vector<int>{});
    CHECK(clip_index(170) == std::vector<int>{0, 60, 120});
    CHECK(clip_index(230) == std::vector<int>{0, 60, 120, 180});
    CHECK_THROWS_AS(clip_index(10, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(clip_index(10, 5, -1), std::invalid_argument);
}

TEST_CASE("clip_index starts are sorted, unique, and inside the sequence") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int len = int(rng.uniform_int(400));
        const int clip = 1 + int(rng.uniform_int(80));
        const int gap = int(rng.uniform_int(30));
        const auto starts = clip_index(len, clip, gap);
        for (size_t i = 0; i < starts.size(); ++i) {
            CHECK(starts[i] + clip <= len);
            if (i > 0) CHECK(starts[i] == starts[i - 1] + clip + gap);
        }
    }
}

TEST_CASE("split_train_test proportions and determinism") {
    std::vector<std::string> seqs;
    for (int i = 0; i < 25; ++i) seqs.push_back("seq_" + std::to_string(i));
    const auto [train, test] = split_train_test(seqs, {20, 5}, 3);
    CHECK(train.size() == 20);
    CHECK(test.size() == 5);
    const auto [train2, test2] = split_train_test(seqs, {20, 5}, 3);
    CHECK(train == train2);
    CHECK(test == test2);

    std::vector<std::string> five(seqs.begin(), seqs.begin() + 5);
    const auto [t5, e5] = split_train_test(five, {20, 5}, 1);
    CHECK(t5.size() == 4);
    CHECK(e5.size() == 1);

    std::vector<std::string> one{"seq_0"};
    CHECK_THROWS_AS(split_train_test(one, {20, 5}, 1), std::invalid_argument);
}

}  // TEST_SUITE
