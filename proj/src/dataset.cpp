#include "roam/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace roam {

namespace fs = std::filesystem;

namespace {

constexpr double kBoundsEps = 1e-9;
constexpr double kAccelSlack = 2e-5;  // per-step |dv| slack from 6-decimal quantization

std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string frame_name(int index, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%06d%s", index, ext);
    return buf;
}

void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(char(v & 0xFF));
    out.push_back(char((v >> 8) & 0xFF));
    out.push_back(char((v >> 16) & 0xFF));
    out.push_back(char((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw DatasetError(path, 0, true, "cannot open for writing");
    }
    os.write(data.data(), std::streamsize(data.size()));
    if (!os) {
        throw DatasetError(path, 0, true, "write failed");
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw DatasetError(path, 0, true, "cannot open");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

double parse_double(const std::string& tok, const fs::path& path, int line) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw DatasetError(path, line, false, "malformed number '" + tok + "'");
    }
    return v;
}

std::int64_t parse_i64(const std::string& tok, const fs::path& path, int line) {
    std::int64_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw DatasetError(path, line, false, "malformed integer '" + tok + "'");
    }
    return v;
}

std::vector<std::string> split_tokens(const std::string& line, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= line.size()) {
        size_t end = line.find(sep, start);
        if (end == std::string::npos) end = line.size();
        if (end > start) out.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw DatasetError(path, 0, false, "cannot open");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

DatasetError::DatasetError(fs::path path, std::int64_t offset, bool byte_offset,
                           const std::string& message)
    : std::runtime_error(path.string() + (byte_offset ? " (byte " : " (line ") +
                         std::to_string(offset) + "): " + message),
      path_(std::move(path)),
      offset_(offset) {}

void write_ppm(const fs::path& path, const Frame& frame) {
    std::string data = "P6\n" + std::to_string(frame.width) + " " +
                       std::to_string(frame.height) + "\n255\n";
    data.reserve(data.size() + frame.px.size());
    for (double v : frame.px) {
        const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
        data.push_back(char(static_cast<unsigned char>(q)));
    }
    write_file(path, data);
}

Frame read_ppm(const fs::path& path) {
    const std::string data = read_file(path);
    std::istringstream hs(data);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    hs >> magic >> w >> h >> maxval;
    if (magic != "P6") {
        throw DatasetError(path, 0, true, "bad PPM magic");
    }
    if (!hs || w <= 0 || h <= 0 || maxval != 255) {
        throw DatasetError(path, 0, true, "bad PPM header");
    }
    hs.get();  // single whitespace after maxval
    const size_t payload_off = size_t(hs.tellg());
    const size_t need = size_t(w) * h * 3;
    if (data.size() - payload_off != need) {
        throw DatasetError(path, std::int64_t(payload_off), true,
                           "PPM payload size mismatch");
    }
    Frame frame(w, h);
    for (size_t i = 0; i < need; ++i) {
        frame.px[i] = double(static_cast<unsigned char>(data[payload_off + i])) / 255.0;
    }
    return frame;
}

void write_depth(const fs::path& path, const DepthMap& depth) {
    std::string data(kDepthMagic, sizeof(kDepthMagic));
    put_u32_le(data, std::uint32_t(depth.width));
    put_u32_le(data, std::uint32_t(depth.height));
    for (double v : depth.z) {
        const float f = float(v);
        std::uint32_t bits = 0;
        std::memcpy(&bits, &f, 4);
        put_u32_le(data, bits);
    }
    write_file(path, data);
}

DepthMap read_depth(const fs::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), kDepthMagic, 8) != 0) {
        throw DatasetError(path, 0, true, "bad depth magic");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint32_t w = get_u32_le(p + 8);
    const std::uint32_t h = get_u32_le(p + 12);
    const size_t need = 16 + size_t(w) * h * 4;
    if (w == 0 || h == 0 || data.size() != need) {
        throw DatasetError(path, 8, true, "depth payload size mismatch");
    }
    DepthMap depth{int(w), int(h)};
    for (size_t i = 0; i < size_t(w) * h; ++i) {
        const std::uint32_t bits = get_u32_le(p + 16 + i * 4);
        float f = 0.0f;
        std::memcpy(&f, &bits, 4);
        depth.z[i] = double(f);
    }
    return depth;
}

void write_sequence(const SequenceRecord& rec, const fs::path& root, bool force) {
    const fs::path dir = root / rec.name;
    if (fs::exists(dir)) {
        if (!force) {
            throw std::runtime_error("write_sequence: " + dir.string() +
                                     " already exists (use force to overwrite)");
        }
        fs::remove_all(dir);
    }
    fs::create_directories(dir / "left");
    fs::create_directories(dir / "right");
    fs::create_directories(dir / "depth");

    const size_t n = rec.size();
    for (size_t i = 0; i < n; ++i) {
        write_ppm(dir / "left" / frame_name(int(i), ".ppm"), rec.left[i]);
        write_ppm(dir / "right" / frame_name(int(i), ".ppm"), rec.right[i]);
        write_depth(dir / "depth" / frame_name(int(i), ".dpt"), rec.depth[i]);
    }

    std::string ts, actions, lidar, odom, imu;
    char abuf[96];
    for (size_t i = 0; i < n; ++i) {
        const std::string t = std::to_string(rec.timestamps[i]);
        ts += t;
        ts += '\n';

        std::snprintf(abuf, sizeof(abuf), "%s %.6f %.6f\n", t.c_str(), rec.actions[i].v,
                      rec.actions[i].omega);
        actions += abuf;

        lidar += t;
        for (double r : rec.scans[i].ranges) {
            lidar += ',';
            lidar += shortest(r);
        }
        lidar += '\n';

        odom += t;
        odom += ' '; odom += shortest(rec.odom[i].pose.x);
        odom += ' '; odom += shortest(rec.odom[i].pose.y);
        odom += ' '; odom += shortest(rec.odom[i].pose.yaw);
        odom += ' '; odom += shortest(rec.odom[i].twist.v);
        odom += ' '; odom += shortest(rec.odom[i].twist.omega);
        odom += '\n';

        imu += t;
        imu += ' '; imu += shortest(rec.imu[i].yaw_rate);
        imu += ' '; imu += shortest(rec.imu[i].forward_accel);
        imu += '\n';
    }
    write_file(dir / "timestamps.txt", ts);
    write_file(dir / "actions.txt", actions);
    write_file(dir / "lidar.csv", lidar);
    write_file(dir / "odom.txt", odom);
    write_file(dir / "imu.txt", imu);

    std::string meta;
    meta += "seed=" + std::to_string(rec.seed) + "\n";
    meta += "fps=15\n";
    meta += "frames=" + std::to_string(n) + "\n";
    meta += "width=" + std::to_string(rec.camera.width) + "\n";
    meta += "height=" + std::to_string(rec.camera.height) + "\n";
    meta += "hfov=" + shortest(rec.camera.hfov) + "\n";
    meta += "baseline=" + shortest(rec.camera.baseline) + "\n";
    meta += "cam_height=" + shortest(rec.camera.height_above_floor) + "\n";
    write_file(dir / "meta.txt", meta);
}

SequenceRecord read_sequence(const fs::path& root, const std::string& name) {
    const fs::path dir = root / name;
    SequenceRecord rec;
    rec.name = name;

    for (const std::string& line : read_lines(dir / "meta.txt")) {
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "seed") rec.seed = std::uint64_t(parse_i64(val, dir / "meta.txt", 0));
        else if (key == "width") rec.camera.width = int(parse_i64(val, dir / "meta.txt", 0));
        else if (key == "height") rec.camera.height = int(parse_i64(val, dir / "meta.txt", 0));
        else if (key == "hfov") rec.camera.hfov = parse_double(val, dir / "meta.txt", 0);
        else if (key == "baseline") rec.camera.baseline = parse_double(val, dir / "meta.txt", 0);
        else if (key == "cam_height")
            rec.camera.height_above_floor = parse_double(val, dir / "meta.txt", 0);
    }

    {
        const fs::path p = dir / "timestamps.txt";
        int line_no = 0;
        for (const std::string& line : read_lines(p)) {
            rec.timestamps.push_back(parse_i64(line, p, ++line_no));
        }
    }
    const size_t n = rec.timestamps.size();

    {
        const fs::path p = dir / "actions.txt";
        const auto lines = read_lines(p);
        for (size_t i = 0; i < lines.size(); ++i) {
            const auto tok = split_tokens(lines[i], ' ');
            if (tok.size() != 3) {
                throw DatasetError(p, std::int64_t(i + 1), false, "expected 3 fields");
            }
            parse_i64(tok[0], p, int(i + 1));
            rec.actions.push_back(Twist{parse_double(tok[1], p, int(i + 1)),
                                        parse_double(tok[2], p, int(i + 1))});
        }
    }
    {
        const fs::path p = dir / "lidar.csv";
        const auto lines = read_lines(p);
        for (size_t i = 0; i < lines.size(); ++i) {
            const auto tok = split_tokens(lines[i], ',');
            if (tok.size() != size_t(kScanBeams) + 1) {
                throw DatasetError(p, std::int64_t(i + 1), false,
                                   "expected 361 fields, got " + std::to_string(tok.size()));
            }
            Scan sc;
            sc.t_ns = parse_i64(tok[0], p, int(i + 1));
            for (int b = 0; b < kScanBeams; ++b) {
                sc.ranges[size_t(b)] = parse_double(tok[size_t(b) + 1], p, int(i + 1));
            }
            rec.scans.push_back(sc);
        }
    }
    {
        const fs::path p = dir / "odom.txt";
        const auto lines = read_lines(p);
        for (size_t i = 0; i < lines.size(); ++i) {
            const auto tok = split_tokens(lines[i], ' ');
            if (tok.size() != 6) {
                throw DatasetError(p, std::int64_t(i + 1), false, "expected 6 fields");
            }
            OdomSample od;
            od.pose.x = parse_double(tok[1], p, int(i + 1));
            od.pose.y = parse_double(tok[2], p, int(i + 1));
            od.pose.yaw = parse_double(tok[3], p, int(i + 1));
            od.twist.v = parse_double(tok[4], p, int(i + 1));
            od.twist.omega = parse_double(tok[5], p, int(i + 1));
            rec.odom.push_back(od);
        }
    }
    {
        const fs::path p = dir / "imu.txt";
        const auto lines = read_lines(p);
        for (size_t i = 0; i < lines.size(); ++i) {
            const auto tok = split_tokens(lines[i], ' ');
            if (tok.size() != 3) {
                throw DatasetError(p, std::int64_t(i + 1), false, "expected 3 fields");
            }
            rec.imu.push_back(ImuSample{parse_double(tok[1], p, int(i + 1)),
                                        parse_double(tok[2], p, int(i + 1))});
        }
    }
    for (size_t i = 0; i < n; ++i) {
        rec.left.push_back(read_ppm(dir / "left" / frame_name(int(i), ".ppm")));
        rec.right.push_back(read_ppm(dir / "right" / frame_name(int(i), ".ppm")));
        rec.depth.push_back(read_depth(dir / "depth" / frame_name(int(i), ".dpt")));
    }
    return rec;
}

namespace {

// Collects the sorted file names in a stream directory and reports count /
// numbering violations (at most one of each per stream).
size_t check_frame_dir(const fs::path& dir, const char* stream, const char* ext, size_t expect,
                       const std::string& seq, std::vector<Violation>& out) {
    std::vector<std::string> names;
    if (fs::is_directory(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) {
            names.push_back(e.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    if (names.size() != expect) {
        out.push_back({seq, std::string(stream) + ": " + std::to_string(names.size()) +
                                " frames, expected " + std::to_string(expect)});
        return names.size();
    }
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] != frame_name(int(i), ext)) {
            out.push_back({seq, std::string(stream) + ": numbering gap at " + names[i]});
            return names.size();
        }
    }
    return names.size();
}

struct TimestampCheck {
    // Returns false once a mismatch is recorded so only the first is reported.
    bool check(std::int64_t got, size_t index, const std::vector<std::int64_t>& ref,
               const char* stream, const std::string& seq, std::vector<Violation>& out) {
        if (done || index >= ref.size()) return true;
        if (got != ref[index]) {
            out.push_back({seq, std::string(stream) + ": timestamp mismatch at row " +
                                    std::to_string(index) + " (" + std::to_string(got) +
                                    " != " + std::to_string(ref[index]) + ")"});
            done = true;
        }
        return !done;
    }
    bool done = false;
};

void validate_sequence(const fs::path& dir, const std::string& seq,
                       std::vector<Violation>& out) {
    std::vector<std::int64_t> ts;
    try {
        const fs::path p = dir / "timestamps.txt";
        int line_no = 0;
        for (const std::string& line : read_lines(p)) {
            ts.push_back(parse_i64(line, p, ++line_no));
        }
    } catch (const std::exception& e) {
        out.push_back({seq, e.what()});
        return;
    }
    const size_t n = ts.size();

    for (size_t i = 1; i < n; ++i) {
        const std::int64_t dt = ts[i] - ts[i - 1];
        if (dt <= 0) {
            out.push_back({seq, "timestamps not strictly increasing at row " +
                                    std::to_string(i)});
            break;
        }
        if (std::llabs(dt - kFrameDtNs) > 1) {
            out.push_back({seq, "timestamp stride " + std::to_string(dt) + " at row " +
                                    std::to_string(i) + " (expected " +
                                    std::to_string(kFrameDtNs) + " +- 1)"});
            break;
        }
    }

    const size_t n_left = check_frame_dir(dir / "left", "left", ".ppm", n, seq, out);
    check_frame_dir(dir / "right", "right", ".ppm", n, seq, out);
    const size_t n_depth = check_frame_dir(dir / "depth", "depth", ".dpt", n, seq, out);

    // Container integrity on the files that exist.
    for (size_t i = 0; i < std::min(n_left, n); ++i) {
        try {
            read_ppm(dir / "left" / frame_name(int(i), ".ppm"));
        } catch (const std::exception& e) {
            out.push_back({seq, e.what()});
            break;
        }
    }
    for (size_t i = 0; i < std::min(n_depth, n); ++i) {
        try {
            read_depth(dir / "depth" / frame_name(int(i), ".dpt"));
        } catch (const std::exception& e) {
            out.push_back({seq, e.what()});
            break;
        }
    }

    // actions.txt: count, timestamps, bounds, per-step acceleration.
    try {
        const fs::path p = dir / "actions.txt";
        const auto lines = read_lines(p);
        if (lines.size() != n) {
            out.push_back({seq, "actions: " + std::to_string(lines.size()) +
                                    " rows, expected " + std::to_string(n)});
        }
        TimestampCheck tc;
        double prev_v = 0.0;
        bool have_prev = false;
        for (size_t i = 0; i < lines.size(); ++i) {
            const auto tok = split_tokens(lines[i], ' ');
            if (tok.size() != 3) {
                out.push_back({seq, "actions: malformed row " + std::to_string(i)});
                break;
            }
            tc.check(parse_i64(tok[0], p, int(i + 1)), i, ts, "actions", seq, out);
            const double v = parse_double(tok[1], p, int(i + 1));
            const double w = parse_double(tok[2], p, int(i + 1));
            const bool v_ok = v >= -kBoundsEps && v <= kMaxForwardSpeed + kBoundsEps;
            if (!v_ok) {
                out.push_back({seq, "actions: v out of bounds at row " + std::to_string(i) +
                                        " (" + tok[1] + ")"});
            }
            if (w < -kMaxTurnRate - kBoundsEps || w > kMaxTurnRate + kBoundsEps) {
                out.push_back({seq, "actions: omega out of bounds at row " +
                                        std::to_string(i) + " (" + tok[2] + ")"});
            }
            // Pairs touching an out-of-bounds value are skipped so one bad
            // entry reports one violation, not a cascade.
            if (have_prev && v_ok &&
                std::abs(v - prev_v) > kMaxForwardAccel / kFps + kAccelSlack) {
                out.push_back({seq, "actions: acceleration bound exceeded at row " +
                                        std::to_string(i)});
            }
            prev_v = v;
            have_prev = v_ok;
        }
    } catch (const std::exception& e) {
        out.push_back({seq, e.what()});
    }

    // Remaining text streams: count plus cross-stream timestamp equality.
    struct StreamSpec {
        const char* file;
        char sep;
        size_t fields;
    };
    for (const StreamSpec spec : {StreamSpec{"lidar.csv", ',', size_t(kScanBeams) + 1},
                                  StreamSpec{"odom.txt", ' ', 6},
                                  StreamSpec{"imu.txt", ' ', 3}}) {
        try {
            const fs::path p = dir / spec.file;
            const auto lines = read_lines(p);
            if (lines.size() != n) {
                out.push_back({seq, std::string(spec.file) + ": " +
                                        std::to_string(lines.size()) + " rows, expected " +
                                        std::to_string(n)});
            }
            TimestampCheck tc;
            for (size_t i = 0; i < lines.size(); ++i) {
                const auto tok = split_tokens(lines[i], spec.sep);
                if (tok.size() != spec.fields) {
                    out.push_back({seq, std::string(spec.file) + ": malformed row " +
                                            std::to_string(i)});
                    break;
                }
                if (!tc.check(parse_i64(tok[0], p, int(i + 1)), i, ts, spec.file, seq, out)) {
                    break;
                }
            }
        } catch (const std::exception& e) {
            out.push_back({seq, e.what()});
        }
    }
}

}  // namespace

std::string ValidationReport::to_string() const {
    std::string s = "checked " + std::to_string(sequences_checked) + " sequence(s), " +
                    std::to_string(violations.size()) + " violation(s)\n";
    for (const Violation& v : violations) {
        s += "  [" + v.sequence + "] " + v.message + "\n";
    }
    return s;
}

ValidationReport validate(const fs::path& root) {
    ValidationReport report;
    if (!fs::is_directory(root)) {
        report.violations.push_back({"", "dataset root " + root.string() + " is not a directory"});
        return report;
    }
    for (const std::string& name : list_sequences(root)) {
        ++report.sequences_checked;
        validate_sequence(root / name, name, report.violations);
    }
    if (report.sequences_checked == 0) {
        report.violations.push_back({"", "no seq_* directories under " + root.string()});
    }
    return report;
}

std::vector<int> clip_index(int seq_len, int clip_len, int gap) {
    if (clip_len < 1 || gap < 0) {
        throw std::invalid_argument("clip_index: clip_len >= 1 and gap >= 0 required");
    }
    std::vector<int> starts;
    for (int start = 0; start + clip_len <= seq_len; start += clip_len + gap) {
        starts.push_back(start);
    }
    return starts;
}

std::pair<std::vector<std::string>, std::vector<std::string>>
split_train_test(std::vector<std::string> sequences, std::pair<int, int> ratio,
                 std::uint64_t seed) {
    if (sequences.size() < 2) {
        throw std::invalid_argument("split_train_test: need at least 2 sequences");
    }
    if (ratio.first < 1 || ratio.second < 1) {
        throw std::invalid_argument("split_train_test: ratio parts must be positive");
    }
    SplitMix64 rng(seed);
    for (size_t i = sequences.size() - 1; i > 0; --i) {
        const size_t j = rng.uniform_int(i + 1);
        std::swap(sequences[i], sequences[j]);
    }
    const size_t n_train = sequences.size() * size_t(ratio.first) /
                           size_t(ratio.first + ratio.second);
    std::vector<std::string> train(sequences.begin(), sequences.begin() + std::ptrdiff_t(n_train));
    std::vector<std::string> test(sequences.begin() + std::ptrdiff_t(n_train), sequences.end());
    return {std::move(train), std::move(test)};
}

std::vector<std::string> list_sequences(const fs::path& root) {
    std::vector<std::string> names;
    if (!fs::is_directory(root)) {
        return names;
    }
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory() && e.path().filename().string().rfind("seq", 0) == 0) {
            names.push_back(e.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace roam
