#include "roam/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace roam {
namespace {

std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Binding {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
T parse_number(const std::string& s) {
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("bad numeric value '" + s + "'");
    }
    return v;
}

const std::map<std::string, Binding>& bindings() {
    static const std::map<std::string, Binding> map = [] {
        std::map<std::string, Binding> m;
        auto add_double = [&m](const std::string& key, auto accessor) {
            m[key] = Binding{
                [accessor](RunConfig& c, const std::string& s) {
                    accessor(c) = parse_number<double>(s);
                },
                [accessor](const RunConfig& c) {
                    return shortest(accessor(const_cast<RunConfig&>(c)));
                }};
        };
        auto add_int = [&m](const std::string& key, auto accessor) {
            m[key] = Binding{
                [accessor](RunConfig& c, const std::string& s) {
                    accessor(c) = parse_number<int>(s);
                },
                [accessor](const RunConfig& c) {
                    return std::to_string(accessor(const_cast<RunConfig&>(c)));
                }};
        };
        auto add_u64 = [&m](const std::string& key, auto accessor) {
            m[key] = Binding{
                [accessor](RunConfig& c, const std::string& s) {
                    accessor(c) = parse_number<std::uint64_t>(s);
                },
                [accessor](const RunConfig& c) {
                    return std::to_string(accessor(const_cast<RunConfig&>(c)));
                }};
        };

        add_int("world.corridor_count", [](RunConfig& c) -> int& { return c.world.corridor_count; });
        add_double("world.corridor_width", [](RunConfig& c) -> double& { return c.world.corridor_width; });
        add_int("world.agent_count", [](RunConfig& c) -> int& { return c.world.agent_count; });
        add_double("world.bounds_w", [](RunConfig& c) -> double& { return c.world.bounds_w; });
        add_double("world.bounds_h", [](RunConfig& c) -> double& { return c.world.bounds_h; });
        add_double("world.agent_speed_min", [](RunConfig& c) -> double& { return c.world.agent_speed_min; });
        add_double("world.agent_speed_max", [](RunConfig& c) -> double& { return c.world.agent_speed_max; });
        add_double("world.agent_radius_min", [](RunConfig& c) -> double& { return c.world.agent_radius_min; });
        add_double("world.agent_radius_max", [](RunConfig& c) -> double& { return c.world.agent_radius_max; });
        add_double("world.walk_prob", [](RunConfig& c) -> double& { return c.world.walk_prob; });

        add_double("planner.r_safe", [](RunConfig& c) -> double& { return c.planner.r_safe; });
        add_double("planner.horizon", [](RunConfig& c) -> double& { return c.planner.horizon; });
        add_double("planner.k_turn", [](RunConfig& c) -> double& { return c.planner.k_turn; });
        add_double("planner.v_max", [](RunConfig& c) -> double& { return c.planner.v_max; });
        add_double("planner.stop_range", [](RunConfig& c) -> double& { return c.planner.stop_range; });

        add_int("camera.width", [](RunConfig& c) -> int& { return c.camera.width; });
        add_int("camera.height", [](RunConfig& c) -> int& { return c.camera.height; });
        add_double("camera.hfov", [](RunConfig& c) -> double& { return c.camera.hfov; });
        add_double("camera.baseline", [](RunConfig& c) -> double& { return c.camera.baseline; });
        add_double("camera.cam_height", [](RunConfig& c) -> double& { return c.camera.height_above_floor; });

        add_double("lidar.min_range", [](RunConfig& c) -> double& { return c.lidar.min_range; });
        add_double("lidar.max_range", [](RunConfig& c) -> double& { return c.lidar.max_range; });
        add_double("lidar.noise_sigma", [](RunConfig& c) -> double& { return c.lidar.noise_sigma; });

        add_double("sim.robot_radius", [](RunConfig& c) -> double& { return c.robot_radius; });
        add_double("sim.odom_noise_sigma", [](RunConfig& c) -> double& { return c.odom_noise_sigma; });
        add_double("sim.imu_noise_sigma", [](RunConfig& c) -> double& { return c.imu_noise_sigma; });

        add_double("train.lr", [](RunConfig& c) -> double& { return c.train.lr; });
        add_int("train.batch", [](RunConfig& c) -> int& { return c.train.batch; });
        add_double("train.beta1", [](RunConfig& c) -> double& { return c.train.beta1; });
        add_double("train.beta2", [](RunConfig& c) -> double& { return c.train.beta2; });
        add_double("train.eps", [](RunConfig& c) -> double& { return c.train.eps; });
        add_double("train.alpha_rec", [](RunConfig& c) -> double& { return c.train.alpha_rec; });
        add_double("train.lambda_gdl", [](RunConfig& c) -> double& { return c.train.lambda_gdl; });
        add_double("train.weight_decay", [](RunConfig& c) -> double& { return c.train.weight_decay; });
        add_double("train.p_norm", [](RunConfig& c) -> double& { return c.train.p_norm; });
        add_int("train.context", [](RunConfig& c) -> int& { return c.train.context; });
        add_int("train.train_horizon", [](RunConfig& c) -> int& { return c.train.train_horizon; });
        add_int("train.infer_horizon", [](RunConfig& c) -> int& { return c.train.infer_horizon; });
        add_int("train.iterations", [](RunConfig& c) -> int& { return c.train.iterations; });

        add_u64("seed.train", [](RunConfig& c) -> std::uint64_t& { return c.seed_train; });
        add_u64("seed.split", [](RunConfig& c) -> std::uint64_t& { return c.seed_split; });
        return m;
    }();
    return map;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.pop_back();
        }
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        const auto it = bindings().find(key);
        if (it == bindings().end()) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
        }
        try {
            it->second.set(cfg, value);
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open config " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_run_config(ss.str());
}

std::string run_config_to_string(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, binding] : bindings()) {
        out += key + "=" + binding.get(cfg) + "\n";
    }
    return out;
}

}  // namespace roam
