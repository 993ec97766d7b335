#include "roam/trainer.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace roam {

namespace fs = std::filesystem;

LoadedSequence load_sequence_frames(const fs::path& root, const std::string& name) {
    LoadedSequence seq;
    seq.name = name;
    const fs::path dir = root / name;
    size_t n = 0;
    {
        std::ifstream is(dir / "timestamps.txt");
        if (!is) {
            throw std::runtime_error("load_sequence_frames: missing " +
                                     (dir / "timestamps.txt").string());
        }
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty()) ++n;
        }
    }
    {
        std::ifstream is(dir / "actions.txt");
        std::int64_t t;
        double v, w;
        while (is >> t >> v >> w) {
            seq.actions.push_back(Twist{v, w});
        }
    }
    if (seq.actions.size() != n) {
        throw std::runtime_error("load_sequence_frames: action/timestamp count mismatch in " +
                                 name);
    }
    char buf[32];
    for (size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%06zu.ppm", i);
        seq.frames.push_back(tensor_from_frame(read_ppm(dir / "left" / buf)));
    }
    return seq;
}

ClipSampler::ClipSampler(std::vector<LoadedSequence> sequences, int clip_len, int gap)
    : sequences_(std::move(sequences)), clip_len_(clip_len) {
    for (size_t s = 0; s < sequences_.size(); ++s) {
        for (int start : clip_index(int(sequences_[s].frames.size()), clip_len, gap)) {
            clips_.emplace_back(int(s), start);
        }
    }
    if (clips_.empty()) {
        throw std::runtime_error("ClipSampler: empty clip index (sequences shorter than clip)");
    }
}

TrainSample ClipSampler::sample_window(SplitMix64& rng, int window_len) const {
    const auto [seq, start] = clips_[rng.uniform_int(clips_.size())];
    const int max_off = clip_len_ - window_len;
    if (max_off < 0) {
        throw std::runtime_error("ClipSampler: window longer than clip");
    }
    const int off = max_off == 0 ? 0 : int(rng.uniform_int(std::uint64_t(max_off) + 1));
    TrainSample sample;
    const LoadedSequence& s = sequences_[size_t(seq)];
    for (int i = 0; i < window_len; ++i) {
        sample.frames.push_back(s.frames[size_t(start + off + i)]);
        sample.actions.push_back(s.actions[size_t(start + off + i)]);
    }
    return sample;
}

TrainSample ClipSampler::clip_window(size_t clip, int window_len, int offset) const {
    const auto [seq, start] = clips_.at(clip);
    if (offset + window_len > clip_len_) {
        throw std::runtime_error("ClipSampler: window exceeds clip");
    }
    TrainSample sample;
    const LoadedSequence& s = sequences_[size_t(seq)];
    for (int i = 0; i < window_len; ++i) {
        sample.frames.push_back(s.frames[size_t(start + offset + i)]);
        sample.actions.push_back(s.actions[size_t(start + offset + i)]);
    }
    return sample;
}

Tensor<float> tensor_from_frame(const Frame& f) {
    Tensor<float> t(f.height, f.width, 3);
    for (size_t i = 0; i < f.px.size(); ++i) {
        t.v[i] = float(f.px[i]);
    }
    return t;
}

Frame frame_from_tensor(const Tensor<float>& t) {
    Frame f(t.w, t.h);
    for (size_t i = 0; i < t.v.size(); ++i) {
        f.px[i] = double(t.v[i]);
    }
    return f;
}

Trainer::Trainer(const TrainConfig& cfg_, std::uint64_t seed, bool action_blind)
    : cfg(cfg_),
      params(make_model<float>(seed, action_blind)),
      adam(AdamState<float>::init(params)),
      rng(seed ^ 0x5EEDF00DULL) {}

std::vector<TrainSample> Trainer::sample_batch(const ClipSampler& sampler) {
    std::vector<TrainSample> batch;
    batch.reserve(size_t(cfg.batch));
    for (int b = 0; b < cfg.batch; ++b) {
        batch.push_back(sampler.sample_window(rng, cfg.context + cfg.train_horizon));
    }
    return batch;
}

LossTerms Trainer::train_step(const std::vector<TrainSample>& batch) {
    const size_t n = batch.size();
    if (n == 0) {
        throw std::invalid_argument("train_step: empty batch");
    }
    std::vector<ModelParams<float>> grads(n, zero_like(params));
    std::vector<LossTerms> terms(n);

    auto run_item = [&](size_t i) {
        const TrainSample& s = batch[i];
        if (int(s.frames.size()) != cfg.context + cfg.train_horizon) {
            throw std::invalid_argument("train_step: sample must hold context + horizon frames");
        }
        Workspace<float> ws;
        std::vector<Tensor<float>> context(s.frames.begin(), s.frames.begin() + cfg.context);
        std::vector<Tensor<float>> targets(s.frames.begin() + cfg.context, s.frames.end());
        Rollout<float> ro;
        const auto& preds = rollout_forward(params, context, s.actions, cfg.train_horizon, ro, ws);
        std::vector<Tensor<float>> dpreds;
        terms[i] = loss_backward(preds, targets, cfg, dpreds);
        rollout_backward(params, ro, std::move(dpreds), grads[i], ws);
    };

    const int threads = std::min<int>(thread_budget(), int(n));
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i) run_item(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (size_t i = size_t(t); i < n; i += size_t(threads)) run_item(i);
                } catch (...) {
                    errors[size_t(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    // Ordered reduction over items, then mean: bit-stable for any thread count.
    ModelParams<float> total = std::move(grads[0]);
    for (size_t i = 1; i < n; ++i) {
        auto tb = total.blocks();
        auto gb = grads[i].blocks();
        for (int b = 0; b < ModelParams<float>::kNumBlocks; ++b) {
            for (size_t k = 0; k < tb[size_t(b)]->w.size(); ++k) {
                tb[size_t(b)]->w[k] += gb[size_t(b)]->w[k];
            }
            for (size_t k = 0; k < tb[size_t(b)]->b.size(); ++k) {
                tb[size_t(b)]->b[k] += gb[size_t(b)]->b[k];
            }
        }
    }
    const float inv = 1.0f / float(n);
    for (auto* blk : total.blocks()) {
        for (float& w : blk->w) w *= inv;
        for (float& b : blk->b) b *= inv;
    }

    LossTerms mean;
    for (size_t i = 0; i < n; ++i) {
        mean.loss += terms[i].loss;
        mean.mse += terms[i].mse;
        mean.gdl += terms[i].gdl;
    }
    mean.loss /= double(n);
    mean.mse /= double(n);
    mean.gdl /= double(n);

    adam_step(params, total, adam, cfg);
    ++iteration;
    return mean;
}

// --------------------------------------------------------------------------
// Checkpoint I/O.

namespace {

constexpr char kCkptMagic[8] = {'A', 'C', 'P', 'N', 'E', 'T', 'C', 'K'};
constexpr std::uint32_t kCkptVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(char(v & 0xFF));
    out.push_back(char((v >> 8) & 0xFF));
    out.push_back(char((v >> 16) & 0xFF));
    out.push_back(char((v >> 24) & 0xFF));
}

void put_block(std::string& out, const std::string& name, const std::vector<std::uint32_t>& dims,
               const float* data, size_t count) {
    put_u32(out, std::uint32_t(name.size()));
    out += name;
    put_u32(out, std::uint32_t(dims.size()));
    for (std::uint32_t d : dims) put_u32(out, d);
    for (size_t i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, &data[i], 4);
        put_u32(out, bits);
    }
}

struct BlockData {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

class Reader {
public:
    explicit Reader(const std::string& data) : data_(data) {}
    bool done() const { return pos_ >= data_.size(); }
    std::uint32_t u32() {
        if (pos_ + 4 > data_.size()) throw std::runtime_error("checkpoint truncated");
        const auto* p = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
        pos_ += 4;
        return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
               (std::uint32_t(p[3]) << 24);
    }
    std::string str(size_t len) {
        if (pos_ + len > data_.size()) throw std::runtime_error("checkpoint truncated");
        std::string s = data_.substr(pos_, len);
        pos_ += len;
        return s;
    }

private:
    const std::string& data_;
    size_t pos_ = 0;
};

std::map<std::string, BlockData> read_blocks(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open checkpoint " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    const std::string data = ss.str();
    if (data.size() < 12 || std::memcmp(data.data(), kCkptMagic, 8) != 0) {
        throw std::runtime_error("bad checkpoint magic in " + path.string());
    }
    Reader r(data);
    r.str(8);  // magic
    const std::uint32_t version = r.u32();
    if (version != kCkptVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    std::map<std::string, BlockData> blocks;
    while (!r.done()) {
        const std::uint32_t name_len = r.u32();
        const std::string name = r.str(name_len);
        const std::uint32_t rank = r.u32();
        BlockData bd;
        size_t count = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            bd.dims.push_back(r.u32());
            count *= bd.dims.back();
        }
        bd.data.resize(count);
        for (size_t i = 0; i < count; ++i) {
            const std::uint32_t bits = r.u32();
            std::memcpy(&bd.data[i], &bits, 4);
        }
        blocks.emplace(name, std::move(bd));
    }
    return blocks;
}

std::vector<float> u64_chunks(std::uint64_t v) {
    return {float((v >> 48) & 0xFFFF), float((v >> 32) & 0xFFFF), float((v >> 16) & 0xFFFF),
            float(v & 0xFFFF)};
}

std::uint64_t u64_from_chunks(const std::vector<float>& c) {
    if (c.size() != 4) throw std::runtime_error("checkpoint: bad u64 chunk block");
    return (std::uint64_t(c[0]) << 48) | (std::uint64_t(c[1]) << 32) |
           (std::uint64_t(c[2]) << 16) | std::uint64_t(c[3]);
}

void append_model_blocks(std::string& out, const std::string& prefix,
                         const ModelParams<float>& p) {
    auto blocks = p.blocks();
    for (int b = 0; b < ModelParams<float>::kNumBlocks; ++b) {
        const ConvParam<float>& cp = *blocks[size_t(b)];
        const std::string name = prefix + ModelParams<float>::kBlockNames[size_t(b)];
        put_block(out, name + ".w",
                  {std::uint32_t(cp.kh), std::uint32_t(cp.kw), std::uint32_t(cp.cin),
                   std::uint32_t(cp.cout)},
                  cp.w.data(), cp.w.size());
        if (!cp.b.empty()) {
            put_block(out, name + ".b", {std::uint32_t(cp.cout)}, cp.b.data(), cp.b.size());
        }
    }
}

void fill_model_blocks(const std::map<std::string, BlockData>& blocks, const std::string& prefix,
                       ModelParams<float>& p) {
    auto model_blocks = p.blocks();
    for (int b = 0; b < ModelParams<float>::kNumBlocks; ++b) {
        ConvParam<float>& cp = *model_blocks[size_t(b)];
        const std::string name = prefix + ModelParams<float>::kBlockNames[size_t(b)];
        const auto wit = blocks.find(name + ".w");
        if (wit == blocks.end() || wit->second.data.size() != cp.w.size()) {
            throw std::runtime_error("checkpoint: missing or misshaped block " + name + ".w");
        }
        cp.w = wit->second.data;
        if (!cp.b.empty()) {
            const auto bit = blocks.find(name + ".b");
            if (bit == blocks.end() || bit->second.data.size() != cp.b.size()) {
                throw std::runtime_error("checkpoint: missing or misshaped block " + name + ".b");
            }
            cp.b = bit->second.data;
        }
    }
}

}  // namespace

void save_checkpoint(const fs::path& path, const Trainer& trainer) {
    std::string out(kCkptMagic, sizeof(kCkptMagic));
    put_u32(out, kCkptVersion);
    append_model_blocks(out, "theta.", trainer.params);
    append_model_blocks(out, "adam.m.", trainer.adam.m);
    append_model_blocks(out, "adam.v.", trainer.adam.v);
    const float iter = float(trainer.iteration);
    put_block(out, "meta.iteration", {1}, &iter, 1);
    const float blind = trainer.params.action_blind ? 1.0f : 0.0f;
    put_block(out, "meta.action_blind", {1}, &blind, 1);
    const auto rng_chunks = u64_chunks(trainer.rng.state());
    put_block(out, "meta.rng", {4}, rng_chunks.data(), 4);
    const auto seed_chunks = u64_chunks(trainer.params.init_seed);
    put_block(out, "meta.init_seed", {4}, seed_chunks.data(), 4);

    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot write checkpoint " + path.string());
    }
    os.write(out.data(), std::streamsize(out.size()));
}

Trainer load_checkpoint(const fs::path& path) {
    const auto blocks = read_blocks(path);
    auto meta = [&](const char* name) -> const BlockData& {
        const auto it = blocks.find(name);
        if (it == blocks.end()) {
            throw std::runtime_error(std::string("checkpoint: missing ") + name);
        }
        return it->second;
    };
    const bool blind = meta("meta.action_blind").data.at(0) != 0.0f;
    const std::uint64_t init_seed = u64_from_chunks(meta("meta.init_seed").data);

    Trainer trainer(TrainConfig{}, init_seed, blind);
    fill_model_blocks(blocks, "theta.", trainer.params);
    fill_model_blocks(blocks, "adam.m.", trainer.adam.m);
    fill_model_blocks(blocks, "adam.v.", trainer.adam.v);
    trainer.iteration = std::uint64_t(meta("meta.iteration").data.at(0));
    trainer.adam.t = std::int64_t(trainer.iteration);
    trainer.rng.set_state(u64_from_chunks(meta("meta.rng").data));
    return trainer;
}

bool checkpoint_is_action_blind(const fs::path& path) {
    const auto blocks = read_blocks(path);
    const auto it = blocks.find("meta.action_blind");
    return it != blocks.end() && !it->second.data.empty() && it->second.data[0] != 0.0f;
}

void write_loss_log(const fs::path& path, const std::vector<LossTerms>& log) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write loss log " + path.string());
    }
    os << "iteration,loss,mse,gdl\n";
    char buf[128];
    for (size_t i = 0; i < log.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", i + 1, log[i].loss, log[i].mse,
                      log[i].gdl);
        os << buf;
    }
}

int thread_budget() {
    if (const char* env = std::getenv("ROAMSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

}  // namespace roam
