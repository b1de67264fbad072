// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace chm {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian; big-endian hosts unsupported");

namespace {

constexpr char kMagic[8] = {'C', 'H', 'M', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw CorruptFileError(path + ": truncated checkpoint");
    return v;
}

void put_tensor(std::ofstream& out, const std::string& name, const std::array<int, 4>& shape,
                const std::vector<float>& values) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    for (int d : shape) put<std::int32_t>(out, d);
    put<std::uint64_t>(out, values.size());
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * 4));
}

struct TensorRecord {
    std::string name;
    std::array<int, 4> shape;
    std::vector<float> values;
};

TensorRecord get_tensor(std::ifstream& in, const std::string& path) {
    TensorRecord r;
    const auto name_len = get<std::uint16_t>(in, path);
    r.name.resize(name_len);
    in.read(r.name.data(), name_len);
    if (!in) throw CorruptFileError(path + ": truncated checkpoint");
    for (int& d : r.shape) d = get<std::int32_t>(in, path);
    const auto count = get<std::uint64_t>(in, path);
    const std::uint64_t expect = static_cast<std::uint64_t>(r.shape[0]) * r.shape[1] *
                                 r.shape[2] * r.shape[3];
    if (count != expect)
        throw CorruptFileError(path + ": tensor '" + r.name + "' count disagrees with shape");
    r.values.resize(count);
    in.read(reinterpret_cast<char*>(r.values.data()), static_cast<std::streamsize>(count * 4));
    if (!in) throw CorruptFileError(path + ": truncated checkpoint");
    return r;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);

    out.write(kMagic, 8);
    put<std::uint32_t>(out, kVersion);
    const UNetConfig& cfg = ckpt.weights.config;
    put<std::int32_t>(out, cfg.in_channels);
    put<std::int32_t>(out, cfg.depth);
    put<std::int32_t>(out, cfg.base_channels);
    put<std::uint64_t>(out, cfg.seed);
    put<std::uint64_t>(out, ckpt.epoch);
    put<double>(out, ckpt.best_val_loss);
    put<double>(out, ckpt.opt.config.learning_rate);
    put<double>(out, ckpt.opt.config.decay);
    put<double>(out, ckpt.opt.config.epsilon);

    auto& weights = const_cast<UNetWeights&>(ckpt.weights);
    const auto params = collect_params(weights);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) put_tensor(out, p.name, p.shape, *p.values);

    put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.opt.accum.size()));
    for (const auto& [name, values] : ckpt.opt.accum)
        put_tensor(out, name, {1, 1, 1, static_cast<int>(values.size())}, values);

    if (!out) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw IncompatibleCheckpointError(path + ": not a canopyhm checkpoint");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kVersion)
        throw IncompatibleCheckpointError(path + ": checkpoint version " +
                                          std::to_string(version) + ", expected " +
                                          std::to_string(kVersion));

    UNetConfig cfg;
    cfg.in_channels = get<std::int32_t>(in, path);
    cfg.depth = get<std::int32_t>(in, path);
    cfg.base_channels = get<std::int32_t>(in, path);
    cfg.seed = get<std::uint64_t>(in, path);

    Checkpoint ckpt;
    ckpt.epoch = get<std::uint64_t>(in, path);
    ckpt.best_val_loss = get<double>(in, path);
    ckpt.opt.config.learning_rate = get<double>(in, path);
    ckpt.opt.config.decay = get<double>(in, path);
    ckpt.opt.config.epsilon = get<double>(in, path);

    ckpt.weights = init_weights<float>(cfg);
    auto params = collect_params(ckpt.weights);
    const auto n_params = get<std::uint32_t>(in, path);
    if (n_params != params.size())
        throw IncompatibleCheckpointError(path + ": parameter count mismatch");
    for (std::uint32_t i = 0; i < n_params; ++i) {
        TensorRecord rec = get_tensor(in, path);
        if (rec.name != params[i].name || rec.shape != params[i].shape)
            throw IncompatibleCheckpointError(path + ": unexpected tensor '" + rec.name + "'");
        *params[i].values = std::move(rec.values);
    }

    const auto n_state = get<std::uint32_t>(in, path);
    for (std::uint32_t i = 0; i < n_state; ++i) {
        TensorRecord rec = get_tensor(in, path);
        ckpt.opt.accum[rec.name] = std::move(rec.values);
    }
    return ckpt;
}

Checkpoint load_checkpoint(const std::string& path, const UNetConfig& expected) {
    Checkpoint ckpt = load_checkpoint(path);
    const UNetConfig& got = ckpt.weights.config;
    if (got.in_channels != expected.in_channels || got.depth != expected.depth ||
        got.base_channels != expected.base_channels)
        throw IncompatibleCheckpointError(
            path + ": checkpoint architecture (in=" + std::to_string(got.in_channels) +
            ", depth=" + std::to_string(got.depth) + ", base=" +
            std::to_string(got.base_channels) + ") does not match the requested config");
    return ckpt;
}

} // namespace chm
