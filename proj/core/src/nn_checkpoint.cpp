// Copyright 2026 The VeilForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "veilforge/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

enum LayerTag : std::uint32_t {
    kConv = 0,
    kDense = 1,
    kReLU = 2,
    kGlobalAvgPool = 3,
    kL2Normalize = 4,
};

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_i32(std::ofstream& out, std::int32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_string(std::ofstream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void write_blob(std::ofstream& out, const std::vector<double>& values) {
    write_u64(out, values.size());
    std::vector<float> raw(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) raw[i] = static_cast<float>(values[i]);
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(float)));
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::int32_t read_i32(std::ifstream& in) {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::string read_string(std::ifstream& in) {
    const std::uint32_t n = read_u32(in);
    if (n > (1u << 20)) throw IoError("VFW1: implausible string length");
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}
void read_blob(std::ifstream& in, std::vector<double>& values) {
    const std::uint64_t n = read_u64(in);
    if (n != values.size()) throw IoError("VFW1: parameter blob size mismatch");
    std::vector<float> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!in) throw IoError("VFW1: truncated parameter blob");
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(raw[i]);
}

struct Header {
    std::string kind;
    std::string name;
    std::int32_t meta[6] = {};
    std::uint64_t seed = 0;
};

std::ofstream open_writer(const std::string& path, const Header& h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write("VFW1", 4);
    write_u32(out, 1);
    write_string(out, h.kind);
    write_string(out, h.name);
    for (std::int32_t m : h.meta) write_i32(out, m);
    write_u64(out, h.seed);
    return out;
}

std::ifstream open_reader(const std::string& path, Header& h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VFW1", 4) != 0) throw IoError(path + ": missing VFW1 magic");
    if (read_u32(in) != 1) throw IoError(path + ": unsupported VFW1 version");
    h.kind = read_string(in);
    h.name = read_string(in);
    for (std::int32_t& m : h.meta) m = read_i32(in);
    h.seed = read_u64(in);
    return in;
}

} // namespace

void save_embedder(const std::string& path, const SurrogateEmbedder& model) {
    Header h;
    h.kind = "embedder";
    h.name = model.preset;
    h.meta[0] = model.input_h;
    h.meta[1] = model.input_w;
    h.meta[2] = model.input_c;
    h.meta[3] = model.embed_dim;
    h.seed = model.init_seed;
    std::ofstream out = open_writer(path, h);

    write_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const auto& layer : model.layers) {
        std::visit([&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, nn::Conv2d>) {
                write_u32(out, kConv);
                write_i32(out, l.in_ch);
                write_i32(out, l.out_ch);
                write_i32(out, l.stride);
                write_blob(out, l.weight.value);
                write_blob(out, l.bias.value);
            } else if constexpr (std::is_same_v<T, nn::Dense>) {
                write_u32(out, kDense);
                write_i32(out, l.in);
                write_i32(out, l.out);
                write_i32(out, 0);
                write_blob(out, l.weight.value);
                write_blob(out, l.bias.value);
            } else if constexpr (std::is_same_v<T, nn::ReLU>) {
                write_u32(out, kReLU);
                write_i32(out, 0);
                write_i32(out, 0);
                write_i32(out, 0);
            } else if constexpr (std::is_same_v<T, nn::GlobalAvgPool>) {
                write_u32(out, kGlobalAvgPool);
                write_i32(out, 0);
                write_i32(out, 0);
                write_i32(out, 0);
            } else {
                write_u32(out, kL2Normalize);
                write_i32(out, 0);
                write_i32(out, 0);
                write_i32(out, 0);
            }
        }, layer);
    }
    if (!out) throw IoError("failed writing " + path);
}

SurrogateEmbedder load_embedder(const std::string& path) {
    Header h;
    std::ifstream in = open_reader(path, h);
    if (h.kind != "embedder") throw IoError(path + ": not an embedder checkpoint");

    SurrogateEmbedder m;
    m.preset = h.name;
    m.input_h = h.meta[0];
    m.input_w = h.meta[1];
    m.input_c = h.meta[2];
    m.embed_dim = h.meta[3];
    m.init_seed = h.seed;

    const std::uint32_t count = read_u32(in);
    Rng dummy(0);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t tag = read_u32(in);
        const std::int32_t a = read_i32(in);
        const std::int32_t b = read_i32(in);
        const std::int32_t c = read_i32(in);
        switch (tag) {
        case kConv: {
            nn::Conv2d conv(a, b, c, dummy);
            read_blob(in, conv.weight.value);
            read_blob(in, conv.bias.value);
            m.layers.emplace_back(std::move(conv));
            break;
        }
        case kDense: {
            nn::Dense dense(a, b, dummy);
            read_blob(in, dense.weight.value);
            read_blob(in, dense.bias.value);
            m.layers.emplace_back(std::move(dense));
            break;
        }
        case kReLU:
            m.layers.emplace_back(nn::ReLU{});
            break;
        case kGlobalAvgPool:
            m.layers.emplace_back(nn::GlobalAvgPool{});
            break;
        case kL2Normalize:
            m.layers.emplace_back(nn::L2Normalize{});
            break;
        default:
            throw IoError(path + ": unknown layer tag");
        }
    }
    if (!in) throw IoError(path + ": truncated checkpoint");
    return m;
}

void save_recon(const std::string& path, const ReconNet& net) {
    Header h;
    h.kind = "recon";
    h.meta[0] = net.in_channels();
    h.meta[1] = net.base_channels();
    std::ofstream out = open_writer(path, h);

    const auto blocks = net.conv_blocks();
    write_u32(out, static_cast<std::uint32_t>(blocks.size()));
    for (const nn::Conv2d* c : blocks) {
        write_u32(out, kConv);
        write_i32(out, c->in_ch);
        write_i32(out, c->out_ch);
        write_i32(out, c->stride);
        write_blob(out, c->weight.value);
        write_blob(out, c->bias.value);
    }
    if (!out) throw IoError("failed writing " + path);
}

ReconNet load_recon(const std::string& path) {
    Header h;
    std::ifstream in = open_reader(path, h);
    if (h.kind != "recon") throw IoError(path + ": not a recon checkpoint");

    ReconNet net(h.meta[0], h.meta[1], 0);
    const std::uint32_t count = read_u32(in);
    auto blocks = net.conv_blocks();
    if (count != blocks.size()) throw IoError(path + ": unexpected layer count");
    for (nn::Conv2d* c : blocks) {
        const std::uint32_t tag = read_u32(in);
        const std::int32_t a = read_i32(in);
        const std::int32_t b = read_i32(in);
        const std::int32_t s = read_i32(in);
        if (tag != kConv || a != c->in_ch || b != c->out_ch || s != c->stride) {
            throw IoError(path + ": recon topology mismatch");
        }
        read_blob(in, c->weight.value);
        read_blob(in, c->bias.value);
    }
    if (!in) throw IoError(path + ": truncated checkpoint");
    return net;
}

} // namespace veilforge
