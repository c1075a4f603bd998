#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylometer/common.hpp"
#include "stylometer/nn.hpp"

namespace stylo {
namespace nn {

// Checkpoint byte layout, version 1:
//
//   offset 0   8 bytes   magic "STYLNET1"
//   offset 8   u32 LE    manifest length L
//   offset 12  L bytes   UTF-8 JSON manifest: layer specs, per-layer
//                        weight/bias shapes, rng seed, step counter
//   offset 12+L          payload: every weight tensor then bias tensor in
//                        layer order, as little-endian IEEE-754 doubles;
//                        the Adam first moments follow in the same order,
//                        then the second moments.

inline constexpr char kCheckpointMagic[8] = {'S', 'T', 'Y', 'L', 'N', 'E', 'T', '1'};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

inline void put_f64(std::string& out, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out += static_cast<char>((bits >> (8 * i)) & 0xFF);
}

inline std::uint32_t get_u32(const std::string& s, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    return v;
}

inline double get_f64(const std::string& s, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    return std::bit_cast<double>(v);
}

inline nlohmann::json spec_to_json(const LayerSpec& s) {
    nlohmann::json j;
    switch (s.kind) {
        case LayerKind::Dense:
            j["kind"] = "dense";
            j["in_dim"] = s.in_dim;
            j["out_dim"] = s.out_dim;
            j["activation"] = s.activation == Activation::Relu ? "relu"
                              : s.activation == Activation::Softmax ? "softmax"
                                                                    : "none";
            break;
        case LayerKind::Dropout:
            j["kind"] = "dropout";
            j["rate"] = s.rate;
            break;
        case LayerKind::Conv2d:
            j["kind"] = "conv2d";
            j["in_channels"] = s.in_channels;
            j["out_channels"] = s.out_channels;
            j["kernel"] = {s.kernel_h, s.kernel_w};
            j["padding"] = s.padding == Padding::Same ? "same" : "valid";
            j["activation"] = s.activation == Activation::Relu ? "relu"
                              : s.activation == Activation::Softmax ? "softmax"
                                                                    : "none";
            break;
        case LayerKind::MaxPool2d:
            j["kind"] = "maxpool2d";
            j["window"] = {s.pool_h, s.pool_w};
            j["stride"] = s.stride;
            break;
        case LayerKind::Flatten:
            j["kind"] = "flatten";
            break;
    }
    return j;
}

inline LayerSpec spec_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    auto act = [&](const nlohmann::json& v) {
        const std::string a = v.get<std::string>();
        if (a == "relu") return Activation::Relu;
        if (a == "softmax") return Activation::Softmax;
        if (a == "none") return Activation::None;
        throw MalformedCheckpoint("unknown activation " + a);
    };
    if (kind == "dense")
        return LayerSpec::dense(j.at("in_dim").get<int>(), j.at("out_dim").get<int>(),
                                act(j.at("activation")));
    if (kind == "dropout") return LayerSpec::dropout(j.at("rate").get<double>());
    if (kind == "conv2d")
        return LayerSpec::conv2d(j.at("in_channels").get<int>(), j.at("out_channels").get<int>(),
                                 j.at("kernel")[0].get<int>(), j.at("kernel")[1].get<int>(),
                                 j.at("padding").get<std::string>() == "same" ? Padding::Same
                                                                              : Padding::Valid,
                                 act(j.at("activation")));
    if (kind == "maxpool2d")
        return LayerSpec::maxpool2d(j.at("window")[0].get<int>(), j.at("window")[1].get<int>(),
                                    j.at("stride").get<int>());
    if (kind == "flatten") return LayerSpec::flatten();
    throw MalformedCheckpoint("unknown layer kind " + kind);
}

}  // namespace detail

inline std::string serialize_checkpoint(const NetworkState& st) {
    nlohmann::json manifest;
    manifest["version"] = 1;
    manifest["seed"] = st.seed;
    manifest["step"] = st.step;
    manifest["input_shape"] = st.input_shape;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t li = 0; li < st.specs.size(); ++li) {
        nlohmann::json j = detail::spec_to_json(st.specs[li]);
        j["weight_shape"] = st.weights[li].shape;
        j["bias_shape"] = st.biases[li].shape;
        layers.push_back(j);
    }
    manifest["layers"] = layers;
    const std::string mtext = manifest.dump();

    std::string out;
    out.append(kCheckpointMagic, sizeof kCheckpointMagic);
    detail::put_u32(out, static_cast<std::uint32_t>(mtext.size()));
    out += mtext;
    auto put_tensor = [&out](const Tensor& t) {
        for (double d : t.data) detail::put_f64(out, d);
    };
    for (const Tensor& t : st.weights) put_tensor(t);
    for (const Tensor& t : st.biases) put_tensor(t);
    for (const Tensor& t : st.m_w) put_tensor(t);
    for (const Tensor& t : st.m_b) put_tensor(t);
    for (const Tensor& t : st.v_w) put_tensor(t);
    for (const Tensor& t : st.v_b) put_tensor(t);
    return out;
}

inline NetworkState deserialize_checkpoint(const std::string& bytes) {
    if (bytes.size() < 12 || bytes.compare(0, 8, kCheckpointMagic, 8) != 0)
        throw MalformedCheckpoint("bad magic");
    const std::uint32_t mlen = detail::get_u32(bytes, 8);
    if (bytes.size() < 12 + static_cast<std::size_t>(mlen))
        throw MalformedCheckpoint("truncated manifest");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(bytes.substr(12, mlen));
    } catch (const nlohmann::json::exception& e) {
        throw MalformedCheckpoint(std::string("manifest parse: ") + e.what());
    }
    if (manifest.at("version").get<int>() != 1) throw MalformedCheckpoint("unsupported version");

    NetworkState st;
    st.seed = manifest.at("seed").get<std::uint64_t>();
    st.step = manifest.at("step").get<std::int64_t>();
    st.input_shape = manifest.at("input_shape").get<std::vector<std::size_t>>();
    for (const auto& j : manifest.at("layers")) {
        st.specs.push_back(detail::spec_from_json(j));
        st.weights.emplace_back(Tensor(j.at("weight_shape").get<std::vector<std::size_t>>()));
        st.biases.emplace_back(Tensor(j.at("bias_shape").get<std::vector<std::size_t>>()));
        st.m_w.emplace_back(Tensor(st.weights.back().shape));
        st.v_w.emplace_back(Tensor(st.weights.back().shape));
        st.m_b.emplace_back(Tensor(st.biases.back().shape));
        st.v_b.emplace_back(Tensor(st.biases.back().shape));
    }
    infer_shapes(st.specs, st.input_shape);

    std::size_t off = 12 + mlen;
    auto read_tensor = [&](Tensor& t) {
        if (bytes.size() < off + t.size() * 8) throw MalformedCheckpoint("truncated payload");
        for (std::size_t i = 0; i < t.size(); ++i, off += 8) t.data[i] = detail::get_f64(bytes, off);
    };
    for (Tensor& t : st.weights) read_tensor(t);
    for (Tensor& t : st.biases) read_tensor(t);
    for (Tensor& t : st.m_w) read_tensor(t);
    for (Tensor& t : st.m_b) read_tensor(t);
    for (Tensor& t : st.v_w) read_tensor(t);
    for (Tensor& t : st.v_b) read_tensor(t);
    if (off != bytes.size()) throw MalformedCheckpoint("trailing bytes after payload");
    return st;
}

inline void save_checkpoint(const NetworkState& st, const std::string& path) {
    write_file(path, serialize_checkpoint(st));
}

inline NetworkState load_checkpoint(const std::string& path) {
    return deserialize_checkpoint(read_file(path));
}

}  // namespace nn
}  // namespace stylo
