#pragma once

#include "dgs/io/json_io.hpp"
#include "dgs/io/ply.hpp"

#include <cstring>

namespace dgs::io {

inline constexpr char kFieldMagic[4] = {'D', 'G', 'S', 'F'};

/// Field blob: magic, u32 header length, JSON header, then float32 weights and biases per layer.
template <typename T>
void write_field(const fs::path& path, const DeformationField<T>& f, const NormalizationRanges& ranges) {
    json layers = json::array();
    for (std::size_t l = 0; l < f.weights.size(); ++l) layers.push_back({f.weights[l].rows(), f.weights[l].cols()});
    const json header = {{"field", to_json(f.config)}, {"normalization", to_json(ranges)}, {"layers", layers}};
    const std::string h = header.dump();
    atomic_write(path, [&](std::ostream& o) {
        o.write(kFieldMagic, 4);
        const std::uint32_t len = static_cast<std::uint32_t>(h.size());
        o.write(reinterpret_cast<const char*>(&len), 4);
        o.write(h.data(), static_cast<std::streamsize>(h.size()));
        auto put = [&](const auto& m) {
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                for (Eigen::Index r = 0; r < m.rows(); ++r) {
                    const float v = static_cast<float>(m(r, c));
                    o.write(reinterpret_cast<const char*>(&v), 4);
                }
        };
        for (std::size_t l = 0; l < f.weights.size(); ++l) {
            put(f.weights[l]);
            put(f.biases[l]);
        }
    });
}

template <typename T> struct LoadedField {
    DeformationField<T> field;
    NormalizationRanges ranges;
};

template <typename T> LoadedField<T> read_field(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open field weights " + path.string());
    char magic[4];
    std::uint32_t len = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&len), 4);
    if (!in || std::memcmp(magic, kFieldMagic, 4) != 0) throw Error(path.string() + ": not a field weight file");
    std::string h(len, '\0');
    in.read(h.data(), len);
    if (!in) throw Error(path.string() + ": truncated header");
    const json header = json::parse(h);
    LoadedField<T> out;
    out.ranges = ranges_from_json(header.at("normalization"));
    auto& f = out.field;
    f.config = field_config_from_json(header.at("field"));
    for (const auto& shape : header.at("layers")) {
        const Eigen::Index rows = shape[0].get<Eigen::Index>(), cols = shape[1].get<Eigen::Index>();
        f.weights.push_back(MatX<T>(rows, cols));
        f.biases.push_back(VecX<T>(rows));
    }
    auto get = [&](auto& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                float v;
                in.read(reinterpret_cast<char*>(&v), 4);
                m(r, c) = static_cast<T>(v);
            }
    };
    for (std::size_t l = 0; l < f.weights.size(); ++l) {
        get(f.weights[l]);
        get(f.biases[l]);
    }
    if (!in) throw Error(path.string() + ": truncated weights");
    if (f.weights.empty() || f.weights.front().cols() != f.config.input_dim() || f.weights.back().rows() != kDeltaDim)
        throw Error(path.string() + ": layer shapes do not match the field configuration");
    return out;
}

inline json to_json(const TrainState& s) {
    return {{"iteration", s.iteration},
            {"phase", phase_name(s.phase)},
            {"phase2_start", s.phase2_start},
            {"transitions", s.transitions},
            {"rng_seed", s.rng_seed}};
}

/// A checkpoint directory holds scene.ply, field.bin and state.json.
template <typename T> struct Checkpoint {
    Scene<T> scene;
    DeformationField<T> field;
    NormalizationRanges ranges;
    json state;
};

template <typename T>
void save_checkpoint(const fs::path& dir, const Scene<T>& scene, const DeformationField<T>& field,
                     const NormalizationRanges& ranges, const TrainState& state) {
    write_gaussians(dir / "scene.ply", scene);
    write_field(dir / "field.bin", field, ranges);
    json st = to_json(state);
    st["active_sh_degree"] = scene.active_sh_degree();
    st["gaussian_count"] = scene.size();
    write_text(dir / "state.json", st.dump(2) + "\n");
}

template <typename T> Checkpoint<T> load_checkpoint(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("checkpoint directory not found: " + dir.string());
    Checkpoint<T> c;
    c.scene = read_gaussians<T>(dir / "scene.ply");
    auto lf = read_field<T>(dir / "field.bin");
    c.field = std::move(lf.field);
    c.ranges = lf.ranges;
    if (fs::exists(dir / "state.json")) c.state = json::parse(read_text(dir / "state.json"));
    return c;
}

}  // namespace dgs::io
