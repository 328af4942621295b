#pragma once

#include "dgs/io/files.hpp"
#include "dgs/scene.hpp"

#include <cstring>
#include <map>

namespace dgs::io {

/// Vertex table of a PLY file with every property widened to double.
struct PlyTable {
    std::vector<std::string> names;
    std::vector<std::string> comments;
    std::size_t rows = 0;
    std::vector<double> values;  // row-major

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }
    double at(std::size_t row, int col) const { return values[row * names.size() + col]; }
};

namespace ply_detail {

inline std::size_t type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    throw Error("ply: unsupported property type '" + t + "'");
}

inline double read_scalar(const char* p, const std::string& t) {
    auto get = [p](auto v) {
        std::memcpy(&v, p, sizeof(v));
        return static_cast<double>(v);
    };
    if (t == "char" || t == "int8") return get(std::int8_t{});
    if (t == "uchar" || t == "uint8") return get(std::uint8_t{});
    if (t == "short" || t == "int16") return get(std::int16_t{});
    if (t == "ushort" || t == "uint16") return get(std::uint16_t{});
    if (t == "int" || t == "int32") return get(std::int32_t{});
    if (t == "uint" || t == "uint32") return get(std::uint32_t{});
    if (t == "float" || t == "float32") return get(float{});
    return get(double{});
}

}  // namespace ply_detail

/// Reads the vertex element of a binary-little-endian or ASCII PLY file.
inline PlyTable read_ply(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("ply", 0) != 0) throw Error("ply: missing magic in " + path.string());
    PlyTable t;
    std::vector<std::string> types;
    std::string format;
    bool in_vertex = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "format") {
            ls >> format;
        } else if (kw == "comment") {
            t.comments.push_back(line.size() > 8 ? line.substr(8) : "");
        } else if (kw == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            in_vertex = name == "vertex";
            if (in_vertex) t.rows = count;
            else if (count > 0) throw Error("ply: only a vertex element is supported");
        } else if (kw == "property" && in_vertex) {
            std::string type, name;
            ls >> type >> name;
            if (type == "list") throw Error("ply: list properties are not supported");
            types.push_back(type);
            t.names.push_back(name);
        } else if (kw == "end_header") {
            break;
        }
    }
    const std::size_t cols = t.names.size();
    t.values.resize(t.rows * cols);
    if (format == "binary_little_endian") {
        std::size_t stride = 0;
        for (const auto& ty : types) stride += ply_detail::type_size(ty);
        std::vector<char> buf(stride * t.rows);
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw Error("ply: truncated data in " + path.string());
        for (std::size_t r = 0; r < t.rows; ++r) {
            const char* p = buf.data() + r * stride;
            for (std::size_t c = 0; c < cols; ++c) {
                t.values[r * cols + c] = ply_detail::read_scalar(p, types[c]);
                p += ply_detail::type_size(types[c]);
            }
        }
    } else if (format == "ascii") {
        for (std::size_t i = 0; i < t.values.size(); ++i)
            if (!(in >> t.values[i])) throw Error("ply: truncated ascii data in " + path.string());
    } else {
        throw Error("ply: unsupported format '" + format + "'");
    }
    return t;
}

struct PointCloud {
    std::vector<Eigen::Vector3d> positions;
    std::vector<Eigen::Vector3d> colors;  // [0, 1]
};

inline void write_point_cloud(const fs::path& path, const PointCloud& pc) {
    atomic_write(path, [&](std::ostream& o) {
        o << "ply\nformat binary_little_endian 1.0\nelement vertex " << pc.positions.size()
          << "\nproperty float x\nproperty float y\nproperty float z\n"
             "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
        for (std::size_t i = 0; i < pc.positions.size(); ++i) {
            for (int k = 0; k < 3; ++k) {
                const float v = static_cast<float>(pc.positions[i][k]);
                o.write(reinterpret_cast<const char*>(&v), 4);
            }
            for (int k = 0; k < 3; ++k) {
                const auto c = static_cast<std::uint8_t>(std::lround(std::clamp(pc.colors[i][k], 0.0, 1.0) * 255.0));
                o.write(reinterpret_cast<const char*>(&c), 1);
            }
        }
    });
}

inline PointCloud read_point_cloud(const fs::path& path) {
    const PlyTable t = read_ply(path);
    const int x = t.column("x"), y = t.column("y"), z = t.column("z");
    if (x < 0 || y < 0 || z < 0) throw Error("point cloud " + path.string() + " lacks x/y/z");
    const int r = t.column("red"), g = t.column("green"), b = t.column("blue");
    PointCloud pc;
    for (std::size_t i = 0; i < t.rows; ++i) {
        pc.positions.emplace_back(t.at(i, x), t.at(i, y), t.at(i, z));
        if (r >= 0 && g >= 0 && b >= 0)
            pc.colors.emplace_back(t.at(i, r) / 255.0, t.at(i, g) / 255.0, t.at(i, b) / 255.0);
        else
            pc.colors.emplace_back(0.5, 0.5, 0.5);
    }
    return pc;
}

/// Gaussian population in the common splatting layout: x y z nx ny nz f_dc_0..2 f_rest_0..44
/// opacity scale_0..2 rot_0..3, f_rest channel-major. The active SH degree travels in a comment.
template <typename T> void write_gaussians(const fs::path& path, const Scene<T>& scene) {
    atomic_write(path, [&](std::ostream& o) {
        o << "ply\nformat binary_little_endian 1.0\ncomment active_sh_degree " << scene.active_sh_degree()
          << "\nelement vertex " << scene.size() << "\n";
        for (const char* n : {"x", "y", "z", "nx", "ny", "nz"}) o << "property float " << n << "\n";
        for (int i = 0; i < 3; ++i) o << "property float f_dc_" << i << "\n";
        for (int i = 0; i < 45; ++i) o << "property float f_rest_" << i << "\n";
        o << "property float opacity\n";
        for (int i = 0; i < 3; ++i) o << "property float scale_" << i << "\n";
        for (int i = 0; i < 4; ++i) o << "property float rot_" << i << "\n";
        o << "end_header\n";
        std::vector<float> row(62);
        for (const auto& g : scene.gaussians) {
            std::size_t k = 0;
            for (int i = 0; i < 3; ++i) row[k++] = static_cast<float>(g.mu[i]);
            for (int i = 0; i < 3; ++i) row[k++] = 0.0f;
            for (int c = 0; c < 3; ++c) row[k++] = static_cast<float>(g.sh(0, c));
            for (int c = 0; c < 3; ++c)
                for (int j = 1; j < kShCoeffs; ++j) row[k++] = static_cast<float>(g.sh(j, c));
            row[k++] = static_cast<float>(g.opacity_logit);
            for (int i = 0; i < 3; ++i) row[k++] = static_cast<float>(g.log_scale[i]);
            for (int i = 0; i < 4; ++i) row[k++] = static_cast<float>(g.rot[i]);
            o.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
        }
    });
}

template <typename T> Scene<T> read_gaussians(const fs::path& path) {
    const PlyTable t = read_ply(path);
    auto col = [&](const std::string& n) {
        const int c = t.column(n);
        if (c < 0) throw Error("gaussian ply " + path.string() + " lacks property " + n);
        return c;
    };
    const int x = col("x"), op = col("opacity");
    const int dc = col("f_dc_0"), sc = col("scale_0"), rot = col("rot_0");
    const int rest = t.column("f_rest_0");
    int n_rest = 0;
    while (t.column("f_rest_" + std::to_string(n_rest)) >= 0) ++n_rest;
    const int per_channel = n_rest / 3;
    Scene<T> s;
    for (std::size_t r = 0; r < t.rows; ++r) {
        Gaussian<T> g;
        for (int i = 0; i < 3; ++i) g.mu[i] = static_cast<T>(t.at(r, x + i));
        for (int c = 0; c < 3; ++c) g.sh(0, c) = static_cast<T>(t.at(r, dc + c));
        for (int c = 0; c < 3 && rest >= 0; ++c)
            for (int j = 0; j < std::min(per_channel, kShCoeffs - 1); ++j)
                g.sh(j + 1, c) = static_cast<T>(t.at(r, rest + c * per_channel + j));
        g.opacity_logit = static_cast<T>(t.at(r, op));
        for (int i = 0; i < 3; ++i) g.log_scale[i] = static_cast<T>(t.at(r, sc + i));
        for (int i = 0; i < 4; ++i) g.rot[i] = static_cast<T>(t.at(r, rot + i));
        s.gaussians.push_back(g);
    }
    s.reset_accumulators();
    for (const auto& c : t.comments) {
        std::istringstream cs(c);
        std::string key;
        int deg = 0;
        if (cs >> key >> deg && key == "active_sh_degree") s.raise_sh_degree(deg);
    }
    return s;
}

}  // namespace dgs::io
