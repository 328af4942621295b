#pragma once

#include "dgs/scene.hpp"

#include <array>
#include <numbers>
#include <random>

namespace dgs {

/// Sinusoidal encoding: per component, optionally the raw value, then for k = 0..L-1 the pair
/// (sin(2^k pi x), cos(2^k pi x)).
struct PositionalEncoding {
    int num_freqs = 10;
    bool include_input = true;

    int per_component() const { return 2 * num_freqs + (include_input ? 1 : 0); }
    int output_dim(int input_dim) const { return input_dim * per_component(); }

    /// Phases are formed in double: at 2^9 pi a float argument is only good to about 1e-4.
    template <typename T, typename In> void encode_into(const In* x, int dim, T* out) const {
        for (int i = 0; i < dim; ++i) {
            const double xi = static_cast<double>(x[i]);
            if (include_input) *out++ = static_cast<T>(xi);
            double freq = std::numbers::pi;
            for (int k = 0; k < num_freqs; ++k, freq *= 2) {
                *out++ = static_cast<T>(std::sin(freq * xi));
                *out++ = static_cast<T>(std::cos(freq * xi));
            }
        }
    }

    template <typename T> VecX<T> encode(const VecX<T>& x) const {
        if (num_freqs < 1) throw Error("positional encoding needs at least one frequency");
        VecX<T> out(output_dim(static_cast<int>(x.size())));
        encode_into(x.data(), static_cast<int>(x.size()), out.data());
        return out;
    }

    /// dL/dx given dL/d(encoding).
    template <typename T> VecX<T> backward(const VecX<T>& x, const VecX<T>& d_out) const {
        VecX<T> dx = VecX<T>::Zero(x.size());
        int o = 0;
        for (int i = 0; i < x.size(); ++i) {
            if (include_input) dx[i] += d_out[o++];
            const double xi = static_cast<double>(x[i]);
            double freq = std::numbers::pi;
            for (int k = 0; k < num_freqs; ++k, freq *= 2) {
                dx[i] += d_out[o++] * T(freq * std::cos(freq * xi));
                dx[i] -= d_out[o++] * T(freq * std::sin(freq * xi));
            }
        }
        return dx;
    }
};

/// encode(x, L) with no passthrough.
template <typename T> VecX<T> encode(const VecX<T>& x, int num_freqs) {
    return PositionalEncoding{num_freqs, false}.encode(x);
}

inline constexpr int kKinematicsDim = 8;
inline constexpr int kDeltaDim = 10;  // d_mu(3) | d_rot(4) | d_log_scale(3)

using KinematicsVector = Eigen::Matrix<double, kKinematicsDim, 1>;

/// Affine ranges mapping raw inputs into roughly [-1, 1] before encoding.
struct NormalizationRanges {
    std::array<double, kKinematicsDim> kin_min{-1, -1, -1, -1, -1, -1, -1, -1};
    std::array<double, kKinematicsDim> kin_max{1, 1, 1, 1, 1, 1, 1, 1};
    Eigen::Vector3d scene_center = Eigen::Vector3d::Zero();
    double scene_extent = 1.0;
};

inline KinematicsVector kinematics_raw(const KinematicState& p) {
    KinematicsVector v;
    v << p.translation, p.rotation, p.jaw_angle;
    return v;
}

/// (translation, quaternion, jaw) mapped component-wise by 2 (v - min) / (max - min) - 1.
inline KinematicsVector kinematics_to_vector(const KinematicState& p, const NormalizationRanges& r) {
    KinematicsVector v = kinematics_raw(p);
    for (int i = 0; i < kKinematicsDim; ++i) {
        const double span = r.kin_max[i] - r.kin_min[i];
        v[i] = span > 0 ? 2.0 * (v[i] - r.kin_min[i]) / span - 1.0 : 0.0;
    }
    return v;
}

struct FieldConfig {
    int depth = 12;
    int width = 256;
    PositionalEncoding mu_encoding{10, true};
    PositionalEncoding p_encoding{6, true};

    int mu_input_dim() const { return mu_encoding.output_dim(3); }
    int p_input_dim() const { return p_encoding.output_dim(kKinematicsDim); }
    int input_dim() const { return mu_input_dim() + p_input_dim(); }
};

template <typename T> struct FieldGradients {
    std::vector<MatX<T>> d_weights;
    std::vector<VecX<T>> d_biases;
    VecX<T> d_p_input;   // w.r.t. the encoded kinematics
    MatX<T> d_mu_input;  // w.r.t. encoded positions, one column per sample (only when requested)

    void set_zero_like(const std::vector<MatX<T>>& w, const std::vector<VecX<T>>& b) {
        d_weights.resize(w.size());
        d_biases.resize(b.size());
        for (std::size_t l = 0; l < w.size(); ++l) {
            d_weights[l] = MatX<T>::Zero(w[l].rows(), w[l].cols());
            d_biases[l] = VecX<T>::Zero(b[l].size());
        }
    }
};

/// Plain ReLU MLP: `depth` hidden layers of `width` units, then one linear layer whose ten
/// outputs form the three delta heads. There is no opacity output.
template <typename T> class DeformationField {
public:
    struct Cache {
        MatX<T> mu_input;
        VecX<T> p_input;
        std::vector<MatX<T>> hidden;  // post-activation output of each hidden layer
    };

    FieldConfig config;
    std::vector<MatX<T>> weights;  // weights[l] is out x in
    std::vector<VecX<T>> biases;

    DeformationField() = default;

    /// He-normal hidden layers, zero-initialized output layer (deltas start at zero).
    static DeformationField create(const FieldConfig& cfg, std::uint64_t seed) {
        if (cfg.depth < 1 || cfg.width < 1) throw Error("deformation field needs depth >= 1 and width >= 1");
        DeformationField f;
        f.config = cfg;
        std::mt19937_64 rng(seed);
        int in = cfg.input_dim();
        for (int l = 0; l < cfg.depth; ++l) {
            std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / in));
            MatX<T> w(cfg.width, in);
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<T>(nd(rng));
            f.weights.push_back(std::move(w));
            f.biases.push_back(VecX<T>::Zero(cfg.width));
            in = cfg.width;
        }
        f.weights.push_back(MatX<T>::Zero(kDeltaDim, in));
        f.biases.push_back(VecX<T>::Zero(kDeltaDim));
        return f;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }

    template <typename U> DeformationField<U> cast() const {
        DeformationField<U> f;
        f.config = config;
        for (const auto& w : weights) f.weights.push_back(w.template cast<U>());
        for (const auto& b : biases) f.biases.push_back(b.template cast<U>());
        return f;
    }

    /// Evaluates all samples at once. `mu_input` holds one encoded position per column; the
    /// encoded kinematics are shared by every sample. Returns kDeltaDim x N.
    MatX<T> forward(const MatX<T>& mu_input, const VecX<T>& p_input, Cache* cache = nullptr) const {
        const int dmu = config.mu_input_dim();
        if (mu_input.rows() != dmu || p_input.size() != config.p_input_dim())
            throw ShapeError("deformation field: input dimension mismatch");
        const Eigen::Index n = mu_input.cols();
        const auto& w0 = weights.front();
        const VecX<T> shared = w0.rightCols(p_input.size()) * p_input + biases.front();
        MatX<T> h(w0.rows(), n);
        h.noalias() = w0.leftCols(dmu) * mu_input;
        h.colwise() += shared;
        h = h.cwiseMax(T(0));
        if (cache) {
            cache->mu_input = mu_input;
            cache->p_input = p_input;
            cache->hidden.clear();
            cache->hidden.push_back(h);
        }
        for (std::size_t l = 1; l < weights.size(); ++l) {
            MatX<T> z(weights[l].rows(), n);
            z.noalias() = weights[l] * h;
            z.colwise() += biases[l];
            if (l + 1 == weights.size()) return z;
            h = z.cwiseMax(T(0));
            if (cache) cache->hidden.push_back(h);
        }
        return h;  // unreachable: weights always holds the output layer
    }

    /// Exact backpropagation of d_out (kDeltaDim x N) through the cached forward pass.
    FieldGradients<T> backward(const Cache& cache, const MatX<T>& d_out, bool want_mu_input = false) const {
        const Eigen::Index n = cache.mu_input.cols();
        if (d_out.rows() != kDeltaDim || d_out.cols() != n)
            throw ShapeError("deformation field backward: upstream gradient shape mismatch");
        if (cache.hidden.size() + 1 != weights.size()) throw ShapeError("deformation field backward: stale cache");
        FieldGradients<T> g;
        g.d_weights.resize(weights.size());
        g.d_biases.resize(weights.size());
        MatX<T> dz = d_out;
        for (std::size_t l = weights.size() - 1; l >= 1; --l) {
            const MatX<T>& h_in = cache.hidden[l - 1];
            g.d_weights[l].noalias() = dz * h_in.transpose();
            g.d_biases[l] = dz.rowwise().sum();
            MatX<T> dh(weights[l].cols(), n);
            dh.noalias() = weights[l].transpose() * dz;
            dz = (h_in.array() > T(0)).select(dh, T(0));
        }
        const int dmu = config.mu_input_dim();
        const auto& w0 = weights.front();
        const VecX<T> dz_sum = dz.rowwise().sum();
        g.d_weights[0].resize(w0.rows(), w0.cols());
        g.d_weights[0].leftCols(dmu).noalias() = dz * cache.mu_input.transpose();
        g.d_weights[0].rightCols(cache.p_input.size()).noalias() = dz_sum * cache.p_input.transpose();
        g.d_biases[0] = dz_sum;
        g.d_p_input = w0.rightCols(cache.p_input.size()).transpose() * dz_sum;
        if (want_mu_input) g.d_mu_input = w0.leftCols(dmu).transpose() * dz;
        return g;
    }
};

/// Encodes every Gaussian center after mapping it into the normalized scene box.
template <typename T>
MatX<T> encode_positions(const std::vector<Gaussian<T>>& gaussians, const NormalizationRanges& r,
                         const PositionalEncoding& enc) {
    MatX<T> out(enc.output_dim(3), static_cast<Eigen::Index>(gaussians.size()));
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
        const Eigen::Vector3d x = (gaussians[i].mu.template cast<double>() - r.scene_center) / r.scene_extent;
        enc.encode_into(x.data(), 3, out.col(static_cast<Eigen::Index>(i)).data());
    }
    return out;
}

template <typename T>
VecX<T> encode_kinematics(const KinematicState& p, const NormalizationRanges& r, const PositionalEncoding& enc) {
    const VecX<T> v = kinematics_to_vector(p, r).cast<T>();
    return enc.encode(v);
}

template <typename T> Deltas<T> deltas_from_output(const MatX<T>& out) {
    Deltas<T> d(static_cast<std::size_t>(out.cols()));
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
        d[i].d_mu = out.col(i).template segment<3>(0);
        d[i].d_rot = out.col(i).template segment<4>(3);
        d[i].d_log_scale = out.col(i).template segment<3>(7);
    }
    return d;
}

template <typename T> MatX<T> output_from_delta_grads(const std::vector<GaussianDelta<T>>& g) {
    MatX<T> out(kDeltaDim, static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.col(i).template segment<3>(0) = g[i].d_mu;
        out.col(i).template segment<4>(3) = g[i].d_rot;
        out.col(i).template segment<3>(7) = g[i].d_log_scale;
    }
    return out;
}

/// (d_mu, d_rot, d_log_scale) for a single canonical center.
template <typename T>
GaussianDelta<T> predict_deltas(const DeformationField<T>& field, const Vec3<T>& mu, const KinematicState& p,
                                const NormalizationRanges& r) {
    Gaussian<T> g;
    g.mu = mu;
    const MatX<T> out = field.forward(encode_positions(std::vector<Gaussian<T>>{g}, r, field.config.mu_encoding),
                                      encode_kinematics<T>(p, r, field.config.p_encoding));
    return deltas_from_output<T>(out).front();
}

/// Deltas for every Gaussian of a scene at kinematic state p.
template <typename T>
Deltas<T> predict_scene_deltas(const DeformationField<T>& field, const Scene<T>& scene, const KinematicState& p,
                               const NormalizationRanges& r) {
    const MatX<T> out = field.forward(encode_positions(scene.gaussians, r, field.config.mu_encoding),
                                      encode_kinematics<T>(p, r, field.config.p_encoding));
    return deltas_from_output<T>(out);
}

}  // namespace dgs
