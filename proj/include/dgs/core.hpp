#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dgs {

template <typename T> using Vec2 = Eigen::Matrix<T, 2, 1>;
template <typename T> using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T> using Vec4 = Eigen::Matrix<T, 4, 1>;
template <typename T> using Mat2 = Eigen::Matrix<T, 2, 2>;
template <typename T> using Mat3 = Eigen::Matrix<T, 3, 3>;
template <typename T> using Mat4 = Eigen::Matrix<T, 4, 4>;
template <typename T> using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T> using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when two arrays that must agree in shape do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Interleaved H x W x C image, row-major.
template <typename T> struct Image {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int c = 3, T fill = T(0))
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

    T& at(int y, int x, int c = 0) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    const T& at(int y, int x, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    template <typename U> Image<U> cast() const {
        Image<U> out(width, height, channels);
        std::transform(data.begin(), data.end(), out.data.begin(), [](T v) { return static_cast<U>(v); });
        return out;
    }
};

using ImageF = Image<float>;
using Mask = Image<std::uint8_t>;

template <typename T> void require_same_shape(const Image<T>& a, const Image<T>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": image shapes differ (" + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + "x" + std::to_string(a.channels) + " vs " +
                         std::to_string(b.width) + "x" + std::to_string(b.height) + "x" +
                         std::to_string(b.channels) + ")");
    }
}

template <typename T> Image<T> clamp01(Image<T> img) {
    for (auto& v : img.data) v = std::clamp(v, T(0), T(1));
    return img;
}

/// Quantize a [0,1] image to 8 bits exactly as PNG export does.
template <typename T> Image<std::uint8_t> to_u8(const Image<T>& img) {
    Image<std::uint8_t> out(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(static_cast<double>(img.data[i]), 0.0, 1.0);
        out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return out;
}

template <typename T> Image<T> from_u8(const Image<std::uint8_t>& img) {
    Image<T> out(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = static_cast<T>(img.data[i]) / T(255);
    return out;
}

template <typename T> T sigmoid(T x) { return T(1) / (T(1) + std::exp(-x)); }
template <typename T> T logit(T p) { return std::log(p / (T(1) - p)); }

/// Splits [0, n) into `workers` contiguous chunks; chunk boundaries depend only on (n, workers).
/// fn(worker, begin, end) runs once per non-empty chunk.
inline void parallel_for(std::size_t n, int workers, const std::function<void(int, std::size_t, std::size_t)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n < 2) {
        if (n > 0) fn(0, 0, n);
        return;
    }
    const std::size_t w = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t i = 0; i < w; ++i) {
        const std::size_t b = n * i / w;
        const std::size_t e = n * (i + 1) / w;
        pool.emplace_back([&fn, i, b, e] { fn(static_cast<int>(i), b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dgs
