#pragma once

#include "dgs/field.hpp"
#include "dgs/scene.hpp"

#include <deque>
#include <numeric>
#include <random>
#include <string_view>

namespace dgs {

/// Density-control parameters for one training phase.
struct DensityParams {
    int densify_interval = 500;           // P_di
    int opacity_reset_interval = 10000;   // P_oi
    double grad_threshold = 0.0004;       // tau_pos, on NDC-scaled screen gradients

    bool operator==(const DensityParams&) const = default;
};

struct CompensationConfig {
    double sigma = 0.01;
    double beta = 1.0;
};

struct ScheduleConfig {
    DensityParams phase1{500, 10000, 0.0004};
    DensityParams phase2{200, 3000, 0.0002};
    double psnr_trigger = 20.0;
    int loss_decline_window = 500;
    int sh_phase1_max_degree = 0;
    int sh_growth_interval = 1000;
    CompensationConfig compensation;
    double lambda_dssim = 0.1;
    int max_iters = 30000;

    int densify_from = 500;
    int densify_until = 15000;
    double clone_extent_fraction = 0.01;
    double split_factor = 1.6;
    double prune_opacity = 0.005;
    double opacity_reset_value = 0.01;
    bool curriculum = true;
    // Ablation presets deliberately break the phase-two-is-tighter ordering.
    bool allow_non_tightening = false;

    const DensityParams& density(Phase p) const { return p == Phase::PhaseOne ? phase1 : phase2; }

    bool tightens() const {
        return phase2.densify_interval < phase1.densify_interval &&
               phase2.opacity_reset_interval < phase1.opacity_reset_interval &&
               phase2.grad_threshold < phase1.grad_threshold;
    }

    void validate() const {
        auto positive = [](const DensityParams& d) {
            return d.densify_interval > 0 && d.opacity_reset_interval > 0 && d.grad_threshold > 0;
        };
        if (!positive(phase1) || !positive(phase2)) throw Error("schedule: density parameters must be positive");
        if (!allow_non_tightening && !tightens())
            throw Error("schedule: phase two must use a shorter P_di, shorter P_oi and lower tau_pos than phase one");
        if (loss_decline_window < 2) throw Error("schedule: loss_decline_window must be >= 2");
        if (sh_growth_interval < 1) throw Error("schedule: sh_growth_interval must be >= 1");
        if (sh_phase1_max_degree < 0 || sh_phase1_max_degree > kMaxShDegree)
            throw Error("schedule: sh_phase1_max_degree out of range");
        if (lambda_dssim < 0 || lambda_dssim > 1) throw Error("schedule: lambda_dssim must lie in [0, 1]");
        if (max_iters < 0) throw Error("schedule: max_iters must be non-negative");
    }

    /// "two_phase": two-phase schedule. "default": the stock splatting parameters in both phases.
    /// "inverse": the two phase parameter sets swapped.
    static ScheduleConfig preset(std::string_view name) {
        ScheduleConfig c;
        if (name == "two_phase") return c;
        if (name == "default") {
            c.phase1 = c.phase2 = DensityParams{100, 3000, 0.0002};
            c.allow_non_tightening = true;
            return c;
        }
        if (name == "inverse") {
            std::swap(c.phase1, c.phase2);
            c.allow_non_tightening = true;
            return c;
        }
        throw Error("unknown schedule preset '" + std::string(name) + "'");
    }
};

/// Fixed-capacity FIFO of the most recent values.
template <typename T> class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity = 1) : cap_(std::max<std::size_t>(1, capacity)) {}
    void push(T v) {
        if (buf_.size() == cap_) buf_.pop_front();
        buf_.push_back(v);
    }
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return cap_; }
    bool full() const { return buf_.size() == cap_; }
    std::vector<T> values() const { return {buf_.begin(), buf_.end()}; }
    void clear() { buf_.clear(); }

private:
    std::size_t cap_;
    std::deque<T> buf_;
};

struct TrainState {
    int iteration = 0;
    Phase phase = Phase::PhaseOne;
    int phase2_start = -1;  // iteration at which PhaseTwo was entered
    int transitions = 0;
    RingBuffer<double> loss_history;
    RingBuffer<double> psnr_history;
    std::uint64_t rng_seed = 0;

    TrainState() = default;
    TrainState(std::size_t window, std::uint64_t seed) : loss_history(window), psnr_history(window), rng_seed(seed) {}
};

inline double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope of v against its index.
inline double regression_slope(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0;
    const double xm = (static_cast<double>(n) - 1) / 2.0;
    double ym = 0;
    for (double y : v) ym += y;
    ym /= static_cast<double>(n);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - xm;
        num += dx * (v[i] - ym);
        den += dx * dx;
    }
    return num / den;
}

/// Latches PhaseTwo once the window's median PSNR exceeds the trigger and the loss trend is
/// negative. Returns the (possibly updated) phase.
inline Phase check_phase_transition(TrainState& state, const ScheduleConfig& cfg) {
    if (state.phase == Phase::PhaseTwo) return state.phase;
    const std::size_t window = static_cast<std::size_t>(cfg.loss_decline_window);
    if (state.psnr_history.size() < window || state.loss_history.size() < window) return state.phase;
    const auto psnr = state.psnr_history.values();
    const auto loss = state.loss_history.values();
    const double med = median(std::vector<double>(psnr.end() - window, psnr.end()));
    const double slope = regression_slope(std::vector<double>(loss.end() - window, loss.end()));
    if (med > cfg.psnr_trigger && slope < 0) {
        state.phase = Phase::PhaseTwo;
        state.phase2_start = state.iteration;
        ++state.transitions;
    }
    return state.phase;
}

/// Capped growth in PhaseOne; one degree per interval after the transition, up to 3.
inline int sh_degree_schedule(const TrainState& state, const ScheduleConfig& cfg) {
    const int cap = std::clamp(cfg.sh_phase1_max_degree, 0, kMaxShDegree);
    const int interval = std::max(1, cfg.sh_growth_interval);
    if (state.phase == Phase::PhaseOne) return std::min(cap, state.iteration / interval);
    const int at_transition = std::min(cap, std::max(0, state.phase2_start) / interval);
    const int grown = at_transition + std::max(0, state.iteration - state.phase2_start) / interval;
    return std::min(kMaxShDegree, grown);
}

/// Weights of the kinematic-state distance used by the curriculum tour.
struct CurriculumWeights {
    double translation = 1.0;
    double rotation = 1.0;
    double jaw = 1.0;
};

inline double quat_geodesic(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
    const double d = std::abs(a.normalized().dot(b.normalized()));
    return 2.0 * std::acos(std::min(1.0, d));
}

inline double kinematic_distance(const KinematicState& a, const KinematicState& b, const CurriculumWeights& w) {
    return w.translation * (a.translation - b.translation).norm() + w.rotation * quat_geodesic(a.rotation, b.rotation) +
           w.jaw * std::abs(a.jaw_angle - b.jaw_angle);
}

/// Greedy nearest-neighbour tour through kinematic states, starting from the state farthest
/// from the centroid. Ties resolve to the lowest index.
inline std::vector<int> kinematic_tour(const std::vector<KinematicState>& states, const CurriculumWeights& w) {
    const int n = static_cast<int>(states.size());
    if (n == 0) return {};
    KinematicState centroid;
    centroid.translation.setZero();
    centroid.rotation.setZero();
    for (const auto& s : states) {
        centroid.translation += s.translation;
        Eigen::Vector4d q = s.rotation.normalized();
        if (q.dot(states.front().rotation) < 0) q = -q;
        centroid.rotation += q;
        centroid.jaw_angle += s.jaw_angle;
    }
    centroid.translation /= n;
    centroid.rotation = centroid.rotation.norm() > 0 ? Eigen::Vector4d(centroid.rotation.normalized())
                                                     : Eigen::Vector4d(1, 0, 0, 0);
    centroid.jaw_angle /= n;
    int start = 0;
    double best = -1;
    for (int i = 0; i < n; ++i) {
        const double d = kinematic_distance(states[i], centroid, w);
        if (d > best + 1e-12) best = d, start = i;
    }
    std::vector<int> order{start};
    std::vector<bool> used(n, false);
    used[start] = true;
    for (int k = 1; k < n; ++k) {
        const int cur = order.back();
        int next = -1;
        double nd = 0;
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double d = kinematic_distance(states[cur], states[i], w);
            if (next < 0 || d < nd) next = i, nd = d;
        }
        used[next] = true;
        order.push_back(next);
    }
    return order;
}

/// PhaseOne: the kinematic tour. PhaseTwo: a uniform random permutation drawn from `rng`.
inline std::vector<int> curriculum_order(const std::vector<KinematicState>& states, Phase phase,
                                         const CurriculumWeights& w, std::mt19937_64& rng) {
    if (states.empty()) throw Error("curriculum_order: no frames");
    if (phase == Phase::PhaseOne) return kinematic_tour(states, w);
    std::vector<int> order(states.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(order[i], order[pick(rng)]);
    }
    return order;
}

/// gamma(p) + N(0, sigma^2) * beta * t_phase, noise drawn per component. PhaseTwo returns the
/// input untouched and consumes no randomness.
template <typename T>
VecX<T> apply_compensation(const VecX<T>& p_encoded, Phase phase, const CompensationConfig& cfg, std::mt19937_64& rng) {
    if (phase == Phase::PhaseTwo || cfg.beta == 0.0 || cfg.sigma == 0.0) return p_encoded;
    std::normal_distribution<double> nd(0.0, cfg.sigma);
    VecX<T> out = p_encoded;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += static_cast<T>(nd(rng) * cfg.beta);
    return out;
}

}  // namespace dgs
