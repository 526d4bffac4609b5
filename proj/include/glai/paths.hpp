#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "glai/mlp.hpp"

namespace glai {

// A chain of one neuron index per layer from an origin to an output neuron.
// origin >= 0 names an input coordinate; origin < 0 encodes a bias unit
// feeding layer k = -origin, k in [1, L+1]. Input-origin paths traverse
// hidden layers 1..L; bias-origin paths traverse layers k..L (none when
// k = L+1, the output-bias path).
struct Path {
    int origin = 0;
    std::vector<int> hidden;
    int output = 0;

    bool is_bias() const { return origin < 0; }
    int bias_layer() const { return -origin; }
    std::size_t first_layer() const { return is_bias() ? static_cast<std::size_t>(-origin) : 1; }

    bool operator==(const Path&) const = default;
};

struct PathCount {
    std::uint64_t per_output = 0;
    std::uint64_t total = 0;
    std::uint64_t input_origin = 0;  // across all outputs
    std::uint64_t bias_origin = 0;
};

// Closed-form counts of all nonzero-capable paths:
// total = n_{L+1} * prod(n_0..n_L) + sum_{k=1}^{L+1} prod(n_k..n_{L+1}).
// Throws CountOverflowError when the total exceeds 64 bits.
PathCount path_count(const Architecture& arch);

// Yields every path ending at `output` exactly once, in canonical order:
// input origins first (ascending coordinate), then bias origins by layer,
// hidden indices lexicographic within each origin.
void for_each_path(const Architecture& arch, std::size_t output,
                   const std::function<void(const Path&)>& fn);

std::vector<Path> enumerate_paths(const Architecture& arch, std::size_t output);

// Product of the traversed weights; bias-origin paths start from the bias
// entry at their first layer.
double path_weight(const MlpModel& m, const Path& pi);

// 1 iff every traversed hidden neuron is active under the pattern.
bool path_indicator(const ActivationPattern& pattern, const Path& pi);

// The origin coordinate of x (1 for bias origins) gated by the indicator.
double path_contribution(const Vector& x, const ActivationPattern& pattern, const Path& pi);

// Reference set over which norms, distances and m_t are averaged.
struct OmegaSet {
    std::vector<Vector> samples;
};

// ||pi||_1 = mean over Omega of |c_pi(x)|.
double path_norm(const MlpModel& m, const Path& pi, const OmegaSet& omega);

// d over two weight snapshots of the same architecture: the mean of the
// origin magnitude over the samples where the path's indicator differs.
double path_distance(const MlpModel& a, const MlpModel& b, const Path& pi, const OmegaSet& omega);

// Distance between two paths of one model. Defined only for paths sharing
// the same origin; cross-origin pairs are rejected.
double path_pair_distance(const MlpModel& m, const Path& a, const Path& b, const OmegaSet& omega);

// m_t: mean path distance between consecutive snapshots, averaged over every
// path of the architecture. Closed form over per-layer activation counts;
// algebraically identical to brute-force enumeration.
double structural_metric(const MlpModel& prev, const MlpModel& curr, const OmegaSet& omega);

struct ConvergenceRule {
    std::size_t window = 3;
    double rel_threshold = 0.1;
};

struct ConvergenceResult {
    bool converged = false;
    std::size_t epoch = 0;  // 1-based index into the history
};

// First epoch t where every one of the last `window` values satisfies
// m / m_1 <= rel_threshold. A zero first value converges at epoch 1.
ConvergenceResult convergence_monitor(const std::vector<double>& history,
                                      const ConvergenceRule& rule);

}  // namespace glai
