#pragma once

#include <cstdint>
#include <vector>

#include "glai/linalg.hpp"

namespace glai {

// Layer dimensions (n_0, n_1, ..., n_L, n_{L+1}); L hidden layers.
struct Architecture {
    std::vector<std::size_t> dims;

    Architecture() = default;
    Architecture(std::initializer_list<std::size_t> d) : dims(d) {}
    explicit Architecture(std::vector<std::size_t> d) : dims(std::move(d)) {}

    std::size_t hidden_layers() const { return dims.size() - 2; }
    std::size_t input_dim() const { return dims.front(); }
    std::size_t output_dim() const { return dims.back(); }

    // Throws ConfigError unless len >= 2 and every dim >= 1.
    void validate() const;

    bool operator==(const Architecture&) const = default;
};

struct MlpModel {
    Architecture arch;
    std::vector<Matrix> weights;  // W_l: dims[l+1] x dims[l], l = 0..L
    std::vector<Vector> biases;   // b_l: dims[l+1]
    std::uint64_t seed = 0;

    bool operator==(const MlpModel&) const = default;
};

// Per-layer binary activation vectors act_l, length dims[l], for l = 1..L.
struct ActivationPattern {
    std::vector<Mask> layers;

    bool operator==(const ActivationPattern&) const = default;
};

struct ForwardTrace {
    Vector output;
    ActivationPattern pattern;
    std::vector<Vector> pre_activations;  // hidden pre-activations f_{l-1}(x), one per hidden layer
};

// He-style init: W_l uniform over [-s, s) with s = sqrt(2 / fan_in), biases zero.
MlpModel new_mlp(const Architecture& arch, std::uint64_t seed);

Vector forward(const MlpModel& m, const Vector& x);

ForwardTrace forward_trace(const MlpModel& m, const Vector& x);

// Evaluates the fixed piecewise-linear map of the given activation pattern:
// each hidden relu is replaced by the pattern's 0/1 gate. With the pattern
// traced from x this reproduces forward(m, x).
Vector pattern_forward(const MlpModel& m, const ActivationPattern& pattern, const Vector& x);

// (n_0, round(rho * n_1), ..., round(rho * n_L), n_{L+1}) with round-half-up
// and hidden dims clamped to >= 1. Throws BottleneckError when
// round(rho * n_L) < n_{L+1}.
Architecture reduce_arch(const Architecture& arch, double rho);

}  // namespace glai
