#include "glai/mlp.hpp"

#include <cmath>
#include <string>

#include "glai/errors.hpp"

namespace glai {

void Architecture::validate() const {
    if (dims.size() < 2) {
        throw ConfigError("architecture needs at least input and output dims, got " +
                          std::to_string(dims.size()));
    }
    for (std::size_t d : dims) {
        if (d == 0) {
            throw ConfigError("architecture dims must all be >= 1");
        }
    }
}

MlpModel new_mlp(const Architecture& arch, std::uint64_t seed) {
    arch.validate();
    MlpModel m;
    m.arch = arch;
    m.seed = seed;
    Rng rng(seed);
    const std::size_t layers = arch.dims.size() - 1;
    m.weights.reserve(layers);
    m.biases.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t fan_in = arch.dims[l];
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        m.weights.push_back(rand_matrix(rng, arch.dims[l + 1], arch.dims[l], scale));
        m.biases.emplace_back(arch.dims[l + 1], 0.0);
    }
    return m;
}

static void check_input_dim(const MlpModel& m, const Vector& x) {
    if (x.size() != m.arch.input_dim()) {
        throw DimensionError("input has length " + std::to_string(x.size()) +
                             " but the model expects " + std::to_string(m.arch.input_dim()));
    }
}

Vector forward(const MlpModel& m, const Vector& x) {
    check_input_dim(m, x);
    const std::size_t last = m.weights.size() - 1;
    Vector h = x;
    for (std::size_t l = 0; l <= last; ++l) {
        Vector z = mat_vec(m.weights[l], h);
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] += m.biases[l][i];
        }
        if (l < last) {
            h = relu(z);
        } else {
            h = std::move(z);
        }
    }
    return h;
}

ForwardTrace forward_trace(const MlpModel& m, const Vector& x) {
    check_input_dim(m, x);
    ForwardTrace trace;
    const std::size_t last = m.weights.size() - 1;
    Vector h = x;
    for (std::size_t l = 0; l <= last; ++l) {
        Vector z = mat_vec(m.weights[l], h);
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] += m.biases[l][i];
        }
        if (l < last) {
            trace.pattern.layers.push_back(relu_mask(z));
            h = relu(z);
            trace.pre_activations.push_back(std::move(z));
        } else {
            trace.output = std::move(z);
        }
    }
    return trace;
}

Vector pattern_forward(const MlpModel& m, const ActivationPattern& pattern, const Vector& x) {
    check_input_dim(m, x);
    const std::size_t hidden = m.arch.hidden_layers();
    if (pattern.layers.size() != hidden) {
        throw DimensionError("pattern has " + std::to_string(pattern.layers.size()) +
                             " layers, model has " + std::to_string(hidden));
    }
    const std::size_t last = m.weights.size() - 1;
    Vector h = x;
    for (std::size_t l = 0; l <= last; ++l) {
        Vector z = mat_vec(m.weights[l], h);
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] += m.biases[l][i];
        }
        if (l < last) {
            h = apply_mask(pattern.layers[l], z);
        } else {
            h = std::move(z);
        }
    }
    return h;
}

Architecture reduce_arch(const Architecture& arch, double rho) {
    arch.validate();
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ConfigError("rho must lie in (0, 1), got " + std::to_string(rho));
    }
    Architecture reduced;
    reduced.dims = arch.dims;
    const std::size_t hidden = arch.hidden_layers();
    std::size_t last_rounded = 0;
    for (std::size_t l = 1; l <= hidden; ++l) {
        const double scaled = rho * static_cast<double>(arch.dims[l]);
        auto rounded = static_cast<std::size_t>(std::floor(scaled + 0.5));
        if (l == hidden) {
            last_rounded = rounded;
        }
        reduced.dims[l] = rounded < 1 ? 1 : rounded;
    }
    if (hidden >= 1 && last_rounded < arch.output_dim()) {
        throw BottleneckError("round(rho * n_L) = " + std::to_string(last_rounded) +
                              " is below the output width " + std::to_string(arch.output_dim()));
    }
    return reduced;
}

}  // namespace glai
