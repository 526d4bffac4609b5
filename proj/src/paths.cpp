#include "glai/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glai/errors.hpp"

namespace glai {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw CountOverflowError("path count exceeds 64 bits");
    }
    return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw CountOverflowError("path count exceeds 64 bits");
    }
    return out;
}

void check_output_index(const Architecture& arch, std::size_t output) {
    if (output >= arch.output_dim()) {
        throw DimensionError("output index " + std::to_string(output) + " out of range");
    }
}

void check_path_shape(const Architecture& arch, const Path& pi) {
    const std::size_t hidden = arch.hidden_layers();
    if (pi.output < 0 || static_cast<std::size_t>(pi.output) >= arch.output_dim()) {
        throw DimensionError("path output index out of range");
    }
    if (pi.is_bias()) {
        const std::size_t k = static_cast<std::size_t>(pi.bias_layer());
        if (k < 1 || k > hidden + 1) {
            throw DimensionError("bias origin layer out of range");
        }
        if (pi.hidden.size() != hidden + 1 - k) {
            throw DimensionError("bias path traverses the wrong number of layers");
        }
    } else {
        if (static_cast<std::size_t>(pi.origin) >= arch.input_dim()) {
            throw DimensionError("path input coordinate out of range");
        }
        if (pi.hidden.size() != hidden) {
            throw DimensionError("input path traverses the wrong number of layers");
        }
    }
    for (std::size_t i = 0; i < pi.hidden.size(); ++i) {
        const std::size_t layer = pi.first_layer() + i;
        if (pi.hidden[i] < 0 || static_cast<std::size_t>(pi.hidden[i]) >= arch.dims[layer]) {
            throw DimensionError("hidden index out of range at layer " + std::to_string(layer));
        }
    }
}

}  // namespace

PathCount path_count(const Architecture& arch) {
    arch.validate();
    const std::size_t hidden = arch.hidden_layers();
    PathCount out;

    std::uint64_t input_per_output = 1;
    for (std::size_t l = 0; l <= hidden; ++l) {
        input_per_output = checked_mul(input_per_output, arch.dims[l]);
    }
    out.input_origin = checked_mul(input_per_output, arch.output_dim());

    // bias feeding layer k contributes prod(n_k .. n_{L+1}) paths in total
    std::uint64_t bias_total = 0;
    for (std::size_t k = 1; k <= hidden + 1; ++k) {
        std::uint64_t term = 1;
        for (std::size_t l = k; l <= hidden + 1; ++l) {
            term = checked_mul(term, arch.dims[l]);
        }
        bias_total = checked_add(bias_total, term);
    }
    out.bias_origin = bias_total;
    out.total = checked_add(out.input_origin, out.bias_origin);
    out.per_output = out.total / arch.output_dim();
    return out;
}

void for_each_path(const Architecture& arch, std::size_t output,
                   const std::function<void(const Path&)>& fn) {
    arch.validate();
    check_output_index(arch, output);
    const std::size_t hidden = arch.hidden_layers();

    Path pi;
    pi.output = static_cast<int>(output);

    // odometer over hidden layers [first..L]
    auto emit_tuples = [&](std::size_t first) {
        const std::size_t len = hidden + 1 - first;
        pi.hidden.assign(len, 0);
        if (len == 0) {
            fn(pi);
            return;
        }
        while (true) {
            fn(pi);
            std::size_t d = len;
            while (d-- > 0) {
                const std::size_t layer = first + d;
                if (static_cast<std::size_t>(++pi.hidden[d]) < arch.dims[layer]) {
                    break;
                }
                pi.hidden[d] = 0;
                if (d == 0) {
                    return;
                }
            }
        }
    };

    for (std::size_t j = 0; j < arch.input_dim(); ++j) {
        pi.origin = static_cast<int>(j);
        emit_tuples(1);
    }
    for (std::size_t k = 1; k <= hidden + 1; ++k) {
        pi.origin = -static_cast<int>(k);
        emit_tuples(k);
    }
}

std::vector<Path> enumerate_paths(const Architecture& arch, std::size_t output) {
    std::vector<Path> out;
    for_each_path(arch, output, [&](const Path& pi) { out.push_back(pi); });
    return out;
}

double path_weight(const MlpModel& m, const Path& pi) {
    check_path_shape(m.arch, pi);
    const std::size_t hidden = m.arch.hidden_layers();
    if (pi.is_bias() && static_cast<std::size_t>(pi.bias_layer()) == hidden + 1) {
        return m.biases[hidden][static_cast<std::size_t>(pi.output)];
    }
    if (pi.hidden.empty()) {
        // L = 0: a direct input-to-output weight
        return m.weights[0](static_cast<std::size_t>(pi.output),
                            static_cast<std::size_t>(pi.origin));
    }
    double w;
    std::size_t layer;  // layer of the most recent node on the path
    std::size_t node;
    if (pi.is_bias()) {
        layer = static_cast<std::size_t>(pi.bias_layer());
        node = static_cast<std::size_t>(pi.hidden[0]);
        w = m.biases[layer - 1][node];
    } else {
        layer = 1;
        node = static_cast<std::size_t>(pi.hidden[0]);
        w = m.weights[0](node, static_cast<std::size_t>(pi.origin));
    }
    for (std::size_t i = 1; i < pi.hidden.size(); ++i) {
        const std::size_t next = static_cast<std::size_t>(pi.hidden[i]);
        w *= m.weights[layer](next, node);
        node = next;
        ++layer;
    }
    w *= m.weights[hidden](static_cast<std::size_t>(pi.output), node);
    return w;
}

bool path_indicator(const ActivationPattern& pattern, const Path& pi) {
    const std::size_t first = pi.first_layer();
    for (std::size_t i = 0; i < pi.hidden.size(); ++i) {
        if (!pattern.layers[first - 1 + i][static_cast<std::size_t>(pi.hidden[i])]) {
            return false;
        }
    }
    return true;
}

double path_contribution(const Vector& x, const ActivationPattern& pattern, const Path& pi) {
    if (!path_indicator(pattern, pi)) {
        return 0.0;
    }
    return pi.is_bias() ? 1.0 : x[static_cast<std::size_t>(pi.origin)];
}

static void check_omega(const OmegaSet& omega) {
    if (omega.samples.empty()) {
        throw DimensionError("Omega must not be empty");
    }
}

double path_norm(const MlpModel& m, const Path& pi, const OmegaSet& omega) {
    check_omega(omega);
    check_path_shape(m.arch, pi);
    double acc = 0.0;
    for (const Vector& x : omega.samples) {
        const ActivationPattern pattern = forward_trace(m, x).pattern;
        if (path_indicator(pattern, pi)) {
            acc += pi.is_bias() ? 1.0 : std::abs(x[static_cast<std::size_t>(pi.origin)]);
        }
    }
    return acc / static_cast<double>(omega.samples.size());
}

double path_distance(const MlpModel& a, const MlpModel& b, const Path& pi, const OmegaSet& omega) {
    if (a.arch != b.arch) {
        throw DimensionError("path_distance needs models sharing one architecture");
    }
    check_omega(omega);
    check_path_shape(a.arch, pi);
    double acc = 0.0;
    for (const Vector& x : omega.samples) {
        const bool ind_a = path_indicator(forward_trace(a, x).pattern, pi);
        const bool ind_b = path_indicator(forward_trace(b, x).pattern, pi);
        if (ind_a != ind_b) {
            acc += pi.is_bias() ? 1.0 : std::abs(x[static_cast<std::size_t>(pi.origin)]);
        }
    }
    return acc / static_cast<double>(omega.samples.size());
}

double path_pair_distance(const MlpModel& m, const Path& a, const Path& b, const OmegaSet& omega) {
    check_omega(omega);
    check_path_shape(m.arch, a);
    check_path_shape(m.arch, b);
    if (a.origin != b.origin) {
        throw ConfigError("path pair distance is defined only for paths sharing an origin");
    }
    double acc = 0.0;
    for (const Vector& x : omega.samples) {
        const ActivationPattern pattern = forward_trace(m, x).pattern;
        if (path_indicator(pattern, a) != path_indicator(pattern, b)) {
            acc += a.is_bias() ? 1.0 : std::abs(x[static_cast<std::size_t>(a.origin)]);
        }
    }
    return acc / static_cast<double>(omega.samples.size());
}

double structural_metric(const MlpModel& prev, const MlpModel& curr, const OmegaSet& omega) {
    if (prev.arch != curr.arch) {
        throw DimensionError("structural_metric needs models sharing one architecture");
    }
    check_omega(omega);
    const Architecture& arch = prev.arch;
    const std::size_t hidden = arch.hidden_layers();
    const double total_paths = static_cast<double>(path_count(arch).total);
    const double n_out = static_cast<double>(arch.output_dim());

    double acc = 0.0;
    std::vector<double> na(hidden), nb(hidden), nab(hidden);
    for (const Vector& x : omega.samples) {
        const ActivationPattern pat_a = forward_trace(prev, x).pattern;
        const ActivationPattern pat_b = forward_trace(curr, x).pattern;
        for (std::size_t l = 0; l < hidden; ++l) {
            double ca = 0.0, cb = 0.0, cab = 0.0;
            const Mask& ma = pat_a.layers[l];
            const Mask& mb = pat_b.layers[l];
            for (std::size_t i = 0; i < ma.size(); ++i) {
                ca += ma[i];
                cb += mb[i];
                cab += static_cast<double>(ma[i] & mb[i]);
            }
            na[l] = ca;
            nb[l] = cb;
            nab[l] = cab;
        }
        // suffix products over layers k..L give the tuple counts per origin
        double sum_abs_x = 0.0;
        for (double v : x) sum_abs_x += std::abs(v);

        double prod_a = 1.0, prod_b = 1.0, prod_ab = 1.0;
        double bias_terms = 0.0;
        double input_delta = 0.0;
        for (std::size_t k = hidden; k >= 1; --k) {
            prod_a *= na[k - 1];
            prod_b *= nb[k - 1];
            prod_ab *= nab[k - 1];
            const double delta_k = prod_a + prod_b - 2.0 * prod_ab;
            bias_terms += delta_k;
            if (k == 1) {
                input_delta = delta_k;
            }
        }
        acc += n_out * (input_delta * sum_abs_x + bias_terms);
    }
    return acc / (total_paths * static_cast<double>(omega.samples.size()));
}

ConvergenceResult convergence_monitor(const std::vector<double>& history,
                                      const ConvergenceRule& rule) {
    if (history.empty()) {
        throw ConfigError("convergence_monitor needs a non-empty history");
    }
    if (!(rule.rel_threshold > 0.0) || rule.window < 1) {
        throw ConfigError("convergence rule needs rel_threshold > 0 and window >= 1");
    }
    const double m1 = history.front();
    if (m1 == 0.0) {
        return {true, 1};
    }
    for (std::size_t t = rule.window; t <= history.size(); ++t) {
        double worst = 0.0;
        for (std::size_t i = t - rule.window; i < t; ++i) {
            worst = std::max(worst, history[i] / m1);
        }
        if (worst <= rule.rel_threshold) {
            return {true, t};
        }
    }
    return {false, 0};
}

}  // namespace glai
