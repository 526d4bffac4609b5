#include "glai/linalg.hpp"

#include <cmath>
#include <string>

#include "glai/errors.hpp"

namespace glai {

double Rng::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * unit();
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = unit();
    } while (u1 <= 0.0);
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::size_t Rng::next_below(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

Vector mat_vec(const Matrix& m, const Vector& v) {
    if (m.cols != v.size()) {
        throw DimensionError("mat_vec: matrix has " + std::to_string(m.cols) +
                             " columns but vector has length " + std::to_string(v.size()));
    }
    Vector out(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            acc += row[c] * v[c];
        }
        out[r] = acc;
    }
    return out;
}

Vector relu(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] > 0.0 ? v[i] : 0.0;
    }
    return out;
}

Mask relu_mask(const Vector& v) {
    Mask out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] > 0.0 ? 1 : 0;
    }
    return out;
}

Vector apply_mask(const Mask& mask, const Vector& v) {
    if (mask.size() != v.size()) {
        throw DimensionError("apply_mask: mask length " + std::to_string(mask.size()) +
                             " vs vector length " + std::to_string(v.size()));
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = mask[i] ? v[i] : 0.0;
    }
    return out;
}

Matrix rand_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
    if (!(scale > 0.0)) {
        throw ConfigError("rand_matrix: scale must be positive");
    }
    Matrix m(rows, cols);
    for (double& x : m.data) {
        x = rng.uniform(-scale, scale);
    }
    return m;
}

}  // namespace glai
