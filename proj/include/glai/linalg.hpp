#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace glai {

using Vector = std::vector<double>;
using Mask = std::vector<std::uint8_t>;  // binary activation vector

// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Matrix&) const = default;
};

// Seeded generator with hand-rolled distribution mappings, so that equal
// seeds give bit-identical draw sequences on every platform. Single owner;
// everything else in this library is immutable after construction.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform draw from [0, 1) with 53 random bits.
    double unit();

    // Uniform draw from [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller; keeps the paired draw as a spare.
    double normal();

    // Uniform integer in [0, n), n > 0.
    std::size_t next_below(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[next_below(i)]);
        }
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Fixed mixing function for deriving independent seed streams.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Vector mat_vec(const Matrix& m, const Vector& v);
Vector relu(const Vector& v);

// 1 where the entry is strictly positive, else 0 (ties at 0 are inactive).
Mask relu_mask(const Vector& v);

// Componentwise mask * v; with the mask of v this reproduces relu(v) exactly.
Vector apply_mask(const Mask& mask, const Vector& v);

// Entries i.i.d. uniform over [-scale, scale), scale > 0.
Matrix rand_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale);

}  // namespace glai
