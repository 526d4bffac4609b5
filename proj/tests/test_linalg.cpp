#include <doctest.h>

#include <cmath>

#include "glai/errors.hpp"
#include "glai/linalg.hpp"

using namespace glai;

TEST_SUITE("linalg") {

TEST_CASE("mat_vec identity and zero") {
    Matrix eye(2, 2);
    eye(0, 0) = 1.0;
    eye(1, 1) = 1.0;
    CHECK(mat_vec(eye, {3.0, 4.0}) == Vector{3.0, 4.0});

    Matrix zeros(2, 3);
    CHECK(mat_vec(zeros, {1.0, 1.0, 1.0}) == Vector{0.0, 0.0});
}

TEST_CASE("mat_vec hand-expanded 2x2 product") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 3.0;
    m(1, 1) = 4.0;
    CHECK(mat_vec(m, {1.0, 1.0}) == Vector{3.0, 7.0});
}

TEST_CASE("mat_vec rejects dimension mismatch") {
    Matrix m(2, 3);
    CHECK_THROWS_AS(mat_vec(m, {1.0, 2.0}), DimensionError);
}

TEST_CASE("mat_vec is linear") {
    Rng rng(11);
    Matrix m = rand_matrix(rng, 4, 5, 1.0);
    Vector u(5), v(5);
    for (int i = 0; i < 5; ++i) {
        u[i] = rng.uniform(-1.0, 1.0);
        v[i] = rng.uniform(-1.0, 1.0);
    }
    const double a = 0.7, b = -1.3;
    Vector combo(5);
    for (int i = 0; i < 5; ++i) combo[i] = a * u[i] + b * v[i];

    const Vector lhs = mat_vec(m, combo);
    const Vector mu = mat_vec(m, u);
    const Vector mv = mat_vec(m, v);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        CHECK(std::abs(lhs[i] - (a * mu[i] + b * mv[i])) <= 1e-12);
    }
}

TEST_CASE("relu definition cases") {
    CHECK(relu({-1.0, 0.0, 2.0}) == Vector{0.0, 0.0, 2.0});
    CHECK(relu({0.0, 0.0, 0.0}) == Vector{0.0, 0.0, 0.0});
    CHECK(relu({5.0}) == Vector{5.0});
}

TEST_CASE("relu_mask strict positivity") {
    CHECK(relu_mask({-1.0, 0.0, 2.0}) == Mask{0, 0, 1});
    CHECK(relu_mask({3.0, 4.0}) == Mask{1, 1});
    CHECK(relu_mask({-0.0}) == Mask{0});
}

TEST_CASE("mask times value reproduces relu exactly") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Vector v(7);
        for (double& x : v) x = rng.uniform(-2.0, 2.0);
        v[static_cast<std::size_t>(trial) % v.size()] = 0.0;
        CHECK(apply_mask(relu_mask(v), v) == relu(v));
    }
}

TEST_CASE("rand_matrix determinism and seed sensitivity") {
    Rng a(0);
    Rng b(0);
    const Matrix ma = rand_matrix(a, 2, 2, 0.5);
    const Matrix mb = rand_matrix(b, 2, 2, 0.5);
    CHECK(ma == mb);

    Rng c(1);
    const Matrix mc = rand_matrix(c, 2, 2, 0.5);
    CHECK(ma != mc);

    Rng d(0);
    CHECK_THROWS_AS(rand_matrix(d, 2, 2, 0.0), ConfigError);
}

TEST_CASE("rand_matrix entries stay inside the scale") {
    Rng rng(42);
    const Matrix m = rand_matrix(rng, 8, 8, 0.25);
    for (double x : m.data) {
        CHECK(std::abs(x) <= 0.25);
    }
}

TEST_CASE("seeded normal stream is reproducible") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.normal() == b.normal());
    }
}

TEST_CASE("shuffle is deterministic per seed") {
    std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> v2 = v1;
    Rng a(9), b(9);
    a.shuffle(v1);
    b.shuffle(v2);
    CHECK(v1 == v2);
}

}  // TEST_SUITE
