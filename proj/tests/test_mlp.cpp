#include <doctest.h>

#include <cmath>
#include <vector>

#include "glai/dataset.hpp"
#include "glai/errors.hpp"
#include "glai/mlp.hpp"
#include "glai/training.hpp"

using namespace glai;

namespace {

// flat parameter view: weights then biases, layer by layer
std::vector<double*> param_refs(MlpModel& m) {
    std::vector<double*> refs;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (double& w : m.weights[l].data) refs.push_back(&w);
        for (double& b : m.biases[l]) refs.push_back(&b);
    }
    return refs;
}

MlpModel zeroed(const Architecture& arch) {
    MlpModel m = new_mlp(arch, 0);
    for (auto& w : m.weights) {
        std::fill(w.data.begin(), w.data.end(), 0.0);
    }
    return m;
}

Dataset tiny_classification(std::size_t n, std::size_t input_dim, std::size_t k,
                            std::uint64_t seed) {
    Dataset ds;
    ds.task = Task::classification;
    ds.input_dim = input_dim;
    ds.num_classes = k;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(input_dim);
        for (double& v : x) v = rng.normal();
        ds.inputs.push_back(std::move(x));
        ds.class_targets.push_back(static_cast<int>(i % k));
    }
    return ds;
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("new_mlp determinism and shapes") {
    const Architecture arch{2, 3, 2};
    CHECK(new_mlp(arch, 7) == new_mlp(arch, 7));

    CHECK_THROWS_AS(new_mlp(Architecture{2}, 0), ConfigError);

    const MlpModel m = new_mlp(Architecture{4, 6, 3}, 1);
    CHECK(m.weights[0].rows == 6);
    CHECK(m.weights[0].cols == 4);
    CHECK(m.weights[1].rows == 3);
    CHECK(m.weights[1].cols == 6);
    CHECK(m.biases[0].size() == 6);
    CHECK(m.biases[1].size() == 3);
}

TEST_CASE("forward: zero parameters give zero output") {
    const MlpModel m = zeroed(Architecture{3, 4, 2});
    CHECK(forward(m, {1.0, -2.0, 0.5}) == Vector{0.0, 0.0});
}

TEST_CASE("forward: single affine layer applies no relu") {
    MlpModel m = zeroed(Architecture{2, 2});
    m.weights[0](0, 0) = -1.0;
    m.weights[0](1, 1) = 2.0;
    m.biases[0] = {0.5, -0.5};
    CHECK(forward(m, {3.0, 1.0}) == Vector{-2.5, 1.5});
}

TEST_CASE("forward matches a straight-line re-evaluation") {
    const MlpModel m = new_mlp(Architecture{3, 4, 2}, 99);
    const Vector x{0.3, -1.2, 0.7};

    // independent layer-by-layer evaluation with scalar loops
    Vector h = x;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        Vector z(m.weights[l].rows, 0.0);
        for (std::size_t r = 0; r < m.weights[l].rows; ++r) {
            double acc = m.biases[l][r];
            for (std::size_t c = 0; c < m.weights[l].cols; ++c) {
                acc += m.weights[l](r, c) * h[c];
            }
            z[r] = acc;
        }
        if (l + 1 < m.weights.size()) {
            for (double& v : z) v = v > 0.0 ? v : 0.0;
        }
        h = z;
    }

    const Vector got = forward(m, x);
    REQUIRE(got.size() == h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        CHECK(got[i] == doctest::Approx(h[i]).epsilon(1e-14));
    }
}

TEST_CASE("forward_trace: dead first layer") {
    MlpModel m = zeroed(Architecture{2, 3, 2});
    m.biases[0] = {-1.0, -2.0, -3.0};
    m.biases[1] = {0.25, -0.75};
    const ForwardTrace trace = forward_trace(m, {5.0, 5.0});
    CHECK(trace.pattern.layers[0] == Mask{0, 0, 0});
    CHECK(trace.output == Vector{0.25, -0.75});  // affine image of the zero vector
}

TEST_CASE("forward_trace output is bit-exact forward") {
    const MlpModel m = new_mlp(Architecture{2, 3, 2}, 5);
    const Vector x{0.1, -0.4};
    CHECK(forward_trace(m, x).output == forward(m, x));
}

TEST_CASE("forward_trace pattern equals recomputed relu masks") {
    const MlpModel m = new_mlp(Architecture{2, 3, 2}, 12);
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
        const Vector x{rng.normal(), rng.normal()};
        const ForwardTrace trace = forward_trace(m, x);
        REQUIRE(trace.pre_activations.size() == 1);
        CHECK(trace.pattern.layers[0] == relu_mask(trace.pre_activations[0]));
    }
}

TEST_CASE("relu equals its gated identity on traced pre-activations") {
    const MlpModel m = new_mlp(Architecture{3, 5, 4, 2}, 19);
    Rng rng(20);
    for (int t = 0; t < 20; ++t) {
        const Vector x{rng.normal(), rng.normal(), rng.normal()};
        const ForwardTrace trace = forward_trace(m, x);
        for (std::size_t l = 0; l < trace.pre_activations.size(); ++l) {
            CHECK(apply_mask(trace.pattern.layers[l], trace.pre_activations[l]) ==
                  relu(trace.pre_activations[l]));
        }
    }
}

TEST_CASE("pattern_forward: fully active region equals forward") {
    MlpModel m = zeroed(Architecture{2, 3, 2});
    for (auto& w : m.weights) {
        std::fill(w.data.begin(), w.data.end(), 0.5);
    }
    m.biases[0] = {1.0, 1.0, 1.0};  // keeps every hidden unit active for positive x
    ActivationPattern ones;
    ones.layers = {Mask{1, 1, 1}};
    const Vector x{0.5, 0.25};
    CHECK(pattern_forward(m, ones, x) == forward(m, x));
}

TEST_CASE("pattern_forward: all-zero pattern leaves only the output bias chain") {
    // hand expansion for (2,2,1): with every hidden gate shut the input and
    // the first bias never reach the output, so f = b_1
    const MlpModel m = new_mlp(Architecture{2, 2, 1}, 3);
    ActivationPattern zeros;
    zeros.layers = {Mask{0, 0}};
    const Vector out = pattern_forward(m, zeros, {1.5, -2.5});
    CHECK(out == Vector{m.biases[1][0]});
}

TEST_CASE("pattern_forward with the traced pattern reproduces forward") {
    Rng seeds(1000);
    for (int t = 0; t < 100; ++t) {
        const MlpModel m = new_mlp(Architecture{3, 4, 4, 2}, seeds.next_u64());
        Rng rng(seeds.next_u64());
        const Vector x{rng.normal(), rng.normal(), rng.normal()};
        const ForwardTrace trace = forward_trace(m, x);
        const Vector direct = forward(m, x);
        const Vector via_pattern = pattern_forward(m, trace.pattern, x);
        double inf = 0.0;
        for (double v : direct) inf = std::max(inf, std::abs(v));
        for (std::size_t i = 0; i < direct.size(); ++i) {
            CHECK(std::abs(via_pattern[i] - direct[i]) <= 1e-9 * (1.0 + inf));
        }
    }
}

TEST_CASE("region linearity: doubling a small step doubles the response") {
    const MlpModel m = new_mlp(Architecture{3, 5, 4, 2}, 21);
    Rng rng(22);
    int verified = 0;
    for (int t = 0; t < 50 && verified < 10; ++t) {
        Vector x{rng.normal(), rng.normal(), rng.normal()};
        Vector step{rng.normal(), rng.normal(), rng.normal()};
        for (double& s : step) s *= 1e-5;  // large enough to clear cancellation noise
        Vector x1 = x, x2 = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x1[i] += step[i];
            x2[i] += 2.0 * step[i];
        }
        const ActivationPattern p0 = forward_trace(m, x).pattern;
        if (forward_trace(m, x1).pattern != p0 || forward_trace(m, x2).pattern != p0) {
            continue;  // crossed a region boundary, resample
        }
        const Vector f0 = forward(m, x);
        const Vector f1 = forward(m, x1);
        const Vector f2 = forward(m, x2);
        for (std::size_t i = 0; i < f0.size(); ++i) {
            const double once = f1[i] - f0[i];
            const double twice = f2[i] - f0[i];
            CHECK(std::abs(twice - 2.0 * once) <= 1e-8 * (std::abs(twice) + 1e-12));
        }
        ++verified;
    }
    CHECK(verified >= 10);
}

TEST_CASE("train_epoch: vanishing learning rate leaves parameters in place") {
    MlpModel m = new_mlp(Architecture{2, 3, 2}, 4);
    const MlpModel before = m;
    const Dataset ds = tiny_classification(12, 2, 2, 5);
    TrainConfig cfg;
    cfg.learning_rate = 1e-300;
    cfg.weight_decay = 0.0;
    cfg.batch_size = 4;
    Rng rng(0);
    const double train_loss = train_epoch(m, ds, cfg, rng);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (std::size_t i = 0; i < m.weights[l].data.size(); ++i) {
            CHECK(std::abs(m.weights[l].data[i] - before.weights[l].data[i]) <= 1e-290);
        }
        for (std::size_t i = 0; i < m.biases[l].size(); ++i) {
            CHECK(std::abs(m.biases[l][i] - before.biases[l][i]) <= 1e-290);
        }
    }
    const EvalResult ev = evaluate(m, ds, cfg.loss);
    CHECK(train_loss == doctest::Approx(ev.loss).epsilon(1e-12));
}

TEST_CASE("train_epoch: one-sample squared-error step matches the closed form") {
    MlpModel m = zeroed(Architecture{2, 2});
    m.weights[0](0, 0) = 0.5;
    m.weights[0](0, 1) = -0.25;
    m.weights[0](1, 0) = 1.0;
    m.weights[0](1, 1) = 0.75;
    m.biases[0] = {0.1, -0.2};
    const Matrix w_before = m.weights[0];
    const Vector b_before = m.biases[0];

    Dataset ds;
    ds.task = Task::regression;
    ds.input_dim = 2;
    ds.inputs = {{1.0, 2.0}};
    ds.value_targets = {{0.5, -1.0}};

    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.weight_decay = 0.0;
    cfg.batch_size = 1;
    cfg.loss = LossKind::squared_error;
    Rng rng(0);
    train_epoch(m, ds, cfg, rng);

    // gradient of ||Wx + b - y||^2: dW = 2 r x^T, db = 2 r
    const Vector& x = ds.inputs[0];
    const Vector& y = ds.value_targets[0];
    Vector r(2);
    for (int i = 0; i < 2; ++i) {
        r[i] = w_before(i, 0) * x[0] + w_before(i, 1) * x[1] + b_before[i] - y[i];
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double expected = w_before(i, j) - cfg.learning_rate * 2.0 * r[i] * x[j];
            CHECK(m.weights[0](i, j) == doctest::Approx(expected).epsilon(1e-15));
        }
        CHECK(m.biases[0][i] ==
              doctest::Approx(b_before[i] - cfg.learning_rate * 2.0 * r[i]).epsilon(1e-15));
    }
}

TEST_CASE("train_epoch gradients match central finite differences") {
    const Architecture arch{2, 3, 2};
    const Dataset ds = tiny_classification(6, 2, 2, 31);

    MlpModel reference = new_mlp(arch, 8);

    // one full-batch step at unit rate recovers the mean-loss gradient
    MlpModel stepped = reference;
    TrainConfig cfg;
    cfg.learning_rate = 1.0;
    cfg.weight_decay = 0.0;
    cfg.batch_size = ds.size();
    Rng rng(0);
    train_epoch(stepped, ds, cfg, rng);

    std::vector<double*> ref_params = param_refs(reference);
    std::vector<double*> stepped_params = param_refs(stepped);

    MlpModel probe = reference;
    std::vector<double*> probe_params = param_refs(probe);
    const double eps = 1e-5;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < ref_params.size(); ++i) {
        const double analytic = *ref_params[i] - *stepped_params[i];  // lr = 1
        const double saved = *probe_params[i];
        *probe_params[i] = saved + eps;
        const double up = evaluate(probe, ds, cfg.loss).loss;
        *probe_params[i] = saved - eps;
        const double down = evaluate(probe, ds, cfg.loss).loss;
        *probe_params[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        max_rel = std::max(max_rel, std::abs(analytic - numeric) / scale);
    }
    CHECK(max_rel <= 1e-4);
}

TEST_CASE("evaluate: argmax ties go to the lowest index") {
    const MlpModel m = zeroed(Architecture{2, 3, 2});  // uniform logits everywhere
    Dataset ds;
    ds.task = Task::classification;
    ds.input_dim = 2;
    ds.num_classes = 2;
    ds.inputs = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}};
    ds.class_targets = {0, 1, 0, 1};  // balanced
    const EvalResult ev = evaluate(m, ds, LossKind::cross_entropy);
    CHECK(*ev.accuracy == 0.5);  // predicted class is always 0
}

TEST_CASE("evaluate: teacher model has zero loss on its own noise-free data") {
    const Architecture arch{3, 5, 2};
    const Dataset ds = gen_teacher(13, arch, 40, 0.0, Task::regression);
    const MlpModel teacher = new_mlp(arch, 13);
    CHECK(evaluate(teacher, ds, LossKind::squared_error).loss == 0.0);
}

TEST_CASE("evaluate: uniform predictor cross-entropy is ln k") {
    for (std::size_t k : {2, 3, 5}) {
        const MlpModel m = zeroed(Architecture{2, 4, k});
        const Dataset ds = tiny_classification(10, 2, k, 3);
        const EvalResult ev = evaluate(m, ds, LossKind::cross_entropy);
        CHECK(std::abs(ev.loss - std::log(static_cast<double>(k))) <= 1e-9);
    }
}

TEST_CASE("early stopper: patience 0 stops on the first non-improving epoch") {
    EarlyStopper stopper({Monitor::val_loss, 0, 0.0});
    CHECK_FALSE(stopper.observe(1.0));
    CHECK_FALSE(stopper.observe(0.5));
    CHECK(stopper.observe(0.5));  // no strict improvement
}

TEST_CASE("early stopper: a monotone run never stops") {
    EarlyStopper stopper({Monitor::val_loss, 3, 0.01});
    double v = 10.0;
    for (int epoch = 0; epoch < 100; ++epoch) {
        CHECK_FALSE(stopper.observe(v));
        v -= 0.05;  // always beats min_delta
    }
}

TEST_CASE("early stopper: counts consecutive failures against the best") {
    EarlyStopper stopper({Monitor::val_accuracy, 2, 0.0});
    CHECK_FALSE(stopper.observe(0.5));
    CHECK_FALSE(stopper.observe(0.4));   // fail 1
    CHECK_FALSE(stopper.observe(0.45));  // fail 2: better than last, not than best
    CHECK(stopper.observe(0.3));         // fail 3 exceeds patience
}

TEST_CASE("early stopper: an improvement resets the counter") {
    EarlyStopper stopper({Monitor::val_accuracy, 1, 0.0});
    CHECK_FALSE(stopper.observe(0.5));
    CHECK_FALSE(stopper.observe(0.4));  // fail 1
    CHECK_FALSE(stopper.observe(0.6));  // improvement, counter resets
    CHECK_FALSE(stopper.observe(0.1));  // fail 1
    CHECK(stopper.observe(0.1));        // fail 2
}

TEST_CASE("fit: max_epochs 1 records exactly one epoch") {
    const Dataset ds = gen_teacher(3, Architecture{2, 4, 2}, 30, 0.0, Task::classification);
    const Split sp = split_dataset(ds, 0.25, 1);
    MlpModel m = new_mlp(Architecture{2, 4, 2}, 2);
    TrainConfig cfg;
    cfg.max_epochs = 1;
    const FitResult result = fit(m, sp, cfg);
    CHECK(result.records.size() == 1);
    CHECK(result.epochs_run == 1);
}

TEST_CASE("fit: huge min_delta with patience 0 stops at epoch 2") {
    const Dataset ds = gen_teacher(3, Architecture{2, 4, 2}, 30, 0.0, Task::classification);
    const Split sp = split_dataset(ds, 0.25, 1);
    MlpModel m = new_mlp(Architecture{2, 4, 2}, 2);
    TrainConfig cfg;
    cfg.max_epochs = 50;
    cfg.early_stop = {Monitor::val_accuracy, 0, 2.0};  // accuracy cannot improve by 2
    const FitResult result = fit(m, sp, cfg);
    CHECK(result.records.size() == 2);
}

TEST_CASE("fit: best snapshot is never worse than any recorded epoch") {
    const Dataset ds = gen_teacher(4, Architecture{3, 6, 3}, 90, 0.0, Task::classification);
    const Split sp = split_dataset(ds, 0.2, 3);
    MlpModel m = new_mlp(Architecture{3, 6, 3}, 3);
    TrainConfig cfg;
    cfg.max_epochs = 15;
    cfg.learning_rate = 0.05;
    const FitResult result = fit(m, sp, cfg);
    for (const EpochRecord& rec : result.records) {
        CHECK(result.best_score >= *rec.val_accuracy);
    }
    const EvalResult best_ev = evaluate(result.best_model, sp.validation, cfg.loss);
    CHECK(*best_ev.accuracy == result.best_score);
}

TEST_CASE("reduce_arch examples") {
    CHECK(reduce_arch(Architecture{384, 256, 37}, 0.7) == Architecture{384, 179, 37});
    CHECK(reduce_arch(Architecture{4, 6, 3}, 0.5) == Architecture{4, 3, 3});
    CHECK_THROWS_AS(reduce_arch(Architecture{10, 4, 8}, 0.5), BottleneckError);
    CHECK_THROWS_AS(reduce_arch(Architecture{4, 6, 3}, 1.5), ConfigError);
}

TEST_CASE("reduce_arch rounds half up and clamps to one") {
    CHECK(reduce_arch(Architecture{4, 5, 1}, 0.5) == Architecture{4, 3, 1});   // 2.5 -> 3
    CHECK(reduce_arch(Architecture{4, 10, 1}, 0.45) == Architecture{4, 5, 1});  // 4.5 -> 5
}

}  // TEST_SUITE
