#include "glai/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "glai/errors.hpp"
#include "glai/paths.hpp"

namespace glai {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (weight_decay < 0.0) {
        throw ConfigError("weight_decay must be non-negative");
    }
    if (max_epochs < 1) {
        throw ConfigError("max_epochs must be >= 1");
    }
    if (early_stop.min_delta < 0.0) {
        throw ConfigError("min_delta must be non-negative");
    }
}

static void check_dataset_fits(const Architecture& arch, const Dataset& ds, LossKind loss) {
    if (ds.size() == 0) {
        throw DimensionError("dataset is empty");
    }
    if (ds.input_dim != arch.input_dim()) {
        throw DimensionError("dataset input_dim " + std::to_string(ds.input_dim) +
                             " vs model input " + std::to_string(arch.input_dim()));
    }
    if (ds.task == Task::classification) {
        if (loss != LossKind::cross_entropy) {
            throw ConfigError("classification datasets train with cross_entropy loss");
        }
        if (ds.num_classes > arch.output_dim()) {
            throw DimensionError("dataset has " + std::to_string(ds.num_classes) +
                                 " classes but the model outputs " +
                                 std::to_string(arch.output_dim()));
        }
    } else {
        if (loss != LossKind::squared_error) {
            throw ConfigError("regression datasets train with squared_error loss");
        }
        if (ds.target_dim() != arch.output_dim()) {
            throw DimensionError("dataset target_dim " + std::to_string(ds.target_dim()) +
                                 " vs model output " + std::to_string(arch.output_dim()));
        }
    }
}

double loss_value(const Vector& pred, const Dataset& ds, std::size_t idx, LossKind kind) {
    if (kind == LossKind::cross_entropy) {
        const int target = ds.class_targets[idx];
        double m = pred[0];
        for (double v : pred) m = std::max(m, v);
        double sum = 0.0;
        for (double v : pred) sum += std::exp(v - m);
        return m + std::log(sum) - pred[static_cast<std::size_t>(target)];
    }
    const Vector& target = ds.value_targets[idx];
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc;
}

void loss_grad(const Vector& pred, const Dataset& ds, std::size_t idx, LossKind kind,
               Vector& grad) {
    grad.assign(pred.size(), 0.0);
    if (kind == LossKind::cross_entropy) {
        const int target = ds.class_targets[idx];
        double m = pred[0];
        for (double v : pred) m = std::max(m, v);
        double sum = 0.0;
        for (double v : pred) sum += std::exp(v - m);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            grad[i] = std::exp(pred[i] - m) / sum;
        }
        grad[static_cast<std::size_t>(target)] -= 1.0;
        return;
    }
    const Vector& target = ds.value_targets[idx];
    for (std::size_t i = 0; i < pred.size(); ++i) {
        grad[i] = 2.0 * (pred[i] - target[i]);
    }
}

bool EarlyStopper::observe(double value) {
    const double signed_v = rule_.monitor == Monitor::val_accuracy ? value : -value;
    bool improved;
    if (!has_best_) {
        improved = true;
        has_best_ = true;
        best_ = signed_v;
    } else if (rule_.min_delta > 0.0 ? (signed_v - best_ >= rule_.min_delta)
                                     : (signed_v > best_)) {
        improved = true;
        best_ = signed_v;
    } else {
        improved = false;
    }
    if (improved) {
        fails_ = 0;
        return false;
    }
    ++fails_;
    return fails_ > rule_.patience;
}

double train_epoch(MlpModel& model, const Dataset& train, const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    check_dataset_fits(model.arch, train, cfg.loss);

    const std::size_t n = train.size();
    const std::size_t layers = model.weights.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<Matrix> grad_w;
    std::vector<Vector> grad_b;
    grad_w.reserve(layers);
    grad_b.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        grad_w.emplace_back(model.weights[l].rows, model.weights[l].cols);
        grad_b.emplace_back(model.biases[l].size(), 0.0);
    }

    // per-sample forward caches
    std::vector<Vector> acts(layers + 1);  // acts[0] = x, acts[l] = relu(pre[l-1])
    std::vector<Vector> pre(layers);
    Vector delta;

    double loss_sum = 0.0;
    std::size_t done = 0;
    while (done < n) {
        const std::size_t batch = std::min(cfg.batch_size, n - done);
        for (std::size_t l = 0; l < layers; ++l) {
            std::fill(grad_w[l].data.begin(), grad_w[l].data.end(), 0.0);
            std::fill(grad_b[l].begin(), grad_b[l].end(), 0.0);
        }
        double batch_loss = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t idx = order[done + b];
            acts[0] = train.inputs[idx];
            for (std::size_t l = 0; l < layers; ++l) {
                pre[l] = mat_vec(model.weights[l], acts[l]);
                for (std::size_t i = 0; i < pre[l].size(); ++i) {
                    pre[l][i] += model.biases[l][i];
                }
                if (l + 1 < layers) {
                    acts[l + 1] = relu(pre[l]);
                }
            }
            const Vector& output = pre[layers - 1];
            batch_loss += loss_value(output, train, idx, cfg.loss);
            loss_grad(output, train, idx, cfg.loss, delta);

            for (std::size_t l = layers; l-- > 0;) {
                Matrix& gw = grad_w[l];
                for (std::size_t r = 0; r < gw.rows; ++r) {
                    const double d = delta[r];
                    grad_b[l][r] += d;
                    double* grow = gw.data.data() + r * gw.cols;
                    const double* a = acts[l].data();
                    for (std::size_t c = 0; c < gw.cols; ++c) {
                        grow[c] += d * a[c];
                    }
                }
                if (l > 0) {
                    Vector next(model.weights[l].cols, 0.0);
                    for (std::size_t r = 0; r < model.weights[l].rows; ++r) {
                        const double d = delta[r];
                        const double* row = model.weights[l].data.data() + r * model.weights[l].cols;
                        for (std::size_t c = 0; c < model.weights[l].cols; ++c) {
                            next[c] += d * row[c];
                        }
                    }
                    for (std::size_t c = 0; c < next.size(); ++c) {
                        if (!(pre[l - 1][c] > 0.0)) {
                            next[c] = 0.0;
                        }
                    }
                    delta = std::move(next);
                }
            }
        }
        if (!std::isfinite(batch_loss)) {
            throw NonFiniteLossError("training diverged: non-finite batch loss");
        }
        loss_sum += batch_loss;

        const double inv_batch = 1.0 / static_cast<double>(batch);
        const double lr = cfg.learning_rate;
        const double wd = cfg.weight_decay;
        for (std::size_t l = 0; l < layers; ++l) {
            double* w = model.weights[l].data.data();
            const double* gw = grad_w[l].data.data();
            for (std::size_t i = 0; i < model.weights[l].data.size(); ++i) {
                w[i] -= lr * (gw[i] * inv_batch + wd * w[i]);
            }
            double* bp = model.biases[l].data();
            const double* gb = grad_b[l].data();
            for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
                bp[i] -= lr * (gb[i] * inv_batch + wd * bp[i]);
            }
        }
        done += batch;
    }
    return loss_sum / static_cast<double>(n);
}

EvalResult evaluate(const MlpModel& model, const Dataset& ds, LossKind loss) {
    check_dataset_fits(model.arch, ds, loss);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Vector pred = forward(model, ds.inputs[i]);
        loss_sum += loss_value(pred, ds, i, loss);
        if (ds.task == Task::classification) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < pred.size(); ++j) {
                if (pred[j] > pred[best]) best = j;
            }
            if (static_cast<int>(best) == ds.class_targets[i]) {
                ++correct;
            }
        }
    }
    EvalResult out;
    out.loss = loss_sum / static_cast<double>(ds.size());
    if (ds.task == Task::classification) {
        out.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
    }
    return out;
}

FitResult fit(MlpModel& model, const Split& split, const TrainConfig& cfg, const OmegaSet* omega) {
    cfg.validate();
    if (cfg.early_stop.monitor == Monitor::val_accuracy &&
        split.validation.task != Task::classification) {
        throw ConfigError("val_accuracy can only be monitored on classification tasks");
    }

    using clock = std::chrono::steady_clock;
    const auto run_start = clock::now();

    Rng rng(cfg.seed);
    EarlyStopper stopper(cfg.early_stop);
    const bool maximize = cfg.early_stop.monitor == Monitor::val_accuracy;

    FitResult out;
    out.best_model = model;
    out.best_score = maximize ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();

    MlpModel prev_snapshot;
    if (omega != nullptr) {
        prev_snapshot = model;
    }

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = clock::now();
        const double train_loss = train_epoch(model, split.train, cfg, rng);
        const EvalResult ev = evaluate(model, split.validation, cfg.loss);
        const double secs =
            std::max(std::chrono::duration<double>(clock::now() - t0).count(), 1e-9);

        EpochRecord rec;
        rec.phase = "mlp";
        rec.epoch = epoch;
        rec.train_loss = train_loss;
        rec.val_loss = ev.loss;
        rec.val_accuracy = ev.accuracy;
        rec.seconds = secs;
        if (omega != nullptr) {
            rec.m_t = structural_metric(prev_snapshot, model, *omega);
            prev_snapshot = model;
        }
        out.records.push_back(std::move(rec));

        const double monitored =
            cfg.early_stop.monitor == Monitor::val_accuracy ? *ev.accuracy : ev.loss;
        const bool better = maximize ? monitored > out.best_score : monitored < out.best_score;
        if (better) {
            out.best_score = monitored;
            out.best_epoch = epoch;
            out.best_model = model;
        }
        if (stopper.observe(monitored)) {
            break;
        }
    }
    out.epochs_run = out.records.size();
    out.total_seconds = std::chrono::duration<double>(clock::now() - run_start).count();
    return out;
}

}  // namespace glai
