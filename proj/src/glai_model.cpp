#include "glai/glai_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "glai/errors.hpp"

namespace glai {

std::size_t PathTable::output_of(std::size_t p) const {
    const auto it = std::upper_bound(output_begin_.begin(), output_begin_.end(), p);
    return static_cast<std::size_t>(it - output_begin_.begin()) - 1;
}

Path PathTable::path(std::size_t p) const {
    Path pi;
    pi.origin = origin_[p];
    const auto h = hidden(p);
    pi.hidden.assign(h.begin(), h.end());
    pi.output = static_cast<int>(output_of(p));
    return pi;
}

void PathTable::begin_output() {
    if (output_begin_.empty()) {
        output_begin_.push_back(0);
        hidden_off_.push_back(0);
    }
    output_begin_.push_back(origin_.size());
}

void PathTable::append(int origin, std::span<const std::int32_t> hidden, double weight) {
    origin_.push_back(origin);
    hidden_flat_.insert(hidden_flat_.end(), hidden.begin(), hidden.end());
    hidden_off_.push_back(hidden_flat_.size());
    weight_.push_back(weight);
    output_begin_.back() = origin_.size();
}

PathTable PathTable::expand_from(const MlpModel& m, std::uint64_t path_budget) {
    m.arch.validate();
    const PathCount count = path_count(m.arch);
    if (count.total > path_budget) {
        throw PathBudgetError("architecture has " + std::to_string(count.total) +
                              " paths, budget is " + std::to_string(path_budget));
    }

    const Architecture& arch = m.arch;
    const std::size_t hidden = arch.hidden_layers();

    PathTable table;
    table.arch_ = arch;
    table.origin_.reserve(count.total);
    table.hidden_off_.reserve(count.total + 1);
    table.weight_.reserve(count.total);
    table.hidden_off_.push_back(0);
    table.output_begin_.push_back(0);

    std::vector<std::int32_t> tuple;
    std::vector<double> prefix;  // prefix[i]: product of factors up to hidden slot i

    for (std::size_t out = 0; out < arch.output_dim(); ++out) {
        const Matrix& w_last = m.weights[hidden];

        // origin < 0 encodes the bias feeding layer -origin, as in Path
        auto emit_group = [&](int origin, std::size_t first) {
            const std::size_t len = hidden + 1 - first;
            if (len == 0) {
                // no hidden nodes: either the output bias or, when L = 0,
                // a direct input-to-output weight
                table.origin_.push_back(origin);
                table.hidden_off_.push_back(table.hidden_flat_.size());
                table.weight_.push_back(origin >= 0
                                            ? w_last(out, static_cast<std::size_t>(origin))
                                            : m.biases[hidden][out]);
                return;
            }
            tuple.assign(len, 0);
            prefix.assign(len, 0.0);

            auto refresh = [&](std::size_t from) {
                for (std::size_t i = from; i < len; ++i) {
                    double fac;
                    const auto node = static_cast<std::size_t>(tuple[i]);
                    if (i == 0) {
                        fac = origin >= 0
                                  ? m.weights[0](node, static_cast<std::size_t>(origin))
                                  : m.biases[first - 1][node];
                    } else {
                        fac = m.weights[first - 1 + i](node,
                                                       static_cast<std::size_t>(tuple[i - 1]));
                    }
                    prefix[i] = (i == 0 ? fac : prefix[i - 1] * fac);
                }
            };
            refresh(0);

            while (true) {
                table.origin_.push_back(origin);
                table.hidden_flat_.insert(table.hidden_flat_.end(), tuple.begin(), tuple.end());
                table.hidden_off_.push_back(table.hidden_flat_.size());
                table.weight_.push_back(prefix[len - 1] *
                                        w_last(out, static_cast<std::size_t>(tuple[len - 1])));

                std::size_t d = len;
                bool done = false;
                while (d-- > 0) {
                    const std::size_t layer = first + d;
                    if (static_cast<std::size_t>(++tuple[d]) < arch.dims[layer]) {
                        refresh(d);
                        break;
                    }
                    tuple[d] = 0;
                    if (d == 0) {
                        done = true;
                        break;
                    }
                }
                if (done) {
                    break;
                }
            }
        };

        for (std::size_t j = 0; j < arch.input_dim(); ++j) {
            emit_group(static_cast<int>(j), 1);
        }
        for (std::size_t k = 1; k <= hidden + 1; ++k) {
            emit_group(-static_cast<int>(k), k);
        }
        table.output_begin_.push_back(table.origin_.size());
    }
    return table;
}

PathTable PathTable::subset(const std::vector<std::size_t>& kept) const {
    PathTable out;
    out.arch_ = arch_;
    out.output_begin_.push_back(0);
    out.hidden_off_.push_back(0);
    out.origin_.reserve(kept.size());
    out.weight_.reserve(kept.size());

    std::size_t cursor = 0;
    for (std::size_t i = 0; i < outputs(); ++i) {
        while (cursor < kept.size() && kept[cursor] < output_end(i)) {
            const std::size_t p = kept[cursor];
            out.origin_.push_back(origin_[p]);
            const auto h = hidden(p);
            out.hidden_flat_.insert(out.hidden_flat_.end(), h.begin(), h.end());
            out.hidden_off_.push_back(out.hidden_flat_.size());
            out.weight_.push_back(weight_[p]);
            ++cursor;
        }
        out.output_begin_.push_back(out.origin_.size());
    }
    return out;
}

GlaiModel expand(const MlpModel& m, std::uint64_t path_budget) {
    GlaiModel g;
    g.structure = m;
    g.retained = PathTable::expand_from(m, path_budget);
    g.estimator.resize(g.retained.size());
    for (std::size_t p = 0; p < g.retained.size(); ++p) {
        g.estimator[p] = g.retained.weight(p);
    }
    const std::size_t structure_params = param_count_original(m.arch);
    g.parity.original_params = structure_params + g.retained.size();
    g.parity.reduced_params = structure_params;
    g.parity.estimator_paths = g.retained.size();
    g.parity.sigma = 1.0;
    g.parity.sigma_clamped = false;
    g.parity.retained_paths = g.retained.size();
    g.parity.glai_param_total = structure_params + g.retained.size();
    return g;
}

namespace {

// Contribution of path p under a fixed pattern: origin value gated by the
// AND of the traversed activation bits.
inline double contribution_of(const PathTable& table, std::size_t p,
                              const ActivationPattern& pattern, const Vector& x) {
    const int origin = table.origin(p);
    const auto route = table.hidden(p);
    const std::size_t first = origin >= 0 ? 1 : static_cast<std::size_t>(-origin);
    for (std::size_t i = 0; i < route.size(); ++i) {
        if (!pattern.layers[first - 1 + i][static_cast<std::size_t>(route[i])]) {
            return 0.0;
        }
    }
    return origin >= 0 ? x[static_cast<std::size_t>(origin)] : 1.0;
}

}  // namespace

Vector glai_forward_with_pattern(const GlaiModel& g, const Vector& x,
                                 const ActivationPattern& pattern) {
    Vector out(g.retained.outputs(), 0.0);
    for (std::size_t i = 0; i < g.retained.outputs(); ++i) {
        double acc = 0.0;
        for (std::size_t p = g.retained.output_begin(i); p < g.retained.output_end(i); ++p) {
            const double c = contribution_of(g.retained, p, pattern, x);
            if (c != 0.0) {
                acc += g.estimator[p] * c;
            }
        }
        out[i] = acc;
    }
    return out;
}

Vector glai_forward(const GlaiModel& g, const Vector& x) {
    if (x.size() != g.structure.arch.input_dim()) {
        throw DimensionError("input has length " + std::to_string(x.size()) +
                             " but the model expects " +
                             std::to_string(g.structure.arch.input_dim()));
    }
    return glai_forward_with_pattern(g, x, forward_trace(g.structure, x).pattern);
}

std::vector<Vector> selector_features(const GlaiModel& g, const Vector& x) {
    if (x.size() != g.structure.arch.input_dim()) {
        throw DimensionError("selector_features: input length mismatch");
    }
    const ActivationPattern pattern = forward_trace(g.structure, x).pattern;
    std::vector<Vector> out(g.retained.outputs());
    for (std::size_t i = 0; i < g.retained.outputs(); ++i) {
        const std::size_t begin = g.retained.output_begin(i);
        out[i].resize(g.retained.output_end(i) - begin);
        for (std::size_t p = begin; p < g.retained.output_end(i); ++p) {
            out[i][p - begin] = contribution_of(g.retained, p, pattern, x);
        }
    }
    return out;
}

std::vector<double> path_norms(const GlaiModel& g, const OmegaSet& omega) {
    if (omega.samples.empty()) {
        throw DimensionError("Omega must not be empty");
    }
    std::vector<double> norms(g.retained.size(), 0.0);
    for (const Vector& x : omega.samples) {
        const ActivationPattern pattern = forward_trace(g.structure, x).pattern;
        for (std::size_t p = 0; p < g.retained.size(); ++p) {
            norms[p] += std::abs(contribution_of(g.retained, p, pattern, x));
        }
    }
    const double inv = 1.0 / static_cast<double>(omega.samples.size());
    for (double& n : norms) {
        n *= inv;
    }
    return norms;
}

std::vector<double> score_paths(const GlaiModel& g, const OmegaSet& omega) {
    std::vector<double> scores = path_norms(g, omega);
    for (std::size_t p = 0; p < scores.size(); ++p) {
        scores[p] *= std::abs(g.estimator[p]);
    }
    return scores;
}

std::pair<GlaiModel, PruneReport> prune(const GlaiModel& g, double sigma, const OmegaSet& omega) {
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ConfigError("sigma must lie in (0, 1], got " + std::to_string(sigma));
    }
    const std::size_t total = g.retained.size();
    const std::vector<double> scores = score_paths(g, omega);

    auto keep_count = static_cast<std::size_t>(
        std::ceil(sigma * static_cast<double>(total) - 1e-9));
    keep_count = std::max<std::size_t>(1, std::min(keep_count, total));

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;  // canonical order wins ties
    });

    std::vector<std::size_t> kept(order.begin(), order.begin() + keep_count);
    std::sort(kept.begin(), kept.end());

    PruneReport report;
    report.kept_count = keep_count;
    report.removed_count = total - keep_count;
    report.score_threshold = scores[order[keep_count - 1]];
    double bound = 0.0;
    for (std::size_t i = keep_count; i < total; ++i) {
        bound += scores[order[i]];
    }
    report.error_bound = bound;

    GlaiModel pruned;
    pruned.structure = g.structure;
    pruned.retained = g.retained.subset(kept);
    pruned.estimator.reserve(keep_count);
    for (std::size_t p : kept) {
        pruned.estimator.push_back(g.estimator[p]);
    }
    pruned.parity = g.parity;
    pruned.parity.sigma = sigma;
    pruned.parity.sigma_clamped = false;
    pruned.parity.retained_paths = keep_count;
    pruned.parity.glai_param_total = pruned.parity.reduced_params + keep_count;

    double realized = 0.0;
    for (const Vector& x : omega.samples) {
        const ActivationPattern pattern = forward_trace(g.structure, x).pattern;
        const Vector full = glai_forward_with_pattern(g, x, pattern);
        const Vector cut = glai_forward_with_pattern(pruned, x, pattern);
        for (std::size_t i = 0; i < full.size(); ++i) {
            realized += std::abs(full[i] - cut[i]);
        }
    }
    report.realized_error = realized / static_cast<double>(omega.samples.size());

    return {std::move(pruned), report};
}

std::size_t param_count_original(const Architecture& arch) {
    arch.validate();
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < arch.dims.size(); ++l) {
        total += (arch.dims[l] + 1) * arch.dims[l + 1];
    }
    return total;
}

std::size_t param_count_reduced(const Architecture& arch, double rho) {
    return param_count_original(reduce_arch(arch, rho));
}

std::uint64_t estimator_size(const Architecture& arch, double rho) {
    return path_count(reduce_arch(arch, rho)).total;
}

double reduced_param_formula(const Architecture& arch, double rho) {
    arch.validate();
    const std::size_t L = arch.hidden_layers();
    const auto dim = [&](std::size_t l) { return static_cast<double>(arch.dims[l]); };
    double linear = dim(0) * dim(1) + dim(L) * dim(L + 1);
    for (std::size_t l = 0; l <= L; ++l) {
        linear += dim(l + 1);
    }
    double quadratic = 0.0;
    for (std::size_t l = 1; l + 1 <= L; ++l) {
        quadratic += dim(l) * dim(l + 1);
    }
    return rho * linear + rho * rho * quadratic + dim(L + 1);
}

double estimator_size_formula(const Architecture& arch, double rho) {
    arch.validate();
    const std::size_t L = arch.hidden_layers();
    const auto dim = [&](std::size_t l) { return static_cast<double>(arch.dims[l]); };
    double input_paths = std::pow(rho, static_cast<double>(L));
    for (std::size_t l = 0; l <= L + 1; ++l) {
        input_paths *= dim(l);
    }
    double bias_paths = 0.0;
    for (std::size_t k = 1; k <= L + 1; ++k) {
        double term = std::pow(rho, static_cast<double>(L + 1 - k));
        for (std::size_t l = k; l <= L + 1; ++l) {
            term *= dim(l);
        }
        bias_paths += term;
    }
    return input_paths + bias_paths;
}

SigmaResult compute_sigma(const Architecture& arch, double rho) {
    arch.validate();
    const std::size_t L = arch.hidden_layers();
    if (L >= 1 && arch.dims[L] == arch.output_dim()) {
        throw UnsupportedArchError(
            "architectures with n_L == n_{L+1} fall outside the parity scheme");
    }
    const std::size_t original = param_count_original(arch);
    const std::size_t reduced = param_count_reduced(arch, rho);
    if (reduced >= original) {
        throw ReducedNotSmallerError("reduced network has " + std::to_string(reduced) +
                                     " parameters, original has " + std::to_string(original));
    }
    const auto paths = static_cast<double>(estimator_size(arch, rho));
    SigmaResult out;
    out.sigma = static_cast<double>(original - reduced) / paths;
    if (out.sigma > 1.0) {
        out.sigma = 1.0;
        out.clamped = true;
    }
    return out;
}

double train_estimator_epoch(GlaiModel& g, const Dataset& train, const TrainConfig& cfg,
                             Rng& rng) {
    cfg.validate();
    if (train.size() == 0) {
        throw DimensionError("dataset is empty");
    }
    if (train.input_dim != g.structure.arch.input_dim()) {
        throw DimensionError("dataset input_dim " + std::to_string(train.input_dim) +
                             " vs model input " + std::to_string(g.structure.arch.input_dim()));
    }

    const std::size_t n = train.size();
    const std::size_t paths = g.retained.size();
    const std::size_t outputs = g.retained.outputs();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> grad(paths, 0.0);
    std::vector<double> contrib(paths, 0.0);
    Vector pred(outputs, 0.0);
    Vector delta;

    double loss_sum = 0.0;
    std::size_t done = 0;
    while (done < n) {
        const std::size_t batch = std::min(cfg.batch_size, n - done);
        std::fill(grad.begin(), grad.end(), 0.0);
        double batch_loss = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t idx = order[done + b];
            const Vector& x = train.inputs[idx];
            const ActivationPattern pattern = forward_trace(g.structure, x).pattern;
            for (std::size_t i = 0; i < outputs; ++i) {
                double acc = 0.0;
                for (std::size_t p = g.retained.output_begin(i); p < g.retained.output_end(i);
                     ++p) {
                    contrib[p] = contribution_of(g.retained, p, pattern, x);
                    acc += g.estimator[p] * contrib[p];
                }
                pred[i] = acc;
            }
            batch_loss += loss_value(pred, train, idx, cfg.loss);
            loss_grad(pred, train, idx, cfg.loss, delta);
            for (std::size_t i = 0; i < outputs; ++i) {
                const double d = delta[i];
                if (d == 0.0) continue;
                for (std::size_t p = g.retained.output_begin(i); p < g.retained.output_end(i);
                     ++p) {
                    grad[p] += d * contrib[p];
                }
            }
        }
        if (!std::isfinite(batch_loss)) {
            throw NonFiniteLossError("estimator training diverged: non-finite batch loss");
        }
        loss_sum += batch_loss;

        const double inv_batch = 1.0 / static_cast<double>(batch);
        for (std::size_t p = 0; p < paths; ++p) {
            g.estimator[p] -=
                cfg.learning_rate * (grad[p] * inv_batch + cfg.weight_decay * g.estimator[p]);
        }
        done += batch;
    }
    return loss_sum / static_cast<double>(n);
}

EvalResult evaluate_glai(const GlaiModel& g, const Dataset& ds, LossKind loss) {
    if (ds.size() == 0) {
        throw DimensionError("dataset is empty");
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Vector pred = glai_forward(g, ds.inputs[i]);
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

EstimatorFitResult fit_estimator(GlaiModel& g, const Split& split, const TrainConfig& cfg) {
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

    EstimatorFitResult out;
    out.best_estimator = g.estimator;
    out.best_score = maximize ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = clock::now();
        const double train_loss = train_estimator_epoch(g, split.train, cfg, rng);
        const EvalResult ev = evaluate_glai(g, split.validation, cfg.loss);
        const double secs =
            std::max(std::chrono::duration<double>(clock::now() - t0).count(), 1e-9);

        EpochRecord rec;
        rec.phase = "estimator";
        rec.epoch = epoch;
        rec.train_loss = train_loss;
        rec.val_loss = ev.loss;
        rec.val_accuracy = ev.accuracy;
        rec.seconds = secs;
        out.records.push_back(std::move(rec));

        const double monitored =
            cfg.early_stop.monitor == Monitor::val_accuracy ? *ev.accuracy : ev.loss;
        const bool better = maximize ? monitored > out.best_score : monitored < out.best_score;
        if (better) {
            out.best_score = monitored;
            out.best_epoch = epoch;
            out.best_estimator = g.estimator;
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
