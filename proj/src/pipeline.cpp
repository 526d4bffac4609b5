#include "glai/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "glai/errors.hpp"

namespace glai {

void ExperimentConfig::validate() const {
    arch.validate();
    mlp_train.validate();
    glai_phase2.validate();
    if (!(glai_phase1.rho > 0.0 && glai_phase1.rho < 1.0)) {
        throw ConfigError("rho must lie in (0, 1)");
    }
    if (omega_spec.max_samples < 1) {
        throw ConfigError("omega max_samples must be >= 1");
    }
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw ConfigError("val_fraction must lie in (0, 1)");
    }
    if (mlp_train.loss != glai_phase2.loss || mlp_train.batch_size != glai_phase2.batch_size ||
        mlp_train.learning_rate != glai_phase2.learning_rate ||
        mlp_train.early_stop.monitor != glai_phase2.early_stop.monitor ||
        mlp_train.early_stop.patience != glai_phase2.early_stop.patience ||
        mlp_train.early_stop.min_delta != glai_phase2.early_stop.min_delta) {
        throw ConfigError(
            "unfair comparison: the MLP and GLAI arms must share loss, batch size, "
            "learning rate and early-stopping settings");
    }
}

Dataset load_dataset(const DataSpec& spec) {
    switch (spec.source) {
        case DataSpec::Source::teacher:
            return gen_teacher(spec.data_seed, spec.teacher_arch, spec.n_samples, spec.noise_std,
                               spec.task);
        case DataSpec::Source::csv:
            return load_csv(spec.csv_path, spec.csv_schema);
        case DataSpec::Source::idx:
            return load_idx(spec.idx_images, spec.idx_labels);
    }
    throw ConfigError("unknown data source");
}

OmegaSet make_omega(const Split& split, const OmegaSpec& spec, std::uint64_t seed) {
    const Dataset& source =
        spec.source == OmegaSpec::Source::train ? split.train : split.validation;
    OmegaSet omega;
    if (source.size() <= spec.max_samples) {
        omega.samples = source.inputs;
        return omega;
    }
    std::vector<std::size_t> order(source.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 3));
    rng.shuffle(order);
    omega.samples.reserve(spec.max_samples);
    for (std::size_t i = 0; i < spec.max_samples; ++i) {
        omega.samples.push_back(source.inputs[order[i]]);
    }
    return omega;
}

RunReport run_mlp_baseline(const ExperimentConfig& cfg) {
    cfg.validate();
    const Dataset ds = load_dataset(cfg.data);
    const Split split = split_dataset(ds, cfg.val_fraction, cfg.seed);

    MlpModel model = new_mlp(cfg.arch, cfg.seed);
    TrainConfig train_cfg = cfg.mlp_train;
    train_cfg.seed = cfg.seed;

    const FitResult result = fit(model, split, train_cfg);

    RunReport report;
    report.arm = "mlp";
    report.records = result.records;
    report.best_validation_score = result.best_score;
    report.best_epoch = result.best_epoch;
    report.epochs_to_stop = result.epochs_run;
    report.total_wall_clock = std::max(result.total_seconds, 1e-9);
    return report;
}

RunReport run_glai(const ExperimentConfig& cfg) {
    cfg.validate();
    using clock = std::chrono::steady_clock;

    const Dataset ds = load_dataset(cfg.data);
    const Split split = split_dataset(ds, cfg.val_fraction, cfg.seed);
    const OmegaSet omega = make_omega(split, cfg.omega_spec, cfg.seed);

    const Architecture reduced = reduce_arch(cfg.arch, cfg.glai_phase1.rho);
    const SigmaResult sigma = compute_sigma(cfg.arch, cfg.glai_phase1.rho);

    const auto arm_start = clock::now();

    RunReport report;
    report.arm = "glai";

    // Phase 1: short structural training of the reduced MLP. Never stops on
    // the validation score, only on the fixed budget or the m_t rule.
    MlpModel model = new_mlp(reduced, cfg.seed);
    TrainConfig phase1_cfg = cfg.mlp_train;
    phase1_cfg.seed = cfg.seed;
    const std::size_t phase1_budget = cfg.glai_phase1.epochs > 0
                                          ? std::max<std::size_t>(1, cfg.glai_phase1.epochs)
                                          : cfg.mlp_train.max_epochs;

    Rng phase1_rng(derive_seed(cfg.seed, 1));
    MlpModel prev_snapshot = model;
    std::vector<double> m_history;
    for (std::size_t epoch = 1; epoch <= phase1_budget; ++epoch) {
        const auto t0 = clock::now();
        const double train_loss = train_epoch(model, split.train, phase1_cfg, phase1_rng);
        const EvalResult ev = evaluate(model, split.validation, phase1_cfg.loss);
        const double secs =
            std::max(std::chrono::duration<double>(clock::now() - t0).count(), 1e-9);

        const double m_t = structural_metric(prev_snapshot, model, omega);
        prev_snapshot = model;
        m_history.push_back(m_t);

        EpochRecord rec;
        rec.phase = "reduced";
        rec.epoch = epoch;
        rec.train_loss = train_loss;
        rec.val_loss = ev.loss;
        rec.val_accuracy = ev.accuracy;
        rec.seconds = secs;
        rec.m_t = m_t;
        report.records.push_back(std::move(rec));

        if (cfg.glai_phase1.epochs == 0 &&
            convergence_monitor(m_history, cfg.convergence_rule).converged) {
            break;
        }
    }
    const std::size_t phase1_epochs = report.records.size();

    // Structural freeze: expand the reduced MLP and prune to the parity sigma.
    GlaiModel g = expand(model, cfg.path_budget);
    g.parity.original_params = param_count_original(cfg.arch);
    g.parity.sigma = sigma.sigma;
    g.parity.sigma_clamped = sigma.clamped;

    PruneReport prune_report;
    if (sigma.sigma < 1.0) {
        auto [pruned, rep] = prune(g, sigma.sigma, omega);
        pruned.parity.original_params = g.parity.original_params;
        pruned.parity.sigma_clamped = sigma.clamped;
        g = std::move(pruned);
        prune_report = rep;
    } else {
        prune_report.kept_count = g.retained.size();
        prune_report.removed_count = 0;
        prune_report.error_bound = 0.0;
        prune_report.realized_error = 0.0;
        g.parity.glai_param_total = g.parity.reduced_params + g.retained.size();
        g.parity.retained_paths = g.retained.size();
    }

    // Phase 2: estimator training with the shared early-stopping rule.
    TrainConfig phase2_cfg = cfg.glai_phase2;
    phase2_cfg.seed = derive_seed(cfg.seed, 2);
    const EstimatorFitResult est = fit_estimator(g, split, phase2_cfg);
    g.estimator = est.best_estimator;

    for (const EpochRecord& rec : est.records) {
        EpochRecord shifted = rec;
        shifted.epoch = phase1_epochs + rec.epoch;
        report.records.push_back(std::move(shifted));
    }

    report.best_validation_score = est.best_score;
    report.best_epoch = phase1_epochs + est.best_epoch;
    report.epochs_to_stop = report.records.size();
    report.total_wall_clock =
        std::max(std::chrono::duration<double>(clock::now() - arm_start).count(), 1e-9);
    report.parity = g.parity;
    report.prune = prune_report;
    return report;
}

ComparisonReport compare(const ExperimentConfig& cfg, std::size_t num_seeds) {
    cfg.validate();
    if (num_seeds < 1) {
        throw ConfigError("compare needs at least one seed");
    }
    ComparisonReport report;
    for (std::size_t i = 0; i < num_seeds; ++i) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + i;

        SeededComparison run;
        run.seed = run_cfg.seed;
        run.mlp = run_mlp_baseline(run_cfg);
        run.glai = run_glai(run_cfg);
        run.speedup = run.mlp.total_wall_clock / run.glai.total_wall_clock;
        run.bvs_delta = run.glai.best_validation_score - run.mlp.best_validation_score;
        report.runs.push_back(std::move(run));
    }
    const auto n = static_cast<double>(report.runs.size());
    for (const SeededComparison& run : report.runs) {
        report.mean_speedup += run.speedup / n;
        report.mean_bvs_delta += run.bvs_delta / n;
        report.mean_mlp_bvs += run.mlp.best_validation_score / n;
        report.mean_glai_bvs += run.glai.best_validation_score / n;
        report.mean_mlp_epochs += static_cast<double>(run.mlp.epochs_to_stop) / n;
        report.mean_glai_epochs += static_cast<double>(run.glai.epochs_to_stop) / n;
    }
    return report;
}

}  // namespace glai
