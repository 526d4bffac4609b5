#pragma once

#include <cstdint>
#include <string>

#include "glai/dataset.hpp"
#include "glai/glai_model.hpp"
#include "glai/paths.hpp"
#include "glai/report.hpp"
#include "glai/training.hpp"

namespace glai {

struct DataSpec {
    enum class Source { teacher, csv, idx };
    Source source = Source::teacher;

    // teacher
    Architecture teacher_arch;
    std::size_t n_samples = 1000;
    double noise_std = 0.0;
    Task task = Task::classification;
    std::uint64_t data_seed = 0;

    // csv
    std::string csv_path;
    CsvSchema csv_schema;

    // idx
    std::string idx_images;
    std::string idx_labels;
};

struct Phase1Spec {
    double rho = 0.5;
    std::size_t epochs = 0;  // 0: stop on the structural convergence rule
};

struct OmegaSpec {
    enum class Source { train, validation };
    Source source = Source::train;
    std::size_t max_samples = 512;
};

struct ExperimentConfig {
    Architecture arch;
    DataSpec data;
    double val_fraction = 0.2;
    std::uint64_t seed = 1;
    TrainConfig mlp_train;
    Phase1Spec glai_phase1;
    TrainConfig glai_phase2;  // must match mlp_train except weight decay / epochs
    ConvergenceRule convergence_rule;
    OmegaSpec omega_spec;
    std::uint64_t path_budget = kDefaultPathBudget;

    // Fairness: the two arms must share loss, batch size, learning rate and
    // early-stopping settings; any divergence is a config error.
    void validate() const;
};

Dataset load_dataset(const DataSpec& spec);

// Seeded subsample of the chosen split capped at max_samples.
OmegaSet make_omega(const Split& split, const OmegaSpec& spec, std::uint64_t seed);

// Full-architecture MLP trained under mlp_train with early stopping.
RunReport run_mlp_baseline(const ExperimentConfig& cfg);

// Phase 1 trains the reduced MLP (fixed budget or m_t convergence rule),
// phase 2 expands, prunes to the parity sigma and trains the estimator with
// early stopping. Epoch numbering is contiguous across phases.
RunReport run_glai(const ExperimentConfig& cfg);

// Runs both arms on seeds cfg.seed .. cfg.seed + num_seeds - 1 under
// identical settings and aggregates speedup and BVS deltas.
ComparisonReport compare(const ExperimentConfig& cfg, std::size_t num_seeds = 3);

}  // namespace glai
