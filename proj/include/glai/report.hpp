#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glai {

struct EpochRecord {
    std::string phase;  // "mlp", "reduced" or "estimator"
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    std::optional<double> val_accuracy;
    double seconds = 0.0;
    std::optional<double> m_t;
};

// Parameter-parity accounting for a GLAI model (counts include biases).
struct ParityLedger {
    std::size_t original_params = 0;     // O
    std::size_t reduced_params = 0;      // R, the frozen structure
    std::uint64_t estimator_paths = 0;   // E, path count of the unpruned estimator
    double sigma = 1.0;                  // fraction of paths retained
    bool sigma_clamped = false;
    std::uint64_t retained_paths = 0;
    std::size_t glai_param_total = 0;    // R + retained_paths
};

struct PruneReport {
    std::uint64_t removed_count = 0;
    std::uint64_t kept_count = 0;
    double score_threshold = 0.0;  // lowest kept score
    double error_bound = 0.0;      // sum of removed |w| * ||c||_1
    double realized_error = 0.0;   // measured ||phi - phi~||_1 over Omega
};

struct RunReport {
    std::string arm;  // "mlp" or "glai"
    std::vector<EpochRecord> records;
    double best_validation_score = 0.0;
    std::size_t best_epoch = 0;
    std::size_t epochs_to_stop = 0;
    double total_wall_clock = 0.0;
    std::optional<ParityLedger> parity;
    std::optional<PruneReport> prune;
};

struct SeededComparison {
    std::uint64_t seed = 0;
    RunReport mlp;
    RunReport glai;
    double speedup = 0.0;    // mlp wall clock / glai wall clock
    double bvs_delta = 0.0;  // glai BVS - mlp BVS in the monitored metric
};

struct ComparisonReport {
    std::vector<SeededComparison> runs;
    double mean_speedup = 0.0;
    double mean_bvs_delta = 0.0;
    double mean_mlp_bvs = 0.0;
    double mean_glai_bvs = 0.0;
    double mean_mlp_epochs = 0.0;
    double mean_glai_epochs = 0.0;
};

}  // namespace glai
