#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "glai/dataset.hpp"
#include "glai/mlp.hpp"
#include "glai/paths.hpp"
#include "glai/report.hpp"
#include "glai/training.hpp"

namespace glai {

inline constexpr std::uint64_t kDefaultPathBudget = 10'000'000;

// Paths grouped by output neuron in canonical order, with their expand-time
// weights. Stored flat: per-path origin, hidden route and weight.
class PathTable {
  public:
    PathTable() = default;

    // Enumerates every path of the model with its weight omega_pi.
    static PathTable expand_from(const MlpModel& m, std::uint64_t path_budget);

    const Architecture& arch() const { return arch_; }
    std::size_t size() const { return origin_.size(); }
    std::size_t outputs() const { return output_begin_.empty() ? 0 : output_begin_.size() - 1; }
    std::size_t output_begin(std::size_t i) const { return output_begin_[i]; }
    std::size_t output_end(std::size_t i) const { return output_begin_[i + 1]; }
    std::size_t output_of(std::size_t p) const;

    int origin(std::size_t p) const { return origin_[p]; }
    std::span<const std::int32_t> hidden(std::size_t p) const {
        return {hidden_flat_.data() + hidden_off_[p], hidden_off_[p + 1] - hidden_off_[p]};
    }
    double weight(std::size_t p) const { return weight_[p]; }

    Path path(std::size_t p) const;

    // Restriction to the given path indices (ascending, canonical order kept).
    PathTable subset(const std::vector<std::size_t>& kept) const;

    // Used by deserialization; appends one path to the current output group.
    void begin_output();
    void append(int origin, std::span<const std::int32_t> hidden, double weight);
    void set_arch(const Architecture& arch) { arch_ = arch; }

  private:
    Architecture arch_;
    std::vector<std::size_t> output_begin_;  // outputs + 1 entries
    std::vector<int> origin_;
    std::vector<std::int32_t> hidden_flat_;
    std::vector<std::size_t> hidden_off_;  // size() + 1 entries
    std::vector<double> weight_;
};

// Frozen reduced MLP (pattern source), the retained paths and one trainable
// estimator weight per retained path.
struct GlaiModel {
    MlpModel structure;
    PathTable retained;
    std::vector<double> estimator;  // aligned with retained, canonical order
    ParityLedger parity;

    std::span<const double> estimator_for_output(std::size_t i) const {
        return {estimator.data() + retained.output_begin(i),
                retained.output_end(i) - retained.output_begin(i)};
    }
};

// Exact rewrite of an MLP as a GLAI model (Theorem-1 construction); the
// estimator starts at the path weights, so the expansion reproduces
// forward() up to floating-point reordering.
GlaiModel expand(const MlpModel& m, std::uint64_t path_budget = kDefaultPathBudget);

Vector glai_forward(const GlaiModel& g, const Vector& x);
Vector glai_forward_with_pattern(const GlaiModel& g, const Vector& x,
                                 const ActivationPattern& pattern);

// Per-output contribution vectors S_i(x), ordered like the retained table.
std::vector<Vector> selector_features(const GlaiModel& g, const Vector& x);

// ||c_p||_1 over Omega for every retained path.
std::vector<double> path_norms(const GlaiModel& g, const OmegaSet& omega);

// Pruning saliency |omega_p| * ||c_p||_1 with the current estimator weights.
std::vector<double> score_paths(const GlaiModel& g, const OmegaSet& omega);

// Keeps the ceil(sigma * P) highest-scoring paths across all outputs, ties
// resolved toward canonical order. The report carries the Theorem-2 error
// bound and the realized error over Omega.
std::pair<GlaiModel, PruneReport> prune(const GlaiModel& g, double sigma, const OmegaSet& omega);

// O = sum_l (n_l + 1) * n_{l+1}.
std::size_t param_count_original(const Architecture& arch);

// Parameter count of the rounded reduced architecture.
std::size_t param_count_reduced(const Architecture& arch, double rho);

// Path count of the rounded reduced architecture.
std::uint64_t estimator_size(const Architecture& arch, double rho);

// Real-valued closed forms evaluated at unrounded rho, reported as
// diagnostics next to the exact counts.
double reduced_param_formula(const Architecture& arch, double rho);
double estimator_size_formula(const Architecture& arch, double rho);

struct SigmaResult {
    double sigma = 1.0;
    bool clamped = false;
};

// sigma = (O - R) / E, clamped to 1. Rejects n_L == n_{L+1} architectures
// and reductions that fail to shrink the parameter count.
SigmaResult compute_sigma(const Architecture& arch, double rho);

// Mini-batch SGD on the estimator weights only; the frozen structure supplies
// activation patterns and is never touched.
double train_estimator_epoch(GlaiModel& g, const Dataset& train, const TrainConfig& cfg,
                             Rng& rng);

EvalResult evaluate_glai(const GlaiModel& g, const Dataset& ds, LossKind loss);

struct EstimatorFitResult {
    std::vector<EpochRecord> records;
    double best_score = 0.0;
    std::size_t best_epoch = 0;
    std::size_t epochs_run = 0;
    double total_seconds = 0.0;
    std::vector<double> best_estimator;
};

// Early-stopped estimator training, mirroring fit() for the MLP.
EstimatorFitResult fit_estimator(GlaiModel& g, const Split& split, const TrainConfig& cfg);

}  // namespace glai
