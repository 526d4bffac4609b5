#pragma once

#include <cstdint>
#include <optional>

#include "glai/dataset.hpp"
#include "glai/mlp.hpp"
#include "glai/report.hpp"

namespace glai {

struct OmegaSet;  // paths.hpp

enum class LossKind { cross_entropy, squared_error };
enum class Monitor { val_accuracy, val_loss };

struct EarlyStopRule {
    Monitor monitor = Monitor::val_accuracy;
    std::size_t patience = 5;
    double min_delta = 1e-3;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 16;
    double weight_decay = 1e-3;
    std::size_t max_epochs = 60;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::cross_entropy;
    EarlyStopRule early_stop;

    void validate() const;
};

struct EvalResult {
    double loss = 0.0;
    std::optional<double> accuracy;
};

// Per-sample loss on one prediction: softmax cross-entropy against the class
// index, or the squared error ||pred - target||^2.
double loss_value(const Vector& pred, const Dataset& ds, std::size_t idx, LossKind kind);

// d loss / d pred for the same sample, written into grad.
void loss_grad(const Vector& pred, const Dataset& ds, std::size_t idx, LossKind kind,
               Vector& grad);

// Tracks the monitored metric against the best seen so far; stop is signalled
// once `patience` consecutive epochs fail to improve by min_delta.
class EarlyStopper {
  public:
    explicit EarlyStopper(const EarlyStopRule& rule) : rule_(rule) {}

    // Returns true when training should stop after this epoch.
    bool observe(double value);

  private:
    EarlyStopRule rule_;
    bool has_best_ = false;
    double best_ = 0.0;  // sign-adjusted so larger is better
    std::size_t fails_ = 0;
};

// One pass of mini-batch SGD with decoupled weight decay
// (w <- w - lr * (grad + wd * w)); returns the mean training loss.
double train_epoch(MlpModel& model, const Dataset& train, const TrainConfig& cfg, Rng& rng);

// Mean loss over the dataset; accuracy (argmax, lowest index on ties) for
// classification tasks.
EvalResult evaluate(const MlpModel& model, const Dataset& ds, LossKind loss);

struct FitResult {
    std::vector<EpochRecord> records;
    double best_score = 0.0;  // raw monitored metric at the best epoch
    std::size_t best_epoch = 0;
    std::size_t epochs_run = 0;
    double total_seconds = 0.0;
    MlpModel best_model;
};

// Trains until max_epochs or early stop. When omega is given, records the
// structural change m_t between consecutive epoch snapshots.
FitResult fit(MlpModel& model, const Split& split, const TrainConfig& cfg,
              const OmegaSet* omega = nullptr);

}  // namespace glai
