#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glai/linalg.hpp"
#include "glai/mlp.hpp"

namespace glai {

enum class Task { classification, regression };

// Immutable after load; targets are class indices or value vectors
// depending on the task.
struct Dataset {
    std::vector<Vector> inputs;
    std::vector<int> class_targets;     // task == classification
    std::vector<Vector> value_targets;  // task == regression
    std::size_t input_dim = 0;
    Task task = Task::classification;
    std::size_t num_classes = 0;  // classification only

    std::size_t size() const { return inputs.size(); }
    std::size_t target_dim() const {
        return task == Task::classification ? num_classes
                                            : (value_targets.empty() ? 0 : value_targets[0].size());
    }
};

struct CsvSchema {
    std::vector<std::size_t> label_columns;    // classification: exactly one column
    std::vector<std::size_t> feature_columns;  // empty: every non-label column, in file order
    bool has_header = false;
    Task task = Task::classification;
};

// Comma-separated, decimal-point reals. Classification labels must be
// non-negative integers; k is inferred as max label + 1.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Writes features first, then the label column(s); no header row.
void save_csv(const Dataset& ds, const std::string& path);

// Big-endian IDX pair (magic 0x00000803 images / 0x00000801 labels).
// Pixels are scaled to [0, 1] and images flattened.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Standard-normal inputs labelled by a freshly initialized teacher MLP:
// regression targets are teacher outputs plus optional Gaussian noise,
// classification targets the argmax of the teacher logits.
Dataset gen_teacher(std::uint64_t seed, const Architecture& arch, std::size_t n_samples,
                    double noise_std, Task task);

struct Split {
    Dataset train;
    Dataset validation;
    std::uint64_t seed = 0;
};

// Deterministic shuffled split; validation gets round(val_fraction * n),
// clamped to [1, n - 1].
Split split_dataset(const Dataset& ds, double val_fraction, std::uint64_t seed);

}  // namespace glai
