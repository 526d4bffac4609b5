#include "glai/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "glai/errors.hpp"

namespace glai {

namespace {

double parse_real(const std::string& field, std::size_t line_no, std::size_t col) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end) {
        throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(col) +
                         ": cannot parse '" + field + "' as a number");
    }
    if (!std::isfinite(value)) {
        throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(col) +
                         ": non-finite value");
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

int class_index_from(double value, std::size_t line_no, std::size_t col) {
    const double rounded = std::floor(value + 0.5);
    if (value < 0.0 || std::abs(value - rounded) > 1e-9 || rounded > 1e9) {
        throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(col) +
                         ": class label must be a non-negative integer");
    }
    return static_cast<int>(rounded);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    if (schema.label_columns.empty()) {
        throw ConfigError("csv schema needs at least one label column");
    }
    if (schema.task == Task::classification && schema.label_columns.size() != 1) {
        throw ConfigError("classification expects exactly one label column");
    }

    Dataset ds;
    ds.task = schema.task;

    std::string line;
    std::size_t line_no = 0;
    bool header_skipped = !schema.has_header;
    std::size_t width = 0;
    std::vector<std::size_t> feature_cols = schema.feature_columns;
    int max_label = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        if (width == 0) {
            width = fields.size();
            for (std::size_t c : schema.label_columns) {
                if (c >= width) {
                    throw ConfigError("label column " + std::to_string(c) +
                                      " out of range for width " + std::to_string(width));
                }
            }
            if (feature_cols.empty()) {
                for (std::size_t c = 0; c < width; ++c) {
                    if (std::find(schema.label_columns.begin(), schema.label_columns.end(), c) ==
                        schema.label_columns.end()) {
                        feature_cols.push_back(c);
                    }
                }
            }
            for (std::size_t c : feature_cols) {
                if (c >= width) {
                    throw ConfigError("feature column " + std::to_string(c) +
                                      " out of range for width " + std::to_string(width));
                }
            }
            if (feature_cols.empty()) {
                throw ConfigError("csv schema leaves no feature columns");
            }
            ds.input_dim = feature_cols.size();
        } else if (fields.size() != width) {
            throw ParseError("row " + std::to_string(line_no) + ": expected " +
                             std::to_string(width) + " columns, found " +
                             std::to_string(fields.size()));
        }

        Vector x(feature_cols.size());
        for (std::size_t i = 0; i < feature_cols.size(); ++i) {
            x[i] = parse_real(fields[feature_cols[i]], line_no, feature_cols[i]);
        }
        ds.inputs.push_back(std::move(x));

        if (schema.task == Task::classification) {
            const std::size_t col = schema.label_columns[0];
            const int cls = class_index_from(parse_real(fields[col], line_no, col), line_no, col);
            max_label = std::max(max_label, cls);
            ds.class_targets.push_back(cls);
        } else {
            Vector y(schema.label_columns.size());
            for (std::size_t i = 0; i < schema.label_columns.size(); ++i) {
                y[i] = parse_real(fields[schema.label_columns[i]], line_no,
                                  schema.label_columns[i]);
            }
            ds.value_targets.push_back(std::move(y));
        }
    }

    if (ds.inputs.empty()) {
        throw ParseError("'" + path + "' holds no data rows");
    }
    if (schema.task == Task::classification) {
        ds.num_classes = static_cast<std::size_t>(max_label) + 1;
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::string line;
        for (double v : ds.inputs[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            line += buf;
            line += ',';
        }
        if (ds.task == Task::classification) {
            line += std::to_string(ds.class_targets[i]);
        } else {
            const Vector& y = ds.value_targets[i];
            for (std::size_t j = 0; j < y.size(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", y[j]);
                line += buf;
                if (j + 1 < y.size()) line += ',';
            }
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

namespace {

std::vector<unsigned char> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

std::uint32_t be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                   const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw ParseError("'" + path + "': truncated file");
    }
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<unsigned char> img = read_binary(images_path);
    const std::vector<unsigned char> lab = read_binary(labels_path);

    if (be32(img, 0, images_path) != 0x00000803u) {
        throw ParseError("'" + images_path + "': bad magic, expected 0x00000803");
    }
    if (be32(lab, 0, labels_path) != 0x00000801u) {
        throw ParseError("'" + labels_path + "': bad magic, expected 0x00000801");
    }
    const std::size_t n_images = be32(img, 4, images_path);
    const std::size_t rows = be32(img, 8, images_path);
    const std::size_t cols = be32(img, 12, images_path);
    const std::size_t n_labels = be32(lab, 4, labels_path);
    if (n_images != n_labels) {
        throw ParseError("count mismatch: " + std::to_string(n_images) + " images vs " +
                         std::to_string(n_labels) + " labels");
    }
    if (n_images == 0) {
        throw ParseError("'" + images_path + "': empty image set");
    }
    const std::size_t pixels = rows * cols;
    if (img.size() < 16 + n_images * pixels) {
        throw ParseError("'" + images_path + "': truncated file");
    }
    if (lab.size() < 8 + n_labels) {
        throw ParseError("'" + labels_path + "': truncated file");
    }

    Dataset ds;
    ds.task = Task::classification;
    ds.input_dim = pixels;
    ds.inputs.reserve(n_images);
    ds.class_targets.reserve(n_images);
    int max_label = 0;
    for (std::size_t i = 0; i < n_images; ++i) {
        Vector x(pixels);
        const unsigned char* base = img.data() + 16 + i * pixels;
        for (std::size_t p = 0; p < pixels; ++p) {
            x[p] = static_cast<double>(base[p]) / 255.0;
        }
        ds.inputs.push_back(std::move(x));
        const int cls = static_cast<int>(lab[8 + i]);
        max_label = std::max(max_label, cls);
        ds.class_targets.push_back(cls);
    }
    ds.num_classes = static_cast<std::size_t>(max_label) + 1;
    return ds;
}

Dataset gen_teacher(std::uint64_t seed, const Architecture& arch, std::size_t n_samples,
                    double noise_std, Task task) {
    arch.validate();
    if (n_samples == 0) {
        throw ConfigError("gen_teacher: n_samples must be positive");
    }
    if (noise_std < 0.0) {
        throw ConfigError("gen_teacher: noise_std must be non-negative");
    }
    const MlpModel teacher = new_mlp(arch, seed);
    Rng rng(derive_seed(seed, 1));

    Dataset ds;
    ds.task = task;
    ds.input_dim = arch.input_dim();
    if (task == Task::classification) {
        ds.num_classes = arch.output_dim();
    }
    ds.inputs.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        Vector x(arch.input_dim());
        for (double& v : x) {
            v = rng.normal();
        }
        Vector y = forward(teacher, x);
        if (task == Task::classification) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < y.size(); ++j) {
                if (y[j] > y[best]) best = j;
            }
            ds.class_targets.push_back(static_cast<int>(best));
        } else {
            if (noise_std > 0.0) {
                for (double& v : y) {
                    v += noise_std * rng.normal();
                }
            }
            ds.value_targets.push_back(std::move(y));
        }
        ds.inputs.push_back(std::move(x));
    }
    return ds;
}

namespace {

Dataset take_rows(const Dataset& src, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.task = src.task;
    out.input_dim = src.input_dim;
    out.num_classes = src.num_classes;
    out.inputs.reserve(rows.size());
    for (std::size_t r : rows) {
        out.inputs.push_back(src.inputs[r]);
        if (src.task == Task::classification) {
            out.class_targets.push_back(src.class_targets[r]);
        } else {
            out.value_targets.push_back(src.value_targets[r]);
        }
    }
    return out;
}

}  // namespace

Split split_dataset(const Dataset& ds, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw ConfigError("val_fraction must lie in (0, 1)");
    }
    const std::size_t n = ds.size();
    if (n < 2) {
        throw ConfigError("need at least 2 samples to split, got " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    auto val_count =
        static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(n) + 0.5));
    val_count = std::max<std::size_t>(1, std::min(val_count, n - 1));

    const std::vector<std::size_t> val_rows(order.begin(), order.begin() + val_count);
    const std::vector<std::size_t> train_rows(order.begin() + val_count, order.end());

    Split sp;
    sp.seed = seed;
    sp.validation = take_rows(ds, val_rows);
    sp.train = take_rows(ds, train_rows);
    return sp;
}

}  // namespace glai
