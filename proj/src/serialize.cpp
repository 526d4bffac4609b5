#include "glai/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glai/errors.hpp"

namespace glai {

namespace {

constexpr int kFormatVersion = 1;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ParseError("malformed document: " + what);
    }
}

const Json& field(const Json& j, const char* key) {
    require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
    return j.at(key);
}

void check_version(const Json& j) {
    require(field(j, "format_version").is_number_integer(), "format_version must be an integer");
    const int v = j.at("format_version").get<int>();
    if (v != kFormatVersion) {
        throw ParseError("unsupported format_version " + std::to_string(v));
    }
}

Architecture arch_from_json(const Json& j) {
    require(j.is_array() && j.size() >= 2, "arch must be an array of at least 2 dims");
    Architecture arch;
    for (const Json& d : j) {
        require(d.is_number_unsigned() || (d.is_number_integer() && d.get<long long>() > 0),
                "arch dims must be positive integers");
        arch.dims.push_back(d.get<std::size_t>());
    }
    arch.validate();
    return arch;
}

Vector finite_vector(const Json& j, const std::string& what) {
    require(j.is_array(), what + " must be an array");
    Vector v;
    v.reserve(j.size());
    for (const Json& e : j) {
        require(e.is_number(), what + " entries must be numbers");
        const double x = e.get<double>();
        require(std::isfinite(x), what + " entries must be finite");
        v.push_back(x);
    }
    return v;
}

}  // namespace

Json model_to_json(const MlpModel& m, const Json& training_meta) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["arch"] = m.arch.dims;
    Json weights = Json::array();
    for (const Matrix& w : m.weights) {
        weights.push_back(w.data);
    }
    j["weights"] = std::move(weights);
    Json biases = Json::array();
    for (const Vector& b : m.biases) {
        biases.push_back(b);
    }
    j["biases"] = std::move(biases);
    j["seed"] = m.seed;
    if (!training_meta.is_null()) {
        j["training_meta"] = training_meta;
    }
    return j;
}

MlpModel model_from_json(const Json& j) {
    check_version(j);
    MlpModel m;
    m.arch = arch_from_json(field(j, "arch"));
    const Json& weights = field(j, "weights");
    const Json& biases = field(j, "biases");
    const std::size_t layers = m.arch.dims.size() - 1;
    require(weights.is_array() && weights.size() == layers, "weights must hold one layer each");
    require(biases.is_array() && biases.size() == layers, "biases must hold one layer each");
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t rows = m.arch.dims[l + 1];
        const std::size_t cols = m.arch.dims[l];
        Matrix w(rows, cols);
        w.data = finite_vector(weights.at(l), "weights");
        require(w.data.size() == rows * cols, "weight matrix size mismatch");
        m.weights.push_back(std::move(w));
        Vector b = finite_vector(biases.at(l), "biases");
        require(b.size() == rows, "bias vector size mismatch");
        m.biases.push_back(std::move(b));
    }
    if (j.contains("seed")) {
        require(j.at("seed").is_number_unsigned() || j.at("seed").is_number_integer(),
                "seed must be an integer");
        m.seed = j.at("seed").get<std::uint64_t>();
    }
    return m;
}

Json path_table_to_json(const PathTable& table) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["arch"] = table.arch().dims;
    Json outputs = Json::array();
    for (std::size_t i = 0; i < table.outputs(); ++i) {
        Json group = Json::array();
        for (std::size_t p = table.output_begin(i); p < table.output_end(i); ++p) {
            const auto route = table.hidden(p);
            group.push_back(Json::array(
                {table.origin(p), std::vector<std::int32_t>(route.begin(), route.end()),
                 table.weight(p)}));
        }
        outputs.push_back(std::move(group));
    }
    j["outputs"] = std::move(outputs);
    return j;
}

PathTable path_table_from_json(const Json& j) {
    check_version(j);
    PathTable table;
    table.set_arch(arch_from_json(field(j, "arch")));
    const Json& outputs = field(j, "outputs");
    require(outputs.is_array() && outputs.size() == table.arch().output_dim(),
            "outputs must hold one group per output neuron");
    for (const Json& group : outputs) {
        require(group.is_array(), "output group must be an array");
        table.begin_output();
        for (const Json& entry : group) {
            require(entry.is_array() && entry.size() == 3, "path entry must be a triple");
            require(entry.at(0).is_number_integer(), "path origin must be an integer");
            const int origin = entry.at(0).get<int>();
            require(entry.at(1).is_array(), "path hidden route must be an array");
            std::vector<std::int32_t> route;
            for (const Json& h : entry.at(1)) {
                require(h.is_number_integer(), "hidden index must be an integer");
                route.push_back(h.get<std::int32_t>());
            }
            require(entry.at(2).is_number(), "path weight must be a number");
            const double w = entry.at(2).get<double>();
            require(std::isfinite(w), "path weight must be finite");
            table.append(origin, route, w);
        }
    }
    return table;
}

Json parity_to_json(const ParityLedger& p) {
    return Json{{"original_params", p.original_params},
                {"reduced_params", p.reduced_params},
                {"estimator_paths", p.estimator_paths},
                {"sigma", p.sigma},
                {"sigma_clamped", p.sigma_clamped},
                {"retained_paths", p.retained_paths},
                {"glai_param_total", p.glai_param_total}};
}

ParityLedger parity_from_json(const Json& j) {
    ParityLedger p;
    p.original_params = field(j, "original_params").get<std::size_t>();
    p.reduced_params = field(j, "reduced_params").get<std::size_t>();
    p.estimator_paths = field(j, "estimator_paths").get<std::uint64_t>();
    p.sigma = field(j, "sigma").get<double>();
    p.sigma_clamped = field(j, "sigma_clamped").get<bool>();
    p.retained_paths = field(j, "retained_paths").get<std::uint64_t>();
    p.glai_param_total = field(j, "glai_param_total").get<std::size_t>();
    return p;
}

Json prune_report_to_json(const PruneReport& r) {
    return Json{{"removed_count", r.removed_count},
                {"kept_count", r.kept_count},
                {"score_threshold", r.score_threshold},
                {"error_bound", r.error_bound},
                {"realized_error", r.realized_error}};
}

PruneReport prune_report_from_json(const Json& j) {
    PruneReport r;
    r.removed_count = field(j, "removed_count").get<std::uint64_t>();
    r.kept_count = field(j, "kept_count").get<std::uint64_t>();
    r.score_threshold = field(j, "score_threshold").get<double>();
    r.error_bound = field(j, "error_bound").get<double>();
    r.realized_error = field(j, "realized_error").get<double>();
    return r;
}

Json glai_to_json(const GlaiModel& g) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["structure"] = model_to_json(g.structure);
    j["retained_paths"] = path_table_to_json(g.retained);
    Json estimator = Json::array();
    for (std::size_t i = 0; i < g.retained.outputs(); ++i) {
        const auto span = g.estimator_for_output(i);
        estimator.push_back(std::vector<double>(span.begin(), span.end()));
    }
    j["estimator"] = std::move(estimator);
    j["parity"] = parity_to_json(g.parity);
    return j;
}

GlaiModel glai_from_json(const Json& j) {
    check_version(j);
    GlaiModel g;
    g.structure = model_from_json(field(j, "structure"));
    g.retained = path_table_from_json(field(j, "retained_paths"));
    require(g.retained.arch() == g.structure.arch, "retained paths arch differs from structure");
    const Json& estimator = field(j, "estimator");
    require(estimator.is_array() && estimator.size() == g.retained.outputs(),
            "estimator must hold one weight list per output");
    for (std::size_t i = 0; i < estimator.size(); ++i) {
        const Vector w = finite_vector(estimator.at(i), "estimator");
        require(w.size() == g.retained.output_end(i) - g.retained.output_begin(i),
                "estimator weights must align with retained paths");
        g.estimator.insert(g.estimator.end(), w.begin(), w.end());
    }
    g.parity = parity_from_json(field(j, "parity"));
    return g;
}

namespace {

Json record_to_json(const EpochRecord& r) {
    Json j{{"phase", r.phase},
           {"epoch", r.epoch},
           {"train_loss", r.train_loss},
           {"val_loss", r.val_loss},
           {"seconds", r.seconds}};
    if (r.val_accuracy) {
        j["val_accuracy"] = *r.val_accuracy;
    }
    if (r.m_t) {
        j["m_t"] = *r.m_t;
    }
    return j;
}

EpochRecord record_from_json(const Json& j) {
    EpochRecord r;
    r.phase = field(j, "phase").get<std::string>();
    r.epoch = field(j, "epoch").get<std::size_t>();
    r.train_loss = field(j, "train_loss").get<double>();
    r.val_loss = field(j, "val_loss").get<double>();
    r.seconds = field(j, "seconds").get<double>();
    if (j.contains("val_accuracy")) {
        r.val_accuracy = j.at("val_accuracy").get<double>();
    }
    if (j.contains("m_t")) {
        r.m_t = j.at("m_t").get<double>();
    }
    return r;
}

}  // namespace

Json run_report_to_json(const RunReport& r) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["arm"] = r.arm;
    Json records = Json::array();
    for (const EpochRecord& rec : r.records) {
        records.push_back(record_to_json(rec));
    }
    j["records"] = std::move(records);
    j["best_validation_score"] = r.best_validation_score;
    j["best_epoch"] = r.best_epoch;
    j["epochs_to_stop"] = r.epochs_to_stop;
    j["total_wall_clock"] = r.total_wall_clock;
    if (r.parity) {
        j["parity"] = parity_to_json(*r.parity);
    }
    if (r.prune) {
        j["prune"] = prune_report_to_json(*r.prune);
    }
    return j;
}

RunReport run_report_from_json(const Json& j) {
    check_version(j);
    RunReport r;
    r.arm = field(j, "arm").get<std::string>();
    for (const Json& rec : field(j, "records")) {
        r.records.push_back(record_from_json(rec));
    }
    r.best_validation_score = field(j, "best_validation_score").get<double>();
    r.best_epoch = field(j, "best_epoch").get<std::size_t>();
    r.epochs_to_stop = field(j, "epochs_to_stop").get<std::size_t>();
    r.total_wall_clock = field(j, "total_wall_clock").get<double>();
    if (j.contains("parity")) {
        r.parity = parity_from_json(j.at("parity"));
    }
    if (j.contains("prune")) {
        r.prune = prune_report_from_json(j.at("prune"));
    }
    return r;
}

Json comparison_to_json(const ComparisonReport& r) {
    Json j;
    j["format_version"] = kFormatVersion;
    Json runs = Json::array();
    for (const SeededComparison& run : r.runs) {
        runs.push_back(Json{{"seed", run.seed},
                            {"mlp", run_report_to_json(run.mlp)},
                            {"glai", run_report_to_json(run.glai)},
                            {"speedup", run.speedup},
                            {"bvs_delta", run.bvs_delta}});
    }
    j["runs"] = std::move(runs);
    j["mean"] = Json{{"speedup", r.mean_speedup},
                     {"bvs_delta", r.mean_bvs_delta},
                     {"mlp_bvs", r.mean_mlp_bvs},
                     {"glai_bvs", r.mean_glai_bvs},
                     {"mlp_epochs", r.mean_mlp_epochs},
                     {"glai_epochs", r.mean_glai_epochs}};
    return j;
}

ComparisonReport comparison_from_json(const Json& j) {
    check_version(j);
    ComparisonReport r;
    for (const Json& run : field(j, "runs")) {
        SeededComparison c;
        c.seed = field(run, "seed").get<std::uint64_t>();
        c.mlp = run_report_from_json(field(run, "mlp"));
        c.glai = run_report_from_json(field(run, "glai"));
        c.speedup = field(run, "speedup").get<double>();
        c.bvs_delta = field(run, "bvs_delta").get<double>();
        r.runs.push_back(std::move(c));
    }
    const Json& mean = field(j, "mean");
    r.mean_speedup = field(mean, "speedup").get<double>();
    r.mean_bvs_delta = field(mean, "bvs_delta").get<double>();
    r.mean_mlp_bvs = field(mean, "mlp_bvs").get<double>();
    r.mean_glai_bvs = field(mean, "glai_bvs").get<double>();
    r.mean_mlp_epochs = field(mean, "mlp_epochs").get<double>();
    r.mean_glai_epochs = field(mean, "glai_epochs").get<double>();
    return r;
}

std::string metrics_csv(const std::vector<EpochRecord>& records) {
    std::string out = "phase,epoch,train_loss,val_loss,val_acc,m_t,seconds\n";
    char buf[64];
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const EpochRecord& r : records) {
        out += r.phase;
        out += ',' + std::to_string(r.epoch);
        out += ',' + num(r.train_loss);
        out += ',' + num(r.val_loss);
        out += ',';
        if (r.val_accuracy) out += num(*r.val_accuracy);
        out += ',';
        if (r.m_t) out += num(*r.m_t);
        out += ',' + num(r.seconds);
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

Json load_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("'" + path + "' is not valid JSON");
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace glai
