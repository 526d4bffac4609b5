#include "glai/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "glai/errors.hpp"
#include "glai/pipeline.hpp"
#include "glai/serialize.hpp"
#include "glai/svg.hpp"

namespace glai::cli {

namespace fs = std::filesystem;

namespace {

Architecture parse_arch(const std::string& text) {
    Architecture arch;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (cur.empty()) {
                throw ConfigError("bad architecture '" + text + "'");
            }
            try {
                arch.dims.push_back(std::stoul(cur));
            } catch (const std::exception&) {
                throw ConfigError("bad architecture '" + text + "'");
            }
            cur.clear();
        } else if (c >= '0' && c <= '9') {
            cur.push_back(c);
        } else if (c != ' ') {
            throw ConfigError("bad architecture '" + text + "'");
        }
    }
    arch.validate();
    return arch;
}

Task parse_task(const std::string& s) {
    if (s == "classification") return Task::classification;
    if (s == "regression") return Task::regression;
    throw ConfigError("task must be 'classification' or 'regression', got '" + s + "'");
}

LossKind parse_loss(const std::string& s) {
    if (s == "cross_entropy") return LossKind::cross_entropy;
    if (s == "squared_error") return LossKind::squared_error;
    throw ConfigError("loss must be 'cross_entropy' or 'squared_error', got '" + s + "'");
}

Monitor parse_monitor(const std::string& s) {
    if (s == "val_accuracy") return Monitor::val_accuracy;
    if (s == "val_loss") return Monitor::val_loss;
    throw ConfigError("monitor must be 'val_accuracy' or 'val_loss', got '" + s + "'");
}

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) {
        throw ConfigError(std::string(what) + " file does not exist: " + path);
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("GLAI_SEED");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    try {
        return std::stoull(raw);
    } catch (const std::exception&) {
        throw ConfigError(std::string("GLAI_SEED is not an integer: ") + raw);
    }
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }
}

// Shared dataset flags: the trailing `target_cols` columns are targets.
struct DataFlags {
    std::string path;
    std::string task = "classification";
    std::size_t target_cols = 1;
    bool has_header = false;

    void attach(CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--data", path, "dataset CSV file");
        if (required) opt->required();
        cmd->add_option("--task", task, "classification or regression");
        cmd->add_option("--target-cols", target_cols,
                        "number of trailing target columns (regression)");
        cmd->add_flag("--has-header", has_header, "skip the first CSV row");
    }

    Dataset load() const {
        require_file(path, "dataset");
        const Task t = parse_task(task);
        if (t == Task::classification && target_cols != 1) {
            throw ConfigError("classification expects exactly one target column");
        }
        // column count comes from the first data row
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot open '" + path + "' for reading");
        }
        std::string line;
        std::size_t skip = has_header ? 1 : 0;
        std::size_t width = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            if (skip > 0) {
                --skip;
                continue;
            }
            width = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
            break;
        }
        if (width == 0) {
            throw ParseError("'" + path + "' holds no data rows");
        }
        if (target_cols >= width) {
            throw ConfigError("target-cols leaves no feature columns");
        }
        CsvSchema schema;
        schema.task = t;
        schema.has_header = has_header;
        for (std::size_t c = width - target_cols; c < width; ++c) {
            schema.label_columns.push_back(c);
        }
        return load_csv(path, schema);
    }
};

struct TrainFlags {
    double lr = 1e-3;
    std::size_t batch_size = 16;
    double weight_decay = 1e-3;
    std::size_t max_epochs = 60;
    std::uint64_t seed = 1;
    double val_fraction = 0.2;
    std::string monitor;  // defaulted from the task
    std::size_t patience = 5;
    double min_delta = -1.0;  // defaulted from the monitor

    void attach(CLI::App* cmd, double default_wd) {
        weight_decay = default_wd;
        cmd->add_option("--lr", lr, "SGD learning rate");
        cmd->add_option("--batch-size", batch_size, "mini-batch size");
        cmd->add_option("--weight-decay", weight_decay, "decoupled weight decay");
        cmd->add_option("--max-epochs", max_epochs, "epoch cap");
        cmd->add_option("--seed", seed, "seed for init and shuffling");
        cmd->add_option("--val-fraction", val_fraction, "validation fraction of the dataset");
        cmd->add_option("--monitor", monitor, "val_accuracy or val_loss");
        cmd->add_option("--patience", patience, "early-stopping patience");
        cmd->add_option("--min-delta", min_delta, "early-stopping min improvement");
    }

    TrainConfig build(Task task) const {
        TrainConfig cfg;
        cfg.learning_rate = lr;
        cfg.batch_size = batch_size;
        cfg.weight_decay = weight_decay;
        cfg.max_epochs = max_epochs;
        cfg.seed = env_seed().value_or(seed);
        cfg.loss = task == Task::classification ? LossKind::cross_entropy
                                                : LossKind::squared_error;
        cfg.early_stop.monitor = monitor.empty()
                                     ? (task == Task::classification ? Monitor::val_accuracy
                                                                     : Monitor::val_loss)
                                     : parse_monitor(monitor);
        cfg.early_stop.patience = patience;
        cfg.early_stop.min_delta =
            min_delta >= 0.0
                ? min_delta
                : (cfg.early_stop.monitor == Monitor::val_accuracy ? 1e-3 : 1e-5);
        cfg.validate();
        return cfg;
    }
};

// ---------------------------------------------------------------- gen-data

int cmd_gen_data(const std::string& teacher, std::size_t n, std::uint64_t seed, double noise_std,
                 const std::string& task, const std::string& out_dir) {
    const Architecture arch = parse_arch(teacher);
    if (n == 0) {
        throw ConfigError("--n must be positive");
    }
    const std::uint64_t effective_seed = env_seed().value_or(seed);
    const Dataset ds = gen_teacher(effective_seed, arch, n, noise_std, parse_task(task));
    ensure_out_dir(out_dir);
    save_csv(ds, out_dir + "/data.csv");
    save_json_file(out_dir + "/teacher.json", model_to_json(new_mlp(arch, effective_seed)));
    std::cout << "wrote " << out_dir << "/data.csv (" << ds.size() << " rows) and "
              << out_dir << "/teacher.json\n";
    return 0;
}

// ---------------------------------------------------------------- train-mlp

int cmd_train_mlp(const DataFlags& data_flags, const TrainFlags& train_flags,
                  const std::string& arch_text, const std::string& out_dir) {
    const Architecture arch = parse_arch(arch_text);
    const Dataset ds = data_flags.load();
    const TrainConfig cfg = train_flags.build(ds.task);
    const Split split = split_dataset(ds, train_flags.val_fraction, cfg.seed);

    MlpModel model = new_mlp(arch, cfg.seed);
    const FitResult result = fit(model, split, cfg);

    RunReport report;
    report.arm = "mlp";
    report.records = result.records;
    report.best_validation_score = result.best_score;
    report.best_epoch = result.best_epoch;
    report.epochs_to_stop = result.epochs_run;
    report.total_wall_clock = result.total_seconds;

    ensure_out_dir(out_dir);
    Json meta;
    meta["loss"] = cfg.loss == LossKind::cross_entropy ? "cross_entropy" : "squared_error";
    meta["epochs_trained"] = result.epochs_run;
    meta["best_epoch"] = result.best_epoch;
    meta["best_validation_score"] = result.best_score;
    save_json_file(out_dir + "/model.json", model_to_json(result.best_model, meta));
    save_json_file(out_dir + "/report.json", run_report_to_json(report));
    write_text_file(out_dir + "/metrics.csv", metrics_csv(report.records));
    std::cout << "trained " << result.epochs_run << " epochs, best validation score "
              << result.best_score << " at epoch " << result.best_epoch << "\n";
    return 0;
}

// ----------------------------------------------------------------- to-glai

Architecture infer_original_arch(const Architecture& reduced, double rho) {
    Architecture original = reduced;
    for (std::size_t l = 1; l + 1 < reduced.dims.size(); ++l) {
        original.dims[l] = static_cast<std::size_t>(
            std::floor(static_cast<double>(reduced.dims[l]) / rho + 0.5));
    }
    return original;
}

int cmd_to_glai(const std::string& model_path, double rho, double sigma_flag,
                const std::string& original_arch_text, const DataFlags& data_flags,
                std::size_t omega_max, std::uint64_t seed, std::uint64_t path_budget,
                const std::string& out_dir) {
    require_file(model_path, "model");
    const MlpModel structure = model_from_json(load_json_file(model_path));
    const Dataset ds = data_flags.load();
    if (ds.input_dim != structure.arch.input_dim()) {
        throw ConfigError("dataset input_dim does not match the model");
    }

    const std::uint64_t effective_seed = env_seed().value_or(seed);
    OmegaSet omega;
    {
        Split pseudo;
        pseudo.train = ds;
        OmegaSpec spec;
        spec.max_samples = omega_max;
        omega = make_omega(pseudo, spec, effective_seed);
    }

    double sigma = sigma_flag;
    bool clamped = false;
    std::size_t original_params = 0;
    if (sigma <= 0.0) {  // derive from the parity formulas
        if (!(rho > 0.0 && rho < 1.0)) {
            throw ConfigError("--rho must lie in (0, 1) when --sigma is not given");
        }
        Architecture original = original_arch_text.empty()
                                    ? infer_original_arch(structure.arch, rho)
                                    : parse_arch(original_arch_text);
        if (reduce_arch(original, rho) != structure.arch) {
            throw ConfigError(
                "reduce_arch(original, rho) does not reproduce the model architecture; "
                "pass --original-arch explicitly");
        }
        const SigmaResult sr = compute_sigma(original, rho);
        sigma = sr.sigma;
        clamped = sr.clamped;
        original_params = param_count_original(original);
        if (clamped) {
            std::cerr << "warning: (O - R) / E exceeds 1, clamping sigma to 1 "
                         "(the GLAI model will have fewer parameters than the original)\n";
        }
    } else if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ConfigError("--sigma must lie in (0, 1]");
    }

    GlaiModel g = expand(structure, path_budget);
    if (original_params > 0) {
        g.parity.original_params = original_params;
    }
    g.parity.sigma = sigma;
    g.parity.sigma_clamped = clamped;

    PruneReport prune_report;
    Json self_test;
    if (sigma < 1.0) {
        auto [pruned, rep] = prune(g, sigma, omega);
        pruned.parity.original_params = g.parity.original_params;
        g = std::move(pruned);
        prune_report = rep;
    } else {
        prune_report.kept_count = g.retained.size();
        g.parity.retained_paths = g.retained.size();
        g.parity.glai_param_total = g.parity.reduced_params + g.retained.size();
        // unpruned conversion: check the exact-equivalence guarantee over Omega
        double max_scaled = 0.0;
        for (const Vector& x : omega.samples) {
            const Vector direct = forward(structure, x);
            const Vector via_paths = glai_forward(g, x);
            double inf_norm = 0.0;
            for (double v : direct) inf_norm = std::max(inf_norm, std::abs(v));
            for (std::size_t i = 0; i < direct.size(); ++i) {
                max_scaled = std::max(max_scaled,
                                      std::abs(via_paths[i] - direct[i]) / (1.0 + inf_norm));
            }
        }
        self_test["equivalence_max_scaled_error"] = max_scaled;
        self_test["passed"] = max_scaled <= 1e-9;
        std::cout << "equivalence self-test: max scaled error " << max_scaled
                  << (max_scaled <= 1e-9 ? " (passed)" : " (FAILED)") << "\n";
    }

    ensure_out_dir(out_dir);
    Json doc = glai_to_json(g);
    doc["prune"] = prune_report_to_json(prune_report);
    if (!self_test.is_null()) {
        doc["self_test"] = self_test;
    }
    save_json_file(out_dir + "/glai.json", doc);
    std::cout << "sigma " << g.parity.sigma << ", retained " << g.parity.retained_paths << " of "
              << g.parity.estimator_paths << " paths; parameters " << g.parity.glai_param_total
              << " (original " << g.parity.original_params << ")\n";
    return 0;
}

// ---------------------------------------------------------- train-estimator

int cmd_train_estimator(const std::string& glai_path, const DataFlags& data_flags,
                        const TrainFlags& train_flags, const std::string& out_dir) {
    require_file(glai_path, "glai model");
    GlaiModel g = glai_from_json(load_json_file(glai_path));
    const Dataset ds = data_flags.load();
    const TrainConfig cfg = train_flags.build(ds.task);
    const Split split = split_dataset(ds, train_flags.val_fraction, cfg.seed);

    const EstimatorFitResult result = fit_estimator(g, split, cfg);
    g.estimator = result.best_estimator;

    RunReport report;
    report.arm = "glai";
    report.records = result.records;
    report.best_validation_score = result.best_score;
    report.best_epoch = result.best_epoch;
    report.epochs_to_stop = result.epochs_run;
    report.total_wall_clock = result.total_seconds;
    report.parity = g.parity;

    ensure_out_dir(out_dir);
    save_json_file(out_dir + "/glai_trained.json", glai_to_json(g));
    save_json_file(out_dir + "/report.json", run_report_to_json(report));
    write_text_file(out_dir + "/metrics.csv", metrics_csv(report.records));
    std::cout << "trained " << result.epochs_run << " estimator epochs, best validation score "
              << result.best_score << " at epoch " << result.best_epoch << "\n";
    return 0;
}

// ---------------------------------------------------------------- pipeline

void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

TrainConfig train_config_from_json(const Json& j, const std::string& where) {
    reject_unknown_keys(j, {"learning_rate", "batch_size", "weight_decay", "max_epochs", "loss",
                            "early_stop"},
                        where);
    TrainConfig cfg;
    if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("weight_decay")) cfg.weight_decay = j.at("weight_decay").get<double>();
    if (j.contains("max_epochs")) cfg.max_epochs = j.at("max_epochs").get<std::size_t>();
    if (j.contains("loss")) cfg.loss = parse_loss(j.at("loss").get<std::string>());
    if (j.contains("early_stop")) {
        const Json& es = j.at("early_stop");
        reject_unknown_keys(es, {"monitor", "patience", "min_delta"}, where + ".early_stop");
        if (es.contains("monitor")) {
            cfg.early_stop.monitor = parse_monitor(es.at("monitor").get<std::string>());
        }
        if (es.contains("patience")) {
            cfg.early_stop.patience = es.at("patience").get<std::size_t>();
        }
        if (es.contains("min_delta")) {
            cfg.early_stop.min_delta = es.at("min_delta").get<double>();
        }
    }
    return cfg;
}

struct PipelineSettings {
    ExperimentConfig experiment;
    std::string output_dir = "out";
    std::size_t seeds = 1;
};

PipelineSettings pipeline_settings_from_json(const Json& j) {
    reject_unknown_keys(j,
                        {"seed", "arch", "data", "val_fraction", "mlp_train", "glai",
                         "glai_phase2", "convergence_rule", "omega", "path_budget", "output_dir",
                         "seeds"},
                        "config");
    PipelineSettings out;
    ExperimentConfig& cfg = out.experiment;

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("arch")) throw ConfigError("config needs an 'arch' array");
    cfg.arch = Architecture(j.at("arch").get<std::vector<std::size_t>>());

    if (!j.contains("data")) throw ConfigError("config needs a 'data' object");
    const Json& data = j.at("data");
    const std::string type = data.value("type", "teacher");
    if (type == "teacher") {
        reject_unknown_keys(data, {"type", "arch", "n", "noise_std", "task", "seed"}, "data");
        cfg.data.source = DataSpec::Source::teacher;
        if (!data.contains("arch")) throw ConfigError("teacher data needs an 'arch'");
        cfg.data.teacher_arch = Architecture(data.at("arch").get<std::vector<std::size_t>>());
        cfg.data.n_samples = data.value("n", std::size_t{1000});
        cfg.data.noise_std = data.value("noise_std", 0.0);
        cfg.data.task = parse_task(data.value("task", std::string("classification")));
        cfg.data.data_seed = data.value("seed", std::uint64_t{0});
    } else if (type == "csv") {
        reject_unknown_keys(data, {"type", "path", "task", "target_cols", "has_header"}, "data");
        cfg.data.source = DataSpec::Source::csv;
        cfg.data.csv_path = data.at("path").get<std::string>();
        DataFlags flags;
        flags.path = cfg.data.csv_path;
        flags.task = data.value("task", std::string("classification"));
        flags.target_cols = data.value("target_cols", std::size_t{1});
        flags.has_header = data.value("has_header", false);
        // materialize the schema once so both arms share it
        const Dataset probe = flags.load();
        cfg.data.task = probe.task;
        cfg.data.csv_schema.task = probe.task;
        cfg.data.csv_schema.has_header = flags.has_header;
        const std::size_t width = probe.input_dim + (probe.task == Task::classification
                                                         ? 1
                                                         : probe.target_dim());
        for (std::size_t c = width - (probe.task == Task::classification ? 1 : probe.target_dim());
             c < width; ++c) {
            cfg.data.csv_schema.label_columns.push_back(c);
        }
    } else if (type == "idx") {
        reject_unknown_keys(data, {"type", "images", "labels"}, "data");
        cfg.data.source = DataSpec::Source::idx;
        cfg.data.idx_images = data.at("images").get<std::string>();
        cfg.data.idx_labels = data.at("labels").get<std::string>();
        cfg.data.task = Task::classification;
    } else {
        throw ConfigError("data.type must be teacher, csv or idx");
    }

    if (j.contains("val_fraction")) cfg.val_fraction = j.at("val_fraction").get<double>();
    if (j.contains("mlp_train")) {
        cfg.mlp_train = train_config_from_json(j.at("mlp_train"), "mlp_train");
    }
    if (cfg.data.task == Task::regression) {
        cfg.mlp_train.loss = LossKind::squared_error;
        cfg.mlp_train.early_stop.monitor = Monitor::val_loss;
    }

    double glai_wd = 0.1;
    if (j.contains("glai")) {
        const Json& glai = j.at("glai");
        reject_unknown_keys(glai, {"rho", "phase1_epochs", "weight_decay"}, "glai");
        if (glai.contains("rho")) cfg.glai_phase1.rho = glai.at("rho").get<double>();
        if (glai.contains("phase1_epochs")) {
            cfg.glai_phase1.epochs = glai.at("phase1_epochs").get<std::size_t>();
        }
        if (glai.contains("weight_decay")) glai_wd = glai.at("weight_decay").get<double>();
    }
    if (j.contains("glai_phase2")) {
        cfg.glai_phase2 = train_config_from_json(j.at("glai_phase2"), "glai_phase2");
    } else {
        cfg.glai_phase2 = cfg.mlp_train;
        cfg.glai_phase2.weight_decay = glai_wd;
    }
    if (j.contains("convergence_rule")) {
        const Json& rule = j.at("convergence_rule");
        reject_unknown_keys(rule, {"window", "rel_threshold"}, "convergence_rule");
        if (rule.contains("window")) {
            cfg.convergence_rule.window = rule.at("window").get<std::size_t>();
        }
        if (rule.contains("rel_threshold")) {
            cfg.convergence_rule.rel_threshold = rule.at("rel_threshold").get<double>();
        }
    }
    if (j.contains("omega")) {
        const Json& omega = j.at("omega");
        reject_unknown_keys(omega, {"source", "max_samples"}, "omega");
        const std::string source = omega.value("source", std::string("train"));
        if (source == "train") {
            cfg.omega_spec.source = OmegaSpec::Source::train;
        } else if (source == "validation") {
            cfg.omega_spec.source = OmegaSpec::Source::validation;
        } else {
            throw ConfigError("omega.source must be 'train' or 'validation'");
        }
        if (omega.contains("max_samples")) {
            cfg.omega_spec.max_samples = omega.at("max_samples").get<std::size_t>();
        }
    }
    if (j.contains("path_budget")) cfg.path_budget = j.at("path_budget").get<std::uint64_t>();
    if (j.contains("output_dir")) out.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seeds")) out.seeds = j.at("seeds").get<std::size_t>();
    return out;
}

int cmd_pipeline(const std::string& config_path, const std::string& out_flag,
                 std::size_t seeds_flag, bool force, double rho_flag, long long seed_flag,
                 long long max_epochs_flag) {
    require_file(config_path, "config");
    PipelineSettings settings = pipeline_settings_from_json(load_json_file(config_path));
    ExperimentConfig& cfg = settings.experiment;

    // flags win over the config file; GLAI_SEED wins over both
    if (!out_flag.empty()) settings.output_dir = out_flag;
    if (seeds_flag > 0) settings.seeds = seeds_flag;
    if (rho_flag > 0.0) cfg.glai_phase1.rho = rho_flag;
    if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
    if (max_epochs_flag > 0) {
        cfg.mlp_train.max_epochs = static_cast<std::size_t>(max_epochs_flag);
        cfg.glai_phase2.max_epochs = static_cast<std::size_t>(max_epochs_flag);
    }
    if (const auto seed = env_seed()) {
        cfg.seed = *seed;
    }
    cfg.validate();

    const fs::path out_dir(settings.output_dir);
    if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force) {
        throw ConfigError("output directory '" + settings.output_dir +
                          "' already holds files; pass --force to overwrite");
    }
    ensure_out_dir(settings.output_dir);

    const ComparisonReport report = compare(cfg, settings.seeds);
    save_json_file(settings.output_dir + "/comparison.json", comparison_to_json(report));

    for (const SeededComparison& run : report.runs) {
        const std::string tag = "seed" + std::to_string(run.seed);
        write_text_file(settings.output_dir + "/" + tag + "_mlp_metrics.csv",
                        metrics_csv(run.mlp.records));
        write_text_file(settings.output_dir + "/" + tag + "_glai_metrics.csv",
                        metrics_csv(run.glai.records));
    }

    // figures from the first run: losses for both arms, m_t for phase 1
    const SeededComparison& first = report.runs.front();
    std::vector<ChartSeries> loss_series(4);
    loss_series[0].label = "mlp train";
    loss_series[1].label = "mlp val";
    loss_series[2].label = "glai train";
    loss_series[3].label = "glai val";
    for (const EpochRecord& r : first.mlp.records) {
        loss_series[0].xs.push_back(static_cast<double>(r.epoch));
        loss_series[0].ys.push_back(r.train_loss);
        loss_series[1].xs.push_back(static_cast<double>(r.epoch));
        loss_series[1].ys.push_back(r.val_loss);
    }
    for (const EpochRecord& r : first.glai.records) {
        loss_series[2].xs.push_back(static_cast<double>(r.epoch));
        loss_series[2].ys.push_back(r.train_loss);
        loss_series[3].xs.push_back(static_cast<double>(r.epoch));
        loss_series[3].ys.push_back(r.val_loss);
    }
    write_text_file(settings.output_dir + "/loss.svg",
                    line_chart_svg("Training and validation loss", "epoch", "loss", loss_series));

    // phase-1 validation loss next to the relative path distance m_t / m_1
    ChartSeries m_series, v_series;
    m_series.label = "m_t / m_1";
    v_series.label = "val loss";
    double m_first = 0.0;
    for (const EpochRecord& r : first.glai.records) {
        if (!r.m_t) continue;
        if (m_first == 0.0) m_first = *r.m_t;
        m_series.xs.push_back(static_cast<double>(r.epoch));
        m_series.ys.push_back(m_first > 0.0 ? *r.m_t / m_first : 0.0);
        v_series.xs.push_back(static_cast<double>(r.epoch));
        v_series.ys.push_back(r.val_loss);
    }
    write_text_file(settings.output_dir + "/structural.svg",
                    line_chart_svg("Structural change and validation loss", "epoch",
                                   "relative path distance / loss", {m_series, v_series}));

    std::cout << "mean speedup " << report.mean_speedup << ", mean BVS delta "
              << report.mean_bvs_delta << " over " << report.runs.size() << " seed(s)\n"
              << "mlp epochs " << report.mean_mlp_epochs << " vs glai epochs "
              << report.mean_glai_epochs << "\n"
              << "reports in " << settings.output_dir << "\n";
    return 0;
}

// ------------------------------------------------------------ inspect-paths

int cmd_inspect_paths(const std::string& glai_path, const DataFlags& data_flags, std::size_t top,
                      std::size_t omega_max, std::uint64_t seed, const std::string& out_file) {
    require_file(glai_path, "glai model");
    const GlaiModel g = glai_from_json(load_json_file(glai_path));
    const Dataset ds = data_flags.load();

    OmegaSet omega;
    {
        Split pseudo;
        pseudo.train = ds;
        OmegaSpec spec;
        spec.max_samples = omega_max;
        omega = make_omega(pseudo, spec, env_seed().value_or(seed));
    }

    const std::vector<double> norms = path_norms(g, omega);
    std::vector<double> scores(norms.size());
    for (std::size_t p = 0; p < norms.size(); ++p) {
        scores[p] = std::abs(g.estimator[p]) * norms[p];
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::string csv = "rank,output,origin,route,weight,norm,score\n";
    char buf[64];
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    const std::size_t rows = std::min(top, order.size());
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t p = order[r];
        const int origin = g.retained.origin(p);
        std::string route;
        for (std::int32_t h : g.retained.hidden(p)) {
            if (!route.empty()) route += '>';
            route += std::to_string(h);
        }
        csv += std::to_string(r + 1);
        csv += ',' + std::to_string(g.retained.output_of(p));
        csv += ',' + (origin >= 0 ? "in:" + std::to_string(origin)
                                  : "bias:" + std::to_string(-origin));
        csv += ',' + route;
        csv += ',' + num(g.estimator[p]);
        csv += ',' + num(norms[p]);
        csv += ',' + num(scores[p]);
        csv += '\n';
    }
    if (out_file.empty()) {
        std::cout << csv;
    } else {
        write_text_file(out_file, csv);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"GLAI: path-based rewriting and accelerated retraining of ReLU MLPs"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a teacher-labelled dataset");
    std::string gen_teacher_arch;
    std::size_t gen_n = 1000;
    std::uint64_t gen_seed = 1;
    double gen_noise = 0.0;
    std::string gen_task = "classification";
    std::string gen_out = "data";
    gen->add_option("--teacher", gen_teacher_arch, "teacher architecture, e.g. 8,16,3")
        ->required();
    gen->add_option("--n", gen_n, "number of samples")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--noise-std", gen_noise, "target noise (regression only)");
    gen->add_option("--task", gen_task, "classification or regression");
    gen->add_option("--out", gen_out, "output directory");

    // train-mlp
    auto* train = app.add_subcommand("train-mlp", "train a ReLU MLP with SGD + early stopping");
    DataFlags train_data;
    TrainFlags train_flags;
    std::string train_arch;
    std::string train_out = "mlp";
    train_data.attach(train);
    train_flags.attach(train, 1e-3);
    train->add_option("--arch", train_arch, "model architecture, e.g. 16,64,64,4")->required();
    train->add_option("--out", train_out, "output directory");

    // to-glai
    auto* conv = app.add_subcommand(
        "to-glai", "rewrite a trained MLP as a GLAI model (expand, score, prune)");
    DataFlags conv_data;
    std::string conv_model;
    std::string conv_original;
    std::string conv_out = "glai";
    double conv_rho = 0.0;
    double conv_sigma = 0.0;
    std::size_t conv_omega_max = 512;
    std::uint64_t conv_seed = 1;
    std::uint64_t conv_budget = kDefaultPathBudget;
    conv->add_option("--model", conv_model, "structure-source MLP JSON")->required();
    conv_data.attach(conv);
    conv->add_option("--rho", conv_rho, "reduction factor the model was built with");
    conv->add_option("--sigma", conv_sigma, "retained path fraction (overrides the parity rule)");
    conv->add_option("--original-arch", conv_original,
                     "original architecture for the parity rule");
    conv->add_option("--omega-max", conv_omega_max, "max reference samples");
    conv->add_option("--seed", conv_seed, "seed for the Omega subsample");
    conv->add_option("--path-budget", conv_budget, "abort beyond this many paths");
    conv->add_option("--out", conv_out, "output directory");

    // train-estimator
    auto* est = app.add_subcommand("train-estimator", "train the estimator of a GLAI model");
    DataFlags est_data;
    TrainFlags est_flags;
    std::string est_glai;
    std::string est_out = "estimator";
    est->add_option("--glai", est_glai, "GLAI model JSON")->required();
    est_data.attach(est);
    est_flags.attach(est, 0.1);
    est->add_option("--out", est_out, "output directory");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "two-phase GLAI run against an MLP baseline");
    std::string pipe_config;
    std::string pipe_out;
    std::size_t pipe_seeds = 0;
    bool pipe_force = false;
    double pipe_rho = 0.0;
    long long pipe_seed = -1;
    long long pipe_max_epochs = 0;
    pipe->add_option("--config", pipe_config, "experiment config JSON")->required();
    pipe->add_option("--out", pipe_out, "output directory (overrides the config)");
    pipe->add_option("--seeds", pipe_seeds, "repeat count (overrides the config)");
    pipe->add_flag("--force", pipe_force, "overwrite a non-empty output directory");
    pipe->add_option("--rho", pipe_rho, "override the reduction factor");
    pipe->add_option("--seed", pipe_seed, "override the base seed");
    pipe->add_option("--max-epochs", pipe_max_epochs, "override the epoch cap for both arms");

    // inspect-paths
    auto* inspect = app.add_subcommand("inspect-paths", "list the top retained paths by score");
    DataFlags inspect_data;
    std::string inspect_glai;
    std::string inspect_out;
    std::size_t inspect_top = 20;
    std::size_t inspect_omega_max = 512;
    std::uint64_t inspect_seed = 1;
    inspect->add_option("--glai", inspect_glai, "GLAI model JSON")->required();
    inspect_data.attach(inspect);
    inspect->add_option("--top", inspect_top, "number of paths to list");
    inspect->add_option("--omega-max", inspect_omega_max, "max reference samples");
    inspect->add_option("--seed", inspect_seed, "seed for the Omega subsample");
    inspect->add_option("--out", inspect_out, "write the CSV here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_data(gen_teacher_arch, gen_n, gen_seed, gen_noise, gen_task, gen_out);
        }
        if (train->parsed()) {
            return cmd_train_mlp(train_data, train_flags, train_arch, train_out);
        }
        if (conv->parsed()) {
            return cmd_to_glai(conv_model, conv_rho, conv_sigma, conv_original, conv_data,
                               conv_omega_max, conv_seed, conv_budget, conv_out);
        }
        if (est->parsed()) {
            return cmd_train_estimator(est_glai, est_data, est_flags, est_out);
        }
        if (pipe->parsed()) {
            return cmd_pipeline(pipe_config, pipe_out, pipe_seeds, pipe_force, pipe_rho,
                                pipe_seed, pipe_max_epochs);
        }
        if (inspect->parsed()) {
            return cmd_inspect_paths(inspect_glai, inspect_data, inspect_top, inspect_omega_max,
                                     inspect_seed, inspect_out);
        }
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BottleneckError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ReducedNotSmallerError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedArchError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace glai::cli
