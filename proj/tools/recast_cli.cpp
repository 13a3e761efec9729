// recast: recession-forecasting pipeline driver.
//
// Subcommands mirror the workflow: generate a synthetic vintage tree,
// backtest models over it, evaluate the forecasts, and date turning points
// with the PCA + Bry-Boschan alternative indicator.

#include "recast/backtest.hpp"
#include "recast/csv.hpp"
#include "recast/metrics.hpp"
#include "recast/synthgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <thread>

namespace {

using namespace recast;

struct RunConfig {
    std::string config_path;

    std::string root;
    std::string out = "out";
    std::string horizons = "0,1,3,6,12";
    std::string models = "logit,wlogit,lasso,ridge,en";
    std::string strategy = "standard";
    std::string labels = "nber";
    std::string period_start;
    std::string period_end;

    double lambda_min = 1e-5;
    double lambda_max = 1e2;
    int lambda_count = 1000;
    int en_lambda_count = 200;
    std::string en_alphas = "0.25,0.5,0.75";

    int block_len = 288;
    int block_step = 12;
    double train_fraction = 5.0 / 6.0;
    int tune_every = 1;
    int knn_k = 5;
    int workers = 0;   // 0 = available cores
    int cv_max_sweeps = 20000;
    int max_sweeps = 100000;
    std::string metric = "cost";
    std::string coincident;

    // generate
    std::uint64_t seed = 42;
    int months = 480;
    int informative = 10;
    int noise = 15;
    int lead = 12;
    int vintages = 60;
    std::string start = "1980-01";
    double revision_scale = 0.05;

    // evaluate
    std::string forecasts;
    std::string truth;

    // date
    std::string as_of;
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "root", "out", "horizons", "models", "strategy", "labels", "period_start",
        "period_end", "lambda_min", "lambda_max", "lambda_count", "en_lambda_count",
        "en_alphas", "block_len", "block_step", "train_fraction", "tune_every", "knn_k",
        "workers", "cv_max_sweeps", "max_sweeps", "metric", "coincident", "seed",
        "months", "informative", "noise",
        "lead", "vintages", "start", "revision_scale", "forecasts", "truth", "as_of"};
    return keys;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!trim(cur).empty()) out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

// Flat key=value file; '#' starts a comment. Every offending key is reported
// at once. Precedence is flag > file > default, so this runs before CLI11.
void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::vector<std::string> unknown;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (!known_keys().count(key)) {
            unknown.push_back(key);
            continue;
        }
        kv[key] = value;
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ValidationError(msg);
    }

    auto get = [&](const char* key, auto& target) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        using T = std::decay_t<decltype(target)>;
        try {
            if constexpr (std::is_same_v<T, std::string>) target = it->second;
            else if constexpr (std::is_same_v<T, double>) target = std::stod(it->second);
            else if constexpr (std::is_same_v<T, int>) target = std::stoi(it->second);
            else if constexpr (std::is_same_v<T, std::uint64_t>) target = std::stoull(it->second);
        } catch (const std::exception&) {
            throw ValidationError("config key '" + std::string(key) + "' has a bad value '" +
                                  it->second + "'");
        }
    };
    get("root", cfg.root);
    get("out", cfg.out);
    get("horizons", cfg.horizons);
    get("models", cfg.models);
    get("strategy", cfg.strategy);
    get("labels", cfg.labels);
    get("period_start", cfg.period_start);
    get("period_end", cfg.period_end);
    get("lambda_min", cfg.lambda_min);
    get("lambda_max", cfg.lambda_max);
    get("lambda_count", cfg.lambda_count);
    get("en_lambda_count", cfg.en_lambda_count);
    get("en_alphas", cfg.en_alphas);
    get("block_len", cfg.block_len);
    get("block_step", cfg.block_step);
    get("train_fraction", cfg.train_fraction);
    get("tune_every", cfg.tune_every);
    get("knn_k", cfg.knn_k);
    get("workers", cfg.workers);
    get("cv_max_sweeps", cfg.cv_max_sweeps);
    get("max_sweeps", cfg.max_sweeps);
    get("metric", cfg.metric);
    get("coincident", cfg.coincident);
    get("seed", cfg.seed);
    get("months", cfg.months);
    get("informative", cfg.informative);
    get("noise", cfg.noise);
    get("lead", cfg.lead);
    get("vintages", cfg.vintages);
    get("start", cfg.start);
    get("revision_scale", cfg.revision_scale);
    get("forecasts", cfg.forecasts);
    get("truth", cfg.truth);
    get("as_of", cfg.as_of);
}

SelectionMetric parse_metric(const std::string& s) {
    if (s == "cost") return SelectionMetric::mean_cost;
    if (s == "auprc") return SelectionMetric::auprc;
    if (s == "logloss") return SelectionMetric::log_loss;
    throw ValidationError("unknown selection metric '" + s + "'; expected cost,auprc,logloss");
}

int effective_workers(int configured) {
    if (configured > 0) return configured;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

MonthlySeries load_labels_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int c_m = t.require_column("month");
    int c_v = t.column("indicator");
    if (c_v < 0) c_v = t.require_column("value");
    MonthlySeries out;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        out.append(Month::parse(t.rows[i][c_m]),
                   parse_value(t.path, t.line_numbers[i], t.rows[i][c_v]));
    return out;
}

int cmd_generate(const RunConfig& cfg) {
    if (cfg.root.empty())
        throw ValidationError("generate needs --root (destination of the vintage tree)");
    ScenarioSpec spec;
    spec.seed = cfg.seed;
    spec.months = cfg.months;
    spec.n_informative = cfg.informative;
    spec.n_noise = cfg.noise;
    spec.lead = cfg.lead;
    spec.n_vintages = cfg.vintages;
    spec.start = Month::parse(cfg.start);
    spec.revision_scale = cfg.revision_scale;
    ScenarioTruth truth = generate(spec, cfg.root);
    std::cout << "generated " << truth.vintage_months.size() << " vintages under " << cfg.root
              << " (" << truth.metas.size() << " variables, " << cfg.months << " months)\n";
    return 0;
}

int cmd_backtest(const RunConfig& cfg) {
    if (cfg.root.empty())
        throw ValidationError("backtest needs --root (vintage tree)");
    std::vector<std::string> models = split_list(cfg.models);
    std::vector<std::string> horizons = split_list(cfg.horizons);
    if (models.empty())
        throw ValidationError("backtest needs a non-empty model list");
    if (horizons.empty())
        throw ValidationError("backtest needs a non-empty horizon list");

    BacktestConfig base;
    base.strategy = parse_strategy(cfg.strategy);
    base.label_source = parse_label_source(cfg.labels);
    if (!cfg.period_start.empty()) base.period_start = Month::parse(cfg.period_start);
    if (!cfg.period_end.empty()) base.period_end = Month::parse(cfg.period_end);
    base.grid.lambda_min = cfg.lambda_min;
    base.grid.lambda_max = cfg.lambda_max;
    base.grid.lambda_count = cfg.lambda_count;
    base.grid.en_lambda_count = cfg.en_lambda_count;
    base.grid.en_alphas.clear();
    for (const auto& a : split_list(cfg.en_alphas)) base.grid.en_alphas.push_back(std::stod(a));
    base.blocks.block_len = static_cast<std::size_t>(cfg.block_len);
    base.blocks.step = static_cast<std::size_t>(cfg.block_step);
    base.blocks.train_fraction = cfg.train_fraction;
    base.tune_every = cfg.tune_every;
    base.knn_k = cfg.knn_k;
    base.workers = effective_workers(cfg.workers);
    base.cv_fit_options.max_sweeps = cfg.cv_max_sweeps;
    base.fit_options.max_sweeps = cfg.max_sweeps;
    base.metric = parse_metric(cfg.metric);
    base.coincident = split_list(cfg.coincident);

    std::filesystem::create_directories(cfg.out);
    std::vector<ForecastRecord> all_records;
    for (const auto& h_str : horizons) {
        int horizon = std::stoi(h_str);
        for (const auto& m_str : models) {
            BacktestConfig bc = base;
            bc.horizon = horizon;
            bc.family = parse_model_family(m_str);
            BacktestResult res = run_backtest(cfg.root, bc);
            all_records.insert(all_records.end(), res.records.begin(), res.records.end());

            std::string stem = to_string(bc.family) + "_h" + std::to_string(horizon);
            write_coefficients(res.refits,
                               std::filesystem::path(cfg.out) / ("coefficients_" + stem + ".csv"));
            if (!res.inclusion.rows.empty())
                write_inclusion(res.inclusion,
                                std::filesystem::path(cfg.out) / ("inclusion_" + stem + ".csv"));
            std::cout << "backtest " << stem << ": " << res.records.size() << " forecasts, "
                      << res.refits.size() << " refits\n";
        }
    }
    write_forecasts(all_records, std::filesystem::path(cfg.out) / "forecasts.csv");
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    if (cfg.forecasts.empty())
        throw ValidationError("evaluate needs --forecasts (forecasts.csv path)");
    if (cfg.truth.empty())
        throw ValidationError("evaluate needs --truth (label series csv)");

    std::vector<ForecastRecord> records = load_forecasts(cfg.forecasts);
    MonthlySeries labels = load_labels_csv(cfg.truth);

    std::vector<ForecastGroup> groups = group_forecasts(records, labels);
    if (groups.empty())
        throw ValidationError("no forecast records overlap the labelled span");

    std::filesystem::create_directories(cfg.out);
    std::vector<MetricsRow> rows;
    for (const auto& g : groups) {
        rows.push_back(evaluate_group(g));

        std::string stem = g.model + "_h" + std::to_string(g.horizon);
        write_curve(roc_curve(g.labels, g.probabilities),
                    std::filesystem::path(cfg.out) / ("roc_" + stem + ".csv"));
        write_curve(pr_curve(g.labels, g.probabilities),
                    std::filesystem::path(cfg.out) / ("pr_" + stem + ".csv"));
    }
    write_metrics_table(rows, std::filesystem::path(cfg.out) / "metrics.csv");
    std::cout << "evaluated " << rows.size() << " (model, horizon) cells -> " << cfg.out
              << "/metrics.csv\n";
    return 0;
}

int cmd_date(const RunConfig& cfg) {
    if (cfg.root.empty())
        throw ValidationError("date needs --root (vintage tree)");
    if (cfg.as_of.empty())
        throw ValidationError("date needs --as-of (vintage month)");

    VintageSnapshot snap = load_vintage(cfg.root, Month::parse(cfg.as_of));
    DatingRun run = run_dating(snap, split_list(cfg.coincident));

    std::filesystem::create_directories(cfg.out);
    write_month_series(run.factor, std::filesystem::path(cfg.out) / "factor.csv", "score");
    write_turning_points(run.points, std::filesystem::path(cfg.out) / "turning_points.csv");
    write_month_series(run.indicator, std::filesystem::path(cfg.out) / "dating_indicator.csv");

    // Phi against the vintage's announced indicator over the common span; it
    // is undefined (reported as nan) while either series is still constant.
    double phi = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> a, b;
    for (std::size_t i = 0; i < run.indicator.size(); ++i) {
        auto v = snap.indicator.at(run.indicator.month(i));
        if (!v) continue;
        a.push_back(run.indicator.value(i));
        b.push_back(*v);
    }
    try {
        phi = phi_coefficient(a, b);
    } catch (const ValidationError&) {
    }

    CsvWriter w({"metric", "value"});
    w.add_row({"phi_vs_announced", format_value(phi)});
    w.add_row({"explained_share", format_value(run.component.explained_share)});
    w.add_row({"turning_points", std::to_string(run.points.points.size())});
    w.write(std::filesystem::path(cfg.out) / "dating_summary.csv");

    std::cout << "dated " << run.points.points.size() << " turning points; phi="
              << format_value(phi) << "\n";
    return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--config", cfg.config_path, "flat key=value config file");
    sub->add_option("--root", cfg.root, "vintage tree root");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--workers", cfg.workers, "parallel workers (0 = cores)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"recession-forecasting pipeline"};
    app.require_subcommand(1);

    RunConfig cfg;

    CLI::App* gen = app.add_subcommand("generate", "write a synthetic vintage tree");
    add_common_options(gen, cfg);
    gen->add_option("--seed", cfg.seed);
    gen->add_option("--months", cfg.months);
    gen->add_option("--informative", cfg.informative);
    gen->add_option("--noise", cfg.noise);
    gen->add_option("--lead", cfg.lead);
    gen->add_option("--vintages", cfg.vintages);
    gen->add_option("--start", cfg.start);
    gen->add_option("--revision-scale", cfg.revision_scale);

    CLI::App* bt = app.add_subcommand("backtest", "expanding-window out-of-sample run");
    add_common_options(bt, cfg);
    bt->add_option("--horizons", cfg.horizons);
    bt->add_option("--models", cfg.models);
    bt->add_option("--strategy", cfg.strategy, "standard | freeze");
    bt->add_option("--labels", cfg.labels, "nber | alternative");
    bt->add_option("--period-start", cfg.period_start);
    bt->add_option("--period-end", cfg.period_end);
    bt->add_option("--lambda-min", cfg.lambda_min);
    bt->add_option("--lambda-max", cfg.lambda_max);
    bt->add_option("--lambda-count", cfg.lambda_count);
    bt->add_option("--en-lambda-count", cfg.en_lambda_count);
    bt->add_option("--en-alphas", cfg.en_alphas);
    bt->add_option("--block-len", cfg.block_len);
    bt->add_option("--block-step", cfg.block_step);
    bt->add_option("--train-fraction", cfg.train_fraction);
    bt->add_option("--tune-every", cfg.tune_every);
    bt->add_option("--knn-k", cfg.knn_k);
    bt->add_option("--cv-max-sweeps", cfg.cv_max_sweeps);
    bt->add_option("--max-sweeps", cfg.max_sweeps);
    bt->add_option("--metric", cfg.metric, "cost | auprc | logloss");
    bt->add_option("--coincident", cfg.coincident);

    CLI::App* ev = app.add_subcommand("evaluate", "score forecasts against final labels");
    add_common_options(ev, cfg);
    ev->add_option("--forecasts", cfg.forecasts);
    ev->add_option("--truth", cfg.truth);

    CLI::App* dt = app.add_subcommand("date", "PCA + turning-point dating for one vintage");
    add_common_options(dt, cfg);
    dt->add_option("--as-of", cfg.as_of);
    dt->add_option("--coincident", cfg.coincident);

    // Environment overrides apply to paths only, below file and flag values.
    if (const char* env_root = std::getenv("RECAST_ROOT")) cfg.root = env_root;
    if (const char* env_out = std::getenv("RECAST_OUT")) cfg.out = env_out;

    // Config file next (flag > file > env > default), so pre-scan for --config.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(cfg, argv[i + 1]);
            } catch (const ValidationError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
            break;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_generate(cfg);
        if (bt->parsed()) return cmd_backtest(cfg);
        if (ev->parsed()) return cmd_evaluate(cfg);
        if (dt->parsed()) return cmd_date(cfg);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
