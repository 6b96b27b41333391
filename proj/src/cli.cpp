/*
 * Copyright (C) 2026 The volbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "volbias/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "volbias/errors.hpp"
#include "volbias/serialization.hpp"

namespace volbias::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Failures that map to a distinct exit status and error code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& path)
{
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

template <class T>
std::vector<T> sorted_list(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
        throw ConfigError(std::string("config needs a nonempty '") + key + "' list");
    }
    auto v = j.at(key).get<std::vector<T>>();
    std::sort(v.begin(), v.end());
    return v;
}

double parse_double(const std::string& field, std::size_t row, std::string_view column)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("row " + std::to_string(row + 1) + ": '" + std::string(column) + "' is not a number: '" +
                          field + "'");
    }
}

std::string line(std::initializer_list<std::string> fields)
{
    std::string s;
    bool first = true;
    for (const std::string& f : fields) {
        if (!first) {
            s += ',';
        }
        s += f;
        first = false;
    }
    s += '\n';
    return s;
}

std::string fmt(double x) { return format_number(x); }

// ---------------------------------------------------------------------------
// Commands

struct Context {
    fs::path config;
    std::uint64_t seed = 0;
    fs::path out_dir = ".";
    std::optional<fs::path> input;
};

void cmd_risk_curve(const Context& ctx, std::ostream& out)
{
    const SweepConfig config = parse_sweep_config(read_json(ctx.config), "risk_curve.csv");
    const fs::path path = ctx.out_dir / config.output_path;
    write_file_atomic(path, render_risk_curve(config));
    out << "wrote " << path.string() << '\n';
}

void cmd_bias_curve(const Context& ctx, std::ostream& out)
{
    const SweepConfig config = parse_sweep_config(read_json(ctx.config), "bias_curve.csv");
    const fs::path path = ctx.out_dir / config.output_path;
    write_file_atomic(path, render_bias_curve(config));
    out << "wrote " << path.string() << '\n';
}

void cmd_train_toy(const Context& ctx, std::ostream& out)
{
    const ToyRunConfig config = parse_toy_config(read_json(ctx.config));
    const std::vector<ToyCell> cells = run_toy_grid(config, ctx.seed);
    write_file_atomic(ctx.out_dir / "train_reports.jsonl", render_toy_reports(cells));
    write_file_atomic(ctx.out_dir / "train_summary.csv", render_toy_summary(cells));
    const auto failed = std::count_if(cells.begin(), cells.end(), [](const ToyCell& c) { return !c.report; });
    out << "trained " << cells.size() << " cells (" << failed << " failed)\n";
}

void cmd_calibrate(const Context& ctx, std::ostream& out)
{
    const json j = read_json(ctx.config);
    fs::path csv_path;
    if (ctx.input) {
        csv_path = *ctx.input;
    } else if (j.contains("predictions_csv")) {
        csv_path = j.at("predictions_csv").get<std::string>();
    } else {
        throw ConfigError("calibrate needs 'predictions_csv' in the config or --input");
    }
    const std::string train_split = get_or<std::string>(j, "train_split", "train");
    const std::string apply_split = get_or<std::string>(j, "apply_split", "val");

    const CsvTable table = parse_csv(read_file(csv_path));
    std::size_t c_true = 0;
    std::size_t c_pred = 0;
    std::size_t c_split = 0;
    try {
        c_true = table.column("true_volume");
        c_pred = table.column("pred_volume");
        c_split = table.column("split");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    std::vector<double> fit_pred;
    std::vector<double> fit_true;
    std::vector<std::size_t> apply_rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row[c_split] == train_split) {
            fit_pred.push_back(parse_double(row[c_pred], r, "pred_volume"));
            fit_true.push_back(parse_double(row[c_true], r, "true_volume"));
        }
        if (row[c_split] == apply_split) {
            apply_rows.push_back(r);
        }
    }
    if (fit_pred.size() < 3) {
        throw ConfigError("calibrate needs at least 3 rows with split=" + train_split + ", got " +
                          std::to_string(fit_pred.size()));
    }
    const CalibrationFit fit = fit_calibration(fit_pred, fit_true);

    std::string corrected = line({"true_volume", "pred_volume", "split", "corrected_volume"});
    std::vector<double> val_true;
    std::vector<double> val_pred;
    std::vector<double> val_corrected;
    int clamped = 0;
    for (std::size_t r : apply_rows) {
        const auto& row = table.rows[r];
        const double t = parse_double(row[c_true], r, "true_volume");
        const double p = parse_double(row[c_pred], r, "pred_volume");
        const CorrectedVolume c = apply_calibration(fit, p);
        clamped += c.clamped ? 1 : 0;
        val_true.push_back(t);
        val_pred.push_back(p);
        val_corrected.push_back(c.value);
        corrected += line({fmt(t), fmt(p), row[c_split], fmt(c.value)});
    }

    std::string profiles = line({"stage", "decile", "mean_true", "mean_pred"});
    if (val_true.size() >= 10) {
        const VolumeSpecificProfile before = volume_specific_profile(val_pred, val_true);
        const VolumeSpecificProfile after = volume_specific_profile(val_corrected, val_true);
        for (const auto& [stage, prof] : {std::pair{"before", &before}, std::pair{"after", &after}}) {
            for (std::size_t d = 0; d < 10; ++d) {
                profiles +=
                    line({stage, std::to_string(d), fmt(prof->decile_means[d].first), fmt(prof->decile_means[d].second)});
            }
        }
    }

    write_file_atomic(ctx.out_dir / "calibration_fit.json", json(fit).dump(2) + "\n");
    write_file_atomic(ctx.out_dir / "calibrated.csv", corrected);
    write_file_atomic(ctx.out_dir / "calibration_profiles.csv", profiles);
    out << "fit on " << fit.n_points << " rows, corrected " << apply_rows.size() << " rows (" << clamped
        << " clamped at 0)\n";
}

void cmd_bootstrap(const Context& ctx, std::ostream& out)
{
    const json j = read_json(ctx.config);
    std::vector<double> a;
    std::vector<double> b;
    std::optional<fs::path> csv_path = ctx.input;
    if (!csv_path && j.contains("input_csv")) {
        csv_path = j.at("input_csv").get<std::string>();
    }
    if (csv_path) {
        const CsvTable table = parse_csv(read_file(*csv_path));
        std::size_t ca = 0;
        std::size_t cb = 0;
        try {
            ca = table.column("a");
            cb = table.column("b");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            a.push_back(parse_double(table.rows[r][ca], r, "a"));
            b.push_back(parse_double(table.rows[r][cb], r, "b"));
        }
    } else if (j.contains("a") && j.contains("b")) {
        a = j.at("a").get<std::vector<double>>();
        b = j.at("b").get<std::vector<double>>();
    } else {
        throw ConfigError("bootstrap needs 'a' and 'b' arrays, 'input_csv' or --input");
    }
    const int n = get_or<int>(j, "n_resamples", kDefaultResamples);
    const BootstrapResult result = bootstrap_paired(a, b, n, ctx.seed);
    write_file_atomic(ctx.out_dir / "bootstrap.json", json(result).dump(2) + "\n");
    out << "mean_diff " << fmt(result.mean_diff) << (result.significant ? " (significant)" : " (not significant)")
        << '\n';
}

std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------

SweepConfig parse_sweep_config(const json& j, const std::string& default_output)
{
    if (!j.is_object()) {
        throw ConfigError("sweep config must be a JSON object");
    }
    try {
        SweepConfig c;
        c.k_list = sorted_list<int>(j, "k_list");
        c.mu_list = sorted_list<double>(j, "mu_list");
        c.p_beta_grid = sorted_list<double>(j, "p_beta_grid");
        c.p_tilde_grid_size = get_or<int>(j, "p_tilde_grid_size", 101);
        c.output_path = get_or<std::string>(j, "output_path", default_output);
        c.s_alpha = get_or<double>(j, "s_alpha", 100.0);
        c.s_gamma = get_or<double>(j, "s_gamma", 1.0);
        c.minimizer_grid = get_or<int>(j, "minimizer_grid", kDefaultGrid);
        c.refine_tol = get_or<double>(j, "refine_tol", kDefaultRefineTol);
        c.switch_tol = get_or<double>(j, "switch_tol", 1e-9);
        if (c.p_tilde_grid_size < 2) {
            throw ConfigError("p_tilde_grid_size must be >= 2");
        }
        for (int k : c.k_list) {
            ScenarioSpec{c.s_alpha, c.s_gamma, c.mu_list.front(), k, c.p_beta_grid.front()}.validate();
        }
        for (double mu : c.mu_list) {
            ScenarioSpec{c.s_alpha, c.s_gamma, mu, 1, 0.0}.validate();
        }
        for (double p : c.p_beta_grid) {
            ScenarioSpec{c.s_alpha, c.s_gamma, 1.0, 1, p}.validate();
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad sweep config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad sweep config: ") + e.what());
    }
}

std::string render_risk_curve(const SweepConfig& config)
{
    struct Cell {
        int k;
        double mu;
        double p;
    };
    std::vector<Cell> cells;
    for (int k : config.k_list) {
        for (double mu : config.mu_list) {
            for (double p : config.p_beta_grid) {
                cells.push_back({k, mu, p});
            }
        }
    }
    std::vector<std::string> blocks(cells.size());
    const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Cell& c = cells[static_cast<std::size_t>(i)];
        const ScenarioSpec spec{config.s_alpha, config.s_gamma, c.mu, c.k, c.p};
        const RiskCurve sd = risk_curve(spec, LossKind::sd, config.p_tilde_grid_size);
        const RiskCurve ce = risk_curve(spec, LossKind::ce, config.p_tilde_grid_size);
        std::string& block = blocks[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < sd.points.size(); ++t) {
            block += line({std::to_string(c.k), fmt(c.mu), fmt(c.p), fmt(sd.points[t].p_tilde),
                           fmt(sd.points[t].expected_loss), fmt(ce.points[t].expected_loss)});
        }
    }
    std::string csv = line({"k", "mu", "p_beta", "p_tilde", "expected_sd", "expected_ce"});
    for (const std::string& b : blocks) {
        csv += b;
    }
    return csv;
}

std::string render_bias_curve(const SweepConfig& config)
{
    std::string csv = line({"k", "mu", "p_beta", "p_tilde_opt", "prob_error", "volume_bias", "switch_point"});
    for (int k : config.k_list) {
        for (double mu : config.mu_list) {
            const ScenarioFamily family{k, mu, config.s_alpha, config.s_gamma};
            const SwitchPoint sw = find_switch_point(family, config.switch_tol);
            const std::string sw_field = sw.p_star ? fmt(*sw.p_star) : "";
            for (const BiasPoint& b :
                 bias_curve(family, config.p_beta_grid, config.minimizer_grid, config.refine_tol)) {
                csv += line({std::to_string(k), fmt(mu), fmt(b.p_beta), fmt(b.p_tilde_opt), fmt(b.prob_error),
                             fmt(b.volume_bias), sw_field});
            }
        }
    }
    return csv;
}

ToyRunConfig parse_toy_config(const json& j)
{
    if (!j.is_object()) {
        throw ConfigError("train-toy config must be a JSON object");
    }
    try {
        ToyRunConfig c;
        if (j.contains("scenarios")) {
            c.scenarios = j.at("scenarios").get<std::vector<ScenarioSpec>>();
        } else {
            const double s_alpha = get_or<double>(j, "s_alpha", 100.0);
            const double s_gamma = get_or<double>(j, "s_gamma", 1.0);
            for (int k : sorted_list<int>(j, "k_list")) {
                for (double mu : sorted_list<double>(j, "mu_list")) {
                    for (double p : sorted_list<double>(j, "p_beta_grid")) {
                        c.scenarios.push_back({s_alpha, s_gamma, mu, k, p});
                        c.scenarios.back().validate();
                    }
                }
            }
        }
        if (c.scenarios.empty()) {
            throw ConfigError("train-toy config has no scenarios");
        }
        if (j.contains("losses")) {
            c.losses.clear();
            for (const auto& name : j.at("losses").get<std::vector<std::string>>()) {
                c.losses.push_back(parse_loss_kind(name));
            }
        }
        if (j.contains("seeds")) {
            c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        } else if (j.contains("n_seeds")) {
            c.seeds.clear();
            for (std::uint64_t s = 0; s < j.at("n_seeds").get<std::uint64_t>(); ++s) {
                c.seeds.push_back(s);
            }
        }
        c.n_images = get_or<int>(j, "n_images", c.n_images);
        c.pixels_per_unit_volume = get_or<int>(j, "pixels_per_unit_volume", c.pixels_per_unit_volume);
        c.lr_ce = get_or<double>(j, "lr_ce", c.lr_ce);
        c.lr_sd = get_or<double>(j, "lr_sd", c.lr_sd);
        if (j.contains("max_epochs")) {
            c.max_epochs_ce = c.max_epochs_sd = j.at("max_epochs").get<int>();
        }
        c.max_epochs_ce = get_or<int>(j, "max_epochs_ce", c.max_epochs_ce);
        c.max_epochs_sd = get_or<int>(j, "max_epochs_sd", c.max_epochs_sd);
        c.patience = get_or<int>(j, "patience", c.patience);
        c.n_resamples = get_or<int>(j, "n_resamples", c.n_resamples);
        if (c.losses.empty() || c.seeds.empty()) {
            throw ConfigError("train-toy config needs at least one loss and one seed");
        }
        if (c.n_images < 5) {
            throw ConfigError("n_images must be >= 5");
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad train-toy config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad train-toy config: ") + e.what());
    }
}

std::string ToyCell::label() const
{
    return "k" + std::to_string(scenario.k_regions) + "_mu" + format_number(scenario.mu) + "_p" +
           format_number(scenario.p_beta) + "_seed" + std::to_string(seed);
}

std::vector<ToyCell> run_toy_grid(const ToyRunConfig& config, std::uint64_t base_seed)
{
    std::vector<ToyCell> cells;
    for (const ScenarioSpec& s : config.scenarios) {
        for (LossKind loss : config.losses) {
            for (std::uint64_t seed : config.seeds) {
                ToyCell c;
                c.scenario = s;
                c.loss = loss;
                c.seed = seed;
                cells.push_back(std::move(c));
            }
        }
    }
    const CounterRng root(base_seed);
    const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        ToyCell& c = cells[static_cast<std::size_t>(i)];
        const CounterRng stream = root.split(c.seed);
        try {
            const RegionModel model = expand_scenario(c.scenario);
            const ToyDataset data =
                generate_dataset(model, config.n_images, exact_pixel_resolution(model, config.pixels_per_unit_volume),
                                 stream.split(0).key());
            TrainOptions options = TrainOptions::defaults_for(c.loss);
            options.lr = c.loss == LossKind::ce ? config.lr_ce : config.lr_sd;
            options.max_epochs = c.loss == LossKind::ce ? config.max_epochs_ce : config.max_epochs_sd;
            options.patience = config.patience;
            options.seed = stream.split(1).key();
            c.report = train(data, options);
            const RegionBatch seen = collapse(data, c.report->split.train);
            for (double hits : seen.foreground_hits) {
                c.train_frequency.push_back(hits / seen.image_count);
            }
            c.bias = empirical_volume_bias(*c.report, data);
            const std::vector<double> zeros(c.bias.soft_differences.size(), 0.0);
            c.bootstrap = bootstrap_paired(c.bias.soft_differences, zeros, config.n_resamples, stream.split(2).key());
        } catch (const std::exception& e) {
            c.report.reset();
            c.error = one_line(e.what());
        }
    }
    return cells;
}

std::string render_toy_reports(std::span<const ToyCell> cells)
{
    std::string s;
    for (const ToyCell& c : cells) {
        json j{{"cell", c.label()}, {"scenario", c.scenario}, {"seed", c.seed}};
        if (c.report) {
            j["report"] = *c.report;
        } else {
            j["loss_kind"] = std::string(to_string(c.loss));
            j["error"] = c.error;
        }
        s += j.dump() + "\n";
    }
    return s;
}

std::string render_toy_summary(std::span<const ToyCell> cells)
{
    std::string csv = line({"scenario", "loss", "bias_soft", "bias_hard", "p_boot"});
    for (const ToyCell& c : cells) {
        const std::string loss(to_string(c.loss));
        if (c.report) {
            csv += line({c.label(), loss, fmt(c.bias.bias_soft), fmt(c.bias.bias_hard), fmt(two_sided_p(c.bootstrap))});
        } else {
            csv += line({c.label(), loss, "", "", ""});
        }
    }
    return csv;
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Expected-risk, toy-training and calibration tools for segmentation volume bias", "volbias"};
    app.require_subcommand(1);

    std::string config;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string input;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON configuration file")->required();
        sub->add_option("--seed", seed, "base random seed");
        sub->add_option("--out", out_dir, "output directory");
        return sub;
    };
    CLI::App* risk = add_common(app.add_subcommand("risk-curve", "expected SD and CE over a prediction grid"));
    CLI::App* bias = add_common(app.add_subcommand("bias-curve", "SD-optimal prediction error and switch points"));
    CLI::App* toy = add_common(app.add_subcommand("train-toy", "train the per-pixel logistic model on synthetic data"));
    CLI::App* cal = add_common(app.add_subcommand("calibrate", "fit and apply a linear volume correction"));
    cal->add_option("--input", input, "predictions CSV (true_volume,pred_volume,split)");
    CLI::App* boot = add_common(app.add_subcommand("bootstrap", "paired bootstrap test"));
    boot->add_option("--input", input, "CSV with columns a,b");

    std::vector<const char*> argv{"volbias"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    Context ctx{config, seed, out_dir, {}};
    if (!input.empty()) {
        ctx.input = input;
    }
    try {
        if (risk->parsed()) {
            cmd_risk_curve(ctx, out);
        } else if (bias->parsed()) {
            cmd_bias_curve(ctx, out);
        } else if (toy->parsed()) {
            cmd_train_toy(ctx, out);
        } else if (cal->parsed()) {
            cmd_calibrate(ctx, out);
        } else if (boot->parsed()) {
            cmd_bootstrap(ctx, out);
        }
    } catch (const ConfigError& e) {
        err << "error: config: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: io: " << one_line(e.what()) << '\n';
        return 3;
    } catch (const CapacityError& e) {
        err << "error: capacity: " << one_line(e.what()) << '\n';
        return 4;
    } catch (const json::exception& e) {
        err << "error: config: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid_argument: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: runtime: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}

}  // namespace volbias::cli
