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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "volbias/minimizer.hpp"
#include "volbias/region_model.hpp"
#include "volbias/stats.hpp"
#include "volbias/toy_trainer.hpp"

namespace volbias::cli {

/// Scenario grid shared by the curve commands.
struct SweepConfig {
    std::vector<int> k_list;
    std::vector<double> mu_list;
    std::vector<double> p_beta_grid;
    int p_tilde_grid_size = 101;
    std::string output_path;
    double s_alpha = 100.0;
    double s_gamma = 1.0;
    int minimizer_grid = kDefaultGrid;
    double refine_tol = kDefaultRefineTol;
    double switch_tol = 1e-9;
};

/// Lists are sorted ascending so that row order is lexicographic.
SweepConfig parse_sweep_config(const nlohmann::json& j, const std::string& default_output);

/// k,mu,p_beta,p_tilde,expected_sd,expected_ce
std::string render_risk_curve(const SweepConfig& config);

/// k,mu,p_beta,p_tilde_opt,prob_error,volume_bias,switch_point
std::string render_bias_curve(const SweepConfig& config);

struct ToyRunConfig {
    std::vector<ScenarioSpec> scenarios;
    std::vector<LossKind> losses{LossKind::ce, LossKind::sd};
    std::vector<std::uint64_t> seeds{0};
    int n_images = 1000;
    int pixels_per_unit_volume = 10;  ///< base; refined per scenario by exact_pixel_resolution
    double lr_ce = 0.5;
    double lr_sd = 0.1;
    int max_epochs_ce = 1000000;
    int max_epochs_sd = 100000;
    int patience = 200;
    int n_resamples = kDefaultResamples;
};

/// Accepts either an explicit "scenarios" list or k_list / mu_list / p_beta_grid.
ToyRunConfig parse_toy_config(const nlohmann::json& j);

struct ToyCell {
    ScenarioSpec scenario;
    LossKind loss = LossKind::ce;
    std::uint64_t seed = 0;
    std::optional<TrainReport> report;  ///< empty when training failed
    VolumeBias bias;
    BootstrapResult bootstrap;          ///< held-out V(y~) - V(l) against 0
    std::vector<double> train_frequency;  ///< per-region label frequency on the training split
    std::string error;

    std::string label() const;
};

/// Trains every (scenario, loss, seed) cell; cells run in parallel and are
/// returned in grid order. The dataset of a cell depends on (base seed,
/// cell seed) only, so both losses see the same images.
std::vector<ToyCell> run_toy_grid(const ToyRunConfig& config, std::uint64_t base_seed);

/// JSON lines, one per cell, and the scenario,loss,bias_soft,bias_hard,p_boot summary.
std::string render_toy_reports(std::span<const ToyCell> cells);
std::string render_toy_summary(std::span<const ToyCell> cells);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Entry point; args exclude the program name. Returns the exit status.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace volbias::cli
