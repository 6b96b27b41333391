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

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "volbias/region_model.hpp"
#include "volbias/risk_engine.hpp"

namespace volbias {

enum class LossKind { ce, sd };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view name);

inline constexpr int kDefaultGrid = 101;
inline constexpr double kDefaultRefineTol = 1e-6;

/// Golden-section search for a minimum of f on [lo, hi], to bracket width tol.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Closed-form CE risk minimizer: the prediction equals the true probability.
PredictionAssignment ce_minimizer(const RegionModel& model);

/// Same optimum found numerically, region by region (the CE risk decouples).
PredictionAssignment ce_minimizer_numeric(const RegionModel& model, double tol = 1e-10);

struct SdOptimum {
    double p_tilde_opt = 0.0;
    double loss_opt = 0.0;
    bool tie = false;       ///< another grid point attains the same minimal value
    bool interior = false;  ///< optimum is not at 0 or 1
};

/// Global minimizer of E[SD] over the common beta prediction.
///
/// A uniform grid on [0, 1] locates the best bracket, then golden-section
/// search refines it to `refine_tol`. The refined point replaces the grid
/// point only if it is strictly better. Ties go to the smaller prediction.
SdOptimum sd_minimizer(const ScenarioSpec& spec, int grid = kDefaultGrid, double refine_tol = kDefaultRefineTol);

struct RiskPoint {
    double p_tilde = 0.0;
    double expected_loss = 0.0;
};

struct RiskCurve {
    std::vector<RiskPoint> points;
    ScenarioSpec scenario;
    LossKind loss_kind = LossKind::sd;
};

/// Expected loss on a uniform grid of n_points beta predictions.
RiskCurve risk_curve(const ScenarioSpec& spec, LossKind loss_kind, int n_points);

/// Scenario with everything but p_beta fixed.
struct ScenarioFamily {
    int k_regions = 1;
    double mu = 1.0;
    double s_alpha = 100.0;
    double s_gamma = 1.0;

    ScenarioSpec at(double p_beta) const { return {s_alpha, s_gamma, mu, k_regions, p_beta}; }
};

struct BiasPoint {
    double p_beta = 0.0;
    double p_tilde_opt = 0.0;
    double prob_error = 0.0;   ///< p_tilde_opt - p_beta
    double volume_bias = 0.0;  ///< mu * s_gamma * prob_error
    bool tie = false;
};

/// SD-optimal prediction error for every p_beta in p_grid, in grid order.
std::vector<BiasPoint> bias_curve(const ScenarioFamily& family, std::span<const double> p_grid,
                                  int grid = kDefaultGrid, double refine_tol = kDefaultRefineTol);

struct SwitchPoint {
    std::optional<double> p_star;  ///< empty if E[SD](1) - E[SD](0) never changes sign
    int iterations = 0;
};

/// Bisection on p_beta for the sign change of E[SD](pred 1) - E[SD](pred 0).
SwitchPoint find_switch_point(const ScenarioFamily& family, double tol = 1e-9);

/// E[SD](pred 1) - E[SD](pred 0) at the given p_beta.
double endpoint_gap(const ScenarioFamily& family, double p_beta);

}  // namespace volbias
