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
#include <vector>

#include "volbias/region_model.hpp"

namespace volbias {

/// Predicted foreground probability per region.
struct PredictionAssignment {
    std::vector<double> p_pred;

    std::size_t size() const noexcept { return p_pred.size(); }
};

/// [0, p_tilde_beta x K, 1] for an expanded scenario.
PredictionAssignment scenario_prediction(const ScenarioSpec& spec, double p_tilde_beta);

enum class ExpectationMethod {
    closed_form,  ///< linearity of expectation, no enumeration
    exhaustive,
    binomial,
};

struct ExpectedLoss {
    double value = 0.0;
    std::uint64_t config_count = 1;
    ExpectationMethod method = ExpectationMethod::closed_form;
};

/// Enumeration limit on genuinely uncertain regions (2^24 configurations).
inline constexpr std::size_t kMaxEnumeratedRegions = 24;

/// E[CE] = sum_j s_j [-p_j log q_j - (1 - p_j) log(1 - q_j)], q the prediction.
ExpectedLoss expected_ce(const RegionModel& model, const PredictionAssignment& pred);

/// E[SD] by summing over all label configurations of the uncertain regions.
///
/// Regions with p in {0, 1} are folded into constants first, so the cost is
/// 2^U for U uncertain regions. Configuration weights are formed in log
/// space. The configuration space is cut into fixed-size chunks that OpenMP
/// workers sum independently; chunk totals are then combined by pairwise
/// reduction in index order, so the result does not depend on thread count.
///
/// Throws CapacityError when U exceeds kMaxEnumeratedRegions.
ExpectedLoss expected_sd_exhaustive(const RegionModel& model, const PredictionAssignment& pred);

/// E[SD] for K identical uncertain regions via the binomial distribution of
/// the foreground count; regions with p in {0, 1} again fold to constants.
///
/// Throws std::invalid_argument unless every uncertain region shares the
/// same (volume, p, prediction).
ExpectedLoss expected_sd_binomial(const RegionModel& model, const PredictionAssignment& pred);

/// Scenario form with p_alpha-prediction 0 and p_gamma-prediction 1.
ExpectedLoss expected_sd_binomial(const ScenarioSpec& spec, double p_tilde_beta);

namespace reference {

/// Serial enumeration over all 2^R configurations of every region (no
/// folding, probabilities multiplied directly, losses via soft_dice_loss).
/// Kept as the test and benchmark baseline for expected_sd_exhaustive.
ExpectedLoss expected_sd_enumerate(const RegionModel& model, const PredictionAssignment& pred);

}  // namespace reference

}  // namespace volbias
