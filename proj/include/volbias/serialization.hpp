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

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "volbias/region_model.hpp"
#include "volbias/stats.hpp"
#include "volbias/toy_trainer.hpp"

namespace volbias {

/// %.15g, the precision used for every numeric field written by the tools.
std::string format_number(double x);

/// x rounded to 15 significant digits (for JSON output).
double round15(double x);

// ScenarioSpec: {"s_alpha", "s_gamma", "mu", "k_regions", "p_beta"}; parsing
// rejects missing or extra keys and a non-integer k_regions.
void to_json(nlohmann::json& j, const ScenarioSpec& s);
void from_json(const nlohmann::json& j, ScenarioSpec& s);

void to_json(nlohmann::json& j, const CalibrationFit& f);
void from_json(const nlohmann::json& j, CalibrationFit& f);

void to_json(nlohmann::json& j, const BootstrapResult& r);

// {"loss_kind", "final_loss", "per_region_pred", "epochs_run", "bias_soft", "bias_hard"}
void to_json(nlohmann::json& j, const TrainReport& r);

/// Header-indexed comma-separated table (no quoting).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index; throws std::invalid_argument if absent.
    std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

}  // namespace volbias
