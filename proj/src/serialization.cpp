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

#include "volbias/serialization.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace volbias {

namespace {

void expect_keys(const nlohmann::json& j, const std::set<std::string>& keys, std::string_view what)
{
    if (!j.is_object()) {
        throw std::invalid_argument(std::string(what) + " must be a JSON object");
    }
    for (const std::string& k : keys) {
        if (!j.contains(k)) {
            throw std::invalid_argument(std::string(what) + " is missing key '" + k + "'");
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!keys.count(it.key())) {
            throw std::invalid_argument(std::string(what) + " has unknown key '" + it.key() + "'");
        }
    }
}

double number(const nlohmann::json& j, const char* key)
{
    const nlohmann::json& v = j.at(key);
    if (!v.is_number()) {
        throw std::invalid_argument(std::string("'") + key + "' must be a number");
    }
    return v.get<double>();
}

}  // namespace

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

double round15(double x) { return std::stod(format_number(x)); }

void to_json(nlohmann::json& j, const ScenarioSpec& s)
{
    j = nlohmann::json{{"s_alpha", s.s_alpha}, {"s_gamma", s.s_gamma}, {"mu", s.mu},
                       {"k_regions", s.k_regions}, {"p_beta", s.p_beta}};
}

void from_json(const nlohmann::json& j, ScenarioSpec& s)
{
    expect_keys(j, {"s_alpha", "s_gamma", "mu", "k_regions", "p_beta"}, "scenario");
    if (!j.at("k_regions").is_number_integer()) {
        throw std::invalid_argument("'k_regions' must be an integer");
    }
    s.s_alpha = number(j, "s_alpha");
    s.s_gamma = number(j, "s_gamma");
    s.mu = number(j, "mu");
    s.k_regions = j.at("k_regions").get<int>();
    s.p_beta = number(j, "p_beta");
    s.validate();
}

void to_json(nlohmann::json& j, const CalibrationFit& f)
{
    j = nlohmann::json{{"slope", round15(f.slope)},
                       {"intercept", round15(f.intercept)},
                       {"n_points", f.n_points},
                       {"residual_mean", round15(f.residual_mean)},
                       {"residual_slope", round15(f.residual_slope)}};
}

void from_json(const nlohmann::json& j, CalibrationFit& f)
{
    expect_keys(j, {"slope", "intercept", "n_points", "residual_mean", "residual_slope"}, "calibration fit");
    f.slope = number(j, "slope");
    f.intercept = number(j, "intercept");
    f.n_points = j.at("n_points").get<int>();
    f.residual_mean = number(j, "residual_mean");
    f.residual_slope = number(j, "residual_slope");
}

void to_json(nlohmann::json& j, const BootstrapResult& r)
{
    j = nlohmann::json{{"mean_diff", round15(r.mean_diff)},
                       {"p_greater", round15(r.p_greater)},
                       {"p_smaller", round15(r.p_smaller)},
                       {"n_resamples", r.n_resamples},
                       {"significant", r.significant}};
}

void to_json(nlohmann::json& j, const TrainReport& r)
{
    std::vector<double> pred;
    pred.reserve(r.per_region_pred.size());
    for (double p : r.per_region_pred) {
        pred.push_back(round15(p));
    }
    j = nlohmann::json{{"loss_kind", std::string(to_string(r.loss_kind))},
                       {"final_loss", round15(r.final_loss)},
                       {"per_region_pred", pred},
                       {"epochs_run", r.epochs_run},
                       {"bias_soft", round15(r.bias_soft)},
                       {"bias_hard", round15(r.bias_hard)}};
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw std::invalid_argument("CSV is missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != table.header.size()) {
                throw std::invalid_argument("CSV row " + std::to_string(table.rows.size() + 1) + " has " +
                                            std::to_string(fields.size()) + " fields, header has " +
                                            std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) {
        throw std::invalid_argument("CSV input is empty");
    }
    return table;
}

}  // namespace volbias
