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

#include <cmath>
#include <cstdint>
#include <vector>

#include "volbias/losses.hpp"
#include "volbias/region_model.hpp"
#include "volbias/risk_engine.hpp"
#include "volbias/rng.hpp"

namespace volbias::test_support {

/// Random model with R regions; about a third of them certain.
inline RegionModel random_model(CounterRng& rng, std::size_t r, bool allow_certain = true)
{
    std::vector<Region> regions(r);
    for (Region& reg : regions) {
        reg.volume = 0.1 + 5.0 * rng.uniform01();
        const double u = rng.uniform01();
        if (allow_certain && u < 0.15) {
            reg.p_fg = 0.0;
        } else if (allow_certain && u < 0.3) {
            reg.p_fg = 1.0;
        } else {
            reg.p_fg = 0.02 + 0.96 * rng.uniform01();
        }
    }
    return RegionModel(std::move(regions));
}

inline PredictionAssignment random_prediction(CounterRng& rng, std::size_t r)
{
    PredictionAssignment pred;
    for (std::size_t j = 0; j < r; ++j) {
        pred.p_pred.push_back(rng.uniform01());
    }
    return pred;
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Plain Monte Carlo over sampled labelings.
inline MonteCarloEstimate monte_carlo_sd(const RegionModel& model, const PredictionAssignment& pred, int samples,
                                         std::uint64_t seed)
{
    const CounterRng root(seed);
    std::vector<double> w;
    for (const Region& r : model.regions()) {
        w.push_back(r.volume);
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<double> labels(model.size());
    for (int s = 0; s < samples; ++s) {
        const LabelConfiguration cfg = sample_labeling(model, root.split(static_cast<std::uint64_t>(s)));
        for (std::size_t j = 0; j < model.size(); ++j) {
            labels[j] = cfg.labels[j];
        }
        const double loss = soft_dice_loss(labels, pred.p_pred, w);
        sum += loss;
        sum_sq += loss * loss;
    }
    const double mean = sum / samples;
    const double var = (sum_sq - samples * mean * mean) / (samples - 1);
    return {mean, std::sqrt(std::max(var, 0.0) / samples)};
}

}  // namespace volbias::test_support
