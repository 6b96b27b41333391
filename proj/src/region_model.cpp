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

#include "volbias/region_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace volbias {

RegionModel::RegionModel(std::vector<Region> regions, double voxel_volume)
    : regions_(std::move(regions)), voxel_volume_(voxel_volume), total_volume_(0.0)
{
    if (regions_.empty()) {
        throw std::invalid_argument("region model needs at least one region");
    }
    if (!(voxel_volume_ > 0.0) || !std::isfinite(voxel_volume_)) {
        throw std::invalid_argument("voxel volume must be positive and finite");
    }
    for (std::size_t j = 0; j < regions_.size(); ++j) {
        const Region& r = regions_[j];
        if (!(r.volume >= 0.0) || !std::isfinite(r.volume)) {
            throw std::invalid_argument("region " + std::to_string(j) + ": volume must be finite and >= 0");
        }
        if (!(r.p_fg >= 0.0 && r.p_fg <= 1.0)) {
            throw std::invalid_argument("region " + std::to_string(j) + ": p_fg must lie in [0, 1]");
        }
        total_volume_ += r.volume;
    }
    if (!(total_volume_ > 0.0) || !std::isfinite(total_volume_)) {
        throw std::invalid_argument("total region volume must be finite and positive");
    }
}

std::size_t RegionModel::uncertain_count() const noexcept
{
    std::size_t n = 0;
    for (const Region& r : regions_) {
        n += (r.p_fg > 0.0 && r.p_fg < 1.0) ? 1 : 0;
    }
    return n;
}

void ScenarioSpec::validate() const
{
    if (k_regions <= 0) {
        throw std::invalid_argument("k_regions must be positive");
    }
    if (!(s_alpha >= 0.0) || !(s_gamma >= 0.0) || !(mu >= 0.0)) {
        throw std::invalid_argument("scenario volumes and mu must be >= 0");
    }
    if (!std::isfinite(s_alpha) || !std::isfinite(s_gamma) || !std::isfinite(mu)) {
        throw std::invalid_argument("scenario volumes and mu must be finite");
    }
    if (!(p_beta >= 0.0 && p_beta <= 1.0)) {
        throw std::invalid_argument("p_beta must lie in [0, 1]");
    }
}

RegionModel expand_scenario(const ScenarioSpec& spec)
{
    spec.validate();
    std::vector<Region> regions;
    regions.reserve(static_cast<std::size_t>(spec.k_regions) + 2);
    regions.push_back({spec.s_alpha, 0.0});
    const double beta = spec.beta_volume();
    for (int k = 0; k < spec.k_regions; ++k) {
        regions.push_back({beta, spec.p_beta});
    }
    regions.push_back({spec.s_gamma, 1.0});
    return RegionModel(std::move(regions));
}

double true_expected_volume(const RegionModel& model)
{
    double v = 0.0;
    for (const Region& r : model.regions()) {
        v += r.volume * r.p_fg;
    }
    return v;
}

LabelConfiguration sample_labeling(const RegionModel& model, const CounterRng& stream)
{
    LabelConfiguration cfg;
    cfg.labels.resize(model.size());
    CounterRng rng = stream;
    for (std::size_t j = 0; j < model.size(); ++j) {
        cfg.labels[j] = rng.bernoulli(model[j].p_fg) ? 1 : 0;
    }
    return cfg;
}

LabelConfiguration sample_labeling(const RegionModel& model, std::uint64_t rng_seed)
{
    return sample_labeling(model, CounterRng(rng_seed));
}

double configuration_volume(const RegionModel& model, const LabelConfiguration& cfg)
{
    if (cfg.size() != model.size()) {
        throw std::invalid_argument("label configuration length does not match region count");
    }
    double v = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) {
        if (cfg.labels[j] > 1) {
            throw std::invalid_argument("labels must be 0 or 1");
        }
        v += model[j].volume * static_cast<double>(cfg.labels[j]);
    }
    return v;
}

}  // namespace volbias
