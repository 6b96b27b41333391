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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "volbias/rng.hpp"

namespace volbias {

/// One independent block of voxels sharing a true foreground probability.
struct Region {
    double volume = 0.0;  ///< s_j, in the same units as the voxel volume
    double p_fg = 0.0;    ///< true foreground probability p_j
};

/// Ordered list of independent regions plus the volume of a single voxel.
///
/// Immutable after construction. Certain background / foreground blocks are
/// ordinary regions with p = 0 / p = 1. Zero-volume regions are allowed.
class RegionModel {
  public:
    explicit RegionModel(std::vector<Region> regions, double voxel_volume = 1.0);

    std::span<const Region> regions() const noexcept { return regions_; }
    const Region& operator[](std::size_t j) const noexcept { return regions_[j]; }
    std::size_t size() const noexcept { return regions_.size(); }
    double voxel_volume() const noexcept { return voxel_volume_; }
    double total_volume() const noexcept { return total_volume_; }

    /// n_j = s_j / v
    double voxel_count(std::size_t j) const noexcept { return regions_[j].volume / voxel_volume_; }

    /// Number of regions with 0 < p < 1.
    std::size_t uncertain_count() const noexcept;

  private:
    std::vector<Region> regions_;
    double voxel_volume_;
    double total_volume_;
};

/// Background / K uncertain sub-regions / certain foreground scenario.
struct ScenarioSpec {
    double s_alpha = 100.0;
    double s_gamma = 1.0;
    double mu = 1.0;  ///< total uncertain volume over s_gamma
    int k_regions = 1;
    double p_beta = 0.5;

    void validate() const;
    double beta_volume() const noexcept { return mu * s_gamma / k_regions; }

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Regions ordered [alpha, beta_0 .. beta_{K-1}, gamma].
RegionModel expand_scenario(const ScenarioSpec& spec);

/// One binary label per region.
struct LabelConfiguration {
    std::vector<std::uint8_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
    friend bool operator==(const LabelConfiguration&, const LabelConfiguration&) = default;
};

/// E[V(l)] = sum_j s_j p_j
double true_expected_volume(const RegionModel& model);

/// Independent Bernoulli(p_j) label per region; region j consumes stream position j.
LabelConfiguration sample_labeling(const RegionModel& model, std::uint64_t rng_seed);
LabelConfiguration sample_labeling(const RegionModel& model, const CounterRng& stream);

/// sum_j s_j l_j
double configuration_volume(const RegionModel& model, const LabelConfiguration& cfg);

}  // namespace volbias
