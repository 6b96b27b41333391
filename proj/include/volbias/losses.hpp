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
#include <optional>
#include <span>
#include <vector>

namespace volbias {

/// Continuous map with per-element volumes (1.0 for per-voxel use).
class SoftMap {
  public:
    explicit SoftMap(std::vector<double> values);
    SoftMap(std::vector<double> values, std::vector<double> weights);

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return values_.size(); }

  private:
    std::vector<double> values_;
    std::vector<double> weights_;
};

/// Binary map with per-element volumes.
class HardMap {
  public:
    explicit HardMap(std::vector<std::uint8_t> values);
    HardMap(std::vector<std::uint8_t> values, std::vector<double> weights);

    std::span<const std::uint8_t> values() const noexcept { return values_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Same map with 0.0 / 1.0 values.
    SoftMap as_soft() const;

  private:
    std::vector<std::uint8_t> values_;
    std::vector<double> weights_;
};

/// Predicted minus true volume. Relative fields are empty when the true volume is 0.
struct VolumeErrorReport {
    double delta_v = 0.0;
    std::optional<double> relative_delta_v;
    double abs_delta_v = 0.0;
    std::optional<double> relative_abs_delta_v;
};

/// Log clamp used by cross_entropy: log arguments are kept >= eps.
inline constexpr double kLogClampEps = 1e-12;

/// Weighted binary cross-entropy, sum_i w_i [-y_i log p_i - (1 - y_i) log(1 - p_i)].
double cross_entropy(const SoftMap& target, const SoftMap& pred);
double cross_entropy(const HardMap& target, const SoftMap& pred);

/// Per-element term of cross_entropy with the clamp applied.
double cross_entropy_term(double target, double pred) noexcept;

/// 1 - 2 sum w l p / (sum w l + sum w p); 0 when both sums vanish.
double soft_dice_loss(const SoftMap& target, const SoftMap& pred);
double soft_dice_loss(const HardMap& target, const SoftMap& pred);

/// Span form shared by both overloads; weights apply to both maps.
double soft_dice_loss(std::span<const double> target, std::span<const double> pred,
                      std::span<const double> weights);

/// 2 sum w a b / (sum w a + sum w b); 1 when both maps are empty.
double dice_score(const HardMap& a, const HardMap& b);

/// 1 where pred >= tau.
HardMap threshold(const SoftMap& pred, double tau = 0.5);

/// v * sum w_i value_i
double volume_of(const SoftMap& map, double voxel_volume = 1.0);
double volume_of(const HardMap& map, double voxel_volume = 1.0);

VolumeErrorReport volume_error_report(double pred_vol, double true_vol);

/// Weighted fraction of matching entries.
double accuracy_01(const HardMap& a, const HardMap& b);

}  // namespace volbias
