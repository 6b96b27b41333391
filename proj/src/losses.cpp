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

#include "volbias/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volbias {

namespace {

void check_weights(std::span<const double> weights)
{
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("map weights must be finite and >= 0");
        }
    }
}

void check_same_length(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw std::invalid_argument("maps have different lengths");
    }
}

void check_same_weights(std::span<const double> a, std::span<const double> b)
{
    check_same_length(a.size(), b.size());
    if (!std::equal(a.begin(), a.end(), b.begin())) {
        throw std::invalid_argument("maps carry different element weights");
    }
}

std::vector<double> unit_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

double weighted_sum(std::span<const double> values, std::span<const double> weights)
{
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += weights[i] * values[i];
    }
    return s;
}

}  // namespace

SoftMap::SoftMap(std::vector<double> values) : SoftMap(values, unit_weights(values.size())) {}

SoftMap::SoftMap(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights))
{
    check_same_length(values_.size(), weights_.size());
    check_weights(weights_);
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("soft map values must lie in [0, 1]");
        }
    }
}

HardMap::HardMap(std::vector<std::uint8_t> values) : HardMap(values, unit_weights(values.size())) {}

HardMap::HardMap(std::vector<std::uint8_t> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights))
{
    check_same_length(values_.size(), weights_.size());
    check_weights(weights_);
    for (std::uint8_t v : values_) {
        if (v > 1) {
            throw std::invalid_argument("hard map values must be 0 or 1");
        }
    }
}

SoftMap HardMap::as_soft() const
{
    return SoftMap(std::vector<double>(values_.begin(), values_.end()),
                   std::vector<double>(weights_.begin(), weights_.end()));
}

double cross_entropy_term(double target, double pred) noexcept
{
    // Skip zero-coefficient terms so that 0 * log(.) never contributes.
    double loss = 0.0;
    if (target > 0.0) {
        loss -= target * std::log(std::max(pred, kLogClampEps));
    }
    if (target < 1.0) {
        loss -= (1.0 - target) * std::log1p(-std::min(pred, 1.0 - kLogClampEps));
    }
    return loss;
}

double cross_entropy(const SoftMap& target, const SoftMap& pred)
{
    check_same_weights(target.weights(), pred.weights());
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        loss += pred.weights()[i] * cross_entropy_term(target.values()[i], pred.values()[i]);
    }
    return loss;
}

double cross_entropy(const HardMap& target, const SoftMap& pred) { return cross_entropy(target.as_soft(), pred); }

double soft_dice_loss(std::span<const double> target, std::span<const double> pred,
                      std::span<const double> weights)
{
    check_same_length(target.size(), pred.size());
    check_same_length(target.size(), weights.size());
    double overlap = 0.0;
    double target_sum = 0.0;
    double pred_sum = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        overlap += weights[i] * target[i] * pred[i];
        target_sum += weights[i] * target[i];
        pred_sum += weights[i] * pred[i];
    }
    const double denom = target_sum + pred_sum;
    if (denom == 0.0) {
        return 0.0;
    }
    return 1.0 - 2.0 * overlap / denom;
}

double soft_dice_loss(const SoftMap& target, const SoftMap& pred)
{
    check_same_weights(target.weights(), pred.weights());
    return soft_dice_loss(target.values(), pred.values(), pred.weights());
}

double soft_dice_loss(const HardMap& target, const SoftMap& pred) { return soft_dice_loss(target.as_soft(), pred); }

double dice_score(const HardMap& a, const HardMap& b)
{
    check_same_weights(a.weights(), b.weights());
    double overlap = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = a.weights()[i];
        overlap += w * static_cast<double>(a.values()[i] & b.values()[i]);
        sum += w * static_cast<double>(a.values()[i] + b.values()[i]);
    }
    if (sum == 0.0) {
        return 1.0;
    }
    return 2.0 * overlap / sum;
}

HardMap threshold(const SoftMap& pred, double tau)
{
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("threshold must lie in [0, 1]");
    }
    std::vector<std::uint8_t> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        out[i] = pred.values()[i] >= tau ? 1 : 0;
    }
    return HardMap(std::move(out), std::vector<double>(pred.weights().begin(), pred.weights().end()));
}

double volume_of(const SoftMap& map, double voxel_volume)
{
    if (!(voxel_volume > 0.0)) {
        throw std::invalid_argument("voxel volume must be positive");
    }
    return voxel_volume * weighted_sum(map.values(), map.weights());
}

double volume_of(const HardMap& map, double voxel_volume) { return volume_of(map.as_soft(), voxel_volume); }

VolumeErrorReport volume_error_report(double pred_vol, double true_vol)
{
    if (!(true_vol >= 0.0)) {
        throw std::invalid_argument("true volume must be >= 0");
    }
    VolumeErrorReport r;
    r.delta_v = pred_vol - true_vol;
    r.abs_delta_v = std::abs(r.delta_v);
    if (true_vol > 0.0) {
        r.relative_delta_v = r.delta_v / true_vol;
        r.relative_abs_delta_v = r.abs_delta_v / true_vol;
    }
    return r;
}

double accuracy_01(const HardMap& a, const HardMap& b)
{
    check_same_weights(a.weights(), b.weights());
    double match = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = a.weights()[i];
        total += w;
        match += a.values()[i] == b.values()[i] ? w : 0.0;
    }
    if (total == 0.0) {
        throw std::invalid_argument("accuracy of an empty / zero-weight map is undefined");
    }
    return match / total;
}

}  // namespace volbias
