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

#include "volbias/risk_engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "volbias/errors.hpp"
#include "volbias/losses.hpp"
#include "volbias/parallel.hpp"

namespace volbias {

namespace {

// Low bits of the configuration index are enumerated from a precomputed
// table; the remaining high bits select the chunk.
constexpr std::size_t kTableBits = 12;

void check_prediction(const RegionModel& model, const PredictionAssignment& pred)
{
    if (pred.size() != model.size()) {
        throw std::invalid_argument("prediction length " + std::to_string(pred.size()) +
                                    " does not match region count " + std::to_string(model.size()));
    }
    for (double q : pred.p_pred) {
        if (!(q >= 0.0 && q <= 1.0)) {
            throw std::invalid_argument("predicted probabilities must lie in [0, 1]");
        }
    }
}

bool is_certain(double p) noexcept { return p == 0.0 || p == 1.0; }

// Certain regions reduce to constant contributions to the three Dice sums;
// only uncertain regions remain as free labels.
struct FoldedModel {
    double overlap = 0.0;     // sum over certain foreground of s q
    double target = 0.0;      // sum over certain foreground of s
    double pred_total = 0.0;  // sum over all regions of s q (label independent)
    std::vector<double> volume;
    std::vector<double> pred;
    std::vector<double> p;
};

FoldedModel fold(const RegionModel& model, const PredictionAssignment& pred)
{
    check_prediction(model, pred);
    FoldedModel f;
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double s = model[j].volume;
        const double p = model[j].p_fg;
        const double q = pred.p_pred[j];
        f.pred_total += s * q;
        if (is_certain(p)) {
            if (p == 1.0) {
                f.overlap += s * q;
                f.target += s;
            }
        } else {
            f.volume.push_back(s);
            f.pred.push_back(q);
            f.p.push_back(p);
        }
    }
    return f;
}

inline double dice_loss_from_sums(double overlap, double target, double pred_total) noexcept
{
    const double denom = target + pred_total;
    return denom == 0.0 ? 0.0 : 1.0 - 2.0 * overlap / denom;
}

struct PartialSums {
    double overlap = 0.0;
    double target = 0.0;
    double log_weight = 0.0;
};

}  // namespace

PredictionAssignment scenario_prediction(const ScenarioSpec& spec, double p_tilde_beta)
{
    spec.validate();
    if (!(p_tilde_beta >= 0.0 && p_tilde_beta <= 1.0)) {
        throw std::invalid_argument("p_tilde_beta must lie in [0, 1]");
    }
    PredictionAssignment pred;
    pred.p_pred.assign(static_cast<std::size_t>(spec.k_regions) + 2, p_tilde_beta);
    pred.p_pred.front() = 0.0;
    pred.p_pred.back() = 1.0;
    return pred;
}

ExpectedLoss expected_ce(const RegionModel& model, const PredictionAssignment& pred)
{
    check_prediction(model, pred);
    double value = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) {
        value += model[j].volume * cross_entropy_term(model[j].p_fg, pred.p_pred[j]);
    }
    return {value, 1, ExpectationMethod::closed_form};
}

ExpectedLoss expected_sd_exhaustive(const RegionModel& model, const PredictionAssignment& pred)
{
    const FoldedModel f = fold(model, pred);
    const std::size_t n_free = f.p.size();
    if (n_free > kMaxEnumeratedRegions) {
        throw CapacityError("exhaustive E[SD] limited to " + std::to_string(kMaxEnumeratedRegions) +
                            " uncertain regions, got " + std::to_string(n_free) +
                            "; use expected_sd_binomial for homogeneous regions");
    }

    const std::size_t low_bits = n_free < kTableBits ? n_free : kTableBits;
    const std::size_t high_bits = n_free - low_bits;
    const std::size_t table_size = std::size_t{1} << low_bits;
    const std::size_t chunk_count = std::size_t{1} << high_bits;

    std::vector<double> log_on(n_free);
    std::vector<double> log_off(n_free);
    for (std::size_t r = 0; r < n_free; ++r) {
        log_on[r] = std::log(f.p[r]);
        log_off[r] = std::log1p(-f.p[r]);
    }

    // Subset sums over the low regions, built from the entry with the lowest set bit cleared.
    std::vector<PartialSums> table(table_size);
    for (std::size_t r = 0; r < low_bits; ++r) {
        table[0].log_weight += log_off[r];
    }
    for (std::size_t m = 1; m < table_size; ++m) {
        const std::size_t r = static_cast<std::size_t>(__builtin_ctzll(m));
        const PartialSums& base = table[m & (m - 1)];
        table[m].overlap = base.overlap + f.volume[r] * f.pred[r];
        table[m].target = base.target + f.volume[r];
        table[m].log_weight = base.log_weight + (log_on[r] - log_off[r]);
    }

    std::vector<double> chunk_sums(chunk_count);
#pragma omp parallel for schedule(static)
    for (std::size_t h = 0; h < chunk_count; ++h) {
        PartialSums hi{f.overlap, f.target, 0.0};
        for (std::size_t b = 0; b < high_bits; ++b) {
            const std::size_t r = low_bits + b;
            if ((h >> b) & 1U) {
                hi.overlap += f.volume[r] * f.pred[r];
                hi.target += f.volume[r];
                hi.log_weight += log_on[r];
            } else {
                hi.log_weight += log_off[r];
            }
        }
        double acc = 0.0;
        for (std::size_t m = 0; m < table_size; ++m) {
            const PartialSums& lo = table[m];
            const double w = std::exp(hi.log_weight + lo.log_weight);
            acc += w * dice_loss_from_sums(hi.overlap + lo.overlap, hi.target + lo.target, f.pred_total);
        }
        chunk_sums[h] = acc;
    }

    return {pairwise_sum(chunk_sums), std::uint64_t{1} << n_free, ExpectationMethod::exhaustive};
}

ExpectedLoss expected_sd_binomial(const RegionModel& model, const PredictionAssignment& pred)
{
    const FoldedModel f = fold(model, pred);
    const std::size_t k = f.p.size();
    if (k == 0) {
        return {dice_loss_from_sums(f.overlap, f.target, f.pred_total), 1, ExpectationMethod::binomial};
    }
    for (std::size_t r = 1; r < k; ++r) {
        if (f.volume[r] != f.volume[0] || f.p[r] != f.p[0] || f.pred[r] != f.pred[0]) {
            throw std::invalid_argument(
                "binomial E[SD] needs homogeneous uncertain regions (equal volume, p and prediction)");
        }
    }
    const double s = f.volume[0];
    const double p = f.p[0];
    const double q = f.pred[0];
    const double kd = static_cast<double>(k);
    const double log_p = std::log(p);
    const double log_1mp = std::log1p(-p);
    const double log_kfact = std::lgamma(kd + 1.0);

    double value = 0.0;
    for (std::size_t m = 0; m <= k; ++m) {
        const double md = static_cast<double>(m);
        const double log_w = log_kfact - std::lgamma(md + 1.0) - std::lgamma(kd - md + 1.0) + md * log_p +
                             (kd - md) * log_1mp;
        const double loss = dice_loss_from_sums(f.overlap + md * s * q, f.target + md * s, f.pred_total);
        value += std::exp(log_w) * loss;
    }
    return {value, k + 1, ExpectationMethod::binomial};
}

ExpectedLoss expected_sd_binomial(const ScenarioSpec& spec, double p_tilde_beta)
{
    return expected_sd_binomial(expand_scenario(spec), scenario_prediction(spec, p_tilde_beta));
}

namespace reference {

ExpectedLoss expected_sd_enumerate(const RegionModel& model, const PredictionAssignment& pred)
{
    check_prediction(model, pred);
    const std::size_t n = model.size();
    if (n > kMaxEnumeratedRegions) {
        throw CapacityError("reference enumeration limited to " + std::to_string(kMaxEnumeratedRegions) +
                            " regions");
    }
    std::vector<double> volumes(n);
    for (std::size_t j = 0; j < n; ++j) {
        volumes[j] = model[j].volume;
    }
    std::vector<double> labels(n);
    const std::uint64_t count = std::uint64_t{1} << n;
    double value = 0.0;
    for (std::uint64_t c = 0; c < count; ++c) {
        double weight = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const bool on = (c >> j) & 1U;
            labels[j] = on ? 1.0 : 0.0;
            weight *= on ? model[j].p_fg : 1.0 - model[j].p_fg;
        }
        if (weight == 0.0) {
            continue;
        }
        value += weight * soft_dice_loss(labels, pred.p_pred, volumes);
    }
    return {value, count, ExpectationMethod::exhaustive};
}

}  // namespace reference

}  // namespace volbias
