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

#include "volbias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "volbias/rng.hpp"

namespace volbias {

namespace {

std::vector<double> paired_differences(std::span<const double> a, std::span<const double> b, int n_resamples)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("bootstrap inputs have different lengths");
    }
    if (a.size() < 2) {
        throw std::invalid_argument("bootstrap needs at least 2 pairs");
    }
    if (n_resamples < 1000) {
        throw std::invalid_argument("bootstrap needs at least 1000 resamples");
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
    }
    // Canonical order: the result depends only on the multiset of differences.
    std::sort(d.begin(), d.end());
    return d;
}

// Sign of the resampled sum: -1, 0 or +1.
int resample_sign(std::span<const double> d, const CounterRng& stream)
{
    CounterRng rng = stream;
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        sum += d[rng.uniform_index(d.size())];
    }
    return (sum > 0.0) - (sum < 0.0);
}

BootstrapResult finish(std::span<const double> d, int n_resamples, long not_positive, long not_negative)
{
    BootstrapResult r;
    r.mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    r.n_resamples = n_resamples;
    r.p_greater = static_cast<double>(not_positive + 1) / (n_resamples + 1);
    r.p_smaller = static_cast<double>(not_negative + 1) / (n_resamples + 1);
    r.significant = std::min(r.p_greater, r.p_smaller) < kSignificanceLevel / 2.0;
    return r;
}

double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

// Centered OLS of y on x; returns (slope, intercept). sxx must be positive.
std::pair<double, double> ols(std::span<const double> x, std::span<const double> y)
{
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace

BootstrapResult bootstrap_paired(std::span<const double> a, std::span<const double> b, int n_resamples,
                                 std::uint64_t seed)
{
    const std::vector<double> d = paired_differences(a, b, n_resamples);
    const CounterRng root(seed);
    long not_positive = 0;
    long not_negative = 0;
#pragma omp parallel for schedule(static) reduction(+ : not_positive, not_negative)
    for (int r = 0; r < n_resamples; ++r) {
        const int sign = resample_sign(d, root.split(static_cast<std::uint64_t>(r)));
        not_positive += sign <= 0 ? 1 : 0;
        not_negative += sign >= 0 ? 1 : 0;
    }
    return finish(d, n_resamples, not_positive, not_negative);
}

double two_sided_p(const BootstrapResult& r) noexcept { return std::min(1.0, 2.0 * std::min(r.p_greater, r.p_smaller)); }

bool ci_covers_zero(const BootstrapResult& r, double alpha) noexcept
{
    return std::min(r.p_greater, r.p_smaller) >= alpha / 2.0;
}

CalibrationFit fit_calibration(std::span<const double> pred_volumes, std::span<const double> true_volumes)
{
    if (pred_volumes.size() != true_volumes.size()) {
        throw std::invalid_argument("calibration inputs have different lengths");
    }
    if (pred_volumes.size() < 3) {
        throw std::invalid_argument("calibration needs at least 3 points");
    }
    const double mx = mean(pred_volumes);
    double sxx = 0.0;
    double scale = 0.0;
    for (double x : pred_volumes) {
        sxx += (x - mx) * (x - mx);
        scale = std::max(scale, std::abs(x));
    }
    if (!(sxx > 1e-24 * scale * scale * static_cast<double>(pred_volumes.size()))) {
        throw std::invalid_argument("calibration predictor has zero variance");
    }

    CalibrationFit fit;
    std::tie(fit.slope, fit.intercept) = ols(pred_volumes, true_volumes);
    fit.n_points = static_cast<int>(pred_volumes.size());

    std::vector<double> residuals(pred_volumes.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        residuals[i] = true_volumes[i] - (fit.slope * pred_volumes[i] + fit.intercept);
    }
    fit.residual_mean = mean(residuals);
    fit.residual_slope = ols(pred_volumes, residuals).first;
    return fit;
}

CorrectedVolume apply_calibration(const CalibrationFit& fit, double pred_volume) noexcept
{
    const double v = fit.slope * pred_volume + fit.intercept;
    if (v < 0.0) {
        return {0.0, true};
    }
    return {v, false};
}

VolumeSpecificProfile volume_specific_profile(std::span<const double> pred_volumes,
                                              std::span<const double> true_volumes)
{
    if (pred_volumes.size() != true_volumes.size()) {
        throw std::invalid_argument("profile inputs have different lengths");
    }
    const std::size_t n = true_volumes.size();
    if (n < 10) {
        throw std::invalid_argument("volume-specific profile needs at least 10 points");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return true_volumes[i] < true_volumes[j]; });

    VolumeSpecificProfile profile;
    profile.overall_mean_true = mean(true_volumes);
    const std::size_t base = n / 10;
    const std::size_t extra = n % 10;
    std::size_t pos = 0;
    for (std::size_t bin = 0; bin < 10; ++bin) {
        const std::size_t count = base + (bin < extra ? 1 : 0);
        double sum_true = 0.0;
        double sum_pred = 0.0;
        for (std::size_t k = 0; k < count; ++k, ++pos) {
            sum_true += true_volumes[order[pos]];
            sum_pred += pred_volumes[order[pos]];
        }
        profile.decile_means[bin] = {sum_true / static_cast<double>(count), sum_pred / static_cast<double>(count)};
    }
    return profile;
}

double profile_slope(const VolumeSpecificProfile& profile)
{
    std::array<double, 10> x{};
    std::array<double, 10> y{};
    for (std::size_t i = 0; i < 10; ++i) {
        x[i] = profile.decile_means[i].first;
        y[i] = profile.decile_means[i].second;
    }
    const double mx = mean(x);
    double sxx = 0.0;
    for (double v : x) {
        sxx += (v - mx) * (v - mx);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("profile has no spread in true volume");
    }
    return ols(x, y).first;
}

namespace reference {

BootstrapResult bootstrap_paired_serial(std::span<const double> a, std::span<const double> b, int n_resamples,
                                        std::uint64_t seed)
{
    const std::vector<double> d = paired_differences(a, b, n_resamples);
    const CounterRng root(seed);
    long not_positive = 0;
    long not_negative = 0;
    for (int r = 0; r < n_resamples; ++r) {
        const int sign = resample_sign(d, root.split(static_cast<std::uint64_t>(r)));
        not_positive += sign <= 0 ? 1 : 0;
        not_negative += sign >= 0 ? 1 : 0;
    }
    return finish(d, n_resamples, not_positive, not_negative);
}

}  // namespace reference

}  // namespace volbias
