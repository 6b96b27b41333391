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

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace volbias {

inline constexpr int kDefaultResamples = 10000;
inline constexpr double kSignificanceLevel = 0.05;

struct BootstrapResult {
    double mean_diff = 0.0;
    double p_greater = 1.0;  ///< evidence that mean(a - b) > 0
    double p_smaller = 1.0;  ///< evidence that mean(a - b) < 0
    int n_resamples = 0;
    bool significant = false;
};

/// Paired bootstrap on d_i = a_i - b_i, taken in sorted order so that
/// reordering the pairs does not change the result.
///
/// Each resample draws n differences with replacement and records whether
/// its mean is <= 0 / >= 0. p = (count + 1) / (n_resamples + 1) per side.
/// The result is significant when either one-sided p falls below alpha / 2,
/// i.e. the two-sided (1 - alpha) percentile interval excludes 0.
///
/// Resample r draws from its own counter-based stream split off `seed`, so
/// the OpenMP loop over resamples matches the serial reference exactly.
BootstrapResult bootstrap_paired(std::span<const double> a, std::span<const double> b,
                                 int n_resamples = kDefaultResamples, std::uint64_t seed = 0);

/// Two-sided bootstrap p-value, min(1, 2 min(p_greater, p_smaller)).
double two_sided_p(const BootstrapResult& r) noexcept;

/// True when the (1 - alpha) percentile interval contains 0.
bool ci_covers_zero(const BootstrapResult& r, double alpha = kSignificanceLevel) noexcept;

/// OLS fit true ~ slope * pred + intercept with residual diagnostics.
struct CalibrationFit {
    double slope = 1.0;
    double intercept = 0.0;
    int n_points = 0;
    double residual_mean = 0.0;
    double residual_slope = 0.0;  ///< OLS slope of residuals on pred
};

CalibrationFit fit_calibration(std::span<const double> pred_volumes, std::span<const double> true_volumes);

struct CorrectedVolume {
    double value = 0.0;
    bool clamped = false;  ///< affine map went negative and was clamped to 0
};

CorrectedVolume apply_calibration(const CalibrationFit& fit, double pred_volume) noexcept;

/// Per-decile means, deciles taken by true volume with equal counts.
struct VolumeSpecificProfile {
    std::array<std::pair<double, double>, 10> decile_means{};  ///< (mean true, mean predicted)
    double overall_mean_true = 0.0;
};

VolumeSpecificProfile volume_specific_profile(std::span<const double> pred_volumes,
                                              std::span<const double> true_volumes);

/// OLS slope of decile mean prediction against decile mean true volume.
double profile_slope(const VolumeSpecificProfile& profile);

namespace reference {

/// Serial loop over resamples with the same per-resample streams.
BootstrapResult bootstrap_paired_serial(std::span<const double> a, std::span<const double> b,
                                        int n_resamples = kDefaultResamples, std::uint64_t seed = 0);

}  // namespace reference

}  // namespace volbias
