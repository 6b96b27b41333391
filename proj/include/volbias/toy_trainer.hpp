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

#include "volbias/losses.hpp"
#include "volbias/minimizer.hpp"
#include "volbias/region_model.hpp"

namespace volbias {

/// Dense per-pixel features (row-major, pixels x dim) with binary labels.
struct PixelImage {
    std::size_t dim = 0;
    std::vector<double> features;
    std::vector<double> labels;

    std::size_t pixels() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const noexcept { return {features.data() + i * dim, dim}; }
};

/// Synthetic images drawn from a region model. Every pixel of a region
/// carries that region's one-hot feature and shares the region's label.
class ToyDataset {
  public:
    ToyDataset(RegionModel model, int pixels_per_unit_volume, std::vector<LabelConfiguration> images);

    const RegionModel& model() const noexcept { return model_; }
    int pixels_per_unit_volume() const noexcept { return pixels_per_unit_volume_; }
    std::span<const int> pixels_per_region() const noexcept { return pixels_per_region_; }
    std::span<const LabelConfiguration> images() const noexcept { return images_; }
    std::size_t size() const noexcept { return images_.size(); }
    std::size_t pixels_per_image() const noexcept { return pixels_per_image_; }
    double pixel_volume() const noexcept { return 1.0 / pixels_per_unit_volume_; }

    /// Pixel-level view of one image (one-hot features of dimension R).
    PixelImage pixel_image(std::size_t i) const;

  private:
    RegionModel model_;
    int pixels_per_unit_volume_;
    std::vector<int> pixels_per_region_;
    std::size_t pixels_per_image_ = 0;
    std::vector<LabelConfiguration> images_;
};

/// round(s_j * ppuv) pixels per region; image i uses stream split(i) of seed.
/// Throws ResolutionError if a region with positive volume gets no pixels.
ToyDataset generate_dataset(const RegionModel& model, int n_images, int pixels_per_unit_volume, std::uint64_t seed);

/// Smallest base * 2^m (m <= 20) at which every region volume maps to a
/// whole, nonzero number of pixels; base * 2^20 if none does.
int exact_pixel_resolution(const RegionModel& model, int base);

/// Logistic regression y = sigmoid(w . x + b).
struct ToyModel {
    std::vector<double> weights;
    double bias = 0.0;

    static ToyModel zeros(std::size_t dim) { return {std::vector<double>(dim, 0.0), 0.0}; }
};

struct Gradient {
    std::vector<double> weights;
    double bias = 0.0;

    double norm() const noexcept;
};

double sigmoid(double z) noexcept;

SoftMap forward(const ToyModel& model, const PixelImage& image);

/// Mean pixel cross-entropy over the batch and its gradient.
double mean_ce(const ToyModel& model, std::span<const PixelImage> batch);
Gradient ce_gradient(const ToyModel& model, std::span<const PixelImage> batch);

/// Mean per-image soft Dice loss and its gradient. Images whose label and
/// prediction sums are both zero are skipped and counted in `skipped`.
double mean_sd(const ToyModel& model, std::span<const PixelImage> batch, int* skipped = nullptr);
Gradient sd_gradient(const ToyModel& model, std::span<const PixelImage> batch, int* skipped = nullptr);

/// Region-collapsed form of a set of images. With one-hot region features
/// every pixel of region j has logit w_j + b, so pixel sums reduce to
/// pixel counts and images reduce to distinct label patterns.
struct RegionBatch {
    struct Pattern {
        std::vector<std::uint8_t> labels;
        double multiplicity = 0.0;
    };

    std::vector<double> pixels;          ///< n_j
    std::vector<double> foreground_hits; ///< images with l_j = 1
    double image_count = 0.0;
    std::vector<Pattern> patterns;
};

RegionBatch collapse(const ToyDataset& data, std::span<const std::size_t> image_indices);

double mean_ce(const ToyModel& model, const RegionBatch& batch);
Gradient ce_gradient(const ToyModel& model, const RegionBatch& batch);
double mean_sd(const ToyModel& model, const RegionBatch& batch, int* skipped = nullptr);
Gradient sd_gradient(const ToyModel& model, const RegionBatch& batch, int* skipped = nullptr);

struct TrainOptions {
    LossKind loss_kind = LossKind::ce;
    double lr = 0.5;
    int max_epochs = 1000000;
    int patience = 200;
    std::uint64_t seed = 0;
    double min_rel_improvement = 1e-12;
    double grad_tol = 1e-12;
    std::optional<ToyModel> warm_start;

    /// lr 0.5 and 10^6 epochs for CE, lr 0.1 and 10^5 epochs for SD.
    static TrainOptions defaults_for(LossKind kind);
};

struct DataSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Seeded 60/20/20 split by image.
DataSplit split_images(std::size_t n_images, std::uint64_t seed);

struct TrainReport {
    LossKind loss_kind = LossKind::ce;
    double final_loss = 0.0;       ///< training objective of the returned model
    double validation_loss = 0.0;
    std::vector<double> per_region_pred;
    int epochs_run = 0;
    bool converged = false;
    int skipped_images = 0;
    ToyModel model;
    DataSplit split;
    VolumeErrorReport soft_volume;  ///< V(y~) against the mean held-out V(l)
    VolumeErrorReport hard_volume;  ///< V(l~) against the mean held-out V(l)
    double bias_soft = 0.0;
    double bias_hard = 0.0;
};

/// Full-batch gradient descent on the training split.
///
/// The learning rate is divided by 5 after `patience` epochs without a
/// training-loss improvement; training stops after 2 * patience such epochs,
/// when the gradient norm drops below grad_tol, or at max_epochs. The best
/// training-loss parameters are returned. Throws DivergenceError on a
/// non-finite loss or parameter.
TrainReport train(const ToyDataset& data, const TrainOptions& options);

struct VolumeBias {
    double bias_soft = 0.0;  ///< mean of V(y~) - V(l)
    double bias_hard = 0.0;  ///< mean of V(l~) - V(l)
    double soft_volume = 0.0;
    double hard_volume = 0.0;
    double mean_true_volume = 0.0;
    std::vector<double> soft_differences;
    std::vector<double> hard_differences;
};

/// Volume errors of the trained model over the report's held-out test images.
VolumeBias empirical_volume_bias(const TrainReport& report, const ToyDataset& data);

/// Same over an explicit set of images.
VolumeBias empirical_volume_bias(const ToyModel& model, const ToyDataset& data, std::span<const std::size_t> images);

/// sigmoid(w_j + b) per region.
std::vector<double> region_predictions(const ToyModel& model);

}  // namespace volbias
