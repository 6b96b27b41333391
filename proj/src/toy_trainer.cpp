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

#include "volbias/toy_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "volbias/errors.hpp"
#include "volbias/rng.hpp"

namespace volbias {

namespace {

struct LossAndGradient {
    double loss = 0.0;
    Gradient gradient;
    int skipped = 0;
};

void check_dim(const ToyModel& model, std::size_t dim)
{
    if (model.weights.size() != dim) {
        throw std::invalid_argument("model has " + std::to_string(model.weights.size()) +
                                    " weights but features have dimension " + std::to_string(dim));
    }
}

double logit(const ToyModel& model, std::span<const double> x) noexcept
{
    double z = model.bias;
    for (std::size_t k = 0; k < x.size(); ++k) {
        z += model.weights[k] * x[k];
    }
    return z;
}

Gradient zero_gradient(std::size_t dim) { return {std::vector<double>(dim, 0.0), 0.0}; }

void scale(Gradient& g, double factor) noexcept
{
    for (double& w : g.weights) {
        w *= factor;
    }
    g.bias *= factor;
}

// Soft Dice partial derivative with respect to one prediction, times the
// number of pixels that share it.
inline double dice_partial(double label, double overlap, double denom) noexcept
{
    return -2.0 * (label * denom - overlap) / (denom * denom);
}

LossAndGradient ce_pixels(const ToyModel& model, std::span<const PixelImage> batch)
{
    if (batch.empty()) {
        throw std::invalid_argument("empty batch");
    }
    const std::size_t dim = batch.front().dim;
    check_dim(model, dim);
    LossAndGradient out{0.0, zero_gradient(dim), 0};
    double total = 0.0;
    for (const PixelImage& img : batch) {
        check_dim(model, img.dim);
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            const auto x = img.row(i);
            const double y = sigmoid(logit(model, x));
            out.loss += cross_entropy_term(img.labels[i], y);
            const double dz = y - img.labels[i];
            for (std::size_t k = 0; k < dim; ++k) {
                out.gradient.weights[k] += dz * x[k];
            }
            out.gradient.bias += dz;
        }
        total += static_cast<double>(img.pixels());
    }
    out.loss /= total;
    scale(out.gradient, 1.0 / total);
    return out;
}

LossAndGradient sd_pixels(const ToyModel& model, std::span<const PixelImage> batch)
{
    if (batch.empty()) {
        throw std::invalid_argument("empty batch");
    }
    const std::size_t dim = batch.front().dim;
    check_dim(model, dim);
    LossAndGradient out{0.0, zero_gradient(dim), 0};
    int used = 0;
    std::vector<double> y;
    for (const PixelImage& img : batch) {
        check_dim(model, img.dim);
        y.resize(img.pixels());
        double overlap = 0.0;
        double label_sum = 0.0;
        double pred_sum = 0.0;
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            y[i] = sigmoid(logit(model, img.row(i)));
            overlap += img.labels[i] * y[i];
            label_sum += img.labels[i];
            pred_sum += y[i];
        }
        const double denom = label_sum + pred_sum;
        if (denom == 0.0) {
            ++out.skipped;
            continue;
        }
        ++used;
        out.loss += 1.0 - 2.0 * overlap / denom;
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            const double dz = dice_partial(img.labels[i], overlap, denom) * y[i] * (1.0 - y[i]);
            const auto x = img.row(i);
            for (std::size_t k = 0; k < dim; ++k) {
                out.gradient.weights[k] += dz * x[k];
            }
            out.gradient.bias += dz;
        }
    }
    if (used > 0) {
        out.loss /= used;
        scale(out.gradient, 1.0 / used);
    }
    return out;
}

std::vector<double> region_sigmoids(const ToyModel& model)
{
    std::vector<double> y(model.weights.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        y[j] = sigmoid(model.weights[j] + model.bias);
    }
    return y;
}

LossAndGradient ce_regions(const ToyModel& model, const RegionBatch& batch)
{
    const std::size_t r = batch.pixels.size();
    check_dim(model, r);
    LossAndGradient out{0.0, zero_gradient(r), 0};
    const double total_pixels = batch.image_count * std::accumulate(batch.pixels.begin(), batch.pixels.end(), 0.0);
    for (std::size_t j = 0; j < r; ++j) {
        const double y = sigmoid(model.weights[j] + model.bias);
        const double hits = batch.foreground_hits[j];
        const double misses = batch.image_count - hits;
        out.loss += batch.pixels[j] * (hits * cross_entropy_term(1.0, y) + misses * cross_entropy_term(0.0, y));
        const double dz = batch.pixels[j] * (batch.image_count * y - hits) / total_pixels;
        out.gradient.weights[j] = dz;
        out.gradient.bias += dz;
    }
    out.loss /= total_pixels;
    return out;
}

LossAndGradient sd_regions(const ToyModel& model, const RegionBatch& batch)
{
    const std::size_t r = batch.pixels.size();
    check_dim(model, r);
    LossAndGradient out{0.0, zero_gradient(r), 0};
    const std::vector<double> y = region_sigmoids(model);
    double pred_sum = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
        pred_sum += batch.pixels[j] * y[j];
    }
    // dSD/dy_j = -2 l_j / D + 2 I / D^2: the second part is shared by all regions.
    std::vector<double> label_part(r, 0.0);
    double shared_part = 0.0;
    double used = 0.0;
    for (const RegionBatch::Pattern& pattern : batch.patterns) {
        double overlap = 0.0;
        double label_sum = 0.0;
        for (std::size_t j = 0; j < r; ++j) {
            if (pattern.labels[j]) {
                overlap += batch.pixels[j] * y[j];
                label_sum += batch.pixels[j];
            }
        }
        const double denom = label_sum + pred_sum;
        if (denom == 0.0) {
            out.skipped += static_cast<int>(pattern.multiplicity);
            continue;
        }
        const double m = pattern.multiplicity;
        used += m;
        out.loss += m * (1.0 - 2.0 * overlap / denom);
        shared_part += m * 2.0 * overlap / (denom * denom);
        for (std::size_t j = 0; j < r; ++j) {
            if (pattern.labels[j]) {
                label_part[j] -= m * 2.0 / denom;
            }
        }
    }
    if (used == 0.0) {
        return out;
    }
    for (std::size_t j = 0; j < r; ++j) {
        const double dz = batch.pixels[j] * (label_part[j] + shared_part) * y[j] * (1.0 - y[j]) / used;
        out.gradient.weights[j] = dz;
        out.gradient.bias += dz;
    }
    out.loss /= used;
    return out;
}

std::vector<std::size_t> iota_indices(std::size_t n)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

}  // namespace

double Gradient::norm() const noexcept
{
    double s = bias * bias;
    for (double w : weights) {
        s += w * w;
    }
    return std::sqrt(s);
}

double sigmoid(double z) noexcept
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ToyDataset::ToyDataset(RegionModel model, int pixels_per_unit_volume, std::vector<LabelConfiguration> images)
    : model_(std::move(model)), pixels_per_unit_volume_(pixels_per_unit_volume), images_(std::move(images))
{
    if (pixels_per_unit_volume_ < 1) {
        throw std::invalid_argument("pixels_per_unit_volume must be >= 1");
    }
    pixels_per_region_.resize(model_.size());
    for (std::size_t j = 0; j < model_.size(); ++j) {
        const double volume = model_[j].volume;
        pixels_per_region_[j] = static_cast<int>(std::lround(volume * pixels_per_unit_volume_));
        if (volume > 0.0 && pixels_per_region_[j] == 0) {
            throw ResolutionError("region " + std::to_string(j) + " of volume " + std::to_string(volume) +
                                  " gets no pixels at " + std::to_string(pixels_per_unit_volume_) +
                                  " pixels per unit volume");
        }
        pixels_per_image_ += static_cast<std::size_t>(pixels_per_region_[j]);
    }
    for (const LabelConfiguration& cfg : images_) {
        if (cfg.size() != model_.size()) {
            throw std::invalid_argument("image label configuration does not match region count");
        }
    }
}

int exact_pixel_resolution(const RegionModel& model, int base)
{
    if (base < 1) {
        throw std::invalid_argument("pixels_per_unit_volume must be >= 1");
    }
    long long ppuv = base;
    for (int m = 0; m < 20; ++m, ppuv *= 2) {
        bool exact = true;
        for (const Region& region : model.regions()) {
            const double px = region.volume * static_cast<double>(ppuv);
            if ((region.volume > 0.0 && px < 0.5) || std::abs(px - std::round(px)) > 1e-9 * std::max(1.0, px)) {
                exact = false;
                break;
            }
        }
        if (exact) {
            return static_cast<int>(ppuv);
        }
    }
    return static_cast<int>(ppuv);
}

PixelImage ToyDataset::pixel_image(std::size_t i) const
{
    const LabelConfiguration& cfg = images_.at(i);
    const std::size_t dim = model_.size();
    PixelImage img;
    img.dim = dim;
    img.features.assign(pixels_per_image_ * dim, 0.0);
    img.labels.reserve(pixels_per_image_);
    std::size_t row = 0;
    for (std::size_t j = 0; j < dim; ++j) {
        for (int k = 0; k < pixels_per_region_[j]; ++k, ++row) {
            img.features[row * dim + j] = 1.0;
            img.labels.push_back(static_cast<double>(cfg.labels[j]));
        }
    }
    return img;
}

ToyDataset generate_dataset(const RegionModel& model, int n_images, int pixels_per_unit_volume, std::uint64_t seed)
{
    if (n_images < 1) {
        throw std::invalid_argument("n_images must be >= 1");
    }
    const CounterRng root(seed);
    std::vector<LabelConfiguration> images;
    images.reserve(static_cast<std::size_t>(n_images));
    for (int i = 0; i < n_images; ++i) {
        images.push_back(sample_labeling(model, root.split(static_cast<std::uint64_t>(i))));
    }
    return ToyDataset(model, pixels_per_unit_volume, std::move(images));
}

SoftMap forward(const ToyModel& model, const PixelImage& image)
{
    check_dim(model, image.dim);
    std::vector<double> y(image.pixels());
    for (std::size_t i = 0; i < image.pixels(); ++i) {
        y[i] = sigmoid(logit(model, image.row(i)));
    }
    return SoftMap(std::move(y));
}

double mean_ce(const ToyModel& model, std::span<const PixelImage> batch) { return ce_pixels(model, batch).loss; }

Gradient ce_gradient(const ToyModel& model, std::span<const PixelImage> batch)
{
    return ce_pixels(model, batch).gradient;
}

double mean_sd(const ToyModel& model, std::span<const PixelImage> batch, int* skipped)
{
    LossAndGradient r = sd_pixels(model, batch);
    if (skipped) {
        *skipped = r.skipped;
    }
    return r.loss;
}

Gradient sd_gradient(const ToyModel& model, std::span<const PixelImage> batch, int* skipped)
{
    LossAndGradient r = sd_pixels(model, batch);
    if (skipped) {
        *skipped = r.skipped;
    }
    return std::move(r.gradient);
}

RegionBatch collapse(const ToyDataset& data, std::span<const std::size_t> image_indices)
{
    if (image_indices.empty()) {
        throw std::invalid_argument("cannot collapse an empty image set");
    }
    const std::size_t r = data.model().size();
    RegionBatch batch;
    batch.pixels.assign(data.pixels_per_region().begin(), data.pixels_per_region().end());
    batch.foreground_hits.assign(r, 0.0);
    batch.image_count = static_cast<double>(image_indices.size());
    std::map<std::vector<std::uint8_t>, double> counts;
    for (std::size_t i : image_indices) {
        const LabelConfiguration& cfg = data.images()[i];
        for (std::size_t j = 0; j < r; ++j) {
            batch.foreground_hits[j] += cfg.labels[j];
        }
        counts[cfg.labels] += 1.0;
    }
    batch.patterns.reserve(counts.size());
    for (auto& [labels, m] : counts) {
        batch.patterns.push_back({labels, m});
    }
    return batch;
}

double mean_ce(const ToyModel& model, const RegionBatch& batch) { return ce_regions(model, batch).loss; }

Gradient ce_gradient(const ToyModel& model, const RegionBatch& batch) { return ce_regions(model, batch).gradient; }

double mean_sd(const ToyModel& model, const RegionBatch& batch, int* skipped)
{
    LossAndGradient r = sd_regions(model, batch);
    if (skipped) {
        *skipped = r.skipped;
    }
    return r.loss;
}

Gradient sd_gradient(const ToyModel& model, const RegionBatch& batch, int* skipped)
{
    LossAndGradient r = sd_regions(model, batch);
    if (skipped) {
        *skipped = r.skipped;
    }
    return std::move(r.gradient);
}

TrainOptions TrainOptions::defaults_for(LossKind kind)
{
    TrainOptions o;
    o.loss_kind = kind;
    o.lr = kind == LossKind::ce ? 0.5 : 0.1;
    o.max_epochs = kind == LossKind::ce ? 1000000 : 100000;
    return o;
}

DataSplit split_images(std::size_t n_images, std::uint64_t seed)
{
    if (n_images < 3) {
        throw std::invalid_argument("need at least 3 images to split");
    }
    std::vector<std::size_t> order = iota_indices(n_images);
    CounterRng rng(seed);
    for (std::size_t i = n_images - 1; i > 0; --i) {
        std::swap(order[i], order[rng.uniform_index(i + 1)]);
    }
    const auto n = static_cast<double>(n_images);
    auto n_train = static_cast<std::size_t>(std::lround(0.6 * n));
    auto n_val = static_cast<std::size_t>(std::lround(0.2 * n));
    n_train = std::clamp<std::size_t>(n_train, 1, n_images - 2);
    n_val = std::clamp<std::size_t>(n_val, 1, n_images - n_train - 1);
    DataSplit s;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                        order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
    return s;
}

std::vector<double> region_predictions(const ToyModel& model) { return region_sigmoids(model); }

TrainReport train(const ToyDataset& data, const TrainOptions& options)
{
    if (!(options.lr > 0.0)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (options.max_epochs < 0 || options.patience < 1) {
        throw std::invalid_argument("max_epochs must be >= 0 and patience >= 1");
    }
    const std::size_t r = data.model().size();
    TrainReport report;
    report.loss_kind = options.loss_kind;
    report.split = split_images(data.size(), options.seed);
    const RegionBatch train_batch = collapse(data, report.split.train);
    const RegionBatch val_batch = collapse(data, report.split.validation);

    auto evaluate = [&](const ToyModel& m, const RegionBatch& b) {
        return options.loss_kind == LossKind::ce ? ce_regions(m, b) : sd_regions(m, b);
    };

    ToyModel model = options.warm_start.value_or(ToyModel::zeros(r));
    check_dim(model, r);
    ToyModel best = model;
    double best_loss = 0.0;
    double lr = options.lr;
    int since_improvement = 0;
    int since_lr_change = 0;
    int epoch = 0;
    bool converged = false;
    int skipped = 0;

    for (;; ++epoch) {
        LossAndGradient step = evaluate(model, train_batch);
        if (!std::isfinite(step.loss)) {
            throw DivergenceError("training loss became non-finite at epoch " + std::to_string(epoch) +
                                  " (lr " + std::to_string(lr) + ")");
        }
        skipped = step.skipped;
        if (epoch == 0 || step.loss < best_loss - options.min_rel_improvement * std::max(1.0, std::abs(best_loss))) {
            best = model;
            best_loss = step.loss;
            since_improvement = 0;
            since_lr_change = 0;
        } else {
            ++since_improvement;
            ++since_lr_change;
        }
        if (since_lr_change >= options.patience) {
            lr /= 5.0;
            since_lr_change = 0;
        }
        if (since_improvement >= 2 * options.patience || step.gradient.norm() < options.grad_tol) {
            converged = true;
            break;
        }
        if (epoch >= options.max_epochs) {
            break;
        }
        for (std::size_t j = 0; j < r; ++j) {
            model.weights[j] -= lr * step.gradient.weights[j];
        }
        model.bias -= lr * step.gradient.bias;
        const bool finite = std::isfinite(model.bias) &&
                            std::all_of(model.weights.begin(), model.weights.end(), [](double w) { return std::isfinite(w); });
        if (!finite) {
            throw DivergenceError("model parameters became non-finite at epoch " + std::to_string(epoch) + " (lr " +
                                  std::to_string(lr) + ")");
        }
    }

    report.model = best;
    report.final_loss = best_loss;
    report.validation_loss = evaluate(best, val_batch).loss;
    report.per_region_pred = region_sigmoids(best);
    report.epochs_run = epoch;
    report.converged = converged;
    report.skipped_images = skipped;

    const VolumeBias bias = empirical_volume_bias(report, data);
    report.bias_soft = bias.bias_soft;
    report.bias_hard = bias.bias_hard;
    report.soft_volume = volume_error_report(bias.soft_volume, bias.mean_true_volume);
    report.hard_volume = volume_error_report(bias.hard_volume, bias.mean_true_volume);
    return report;
}

VolumeBias empirical_volume_bias(const ToyModel& model, const ToyDataset& data, std::span<const std::size_t> images)
{
    if (images.empty()) {
        throw std::invalid_argument("no held-out images");
    }
    const std::size_t r = data.model().size();
    check_dim(model, r);
    const std::vector<double> y = region_sigmoids(model);
    const std::vector<double> weights(data.pixels_per_region().begin(), data.pixels_per_region().end());
    const SoftMap soft(y, weights);
    const double v_soft = volume_of(soft, data.pixel_volume());
    const double v_hard = volume_of(threshold(soft), data.pixel_volume());

    VolumeBias out;
    out.soft_differences.reserve(images.size());
    out.hard_differences.reserve(images.size());
    for (std::size_t i : images) {
        const HardMap truth(data.images()[i].labels, weights);
        const double v_true = volume_of(truth, data.pixel_volume());
        out.soft_differences.push_back(v_soft - v_true);
        out.hard_differences.push_back(v_hard - v_true);
    }
    const auto n = static_cast<double>(images.size());
    out.bias_soft = std::accumulate(out.soft_differences.begin(), out.soft_differences.end(), 0.0) / n;
    out.bias_hard = std::accumulate(out.hard_differences.begin(), out.hard_differences.end(), 0.0) / n;
    out.soft_volume = v_soft;
    out.hard_volume = v_hard;
    out.mean_true_volume = v_soft - out.bias_soft;
    return out;
}

VolumeBias empirical_volume_bias(const TrainReport& report, const ToyDataset& data)
{
    return empirical_volume_bias(report.model, data, report.split.test);
}

}  // namespace volbias
