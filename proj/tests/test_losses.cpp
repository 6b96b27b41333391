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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "volbias/losses.hpp"

using namespace volbias;

TEST(CrossEntropy, Examples)
{
    EXPECT_EQ(cross_entropy(SoftMap({1.0}), SoftMap({1.0})), 0.0);
    EXPECT_NEAR(cross_entropy(SoftMap({1.0}), SoftMap({0.5})), std::numbers::ln2, 1e-15);
    EXPECT_NEAR(cross_entropy(SoftMap({0.5}), SoftMap({0.5})), std::numbers::ln2, 1e-15);
}

TEST(CrossEntropy, ClampKeepsLossFinite)
{
    const double loss = cross_entropy(HardMap({1, 0}), SoftMap({0.0, 1.0}));
    EXPECT_TRUE(std::isfinite(loss));
    EXPECT_NEAR(loss, -2.0 * std::log(kLogClampEps), 1e-4);
    EXPECT_EQ(cross_entropy(HardMap({0, 1}), SoftMap({0.0, 1.0})), 0.0);
}

TEST(CrossEntropy, WeightsScaleTerms)
{
    const double one = cross_entropy(SoftMap({0.3}), SoftMap({0.6}));
    EXPECT_NEAR(cross_entropy(SoftMap({0.3}, {2.5}), SoftMap({0.6}, {2.5})), 2.5 * one, 1e-14);
}

TEST(CrossEntropy, BoundedBelowByEntropy)
{
    CounterRng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double y = rng.uniform01();
        const double q = rng.uniform01();
        const double entropy = cross_entropy_term(y, y);
        EXPECT_GE(cross_entropy_term(y, q), entropy - 1e-12);
    }
}

TEST(CrossEntropy, RejectsMismatch)
{
    EXPECT_THROW(cross_entropy(SoftMap({1.0, 0.0}), SoftMap({1.0})), std::invalid_argument);
    EXPECT_THROW(cross_entropy(SoftMap({1.0}, {2.0}), SoftMap({1.0}, {1.0})), std::invalid_argument);
}

TEST(SoftDice, Examples)
{
    EXPECT_EQ(soft_dice_loss(HardMap({1, 0, 1}), SoftMap({1.0, 0.0, 1.0})), 0.0);
    EXPECT_NEAR(soft_dice_loss(SoftMap({1.0}), SoftMap({0.5})), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(soft_dice_loss(SoftMap({1.0, 1.0}), SoftMap({0.5, 1.0})), 1.0 / 7.0, 1e-15);
}

TEST(SoftDice, EmptyMapsGiveZero)
{
    EXPECT_EQ(soft_dice_loss(SoftMap({0.0, 0.0}), SoftMap({0.0, 0.0})), 0.0);
    EXPECT_EQ(soft_dice_loss(SoftMap({0.0}), SoftMap({0.3})), 1.0);
}

TEST(SoftDice, RangeAndSymmetry)
{
    CounterRng rng(23);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 1 + rng.uniform_index(8);
        std::vector<double> a(n);
        std::vector<double> b(n);
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = rng.uniform01();
            b[k] = rng.uniform01();
            w[k] = 0.1 + rng.uniform01();
        }
        const double ab = soft_dice_loss(a, b, w);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_NEAR(ab, soft_dice_loss(b, a, w), 1e-15);
    }
}

TEST(SoftDice, AgreesWithDiceOnBinaryMaps)
{
    CounterRng rng(29);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 1 + rng.uniform_index(8);
        std::vector<std::uint8_t> a(n);
        std::vector<std::uint8_t> b(n);
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = rng.bernoulli(0.5);
            b[k] = rng.bernoulli(0.5);
            w[k] = 0.5 + rng.uniform01();
        }
        const HardMap ha(a, w);
        const HardMap hb(b, w);
        EXPECT_NEAR(dice_score(ha, hb), 1.0 - soft_dice_loss(ha, hb.as_soft()), 1e-14);
    }
}

TEST(DiceScore, Examples)
{
    EXPECT_EQ(dice_score(HardMap({1, 0, 1}), HardMap({1, 0, 1})), 1.0);
    EXPECT_EQ(dice_score(HardMap({1, 0}), HardMap({0, 1})), 0.0);
    EXPECT_DOUBLE_EQ(dice_score(HardMap({1, 1, 0}), HardMap({1, 0, 1})), 0.5);
    EXPECT_EQ(dice_score(HardMap({0, 0}), HardMap({0, 0})), 1.0);
}

TEST(Threshold, BoundaryIsForeground)
{
    EXPECT_EQ(threshold(SoftMap({0.5})).values()[0], 1);
    EXPECT_EQ(threshold(SoftMap({0.49999})).values()[0], 0);
    const HardMap h = threshold(SoftMap({0.2, 0.8}, {3.0, 4.0}));
    EXPECT_EQ(h.values()[0], 0);
    EXPECT_EQ(h.values()[1], 1);
    EXPECT_EQ(h.weights()[1], 4.0);
    EXPECT_EQ(threshold(SoftMap({0.2}), 0.1).values()[0], 1);
}

TEST(VolumeOf, Examples)
{
    EXPECT_DOUBLE_EQ(volume_of(SoftMap({0.5, 1.0}, {4.0, 1.0})), 3.0);
    EXPECT_EQ(volume_of(SoftMap({0.0, 0.0})), 0.0);
    EXPECT_DOUBLE_EQ(volume_of(HardMap({0, 1, 0, 1, 0, 1}, {100, 1, 1, 1, 1, 1})), 3.0);
    EXPECT_DOUBLE_EQ(volume_of(HardMap({1, 1}), 0.5), 1.0);
}

TEST(VolumeErrorReport, Examples)
{
    const VolumeErrorReport same = volume_error_report(1.5, 1.5);
    EXPECT_EQ(same.delta_v, 0.0);
    EXPECT_EQ(*same.relative_delta_v, 0.0);
    const VolumeErrorReport over = volume_error_report(2.0, 1.0);
    EXPECT_EQ(over.delta_v, 1.0);
    EXPECT_EQ(*over.relative_delta_v, 1.0);
    EXPECT_EQ(over.abs_delta_v, 1.0);
    EXPECT_EQ(*over.relative_abs_delta_v, 1.0);
    const VolumeErrorReport under = volume_error_report(0.5, 2.0);
    EXPECT_EQ(under.delta_v, -1.5);
    EXPECT_EQ(*under.relative_delta_v, -0.75);
    EXPECT_EQ(under.abs_delta_v, 1.5);
    const VolumeErrorReport empty = volume_error_report(0.5, 0.0);
    EXPECT_FALSE(empty.relative_delta_v.has_value());
    EXPECT_FALSE(empty.relative_abs_delta_v.has_value());
}

TEST(Accuracy, Examples)
{
    EXPECT_EQ(accuracy_01(HardMap({1, 0, 1}), HardMap({1, 0, 1})), 1.0);
    EXPECT_EQ(accuracy_01(HardMap({1, 0}), HardMap({0, 1})), 0.0);
    EXPECT_DOUBLE_EQ(accuracy_01(HardMap({1, 0}, {3.0, 1.0}), HardMap({1, 1}, {3.0, 1.0})), 0.75);
}

TEST(Maps, RejectInvalidValues)
{
    EXPECT_THROW(SoftMap({1.5}), std::invalid_argument);
    EXPECT_THROW(SoftMap({0.5}, {-1.0}), std::invalid_argument);
    EXPECT_THROW(SoftMap({0.5, 0.5}, {1.0}), std::invalid_argument);
    EXPECT_THROW(HardMap({2}), std::invalid_argument);
}
