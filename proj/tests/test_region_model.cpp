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

#include <stdexcept>

#include "test_support.hpp"
#include "volbias/region_model.hpp"

using namespace volbias;

TEST(ExpandScenario, StandardLayout)
{
    const RegionModel m = expand_scenario({100.0, 1.0, 1.0, 1, 0.5});
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].volume, 100.0);
    EXPECT_EQ(m[0].p_fg, 0.0);
    EXPECT_EQ(m[1].volume, 1.0);
    EXPECT_EQ(m[1].p_fg, 0.5);
    EXPECT_EQ(m[2].volume, 1.0);
    EXPECT_EQ(m[2].p_fg, 1.0);
    EXPECT_EQ(m.uncertain_count(), 1u);
}

TEST(ExpandScenario, SplitsUncertainVolume)
{
    const RegionModel m = expand_scenario({100.0, 1.0, 4.0, 4, 0.5});
    ASSERT_EQ(m.size(), 6u);
    for (std::size_t j = 1; j <= 4; ++j) {
        EXPECT_EQ(m[j].volume, 1.0);
    }
    EXPECT_DOUBLE_EQ(m.total_volume(), 105.0);
}

TEST(ExpandScenario, ZeroVolumeAllowed)
{
    const RegionModel m = expand_scenario({0.0, 1.0, 0.0, 1, 0.3});
    EXPECT_EQ(m[1].volume, 0.0);
    EXPECT_EQ(m[0].volume, 0.0);
}

TEST(ExpandScenario, RejectsBadSpecs)
{
    EXPECT_THROW(expand_scenario({100.0, 1.0, 1.0, 0, 0.5}), std::invalid_argument);
    EXPECT_THROW(expand_scenario({-1.0, 1.0, 1.0, 1, 0.5}), std::invalid_argument);
    EXPECT_THROW(expand_scenario({100.0, -1.0, 1.0, 1, 0.5}), std::invalid_argument);
    EXPECT_THROW(expand_scenario({100.0, 1.0, -1.0, 1, 0.5}), std::invalid_argument);
    EXPECT_THROW(expand_scenario({100.0, 1.0, 1.0, 1, 1.5}), std::invalid_argument);
}

TEST(RegionModel, RejectsInvalidRegions)
{
    EXPECT_THROW(RegionModel({{-1.0, 0.5}}), std::invalid_argument);
    EXPECT_THROW(RegionModel({{1.0, -0.1}}), std::invalid_argument);
    EXPECT_THROW(RegionModel({{1.0, 0.5}}, 0.0), std::invalid_argument);
    EXPECT_THROW(RegionModel({}), std::invalid_argument);
    EXPECT_THROW(RegionModel({{0.0, 0.5}}), std::invalid_argument);
}

TEST(RegionModel, VoxelCount)
{
    const RegionModel m({{2.0, 0.5}, {0.5, 1.0}}, 0.25);
    EXPECT_DOUBLE_EQ(m.voxel_count(0), 8.0);
    EXPECT_DOUBLE_EQ(m.voxel_count(1), 2.0);
}

TEST(TrueExpectedVolume, Examples)
{
    EXPECT_DOUBLE_EQ(true_expected_volume(expand_scenario({100.0, 1.0, 1.0, 1, 0.5})), 1.5);
    EXPECT_EQ(true_expected_volume(expand_scenario({100.0, 1.0, 3.0, 4, 0.0})), 1.0);
    EXPECT_DOUBLE_EQ(true_expected_volume(expand_scenario({100.0, 1.0, 4.0, 16, 0.25})), 2.0);
}

TEST(TrueExpectedVolume, MatchesEnumeration)
{
    CounterRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t r = 1 + rng.uniform_index(10);
        const RegionModel m = test_support::random_model(rng, r);
        double expected = 0.0;
        for (std::uint64_t bits = 0; bits < (1ULL << r); ++bits) {
            LabelConfiguration cfg;
            double prob = 1.0;
            for (std::size_t j = 0; j < r; ++j) {
                const bool on = (bits >> j) & 1U;
                cfg.labels.push_back(on ? 1 : 0);
                prob *= on ? m[j].p_fg : 1.0 - m[j].p_fg;
            }
            expected += prob * configuration_volume(m, cfg);
        }
        EXPECT_NEAR(expected, true_expected_volume(m), 1e-12 * m.total_volume());
    }
}

TEST(SampleLabeling, DegenerateProbabilitiesAreExact)
{
    const RegionModel m({{1.0, 0.0}, {2.0, 1.0}, {3.0, 1.0}, {4.0, 0.0}});
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const LabelConfiguration cfg = sample_labeling(m, seed);
        EXPECT_EQ(cfg.labels, (std::vector<std::uint8_t>{0, 1, 1, 0}));
    }
}

TEST(SampleLabeling, FrequencyAndDeterminism)
{
    const RegionModel m = expand_scenario({100.0, 1.0, 1.0, 1, 0.5});
    int hits = 0;
    const int n = 100000;
    for (int s = 0; s < n; ++s) {
        hits += sample_labeling(m, static_cast<std::uint64_t>(s)).labels[1];
    }
    const double mean = static_cast<double>(hits) / n;
    EXPECT_GE(mean, 0.494);
    EXPECT_LE(mean, 0.506);
    EXPECT_EQ(sample_labeling(m, 1234), sample_labeling(m, 1234));
}

TEST(ConfigurationVolume, Examples)
{
    const RegionModel m = expand_scenario({100.0, 1.0, 4.0, 4, 0.5});
    EXPECT_DOUBLE_EQ(configuration_volume(m, {{1, 1, 1, 1, 1, 1}}), m.total_volume());
    EXPECT_EQ(configuration_volume(m, {{0, 0, 0, 0, 0, 0}}), 0.0);
    EXPECT_DOUBLE_EQ(configuration_volume(m, {{0, 1, 0, 1, 0, 1}}), 3.0);
    EXPECT_THROW(configuration_volume(m, {{0, 1}}), std::invalid_argument);
    EXPECT_THROW(configuration_volume(m, {{0, 2, 0, 1, 0, 1}}), std::invalid_argument);
}
