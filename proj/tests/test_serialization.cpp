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

#include "volbias/serialization.hpp"

using namespace volbias;
using nlohmann::json;

TEST(FormatNumber, FifteenSignificantDigits)
{
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333333");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-2.5), "-2.5");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(round15(1.0 / 3.0), 0.333333333333333);
}

TEST(ScenarioJson, RoundTrip)
{
    const ScenarioSpec s{50.0, 2.0, 0.25, 16, 0.75};
    const json j = s;
    EXPECT_EQ(j.at("k_regions"), 16);
    EXPECT_EQ(j.get<ScenarioSpec>(), s);
}

TEST(ScenarioJson, RejectsMalformedInput)
{
    json j = ScenarioSpec{};
    json extra = j;
    extra["colour"] = "red";
    EXPECT_THROW(extra.get<ScenarioSpec>(), std::invalid_argument);
    json missing = j;
    missing.erase("mu");
    EXPECT_THROW(missing.get<ScenarioSpec>(), std::invalid_argument);
    json frac = j;
    frac["k_regions"] = 1.5;
    EXPECT_THROW(frac.get<ScenarioSpec>(), std::invalid_argument);
    json bad = j;
    bad["p_beta"] = 2.0;
    EXPECT_THROW(bad.get<ScenarioSpec>(), std::invalid_argument);
    json text = j;
    text["mu"] = "one";
    EXPECT_THROW(text.get<ScenarioSpec>(), std::invalid_argument);
}

TEST(CalibrationJson, RoundTripAndKeys)
{
    const CalibrationFit f{0.5, 1.25, 10, 1e-17, -2e-17};
    const json j = f;
    for (const char* key : {"slope", "intercept", "n_points", "residual_mean", "residual_slope"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.size(), 5u);
    const CalibrationFit back = j.get<CalibrationFit>();
    EXPECT_EQ(back.slope, 0.5);
    EXPECT_EQ(back.intercept, 1.25);
    EXPECT_EQ(back.n_points, 10);
}

TEST(BootstrapJson, Keys)
{
    const json j = BootstrapResult{0.1, 0.01, 0.99, 10000, true};
    EXPECT_EQ(j.size(), 5u);
    EXPECT_EQ(j.at("significant"), true);
    EXPECT_EQ(j.at("n_resamples"), 10000);
}

TEST(TrainReportJson, ExactKeys)
{
    TrainReport r;
    r.loss_kind = LossKind::sd;
    r.per_region_pred = {0.0, 1.0 / 3.0, 1.0};
    r.epochs_run = 12;
    const json j = r;
    EXPECT_EQ(j.size(), 6u);
    EXPECT_EQ(j.at("loss_kind"), "sd");
    EXPECT_EQ(j.at("per_region_pred").size(), 3u);
    EXPECT_EQ(j.at("per_region_pred")[1].get<double>(), 0.333333333333333);
    EXPECT_EQ(j.at("epochs_run"), 12);
}

TEST(Csv, ParsesHeaderAndRows)
{
    const CsvTable t = parse_csv("a,b,c\r\n1,2,3\n\n4,5,6\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][2], "6");
    EXPECT_EQ(t.column("b"), 1u);
    EXPECT_THROW(t.column("d"), std::invalid_argument);
}

TEST(Csv, RejectsRaggedAndEmpty)
{
    EXPECT_THROW(parse_csv("a,b\n1\n"), std::invalid_argument);
    EXPECT_THROW(parse_csv(""), std::invalid_argument);
    EXPECT_EQ(parse_csv("x,y\n,\n").rows[0][0], "");
}
