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

#include "volbias/minimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <algorithm>
#include <string>

#include "volbias/losses.hpp"

namespace volbias {

namespace {

constexpr double kTieTol = 1e-13;

bool nearly_equal(double a, double b) noexcept
{
    return std::abs(a - b) <= kTieTol * std::max(1.0, std::abs(a));
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept { return kind == LossKind::ce ? "ce" : "sd"; }

LossKind parse_loss_kind(std::string_view name)
{
    if (name == "ce" || name == "CE") {
        return LossKind::ce;
    }
    if (name == "sd" || name == "SD") {
        return LossKind::sd;
    }
    throw std::invalid_argument("unknown loss kind '" + std::string(name) + "' (expected ce or sd)");
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    if (!(tol > 0.0)) {
        throw std::invalid_argument("golden-section tolerance must be positive");
    }
    if (!(lo <= hi)) {
        throw std::invalid_argument("golden-section bracket must satisfy lo <= hi");
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

PredictionAssignment ce_minimizer(const RegionModel& model)
{
    PredictionAssignment pred;
    pred.p_pred.reserve(model.size());
    for (const Region& r : model.regions()) {
        pred.p_pred.push_back(r.p_fg);
    }
    return pred;
}

PredictionAssignment ce_minimizer_numeric(const RegionModel& model, double tol)
{
    PredictionAssignment pred;
    pred.p_pred.reserve(model.size());
    for (const Region& r : model.regions()) {
        const double p = r.p_fg;
        auto term = [p](double q) { return cross_entropy_term(p, q); };
        double q = golden_section_minimize(term, 0.0, 1.0, tol);
        // The clamp flattens the objective within eps of the ends; the ends themselves win ties.
        if (term(0.0) <= term(q)) {
            q = 0.0;
        } else if (term(1.0) <= term(q)) {
            q = 1.0;
        }
        pred.p_pred.push_back(q);
    }
    return pred;
}

SdOptimum sd_minimizer(const ScenarioSpec& spec, int grid, double refine_tol)
{
    spec.validate();
    if (grid < 2) {
        throw std::invalid_argument("sd_minimizer grid needs at least 2 points");
    }
    if (!(refine_tol > 0.0)) {
        throw std::invalid_argument("refine_tol must be positive");
    }
    const RegionModel model = expand_scenario(spec);
    PredictionAssignment pred = scenario_prediction(spec, 0.0);
    auto objective = [&](double q) {
        for (std::size_t j = 1; j + 1 < pred.size(); ++j) {
            pred.p_pred[j] = q;
        }
        return expected_sd_binomial(model, pred).value;
    };

    const double step = 1.0 / (grid - 1);
    std::vector<double> values(static_cast<std::size_t>(grid));
    std::size_t best = 0;
    for (int i = 0; i < grid; ++i) {
        const double q = i == grid - 1 ? 1.0 : i * step;
        values[static_cast<std::size_t>(i)] = objective(q);
        if (values[static_cast<std::size_t>(i)] < values[best]) {
            best = static_cast<std::size_t>(i);
        }
    }

    SdOptimum out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != best && nearly_equal(values[i], values[best])) {
            out.tie = true;
        }
    }

    const auto grid_point = [&](std::size_t i) { return i + 1 == values.size() ? 1.0 : static_cast<double>(i) * step; };
    out.p_tilde_opt = grid_point(best);
    out.loss_opt = values[best];

    const double lo = best == 0 ? 0.0 : grid_point(best - 1);
    const double hi = best + 1 == values.size() ? 1.0 : grid_point(best + 1);
    const double refined = golden_section_minimize(objective, lo, hi, refine_tol);
    const double refined_value = objective(refined);
    if (refined_value < out.loss_opt && !nearly_equal(refined_value, out.loss_opt)) {
        out.p_tilde_opt = refined;
        out.loss_opt = refined_value;
    }
    out.interior = out.p_tilde_opt > refine_tol && out.p_tilde_opt < 1.0 - refine_tol;
    return out;
}

RiskCurve risk_curve(const ScenarioSpec& spec, LossKind loss_kind, int n_points)
{
    spec.validate();
    if (n_points < 2) {
        throw std::invalid_argument("risk curve needs at least 2 points");
    }
    const RegionModel model = expand_scenario(spec);
    RiskCurve curve;
    curve.scenario = spec;
    curve.loss_kind = loss_kind;
    curve.points.resize(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double q = i == n_points - 1 ? 1.0 : static_cast<double>(i) / (n_points - 1);
        const PredictionAssignment pred = scenario_prediction(spec, q);
        const double loss = loss_kind == LossKind::sd ? expected_sd_binomial(model, pred).value
                                                      : expected_ce(model, pred).value;
        curve.points[static_cast<std::size_t>(i)] = {q, loss};
    }
    return curve;
}

std::vector<BiasPoint> bias_curve(const ScenarioFamily& family, std::span<const double> p_grid, int grid,
                                  double refine_tol)
{
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("p_beta grid values must lie in [0, 1]");
        }
    }
    std::vector<BiasPoint> out(p_grid.size());
    const auto n = static_cast<std::ptrdiff_t>(p_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double p = p_grid[static_cast<std::size_t>(i)];
        const SdOptimum opt = sd_minimizer(family.at(p), grid, refine_tol);
        BiasPoint& b = out[static_cast<std::size_t>(i)];
        b.p_beta = p;
        b.p_tilde_opt = opt.p_tilde_opt;
        b.prob_error = opt.p_tilde_opt - p;
        b.volume_bias = family.mu * family.s_gamma * b.prob_error;
        b.tie = opt.tie;
    }
    return out;
}

double endpoint_gap(const ScenarioFamily& family, double p_beta)
{
    const ScenarioSpec spec = family.at(p_beta);
    return expected_sd_binomial(spec, 1.0).value - expected_sd_binomial(spec, 0.0).value;
}

SwitchPoint find_switch_point(const ScenarioFamily& family, double tol)
{
    if (!(tol > 0.0)) {
        throw std::invalid_argument("switch point tolerance must be positive");
    }
    SwitchPoint out;
    // Below the switch the empty prediction is better (gap > 0), above it the full one.
    if (!(endpoint_gap(family, 0.0) > 0.0) || !(endpoint_gap(family, 1.0) < 0.0)) {
        return out;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double gap = endpoint_gap(family, mid);
        ++out.iterations;
        if (gap == 0.0) {
            out.p_star = mid;
            return out;
        }
        (gap > 0.0 ? lo : hi) = mid;
    }
    out.p_star = 0.5 * (lo + hi);
    return out;
}

}  // namespace volbias
