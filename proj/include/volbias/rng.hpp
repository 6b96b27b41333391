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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace volbias {

/// Counter-based generator: the n-th output is a pure function of (key, n).
///
/// Outputs follow the SplitMix64 construction, `mix64(key + (n + 1) * gamma)`,
/// so any position in a stream can be produced without touching the others.
/// Independent streams are derived with `split`, which hashes the parent key
/// together with a stream id. Parallel loops give each task its own stream
/// keyed by the task index, which makes results independent of scheduling.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter)
    {
    }

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Value at an absolute stream position; does not advance the counter.
    constexpr std::uint64_t at(std::uint64_t position) const noexcept
    {
        return mix64(key_ + (position + 1) * kGamma);
    }

    constexpr std::uint64_t operator()() noexcept { return at(counter_++); }

    /// Child stream; `split(i)` for distinct i are statistically independent.
    constexpr CounterRng split(std::uint64_t stream) const noexcept
    {
        return CounterRng(mix64(mix64(key_ ^ kSplitSalt) + stream * kGamma + 1));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// True with probability p; exact for p = 0 and p = 1.
    bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept
    {
        __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (consumes two outputs).
    double normal() noexcept
    {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return std::numeric_limits<std::uint64_t>::max(); }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

  private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kSplitSalt = 0x6a09e667f3bcc909ULL;

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace volbias
