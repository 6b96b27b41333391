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

#include <stdexcept>

namespace volbias {

// Precondition violations throw std::invalid_argument. The types below flag
// failures a caller may want to handle separately.

/// Exhaustive enumeration refused: too many uncertain regions.
class CapacityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A region maps to zero pixels at the requested sampling density.
class ResolutionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace volbias
