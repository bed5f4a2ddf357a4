// SPDX-License-Identifier: Apache-2.0
//
// ncmac: capacity bounds for noncoherent block-fading multiple-access channels
// Copyright (C) 2026 The ncmac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace ncmac
{
    struct DomainError : std::domain_error
    {
        using std::domain_error::domain_error;
    };

    struct DimensionError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    // Two entries of a spectrum coincide (or ordering is violated)
    struct DegenerateSpectrumError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    struct QuadratureError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct EstimatorError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct ConfigError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };
}
