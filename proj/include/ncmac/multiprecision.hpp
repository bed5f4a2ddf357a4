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

#include <boost/multiprecision/mpfr.hpp>

namespace ncmac
{
    template <unsigned Digits>
    using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                                  boost::multiprecision::et_off>;

    using mp50 = mp_real<50>;
    using mp100 = mp_real<100>;
    using mp200 = mp_real<200>;
    using mp400 = mp_real<400>;

    // Calls fn.template operator()<T>() with the smallest tier carrying `digits` decimal digits
    template <class Fn>
    auto with_precision(double digits, Fn &&fn)
    {
        if (digits <= 45.0)
            return fn.template operator()<mp50>();
        if (digits <= 95.0)
            return fn.template operator()<mp100>();
        if (digits <= 195.0)
            return fn.template operator()<mp200>();
        return fn.template operator()<mp400>();
    }
}
