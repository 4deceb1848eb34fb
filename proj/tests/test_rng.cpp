// SPDX-License-Identifier: Apache-2.0
//
// simee - energy-efficient hybrid precoding for stacked intelligent metasurfaces
// Copyright (C) 2026 The simee authors
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

#include <doctest.h>

#include <cmath>

#include "simee/rng.hpp"

using namespace simee;

TEST_CASE("streams are reproducible and distinct")
{
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 5; ++i)
    {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x != c.uniform());
    }
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("splitmix64 reference value")
{
    // first output of the reference generator seeded with 0
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("uniform range and normal moments")
{
    Rng r(7);
    double mean = 0.0, var = 0.0, cpow = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double u = r.uniform(2.0, 3.0);
        CHECK_UNARY(u >= 2.0);
        CHECK_UNARY(u < 3.0);
        const double z = r.normal();
        mean += z;
        var += z * z;
        cpow += std::norm(r.complex_normal());
    }
    CHECK(std::abs(mean / n) < 0.01);
    CHECK(var / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(cpow / n == doctest::Approx(1.0).epsilon(0.02));
}
