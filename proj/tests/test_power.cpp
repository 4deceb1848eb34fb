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

#include "simee/config.hpp"
#include "simee/power.hpp"
#include "simee/rng.hpp"

using namespace simee;

namespace
{
    bool rel(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::abs(b); }

    // L x K precoder putting power `w[l]` on antenna l, spread over the users
    Eigen::MatrixXcd with_antenna_powers(const std::vector<double> &w, int users)
    {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(w.size()), users);
        for (size_t l = 0; l < w.size(); ++l)
            for (int k = 0; k < users; ++k)
                p(static_cast<Eigen::Index>(l), k) = std::polar(std::sqrt(w[l] / users), 0.3 * k + l);
        return p;
    }
}

TEST_CASE("table example: 15.10 W")
{
    const SystemConfig c;
    const double pmax = dbm_to_watt(35.0);
    const Eigen::MatrixXcd p = with_antenna_powers({pmax / 4, pmax / 4, pmax / 4, pmax / 4}, 4);
    const PowerBreakdown b = power_breakdown(p, c.power, 49, 4, 4, ActivationRule::hard);
    CHECK(b.active_count() == 4);
    CHECK(rel(b.pa_w, pmax / 0.5));
    CHECK(rel(b.active_w, 1.6));
    CHECK(rel(b.sim_w, 49 * 4 * 0.01 + dbm_to_watt(25.0)));
    CHECK(rel(b.ue_w, 0.4));
    CHECK(rel(b.total_w, 4.5 + 2.0 * pmax + 1.6 + 1.96 + dbm_to_watt(25.0) + 0.4));
    CHECK(b.total_w == doctest::Approx(15.10).epsilon(5e-4));
}

TEST_CASE("hand-built cases")
{
    PowerParams q;
    SUBCASE("all chains idle")
    {
        const PowerBreakdown b = power_breakdown(Eigen::MatrixXcd::Zero(3, 2), q, 9, 2, 2, ActivationRule::hard);
        CHECK(b.active_count() == 0);
        CHECK(rel(b.total_w, 4.5 + 0.0 + 0.0 + 9 * 2 * 0.01 + dbm_to_watt(25.0) + 0.2));
    }
    SUBCASE("threshold is inclusive")
    {
        const PowerBreakdown b = power_breakdown(with_antenna_powers({1e-4, 0.99e-4}, 1), q, 4, 1, 1, ActivationRule::hard);
        CHECK(b.active == std::vector<bool>{true, false});
        CHECK(rel(b.total_w, 4.5 + (1e-4 + 0.99e-4) / 0.5 + 0.4 + 0.04 + dbm_to_watt(25.0) + 0.1));
    }
    SUBCASE("efficiency one")
    {
        q.pa_efficiency = 1.0;
        const PowerBreakdown b = power_breakdown(with_antenna_powers({0.5, 0.25}, 2), q, 16, 3, 2, ActivationRule::hard);
        CHECK(rel(b.total_w, 4.5 + 0.75 + 0.8 + 0.48 + dbm_to_watt(25.0) + 0.2));
    }
    SUBCASE("pinned chain counts without power")
    {
        const PowerBreakdown b =
            power_breakdown(with_antenna_powers({0.0, 1.0}, 1), q, 1, 1, 1, ActivationRule::smooth, {true, false});
        // chain 0 pinned, chain 1 smoothed at 1 W
        const double g1 = std::log1p(1.0 / 1e-10) / std::log1p(1.0 / 1e-10);
        CHECK(rel(b.active_w, 0.4 * (1.0 + g1)));
        CHECK(rel(b.total_w, 4.5 + 2.0 + 0.8 + 0.01 + dbm_to_watt(25.0) + 0.1));
    }
    SUBCASE("zero static and controller")
    {
        q.static_w = 0.0;
        q.controller_w = 0.0;
        q.ue_w = 0.0;
        const PowerBreakdown b = power_breakdown(with_antenna_powers({2.0}, 1), q, 4, 5, 1, ActivationRule::hard);
        CHECK(rel(b.total_w, 4.0 + 0.4 + 0.2));
    }
}

TEST_CASE("smoothed indicator")
{
    CHECK(smoothed_indicator(1e-4, 1e-10) == doctest::Approx(std::log(1 + 1e6) / std::log(1 + 1e10)).epsilon(1e-12));
    CHECK(smoothed_indicator(1e-4, 1e-10) == doctest::Approx(0.600).epsilon(1e-3));
    CHECK(smoothed_indicator(0.0, 1e-10) == 0.0);
    CHECK(smoothed_indicator(1.0, 1e-10) == doctest::Approx(1.0));
    CHECK_THROWS_AS(smoothed_indicator(-1.0, 1e-10), std::domain_error);
}

TEST_CASE("tangent of the indicator is an upper bound")
{
    Rng rng(3);
    for (int i = 0; i < 1000; ++i)
    {
        const double x = std::pow(10.0, rng.uniform(-12, 1)), xb = std::pow(10.0, rng.uniform(-12, 1));
        CHECK(indicator_taylor(x, xb, 1e-10) >= smoothed_indicator(x, 1e-10) - 1e-12);
    }
    CHECK(indicator_taylor(0.3, 0.3, 1e-10) == doctest::Approx(smoothed_indicator(0.3, 1e-10)));
    const double h = 1e-3;
    CHECK((indicator_taylor(0.5 + h, 0.5, 1e-10) - indicator_taylor(0.5, 0.5, 1e-10)) / h ==
          doctest::Approx(indicator_taylor_slope(0.5, 1e-10)));
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watt(35.0) == doctest::Approx(3.16227766016838));
    CHECK(watt_to_dbm(0.1) == doctest::Approx(20.0));
    CHECK(db_to_linear(0.0) == 1.0);
    PowerParams bad;
    bad.pa_efficiency = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
