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

#include <stdexcept>

#include "simee/config.hpp"

using namespace simee;

TEST_CASE("empty file gives the default operating point")
{
    const SystemConfig c = parse_config("");
    CHECK(c.users == 4);
    CHECK(c.antennas == 4);
    CHECK(c.layers == 4);
    CHECK(c.atoms == 49);
    CHECK(c.bandwidth_hz == doctest::Approx(10e6));
    CHECK(c.noise_dbm_per_hz == -174.0);
    CHECK(c.power.static_w == doctest::Approx(4.5));
    CHECK(c.power.rf_active_w == doctest::Approx(0.4));
    CHECK(c.power.controller_w == doctest::Approx(0.31622776601683794).epsilon(1e-15));
    CHECK(c.power.ue_w == doctest::Approx(0.1));
    CHECK(c.power.meta_w == doctest::Approx(0.01));
    CHECK(c.p_antenna_max_w == doctest::Approx(1.0));
    CHECK(c.gamma_min == doctest::Approx(1.0));
}

TEST_CASE("dBm and dB conversions")
{
    CHECK(parse_config("p_max = 35 dBm").p_max_w == doctest::Approx(3.1623).epsilon(1e-4));
    CHECK(parse_config("p_max = 2 W").p_max_w == doctest::Approx(2.0));
    CHECK(parse_config("p_max = 2").p_max_w == doctest::Approx(2.0));
    CHECK(parse_config("gamma_min = 3 dB").gamma_min == doctest::Approx(1.99526231).epsilon(1e-8));
    CHECK(parse_config("p_ue = 20 dBm").power.ue_w == doctest::Approx(0.1));
}

TEST_CASE("noise power over 10 MHz is -104 dBm")
{
    const SystemConfig c;
    CHECK(watt_to_dbm(c.noise_power_w()) == doctest::Approx(-104.0).epsilon(1e-12));
}

TEST_CASE("invariants name the field")
{
    try
    {
        parse_config("n = 50");
        FAIL("expected an error");
    }
    catch (const std::invalid_argument &e)
    {
        CHECK(std::string(e.what()).find("'n'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("k = 5\nl = 4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("p_max = -1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("schemes = hybrid-sdp,bogus"), std::invalid_argument);
}

TEST_CASE("unknown keys are listed together")
{
    try
    {
        parse_config("foo = 1\nm = 2\nbar = 3");
        FAIL("expected an error");
    }
    catch (const std::invalid_argument &e)
    {
        const std::string msg = e.what();
        CHECK(msg.find("foo") != std::string::npos);
        CHECK(msg.find("bar") != std::string::npos);
    }
}

TEST_CASE("comments, whitespace and sweeps")
{
    const SystemConfig c = parse_config("# header\n  m = 2  \n\nsweep = m: 1, 2, 3\nsweep = p_max: 30 dBm, 40 dBm\n");
    CHECK(c.layers == 2);
    REQUIRE(c.sweep.size() == 2);
    CHECK(c.sweep[0].key == "m");
    CHECK(c.sweep[0].values == std::vector<std::string>{"1", "2", "3"});
    CHECK(c.sweep[1].values.size() == 2);
    CHECK_THROWS_AS(parse_config("sweep = trials: 1, 2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("sweep = nope: 1"), std::invalid_argument);
}

TEST_CASE("resolved config round-trips")
{
    SystemConfig c = parse_config("k = 2\nl = 3\nm = 5\nn = 25\np_max = 33 dBm\nseed = 77\nschemes = hybrid-pga\nsweep = m: 1,8");
    const SystemConfig back = parse_config(format_config(c));
    CHECK(format_config(back) == format_config(c));
    CHECK(back.p_max_w == c.p_max_w);
    CHECK(back.seed == 77);
    CHECK(back.sweep.size() == 1);
}

TEST_CASE("every known key parses its own formatted value")
{
    const SystemConfig c;
    const std::string text = format_config(c);
    for (const auto &key : known_config_keys())
        if (key != "sweep")
            CHECK_MESSAGE(text.find(key + " =") != std::string::npos, key);
}
