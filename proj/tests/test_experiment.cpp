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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "simee/experiment.hpp"

using namespace simee;
namespace fs = std::filesystem;

namespace
{
    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("simee_test_" + name);
        fs::remove_all(p);
        return p;
    }

    SystemConfig quick()
    {
        SystemConfig c = parse_config("k = 2\nl = 2\nm = 2\nn = 9\ngamma_min = 0\nschemes = digital-pre,wave-sim\ntrials = 3\nseed = 9");
        return c;
    }
}

TEST_CASE("csv quoting round-trips")
{
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const auto rec = parse_csv("x,y,z\r\n1,\"a,b\",\"q\"\"q\"\r\n2,\"line\nbreak\",\r\n");
    REQUIRE(rec.size() == 3);
    CHECK(rec[1][1] == "a,b");
    CHECK(rec[1][2] == "q\"q");
    CHECK(rec[2][1] == "line\nbreak");
    CHECK(rec[2][2] == "");
    CHECK_THROWS(parse_csv("a,\"open\n"));
}

TEST_CASE("nearest-rank percentiles and medians")
{
    const std::vector<double> v{15, 20, 35, 40, 50};
    CHECK(nearest_rank(v, 5) == 15);
    CHECK(nearest_rank(v, 30) == 20);
    CHECK(nearest_rank(v, 40) == 20);
    CHECK(nearest_rank(v, 50) == 35);
    CHECK(nearest_rank(v, 100) == 50);
    CHECK(nearest_rank({3, 1, 2}, 10) == 1);
    CHECK(nearest_rank({3, 1, 2}, 90) == 3);
    CHECK(median({4, 1, 3}) == 3);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK_THROWS(median({}));
}

TEST_CASE("summary fixtures")
{
    const std::string head = "sweep,point,scheme,trial,seed,status,ee_bit_per_joule,sum_rate_bps_hz\r\n";
    SUBCASE("single row")
    {
        const auto s = summarize(head + "none,,hybrid-pga,0,1,converged,5,2\r\n");
        REQUIRE(s.size() == 1);
        CHECK(s[0].ee_median == 5);
        CHECK(s[0].ee_mean == 5);
        CHECK(s[0].ee_p10 == 5);
        CHECK(s[0].ee_p90 == 5);
        CHECK(s[0].feasible_fraction == 1.0);
    }
    SUBCASE("three rows, one infeasible")
    {
        const auto s = summarize(head + "m,2,a,0,1,converged,9,3\r\nm,2,a,1,2,infeasible,7,1\r\nm,2,a,2,3,max-iterations,4,2\r\n"
                                        "m,3,a,0,1,converged,1,1\r\n");
        REQUIRE(s.size() == 2);
        CHECK(s[0].point == "2");
        CHECK(s[0].count == 3);
        CHECK(s[0].ee_median == 4); // {0, 4, 9}
        CHECK(s[0].ee_mean == doctest::Approx(13.0 / 3));
        CHECK(s[0].rate_median == 2);
        CHECK(s[0].feasible_fraction == doctest::Approx(2.0 / 3));
        CHECK(s[1].point == "3");
    }
    CHECK_THROWS_AS(summarize(""), std::invalid_argument);
    CHECK_THROWS_AS(summarize(head), std::invalid_argument);
    CHECK_THROWS_AS(summarize("a,b\r\n1,2\r\n"), std::invalid_argument);
}

TEST_CASE("sweep cardinality, noise column and determinism")
{
    SystemConfig c = quick();
    c.sweep.push_back({"m", {"1", "2", "3"}});
    const fs::path a = scratch("a"), b = scratch("b");
    ExperimentOptions opt;
    opt.out_dir = a;
    opt.threads = 2;
    const auto out = run_experiment(c, opt);
    REQUIRE(out.size() == 1);
    CHECK(out[0].rows.size() == 3 * 2 * 3);
    for (const auto &r : out[0].rows)
        CHECK(r.noise_dbm == doctest::Approx(-104.0).epsilon(1e-12));
    CHECK(fs::exists(a / "sweep_m.config.txt"));
    CHECK(fs::exists(a / "sweep_m.timing.csv"));
    CHECK(slurp(a / "sweep_m.config.txt").find(code_version()) != std::string::npos);
    const auto csv = parse_csv(slurp(out[0].csv));
    CHECK(csv.size() == 1 + 18);
    CHECK(csv[0] == result_header());

    opt.out_dir = b;
    opt.threads = 1;
    run_experiment(c, opt);
    CHECK(slurp(a / "sweep_m.csv") == slurp(b / "sweep_m.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("dumped solutions re-derive every EE")
{
    SystemConfig c = quick();
    c.schemes = {"hybrid-pga", "wave-sim"};
    c.trials = 2;
    const fs::path d = scratch("dump");
    ExperimentOptions opt;
    opt.out_dir = d;
    opt.dump_solutions = true;
    const auto out = run_experiment(c, opt);
    REQUIRE(out.size() == 1);
    for (size_t i = 0; i < out[0].rows.size(); ++i)
    {
        const double ee = recompute_ee(d / "solutions" / "baseline" / ("row" + std::to_string(i) + ".json"), c);
        CHECK(std::abs(ee - out[0].rows[i].ee) <= 1e-9 * std::max(1.0, out[0].rows[i].ee));
    }
    fs::remove_all(d);
}

TEST_CASE("failing trials keep their row")
{
    SystemConfig c = quick();
    c.trials = 1;
    const ResultRow r = run_trial(c, "no-such-scheme", 0);
    CHECK(r.status == "error");
    CHECK_FALSE(r.detail.empty());
}
