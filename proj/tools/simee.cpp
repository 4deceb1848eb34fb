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

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "simee/config.hpp"
#include "simee/experiment.hpp"
#include "simee/gradcheck.hpp"

namespace
{
    std::vector<std::string> split_list(const std::string &s)
    {
        std::vector<std::string> out;
        std::stringstream ss(s);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty())
                out.push_back(item);
        return out;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"simee: energy-efficient hybrid precoding for stacked intelligent metasurfaces"};
    app.set_version_flag("--version", simee::code_version());
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "run a Monte-Carlo experiment");
    std::string config_path, out_dir = "results", schemes;
    int trials = 0, threads = 0;
    std::uint64_t seed = 0;
    bool have_seed = false, dump = false;
    run->add_option("--config", config_path, "key=value configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--schemes", schemes, "comma list: hybrid-sdp,hybrid-pga,digital-pre,wave-sim");
    run->add_option("--trials", trials, "trials per sweep point")->check(CLI::PositiveNumber);
    auto *seed_opt = run->add_option("--seed", seed, "master seed");
    run->add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    run->add_flag("--dump-solutions", dump, "write precoder and phases of every row");

    auto *summ = app.add_subcommand("summarize", "aggregate a result CSV");
    std::string csv_path, summary_out;
    summ->add_option("csv", csv_path, "result CSV")->required()->check(CLI::ExistingFile);
    summ->add_option("-o,--output", summary_out, "write here instead of stdout");

    auto *grad = app.add_subcommand("gradcheck", "compare the phase gradient with central differences");
    simee::GradcheckOptions gopt;
    double gtol = 1e-5;
    bool verbose = false;
    grad->add_option("--instances", gopt.instances)->capture_default_str();
    grad->add_option("--seed", gopt.seed)->capture_default_str();
    grad->add_option("--tolerance", gtol, "exit status 1 above this relative error")->capture_default_str();
    grad->add_flag("-v,--verbose", verbose, "one line per instance");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            have_seed = seed_opt->count() > 0;
            simee::SystemConfig config = simee::load_config(config_path);
            if (!schemes.empty())
                config.schemes = split_list(schemes);
            if (trials > 0)
                config.trials = trials;
            if (have_seed)
                config.seed = seed;
            config.validate();
            simee::ExperimentOptions opt;
            opt.out_dir = out_dir;
            opt.dump_solutions = dump;
            opt.threads = threads;
            for (const auto &o : simee::run_experiment(config, opt))
            {
                int failed = 0;
                for (const auto &r : o.rows)
                    failed += r.status == "infeasible" || r.status == "error";
                std::cout << o.csv.string() << ": " << o.rows.size() << " rows, " << failed << " infeasible or failed\n";
            }
        }
        else if (*summ)
        {
            std::ifstream in(csv_path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            const std::string text = simee::format_summary(simee::summarize(ss.str()));
            if (summary_out.empty())
                std::cout << text;
            else
            {
                std::ofstream out(summary_out, std::ios::binary);
                out << text;
            }
        }
        else if (*grad)
        {
            const auto rep = simee::run_gradcheck(gopt);
            if (verbose)
                for (const auto &c : rep.cases)
                    std::printf("K=%d L=%d M=%d N=%d rel=%.3e scale=%.3e\n", c.users, c.antennas, c.layers, c.atoms,
                                c.relative_error, c.gradient_scale);
            std::printf("instances %zu  max relative error %.3e  (%.2f s)\n", rep.cases.size(), rep.max_relative_error,
                        rep.seconds);
            return rep.max_relative_error <= gtol ? 0 : 1;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "simee: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
