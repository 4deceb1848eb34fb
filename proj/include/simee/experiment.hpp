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

#ifndef SIMEE_EXPERIMENT_HPP
#define SIMEE_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simee/ao.hpp"
#include "simee/config.hpp"

namespace simee
{
    const char *code_version();

    struct ResultRow
    {
        std::string sweep = "none"; // swept key, "none" without a sweep
        std::string point;          // raw value of the swept key
        std::string scheme;
        int trial = 0;
        std::uint64_t seed = 0; // channel seed of the trial
        std::string status;     // solver status, or "error" when the trial threw
        double ee = 0.0;        // bit/J
        double sum_rate = 0.0;  // bit/s/Hz
        std::vector<double> user_rates;
        int active_antennas = 0;
        int ao_iterations = 0;
        int sca_iterations = 0;
        int sim_iterations = 0;
        int rejected_updates = 0;
        double noise_dbm = 0.0;
        double total_power_w = 0.0;
        double seconds = 0.0; // wall clock; kept out of the main CSV
        std::string detail;
    };

    // Seeds of trial `trial`: the channel draw is shared by all schemes and sweep points.
    std::uint64_t trial_channel_seed(std::uint64_t master, int trial);
    std::uint64_t trial_solver_seed(std::uint64_t master, int trial);

    struct ExperimentOptions
    {
        std::filesystem::path out_dir = "results";
        bool dump_solutions = false;
        int threads = 0; // 0 = hardware concurrency
    };

    struct SweepOutput
    {
        std::string name;
        std::filesystem::path csv;
        std::vector<ResultRow> rows;
    };

    // Runs one trial and converts the report; never throws.
    ResultRow run_trial(const SystemConfig &config, const std::string &scheme, int trial, SolveReport *report = nullptr);

    // All sweep points x schemes x trials of one configuration, rows in deterministic order.
    // `points` pairs each configuration with its (sweep, point) labels.
    struct SweepPoint
    {
        std::string sweep;
        std::string point;
        SystemConfig config;
    };
    std::vector<SweepPoint> expand_sweep(const SystemConfig &config, const SweepAxis *axis);

    std::vector<ResultRow> run_points(const std::vector<SweepPoint> &points, int threads,
                                      std::vector<SolveReport> *reports = nullptr);

    // One CSV per sweep axis (or a single "baseline" CSV), plus
    //   <name>.config.txt   resolved configuration and code version
    //   <name>.timing.csv   wall-clock seconds per row
    //   solutions/<name>/...json   precoder and phases per row with --dump-solutions
    std::vector<SweepOutput> run_experiment(const SystemConfig &config, const ExperimentOptions &options);

    // CSV
    std::string csv_escape(const std::string &field);
    std::vector<std::vector<std::string>> parse_csv(const std::string &text);
    std::vector<std::string> result_header();
    std::string format_rows(const std::vector<ResultRow> &rows);
    std::string format_double(double x); // shortest round-trip form

    struct SummaryRow
    {
        std::string sweep, point, scheme;
        int count = 0;
        double feasible_fraction = 0.0;
        double ee_median = 0.0, ee_mean = 0.0, ee_p10 = 0.0, ee_p90 = 0.0;
        double rate_median = 0.0, rate_mean = 0.0, rate_p10 = 0.0, rate_p90 = 0.0;
    };

    // Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (1-based), p in (0, 100].
    double nearest_rank(std::vector<double> values, double p);
    double median(std::vector<double> values); // midpoint average for even sizes

    // Groups by (sweep, point, scheme) in order of first appearance. Infeasible rows enter
    // with EE = 0. Throws std::invalid_argument on empty or malformed input.
    std::vector<SummaryRow> summarize(const std::string &csv_text);
    std::string format_summary(const std::vector<SummaryRow> &rows);

    // Re-evaluates EE of a dumped solution against a fresh channel draw.
    double recompute_ee(const std::filesystem::path &solution_json, const SystemConfig &config);
}

#endif
