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

#include "simee/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "simee/metrics.hpp"
#include "simee/rng.hpp"

#ifndef SIMEE_VERSION
#define SIMEE_VERSION "unknown"
#endif

namespace simee
{
    namespace fs = std::filesystem;

    const char *code_version() { return SIMEE_VERSION; }

    std::uint64_t trial_channel_seed(std::uint64_t master, int trial)
    {
        return derive_seed(master, static_cast<std::uint64_t>(trial), 0);
    }

    std::uint64_t trial_solver_seed(std::uint64_t master, int trial)
    {
        return derive_seed(master, static_cast<std::uint64_t>(trial), 1);
    }

    ResultRow run_trial(const SystemConfig &config, const std::string &scheme, int trial, SolveReport *report)
    {
        ResultRow row;
        row.scheme = scheme;
        row.trial = trial;
        row.seed = trial_channel_seed(config.seed, trial);
        row.noise_dbm = watt_to_dbm(config.noise_power_w());
        try
        {
            const ChannelRealization channel = build_channel(config, row.seed);
            SolveReport rep = solve(parse_scheme(scheme), channel, config, trial_solver_seed(config.seed, trial));
            row.status = to_string(rep.status);
            row.ee = rep.ee;
            row.sum_rate = rep.rates.sum_rate;
            row.user_rates.assign(rep.rates.rate.data(), rep.rates.rate.data() + rep.rates.rate.size());
            row.active_antennas = rep.power.active_count();
            row.ao_iterations = rep.outer_iterations;
            row.sca_iterations = rep.sca_iterations;
            row.sim_iterations = rep.sim_iterations;
            row.rejected_updates = rep.rejected_updates;
            row.total_power_w = rep.power.total_w;
            row.seconds = rep.seconds;
            row.detail = rep.detail;
            if (report)
                *report = std::move(rep);
        }
        catch (const std::exception &e)
        {
            row.status = "error";
            row.detail = e.what();
        }
        return row;
    }

    std::vector<SweepPoint> expand_sweep(const SystemConfig &config, const SweepAxis *axis)
    {
        std::vector<SweepPoint> points;
        if (axis == nullptr)
        {
            points.push_back({"none", "", config});
            points.back().config.sweep.clear();
            return points;
        }
        for (const auto &v : axis->values)
        {
            SweepPoint p{axis->key, v, config};
            p.config.sweep.clear();
            apply_setting(p.config, axis->key, v);
            p.config.validate();
            points.push_back(std::move(p));
        }
        return points;
    }

    std::vector<ResultRow> run_points(const std::vector<SweepPoint> &points, int threads, std::vector<SolveReport> *reports)
    {
        struct Task
        {
            size_t point;
            std::string scheme;
            int trial;
        };
        std::vector<Task> tasks;
        for (size_t i = 0; i < points.size(); ++i)
            for (const auto &s : points[i].config.schemes)
                for (int t = 0; t < points[i].config.trials; ++t)
                    tasks.push_back({i, s, t});

        std::vector<ResultRow> rows(tasks.size());
        if (reports)
            reports->assign(tasks.size(), SolveReport{});

        // rows land in their task slot, so the worker count never changes the output
        std::atomic<size_t> next{0};
        auto worker = [&]
        {
            for (size_t i = next++; i < tasks.size(); i = next++)
            {
                const Task &t = tasks[i];
                rows[i] = run_trial(points[t.point].config, t.scheme, t.trial, reports ? &(*reports)[i] : nullptr);
                rows[i].sweep = points[t.point].sweep;
                rows[i].point = points[t.point].point;
            }
        };
        if (threads <= 0)
            threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        threads = std::min<int>(threads, static_cast<int>(std::max<size_t>(1, tasks.size())));
        std::vector<std::thread> pool;
        for (int i = 1; i < threads; ++i)
            pool.emplace_back(worker);
        worker();
        for (auto &th : pool)
            th.join();
        return rows;
    }

    std::string format_double(double x)
    {
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, r.ptr);
    }

    std::string csv_escape(const std::string &field)
    {
        if (field.find_first_of(",\"\r\n") == std::string::npos)
            return field;
        std::string out = "\"";
        for (char c : field)
        {
            if (c == '"')
                out += '"';
            out += c;
        }
        return out + "\"";
    }

    std::vector<std::vector<std::string>> parse_csv(const std::string &text)
    {
        std::vector<std::vector<std::string>> records;
        std::vector<std::string> record;
        std::string field;
        bool quoted = false, any = false;
        for (size_t i = 0; i < text.size(); ++i)
        {
            const char c = text[i];
            if (quoted)
            {
                if (c != '"')
                    field += c;
                else if (i + 1 < text.size() && text[i + 1] == '"')
                    field += '"', ++i;
                else
                    quoted = false;
                continue;
            }
            if (c == '"')
                quoted = any = true;
            else if (c == ',')
                record.push_back(std::move(field)), field.clear(), any = true;
            else if (c == '\n' || c == '\r')
            {
                if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                    ++i;
                if (any || !field.empty())
                    record.push_back(std::move(field));
                if (!record.empty())
                    records.push_back(std::move(record));
                record.clear(), field.clear(), any = false;
            }
            else
                field += c, any = true;
        }
        if (quoted)
            throw std::invalid_argument("csv: unterminated quoted field");
        if (any || !field.empty())
            record.push_back(std::move(field));
        if (!record.empty())
            records.push_back(std::move(record));
        return records;
    }

    std::vector<std::string> result_header()
    {
        return {"sweep", "point", "scheme", "trial", "seed", "status", "ee_bit_per_joule", "sum_rate_bps_hz",
                "user_rates", "active_antennas", "ao_iterations", "sca_iterations", "sim_iterations",
                "rejected_updates", "total_power_w", "noise_dbm", "detail"};
    }

    namespace
    {
        std::string join_line(const std::vector<std::string> &fields)
        {
            std::string line;
            for (size_t i = 0; i < fields.size(); ++i)
                line += (i ? "," : "") + csv_escape(fields[i]);
            return line + "\r\n";
        }

        std::string join_rates(const std::vector<double> &r)
        {
            std::string s;
            for (size_t i = 0; i < r.size(); ++i)
                s += (i ? ";" : "") + format_double(r[i]);
            return s;
        }

        std::string read_file(const fs::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw std::runtime_error("cannot read " + path.string());
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        void write_file(const fs::path &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary);
            out << text;
            if (!out)
                throw std::runtime_error("cannot write " + path.string());
        }

        nlohmann::json matrix_json(const Eigen::MatrixXcd &m)
        {
            auto j = nlohmann::json::array();
            for (Eigen::Index r = 0; r < m.rows(); ++r)
            {
                auto row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < m.cols(); ++c)
                    row.push_back({m(r, c).real(), m(r, c).imag()});
                j.push_back(row);
            }
            return j;
        }
    }

    std::string format_rows(const std::vector<ResultRow> &rows)
    {
        std::string out = join_line(result_header());
        for (const auto &r : rows)
            out += join_line({r.sweep, r.point, r.scheme, std::to_string(r.trial), std::to_string(r.seed), r.status,
                              format_double(r.ee), format_double(r.sum_rate), join_rates(r.user_rates),
                              std::to_string(r.active_antennas), std::to_string(r.ao_iterations),
                              std::to_string(r.sca_iterations), std::to_string(r.sim_iterations),
                              std::to_string(r.rejected_updates), format_double(r.total_power_w),
                              format_double(r.noise_dbm), r.detail});
        return out;
    }

    std::vector<SweepOutput> run_experiment(const SystemConfig &config, const ExperimentOptions &options)
    {
        config.validate();
        fs::create_directories(options.out_dir);
        std::vector<const SweepAxis *> axes;
        for (const auto &a : config.sweep)
            axes.push_back(&a);
        if (axes.empty())
            axes.push_back(nullptr);

        std::vector<SweepOutput> outputs;
        for (const SweepAxis *axis : axes)
        {
            SweepOutput out;
            out.name = axis ? "sweep_" + axis->key : "baseline";
            const auto points = expand_sweep(config, axis);
            std::vector<SolveReport> reports;
            out.rows = run_points(points, options.threads, options.dump_solutions ? &reports : nullptr);

            out.csv = options.out_dir / (out.name + ".csv");
            write_file(out.csv, format_rows(out.rows));

            std::string sidecar = "# simee " + std::string(code_version()) + "\n";
            if (axis)
                sidecar += "# this file: sweep over '" + axis->key + "'\n";
            write_file(options.out_dir / (out.name + ".config.txt"), sidecar + format_config(config));

            std::string timing = "row,scheme,trial,seconds\r\n";
            for (size_t i = 0; i < out.rows.size(); ++i)
                timing += std::to_string(i) + "," + out.rows[i].scheme + "," + std::to_string(out.rows[i].trial) + "," +
                          format_double(out.rows[i].seconds) + "\r\n";
            write_file(options.out_dir / (out.name + ".timing.csv"), timing);

            if (options.dump_solutions)
            {
                const fs::path dir = options.out_dir / "solutions" / out.name;
                fs::create_directories(dir);
                for (size_t i = 0; i < out.rows.size(); ++i)
                {
                    const ResultRow &r = out.rows[i];
                    nlohmann::json j;
                    j["sweep"] = r.sweep;
                    j["point"] = r.point;
                    j["scheme"] = r.scheme;
                    j["trial"] = r.trial;
                    j["seed"] = r.seed;
                    j["status"] = r.status;
                    j["ee"] = r.ee;
                    j["precoder"] = matrix_json(reports[i].precoder);
                    auto ph = nlohmann::json::array();
                    for (Eigen::Index m = 0; m < reports[i].phases.rows(); ++m)
                    {
                        std::vector<double> layer(reports[i].phases.cols());
                        for (Eigen::Index n = 0; n < reports[i].phases.cols(); ++n)
                            layer[n] = reports[i].phases(m, n);
                        ph.push_back(layer);
                    }
                    j["phases"] = ph;
                    write_file(dir / ("row" + std::to_string(i) + ".json"), j.dump(1) + "\n");
                }
            }
            outputs.push_back(std::move(out));
        }
        return outputs;
    }

    double recompute_ee(const fs::path &solution_json, const SystemConfig &config)
    {
        const auto j = nlohmann::json::parse(read_file(solution_json));
        const std::string status = j.at("status");
        if (status == "infeasible" || status == "error")
            return 0.0;
        SystemConfig c = config;
        c.sweep.clear();
        if (j.at("sweep") != "none")
            apply_setting(c, j.at("sweep"), j.at("point"));
        const ChannelRealization channel = build_channel(c, j.at("seed").get<std::uint64_t>());

        const auto &pj = j.at("precoder");
        Eigen::MatrixXcd p(pj.size(), pj.empty() ? 0 : pj[0].size());
        for (Eigen::Index r = 0; r < p.rows(); ++r)
            for (Eigen::Index k = 0; k < p.cols(); ++k)
                p(r, k) = {pj[r][k][0].get<double>(), pj[r][k][1].get<double>()};
        const auto &phj = j.at("phases");
        Eigen::MatrixXd phases(phj.size(), phj.empty() ? 0 : phj[0].size());
        for (Eigen::Index m = 0; m < phases.rows(); ++m)
            for (Eigen::Index n = 0; n < phases.cols(); ++n)
                phases(m, n) = phj[m][n].get<double>();
        return evaluate(channel, PhaseState(phases, channel.w), p, c).ee;
    }

    double nearest_rank(std::vector<double> values, double p)
    {
        if (values.empty())
            throw std::invalid_argument("percentile of an empty set");
        if (!(p > 0.0 && p <= 100.0))
            throw std::invalid_argument("percentile must lie in (0, 100]");
        std::sort(values.begin(), values.end());
        const auto rank = static_cast<size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size()) - 1e-12));
        return values[std::max<size_t>(rank, 1) - 1];
    }

    double median(std::vector<double> values)
    {
        if (values.empty())
            throw std::invalid_argument("median of an empty set");
        std::sort(values.begin(), values.end());
        const size_t n = values.size();
        return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }

    std::vector<SummaryRow> summarize(const std::string &csv_text)
    {
        const auto records = parse_csv(csv_text);
        if (records.size() < 2)
            throw std::invalid_argument("summarize: no data rows");
        const auto &head = records.front();
        auto column = [&](const std::string &name)
        {
            const auto it = std::find(head.begin(), head.end(), name);
            if (it == head.end())
                throw std::invalid_argument("summarize: missing column '" + name + "'");
            return static_cast<size_t>(it - head.begin());
        };
        const size_t c_sweep = column("sweep"), c_point = column("point"), c_scheme = column("scheme"),
                     c_status = column("status"), c_ee = column("ee_bit_per_joule"), c_rate = column("sum_rate_bps_hz");

        struct Group
        {
            SummaryRow row;
            std::vector<double> ee, rate;
            int feasible = 0;
        };
        std::vector<Group> groups;
        std::map<std::string, size_t> index;
        for (size_t i = 1; i < records.size(); ++i)
        {
            const auto &r = records[i];
            if (r.size() != head.size())
                throw std::invalid_argument("summarize: row " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                                            " fields, expected " + std::to_string(head.size()));
            const std::string key = r[c_sweep] + '\x1f' + r[c_point] + '\x1f' + r[c_scheme];
            auto [it, fresh] = index.try_emplace(key, groups.size());
            if (fresh)
                groups.push_back({{r[c_sweep], r[c_point], r[c_scheme]}, {}, {}, 0});
            Group &g = groups[it->second];
            const bool ok = r[c_status] != "infeasible" && r[c_status] != "error";
            try
            {
                g.ee.push_back(ok ? std::stod(r[c_ee]) : 0.0);
                g.rate.push_back(ok ? std::stod(r[c_rate]) : 0.0);
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("summarize: non-numeric value in row " + std::to_string(i + 1));
            }
            g.feasible += ok;
        }

        std::vector<SummaryRow> out;
        for (auto &g : groups)
        {
            SummaryRow s = g.row;
            s.count = static_cast<int>(g.ee.size());
            s.feasible_fraction = static_cast<double>(g.feasible) / s.count;
            s.ee_median = median(g.ee);
            s.ee_mean = std::accumulate(g.ee.begin(), g.ee.end(), 0.0) / s.count;
            s.ee_p10 = nearest_rank(g.ee, 10);
            s.ee_p90 = nearest_rank(g.ee, 90);
            s.rate_median = median(g.rate);
            s.rate_mean = std::accumulate(g.rate.begin(), g.rate.end(), 0.0) / s.count;
            s.rate_p10 = nearest_rank(g.rate, 10);
            s.rate_p90 = nearest_rank(g.rate, 90);
            out.push_back(s);
        }
        return out;
    }

    std::string format_summary(const std::vector<SummaryRow> &rows)
    {
        std::string out = join_line({"sweep", "point", "scheme", "trials", "feasible_fraction", "ee_median", "ee_mean",
                                     "ee_p10", "ee_p90", "sum_rate_median", "sum_rate_mean", "sum_rate_p10", "sum_rate_p90"});
        for (const auto &s : rows)
            out += join_line({s.sweep, s.point, s.scheme, std::to_string(s.count), format_double(s.feasible_fraction),
                              format_double(s.ee_median), format_double(s.ee_mean), format_double(s.ee_p10),
                              format_double(s.ee_p90), format_double(s.rate_median), format_double(s.rate_mean),
                              format_double(s.rate_p10), format_double(s.rate_p90)});
        return out;
    }
}
