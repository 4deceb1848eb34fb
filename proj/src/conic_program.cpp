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

#include "simee/conic.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace simee::conic
{
    using nlohmann::json;

    Affine Affine::var(int index, double coef)
    {
        Affine a;
        a.terms.emplace_back(index, coef);
        return a;
    }

    Affine &Affine::add(int index, double coef)
    {
        terms.emplace_back(index, coef);
        return *this;
    }

    Affine &Affine::add(const Affine &other, double scale)
    {
        for (const auto &[i, c] : other.terms)
            terms.emplace_back(i, scale * c);
        for (const auto &b : other.blocks)
            blocks.push_back({b.block, scale * b.weight, b.v});
        constant += scale * other.constant;
        return *this;
    }

    Affine &Affine::add_block(int block, double weight, const Eigen::VectorXcd &v)
    {
        blocks.push_back({block, weight, v});
        return *this;
    }

    Affine &Affine::add_constant(double c)
    {
        constant += c;
        return *this;
    }

    int ConvexProgram::add_scalar() { return num_scalars++; }

    int ConvexProgram::add_scalars(int count)
    {
        const int first = num_scalars;
        num_scalars += count;
        return first;
    }

    int ConvexProgram::add_block(int size)
    {
        if (size < 1)
            throw std::invalid_argument("ConvexProgram::add_block: size must be positive");
        block_sizes.push_back(size);
        return static_cast<int>(block_sizes.size()) - 1;
    }

    void ConvexProgram::add_equality(const Affine &expr) { equalities.push_back(expr); }

    void ConvexProgram::add_nonneg(const Affine &expr) { cones.push_back({ConeKind::nonneg, {expr}}); }

    void ConvexProgram::add_soc(const Affine &t, const std::vector<Affine> &y)
    {
        Cone c{ConeKind::soc, {t}};
        c.rows.insert(c.rows.end(), y.begin(), y.end());
        cones.push_back(std::move(c));
    }

    void ConvexProgram::add_rotated_soc(const Affine &a, const Affine &b, const std::vector<Affine> &y)
    {
        // 2ab >= |y|^2, a, b >= 0  <=>  a + b >= |(a - b, sqrt2 y)|
        Affine t = a;
        t.add(b);
        Affine d = a;
        d.add(b, -1.0);
        std::vector<Affine> rows{d};
        for (const auto &yi : y)
        {
            Affine s;
            s.add(yi, std::sqrt(2.0));
            rows.push_back(std::move(s));
        }
        add_soc(t, rows);
    }

    void ConvexProgram::add_sqrt_hypo(const Affine &s, const Affine &u) { cones.push_back({ConeKind::sqrt_hypo, {s, u}}); }

    void ConvexProgram::add_log_hypo(const Affine &r, const Affine &u) { cones.push_back({ConeKind::log_hypo, {r, u}}); }

    void ConvexProgram::add_box(int index, double lo, double hi)
    {
        add_nonneg(Affine::var(index).add_constant(-lo));
        add_nonneg(Affine(hi).add(index, -1.0));
    }

    void ConvexProgram::add_atom(AtomKind kind, double coef, const Affine &arg) { atoms.push_back({kind, coef, arg}); }

    void ConvexProgram::validate() const
    {
        auto check = [&](const Affine &a, const char *where)
        {
            for (const auto &[i, c] : a.terms)
            {
                if (i < 0 || i >= num_scalars)
                    throw std::invalid_argument(std::string("ConvexProgram: undeclared scalar in ") + where);
                if (!std::isfinite(c))
                    throw std::invalid_argument(std::string("ConvexProgram: non-finite coefficient in ") + where);
            }
            for (const auto &b : a.blocks)
            {
                if (b.block < 0 || b.block >= static_cast<int>(block_sizes.size()))
                    throw std::invalid_argument(std::string("ConvexProgram: undeclared block in ") + where);
                if (b.v.size() != block_sizes[static_cast<size_t>(b.block)])
                    throw std::invalid_argument(std::string("ConvexProgram: block vector length mismatch in ") + where);
                if (!std::isfinite(b.weight) || !b.v.allFinite())
                    throw std::invalid_argument(std::string("ConvexProgram: non-finite block term in ") + where);
            }
            if (!std::isfinite(a.constant))
                throw std::invalid_argument(std::string("ConvexProgram: non-finite constant in ") + where);
        };
        check(objective, "objective");
        for (const auto &a : atoms)
        {
            check(a.arg, "atom");
            // concave atoms may only be maximized
            if ((maximize && a.coef < 0.0) || (!maximize && a.coef > 0.0))
                throw std::invalid_argument("ConvexProgram: atom coefficient has the wrong sign for the objective sense");
        }
        for (const auto &e : equalities)
            check(e, "equality");
        for (const auto &c : cones)
        {
            const size_t need = c.kind == ConeKind::nonneg ? 1 : 2;
            if ((c.kind == ConeKind::soc && c.rows.empty()) || (c.kind != ConeKind::soc && c.rows.size() != need))
                throw std::invalid_argument("ConvexProgram: cone has the wrong number of rows");
            for (const auto &r : c.rows)
                check(r, "cone");
        }
    }

    const char *to_string(Status s)
    {
        switch (s)
        {
        case Status::optimal:
            return "optimal";
        case Status::infeasible:
            return "infeasible";
        default:
            return "numerical-limit";
        }
    }

    double evaluate_affine(const Affine &expr, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &blocks)
    {
        double v = expr.constant;
        for (const auto &[i, c] : expr.terms)
            v += c * x[i];
        for (const auto &b : expr.blocks)
            v += b.weight * (b.v.dot(blocks[static_cast<size_t>(b.block)] * b.v)).real();
        return v;
    }

    double evaluate_objective(const ConvexProgram &program, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &blocks)
    {
        double v = evaluate_affine(program.objective, x, blocks);
        for (const auto &a : program.atoms)
        {
            const double z = evaluate_affine(a.arg, x, blocks);
            v += a.coef * (a.kind == AtomKind::sqrt ? std::sqrt(std::max(z, 0.0)) : std::log(z));
        }
        return v;
    }

    // ---- serialization ----

    namespace
    {
        json affine_json(const Affine &a)
        {
            json terms = json::array();
            for (const auto &[i, c] : a.terms)
                terms.push_back({i, c});
            json blocks = json::array();
            for (const auto &b : a.blocks)
            {
                json v = json::array();
                for (Eigen::Index i = 0; i < b.v.size(); ++i)
                    v.push_back({b.v[i].real(), b.v[i].imag()});
                blocks.push_back({{"block", b.block}, {"weight", b.weight}, {"v", v}});
            }
            return {{"terms", terms}, {"blocks", blocks}, {"constant", a.constant}};
        }

        Affine affine_from(const json &j)
        {
            Affine a;
            for (const auto &t : j.at("terms"))
                a.terms.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
            for (const auto &b : j.at("blocks"))
            {
                const auto &v = b.at("v");
                Eigen::VectorXcd vec(static_cast<Eigen::Index>(v.size()));
                for (size_t i = 0; i < v.size(); ++i)
                    vec[static_cast<Eigen::Index>(i)] = {v[i].at(0).get<double>(), v[i].at(1).get<double>()};
                a.blocks.push_back({b.at("block").get<int>(), b.at("weight").get<double>(), vec});
            }
            a.constant = j.at("constant").get<double>();
            return a;
        }

        const char *cone_name(ConeKind k)
        {
            switch (k)
            {
            case ConeKind::nonneg:
                return "nonneg";
            case ConeKind::soc:
                return "soc";
            case ConeKind::sqrt_hypo:
                return "sqrt_hypo";
            default:
                return "log_hypo";
            }
        }

        ConeKind cone_kind(const std::string &s)
        {
            if (s == "nonneg")
                return ConeKind::nonneg;
            if (s == "soc")
                return ConeKind::soc;
            if (s == "sqrt_hypo")
                return ConeKind::sqrt_hypo;
            if (s == "log_hypo")
                return ConeKind::log_hypo;
            throw std::invalid_argument("unknown cone kind: " + s);
        }
    }

    std::string to_json(const ConvexProgram &p)
    {
        json j;
        j["num_scalars"] = p.num_scalars;
        j["block_sizes"] = p.block_sizes;
        j["maximize"] = p.maximize;
        j["objective"] = affine_json(p.objective);
        j["atoms"] = json::array();
        for (const auto &a : p.atoms)
            j["atoms"].push_back({{"kind", a.kind == AtomKind::sqrt ? "sqrt" : "log"}, {"coef", a.coef}, {"arg", affine_json(a.arg)}});
        j["equalities"] = json::array();
        for (const auto &e : p.equalities)
            j["equalities"].push_back(affine_json(e));
        j["cones"] = json::array();
        for (const auto &c : p.cones)
        {
            json rows = json::array();
            for (const auto &r : c.rows)
                rows.push_back(affine_json(r));
            j["cones"].push_back({{"kind", cone_name(c.kind)}, {"rows", rows}});
        }
        return j.dump();
    }

    ConvexProgram from_json(const std::string &text)
    {
        const json j = json::parse(text);
        ConvexProgram p;
        p.num_scalars = j.at("num_scalars").get<int>();
        p.block_sizes = j.at("block_sizes").get<std::vector<int>>();
        p.maximize = j.at("maximize").get<bool>();
        p.objective = affine_from(j.at("objective"));
        for (const auto &a : j.at("atoms"))
        {
            const std::string kind = a.at("kind").get<std::string>();
            if (kind != "sqrt" && kind != "log")
                throw std::invalid_argument("unknown atom kind: " + kind);
            p.atoms.push_back({kind == "sqrt" ? AtomKind::sqrt : AtomKind::log, a.at("coef").get<double>(), affine_from(a.at("arg"))});
        }
        for (const auto &e : j.at("equalities"))
            p.equalities.push_back(affine_from(e));
        for (const auto &c : j.at("cones"))
        {
            Cone cone{cone_kind(c.at("kind").get<std::string>()), {}};
            for (const auto &r : c.at("rows"))
                cone.rows.push_back(affine_from(r));
            p.cones.push_back(std::move(cone));
        }
        p.validate();
        return p;
    }
}
