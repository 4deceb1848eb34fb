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

#ifndef SIMEE_CONIC_HPP
#define SIMEE_CONIC_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace simee::conic
{
    // weight * v^H X v for a Hermitian block X
    struct BlockTerm
    {
        int block = 0;
        double weight = 1.0;
        Eigen::VectorXcd v;
    };

    // Real affine expression over scalar variables and Hermitian PSD blocks.
    struct Affine
    {
        std::vector<std::pair<int, double>> terms;
        std::vector<BlockTerm> blocks;
        double constant = 0.0;

        Affine() = default;
        Affine(double c) : constant(c) {}

        static Affine var(int index, double coef = 1.0);

        Affine &add(int index, double coef);
        Affine &add(const Affine &other, double scale = 1.0);
        Affine &add_block(int block, double weight, const Eigen::VectorXcd &v);
        Affine &add_constant(double c);
        bool has_blocks() const { return !blocks.empty(); }
    };

    enum class ConeKind
    {
        nonneg,    // z0 >= 0
        soc,       // z0 >= ||(z1, ..., zn)||
        sqrt_hypo, // z0 <= sqrt(z1)
        log_hypo   // z0 <= ln(z1)
    };

    struct Cone
    {
        ConeKind kind = ConeKind::nonneg;
        std::vector<Affine> rows;
    };

    enum class AtomKind
    {
        sqrt, // coef * sqrt(arg)
        log   // coef * ln(arg)
    };

    struct Atom
    {
        AtomKind kind = AtomKind::sqrt;
        double coef = 1.0;
        Affine arg;
    };

    struct ConvexProgram
    {
        int num_scalars = 0;
        std::vector<int> block_sizes;
        bool maximize = true;
        Affine objective; // linear part
        std::vector<Atom> atoms;
        std::vector<Affine> equalities; // expr == 0
        std::vector<Cone> cones;

        int add_scalar();
        int add_scalars(int count); // returns the first index
        int add_block(int size);

        void add_equality(const Affine &expr);
        void add_nonneg(const Affine &expr);
        void add_soc(const Affine &t, const std::vector<Affine> &y);
        void add_rotated_soc(const Affine &a, const Affine &b, const std::vector<Affine> &y); // 2ab >= ||y||^2
        void add_sqrt_hypo(const Affine &s, const Affine &u);                                // s <= sqrt(u)
        void add_log_hypo(const Affine &r, const Affine &u);                                 // r <= ln(u)
        void add_box(int index, double lo, double hi);
        void add_atom(AtomKind kind, double coef, const Affine &arg);

        // Throws std::invalid_argument when something references an undeclared variable,
        // a block vector has the wrong length, or an atom has the wrong curvature.
        void validate() const;
    };

    enum class Status
    {
        optimal,
        infeasible,
        numerical_limit
    };

    const char *to_string(Status s);

    struct Solution
    {
        Status status = Status::numerical_limit;
        Eigen::VectorXd x;
        std::vector<Eigen::MatrixXcd> blocks;
        double objective = 0.0;
        int iterations = 0;            // Newton steps, both phases
        double primal_residual = 0.0;  // scaled infinity norm of the equality residual
        double gap = 0.0;              // barrier duality-gap bound
    };

    struct SolverOptions
    {
        double tolerance = 1e-9;      // relative gap
        double feasibility = 1e-9;    // scaled equality residual
        double mu = 12.0;
        int max_newton = 600;
        double phase1_box = 1e4;      // |x_i| bound while searching for an interior point
    };

    Solution solve(const ConvexProgram &program, const SolverOptions &options = {});

    // Objective value of a candidate point (atoms included).
    double evaluate_objective(const ConvexProgram &program, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &blocks);
    double evaluate_affine(const Affine &expr, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &blocks);

    std::string to_json(const ConvexProgram &program);
    ConvexProgram from_json(const std::string &text);
}

#endif
