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

// Primal log-barrier interior-point method for ConvexProgram.
//
// Standard form: minimize c'x subject to A x + sum_b <C_ib, X_b> = b, cone_j(F_j x + g_j), X_b >= 0.
// Block coefficients are kept as weighted rank-one terms, so the Schur complement of the
// log-det Hessian needs only the small matrix V^H X V.

#include "simee/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace simee::conic
{
    namespace
    {
        struct StdCone
        {
            ConeKind kind;
            std::vector<int> cols; // scalar columns touched
            Eigen::MatrixXd f;     // rows x cols.size()
            Eigen::VectorXd g;
        };

        struct StdBlock
        {
            int size = 0;
            Eigen::MatrixXcd v;     // size x R
            std::vector<int> eq;    // equality row of each column
            std::vector<double> w;  // weight of each column
        };

        struct Standard
        {
            int n = 0;
            Eigen::VectorXd c;
            Eigen::MatrixXd a;
            Eigen::VectorXd b;
            std::vector<StdCone> cones;
            std::vector<StdBlock> blocks;

            double nu() const
            {
                double s = 0.0;
                for (const auto &k : cones)
                    s += k.kind == ConeKind::nonneg ? 1.0 : 2.0;
                for (const auto &bl : blocks)
                    s += bl.size;
                return s;
            }
        };

        // ---- scalar cone barriers ----

        using ConstVec = Eigen::Ref<const Eigen::VectorXd>;

        bool cone_interior(ConeKind k, const ConstVec &z)
        {
            switch (k)
            {
            case ConeKind::nonneg:
                return z[0] > 0.0;
            case ConeKind::soc:
                return z[0] > 0.0 && z[0] - z.tail(z.size() - 1).norm() > 0.0;
            case ConeKind::sqrt_hypo:
                return z[1] > 0.0 && std::sqrt(z[1]) - z[0] > 0.0;
            default:
                return z[1] > 0.0 && std::log(z[1]) - z[0] > 0.0;
            }
        }

        double cone_value(ConeKind k, const ConstVec &z)
        {
            switch (k)
            {
            case ConeKind::nonneg:
                return -std::log(z[0]);
            case ConeKind::soc:
            {
                const double ny = z.tail(z.size() - 1).norm();
                return -std::log(z[0] - ny) - std::log(z[0] + ny);
            }
            case ConeKind::sqrt_hypo:
                return -std::log(std::sqrt(z[1]) - z[0]) - std::log(z[1]);
            default:
                return -std::log(std::log(z[1]) - z[0]) - std::log(z[1]);
            }
        }

        void cone_derivatives(ConeKind k, const ConstVec &z, Eigen::VectorXd &g, Eigen::MatrixXd &h)
        {
            const Eigen::Index r = z.size();
            g.setZero(r);
            h.setZero(r, r);
            switch (k)
            {
            case ConeKind::nonneg:
                g[0] = -1.0 / z[0];
                h(0, 0) = 1.0 / (z[0] * z[0]);
                break;
            case ConeKind::soc:
            {
                const double ny = z.tail(r - 1).norm();
                const double d = (z[0] - ny) * (z[0] + ny);
                Eigen::VectorXd jz = -z;
                jz[0] = z[0];
                g = -2.0 / d * jz;
                h = 4.0 / (d * d) * jz * jz.transpose();
                h(0, 0) -= 2.0 / d;
                for (Eigen::Index i = 1; i < r; ++i)
                    h(i, i) += 2.0 / d;
                break;
            }
            case ConeKind::sqrt_hypo:
            {
                const double u = z[1], s = z[0], ru = std::sqrt(u);
                const double e = ru - s;
                const double eu = 0.5 / ru;
                g[0] = 1.0 / e;
                g[1] = -eu / e - 1.0 / u;
                h(0, 0) = 1.0 / (e * e);
                h(0, 1) = h(1, 0) = -eu / (e * e);
                h(1, 1) = 1.0 / (4.0 * u * ru * e) + eu * eu / (e * e) + 1.0 / (u * u);
                break;
            }
            default:
            {
                const double u = z[1], rr = z[0];
                const double e = std::log(u) - rr;
                g[0] = 1.0 / e;
                g[1] = -1.0 / (u * e) - 1.0 / u;
                h(0, 0) = 1.0 / (e * e);
                h(0, 1) = h(1, 0) = -1.0 / (u * e * e);
                h(1, 1) = 1.0 / (u * u * e) + 1.0 / (u * u * e * e) + 1.0 / (u * u);
                break;
            }
            }
        }

        // ---- lowering ----

        struct Lowered
        {
            Standard std;
            int original_scalars = 0;
        };

        Lowered lower(const ConvexProgram &p)
        {
            p.validate();
            int n = p.num_scalars;
            std::vector<Affine> eqs = p.equalities;
            std::vector<std::pair<ConeKind, std::vector<Affine>>> cones;
            std::map<int, double> cost;
            const double sense = p.maximize ? -1.0 : 1.0;

            auto scalarize = [&](const Affine &a) -> Affine
            {
                if (!a.has_blocks())
                    return a;
                const int s = n++;
                Affine e = a;
                e.add(s, -1.0);
                eqs.push_back(e);
                return Affine::var(s);
            };

            for (const auto &c : p.cones)
            {
                std::vector<Affine> rows;
                for (const auto &r : c.rows)
                    rows.push_back(scalarize(r));
                cones.emplace_back(c.kind, std::move(rows));
            }
            const Affine obj = scalarize(p.objective);
            for (const auto &[i, v] : obj.terms)
                cost[i] += sense * v;
            for (const auto &at : p.atoms)
            {
                const int s = n++;
                cones.emplace_back(at.kind == AtomKind::sqrt ? ConeKind::sqrt_hypo : ConeKind::log_hypo,
                                   std::vector<Affine>{Affine::var(s), scalarize(at.arg)});
                cost[s] += sense * at.coef;
            }

            Lowered out;
            out.original_scalars = p.num_scalars;
            Standard &s = out.std;
            s.n = n;
            s.c = Eigen::VectorXd::Zero(n);
            for (const auto &[i, v] : cost)
                s.c[i] += v;

            const int m = static_cast<int>(eqs.size());
            s.a = Eigen::MatrixXd::Zero(m, n);
            s.b.resize(m);
            s.blocks.resize(p.block_sizes.size());
            std::vector<std::vector<Eigen::VectorXcd>> cols(p.block_sizes.size());
            for (size_t bi = 0; bi < p.block_sizes.size(); ++bi)
                s.blocks[bi].size = p.block_sizes[bi];
            for (int i = 0; i < m; ++i)
            {
                for (const auto &[j, v] : eqs[static_cast<size_t>(i)].terms)
                    s.a(i, j) += v;
                s.b[i] = -eqs[static_cast<size_t>(i)].constant;
                for (const auto &bt : eqs[static_cast<size_t>(i)].blocks)
                {
                    auto &bl = s.blocks[static_cast<size_t>(bt.block)];
                    cols[static_cast<size_t>(bt.block)].push_back(bt.v);
                    bl.eq.push_back(i);
                    bl.w.push_back(bt.weight);
                }
            }
            for (size_t bi = 0; bi < s.blocks.size(); ++bi)
            {
                auto &bl = s.blocks[bi];
                bl.v.resize(bl.size, static_cast<Eigen::Index>(cols[bi].size()));
                for (size_t r = 0; r < cols[bi].size(); ++r)
                    bl.v.col(static_cast<Eigen::Index>(r)) = cols[bi][r];
            }

            for (auto &[kind, rows] : cones)
            {
                StdCone k;
                k.kind = kind;
                std::map<int, int> local;
                for (const auto &r : rows)
                    for (const auto &[j, v] : r.terms)
                        local.emplace(j, 0);
                int idx = 0;
                for (auto &[j, li] : local)
                {
                    li = idx++;
                    k.cols.push_back(j);
                }
                k.f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), idx);
                k.g.resize(static_cast<Eigen::Index>(rows.size()));
                for (size_t r = 0; r < rows.size(); ++r)
                {
                    for (const auto &[j, v] : rows[r].terms)
                        k.f(static_cast<Eigen::Index>(r), local[j]) += v;
                    k.g[static_cast<Eigen::Index>(r)] = rows[r].constant;
                }
                s.cones.push_back(std::move(k));
            }
            return out;
        }

        // ---- barrier engine ----

        struct Point
        {
            Eigen::VectorXd x;
            std::vector<Eigen::MatrixXcd> X;
            Eigen::VectorXd nu; // equality multipliers
        };

        // All cone arguments stacked in one vector, cone i at rows [offset, offset + g.size()).
        Eigen::VectorXd cone_points(const Standard &s, const Eigen::VectorXd &x)
        {
            Eigen::Index rows = 0;
            for (const auto &k : s.cones)
                rows += k.g.size();
            Eigen::VectorXd z(rows);
            Eigen::Index o = 0;
            for (const auto &k : s.cones)
            {
                auto seg = z.segment(o, k.g.size());
                seg = k.g;
                for (size_t j = 0; j < k.cols.size(); ++j)
                    seg += k.f.col(static_cast<Eigen::Index>(j)) * x[k.cols[j]];
                o += k.g.size();
            }
            return z;
        }

        bool interior(const Standard &s, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &X)
        {
            if (!x.allFinite())
                return false;
            const Eigen::VectorXd z = cone_points(s, x);
            Eigen::Index o = 0;
            for (const auto &k : s.cones)
            {
                if (!cone_interior(k.kind, z.segment(o, k.g.size())))
                    return false;
                o += k.g.size();
            }
            for (const auto &m : X)
            {
                Eigen::LLT<Eigen::MatrixXcd> llt(m);
                if (llt.info() != Eigen::Success)
                    return false;
                if (!(llt.matrixLLT().diagonal().real().minCoeff() > 0.0))
                    return false;
            }
            return true;
        }

        // merit(new) - merit(old) without forming the large t c'x terms separately
        double merit_change(const Standard &s, double t, const Point &pt, const Eigen::VectorXd &x,
                            const std::vector<Eigen::MatrixXcd> &X)
        {
            double v = t * s.c.dot(x - pt.x);
            const Eigen::VectorXd za = cone_points(s, x), zb = cone_points(s, pt.x);
            Eigen::Index o = 0;
            for (const auto &k : s.cones)
            {
                v += cone_value(k.kind, za.segment(o, k.g.size())) - cone_value(k.kind, zb.segment(o, k.g.size()));
                o += k.g.size();
            }
            for (size_t bi = 0; bi < X.size(); ++bi)
            {
                Eigen::LLT<Eigen::MatrixXcd> a(X[bi]), b(pt.X[bi]);
                v -= 2.0 * (a.matrixLLT().diagonal().real().array().log().sum() - b.matrixLLT().diagonal().real().array().log().sum());
            }
            return v;
        }

        struct Linearization
        {
            Eigen::VectorXd grad;  // of the merit in x
            Eigen::MatrixXd hess;  // of the barrier in x
            Eigen::VectorXd q;     // sum_b <C_ib, X_b>
            Eigen::MatrixXd schur; // sum_b <C_i, X C_j X>
            std::vector<Eigen::MatrixXcd> y;   // X_b V_b
            std::vector<Eigen::MatrixXcd> vxv; // V_b^H X_b V_b
        };

        Linearization linearize(const Standard &s, double t, const Point &pt)
        {
            const int m = static_cast<int>(s.b.size());
            Linearization L;
            L.grad = t * s.c;
            L.hess = Eigen::MatrixXd::Zero(s.n, s.n);
            Eigen::VectorXd g;
            Eigen::MatrixXd h;
            const Eigen::VectorXd z = cone_points(s, pt.x);
            Eigen::Index o = 0;
            for (const auto &k : s.cones)
            {
                cone_derivatives(k.kind, z.segment(o, k.g.size()), g, h);
                o += k.g.size();
                const Eigen::VectorXd gl = k.f.transpose() * g;
                const Eigen::MatrixXd hl = k.f.transpose() * h * k.f;
                for (size_t i = 0; i < k.cols.size(); ++i)
                {
                    L.grad[k.cols[i]] += gl[static_cast<Eigen::Index>(i)];
                    for (size_t j = 0; j < k.cols.size(); ++j)
                        L.hess(k.cols[i], k.cols[j]) += hl(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
            }
            L.q = Eigen::VectorXd::Zero(m);
            L.schur = Eigen::MatrixXd::Zero(m, m);
            for (size_t bi = 0; bi < s.blocks.size(); ++bi)
            {
                const auto &bl = s.blocks[bi];
                L.y.push_back(pt.X[bi] * bl.v);
                L.vxv.push_back(bl.v.adjoint() * L.y.back());
                const auto &M = L.vxv.back();
                const Eigen::Index R = bl.v.cols();
                for (Eigen::Index r = 0; r < R; ++r)
                {
                    L.q[bl.eq[static_cast<size_t>(r)]] += bl.w[static_cast<size_t>(r)] * M(r, r).real();
                    for (Eigen::Index c = 0; c < R; ++c)
                        L.schur(bl.eq[static_cast<size_t>(r)], bl.eq[static_cast<size_t>(c)]) +=
                            bl.w[static_cast<size_t>(r)] * bl.w[static_cast<size_t>(c)] * std::norm(M(r, c));
                }
            }
            return L;
        }

        struct Direction
        {
            Eigen::VectorXd dx;
            std::vector<Eigen::MatrixXcd> dX;
            Eigen::VectorXd nu_plus;
            double decrement2 = 0.0; // Newton decrement squared
            double slope = 0.0;      // directional derivative of the merit
        };

        Direction newton_direction(const Standard &s, const Point &pt, const Linearization &L, const Eigen::VectorXd &rp)
        {
            const int n = s.n;
            const int m = static_cast<int>(s.b.size());
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
            K.topLeftCorner(n, n) = L.hess;
            K.topRightCorner(n, m) = s.a.transpose();
            K.bottomLeftCorner(m, n) = s.a;
            K.bottomRightCorner(m, m) = -L.schur;
            Eigen::VectorXd rhs(n + m);
            rhs.head(n) = -L.grad;
            rhs.tail(m) = -rp - L.q;

            // Factor a slightly regularized, equilibrated copy and refine against the exact
            // system, so the regularization never leaks into the equality residual.
            Eigen::VectorXd dscale(n + m);
            for (int i = 0; i < n + m; ++i)
            {
                const double di = std::abs(K(i, i));
                dscale[i] = di > 0.0 ? 1.0 / std::sqrt(di) : 1.0;
            }
            Eigen::MatrixXd Ks = dscale.asDiagonal() * K * dscale.asDiagonal();
            for (int i = 0; i < n + m; ++i)
                Ks(i, i) += (i < n ? 1e-12 : -1e-12) * (Ks(i, i) != 0.0 ? std::abs(Ks(i, i)) : 1.0);
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Ks);
            Eigen::VectorXd sol = dscale.cwiseProduct(lu.solve(dscale.cwiseProduct(rhs)));
            for (int sweep = 0; sweep < 3; ++sweep)
            {
                const Eigen::VectorXd res = rhs - K * sol;
                sol += dscale.cwiseProduct(lu.solve(dscale.cwiseProduct(res)));
            }

            Direction d;
            d.dx = sol.head(n);
            d.nu_plus = sol.tail(m);
            d.decrement2 = d.dx.dot(L.hess * d.dx);
            d.slope = L.grad.dot(d.dx);
            for (size_t bi = 0; bi < s.blocks.size(); ++bi)
            {
                const auto &bl = s.blocks[bi];
                const Eigen::Index R = bl.v.cols();
                Eigen::VectorXd cw(R);
                for (Eigen::Index r = 0; r < R; ++r)
                    cw[r] = d.nu_plus[bl.eq[static_cast<size_t>(r)]] * bl.w[static_cast<size_t>(r)];
                const auto &Y = L.y[bi];
                const auto &M = L.vxv[bi];
                d.dX.push_back(pt.X[bi] - Y * cw.asDiagonal() * Y.adjoint());
                // Tr(X^-1 dX) = n - Tr(C X);  <dX, X^-1 dX X^-1> = n - 2 Tr(C X) + Tr(C X C X)
                double tr_cx = 0.0, tr_cxcx = 0.0;
                for (Eigen::Index r = 0; r < R; ++r)
                {
                    tr_cx += cw[r] * M(r, r).real();
                    for (Eigen::Index c = 0; c < R; ++c)
                        tr_cxcx += cw[r] * cw[c] * std::norm(M(r, c));
                }
                d.decrement2 += bl.size - 2.0 * tr_cx + tr_cxcx;
                d.slope -= bl.size - tr_cx;
            }
            d.decrement2 = std::max(d.decrement2, 0.0);
            return d;
        }

        Eigen::VectorXd equality_residual(const Standard &s, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &X)
        {
            Eigen::VectorXd r = s.a * x - s.b;
            for (size_t bi = 0; bi < s.blocks.size(); ++bi)
            {
                const auto &bl = s.blocks[bi];
                for (Eigen::Index c = 0; c < bl.v.cols(); ++c)
                    r[bl.eq[static_cast<size_t>(c)]] += bl.w[static_cast<size_t>(c)] * bl.v.col(c).dot(X[bi] * bl.v.col(c)).real();
            }
            return r;
        }

        double scaled_inf(const Standard &s, const Eigen::VectorXd &r)
        {
            if (r.size() == 0)
                return 0.0;
            return r.cwiseAbs().maxCoeff() / (1.0 + (s.b.size() ? s.b.cwiseAbs().maxCoeff() : 0.0));
        }

        // Norm of the full KKT residual, used to damp infeasible-start steps.
        double kkt_residual_norm(const Standard &s, double t, const Eigen::VectorXd &x, const std::vector<Eigen::MatrixXcd> &X,
                                 const Eigen::VectorXd &nu)
        {
            Eigen::VectorXd gx = t * s.c + s.a.transpose() * nu;
            Eigen::VectorXd g;
            Eigen::MatrixXd h;
            const Eigen::VectorXd z = cone_points(s, x);
            Eigen::Index o = 0;
            for (const auto &k : s.cones)
            {
                cone_derivatives(k.kind, z.segment(o, k.g.size()), g, h);
                o += k.g.size();
                const Eigen::VectorXd gl = k.f.transpose() * g;
                for (size_t i = 0; i < k.cols.size(); ++i)
                    gx[k.cols[i]] += gl[static_cast<Eigen::Index>(i)];
            }
            double sq = gx.squaredNorm() + equality_residual(s, x, X).squaredNorm();
            for (size_t bi = 0; bi < s.blocks.size(); ++bi)
            {
                const auto &bl = s.blocks[bi];
                Eigen::MatrixXcd R = -Eigen::LLT<Eigen::MatrixXcd>(X[bi]).solve(Eigen::MatrixXcd::Identity(bl.size, bl.size));
                for (Eigen::Index c = 0; c < bl.v.cols(); ++c)
                    R += nu[bl.eq[static_cast<size_t>(c)]] * bl.w[static_cast<size_t>(c)] * bl.v.col(c) * bl.v.col(c).adjoint();
                sq += R.squaredNorm();
            }
            return std::sqrt(sq);
        }

        enum class CenterResult
        {
            centered,
            stalled,
            slow, // the per-centering step cap ran out
            budget
        };

        // Newton centering at fixed t. `stop` is polled after every accepted step.
        template <typename Stop>
        CenterResult center(const Standard &s, double t, Point &pt, const SolverOptions &opt, int &newton_used, Stop &&stop)
        {
            for (int it = 0; it < 50; ++it)
            {
                if (newton_used >= opt.max_newton)
                    return CenterResult::budget;
                const Eigen::VectorXd rp = equality_residual(s, pt.x, pt.X);
                // Block steps carry a rounding floor of order eps * t (the multipliers grow with t).
                const bool feasible = scaled_inf(s, rp) <= std::max(opt.feasibility, 1e-15 * t);
                const Linearization L = linearize(s, t, pt);
                const Direction d = newton_direction(s, pt, L, rp);
                if (feasible && d.decrement2 <= 2e-10)
                    return CenterResult::centered;
                ++newton_used;

                double alpha = 1.0;
                auto trial = [&](double a, Eigen::VectorXd &x, std::vector<Eigen::MatrixXcd> &X)
                {
                    x = pt.x + a * d.dx;
                    X.resize(pt.X.size());
                    for (size_t bi = 0; bi < pt.X.size(); ++bi)
                    {
                        X[bi] = pt.X[bi] + a * d.dX[bi];
                        X[bi] = 0.5 * (X[bi] + X[bi].adjoint()).eval();
                    }
                };
                Eigen::VectorXd xn;
                std::vector<Eigen::MatrixXcd> Xn;
                trial(alpha, xn, Xn);
                while (!interior(s, xn, Xn) && alpha > 1e-16)
                {
                    alpha *= 0.5;
                    trial(alpha, xn, Xn);
                }
                if (alpha <= 1e-16)
                    return CenterResult::stalled;

                Eigen::VectorXd nun = pt.nu + alpha * (d.nu_plus - pt.nu);
                if (feasible)
                {
                    // inside the quadratic region a full interior step is safe
                    const bool quadratic = d.decrement2 < 0.1 && alpha == 1.0;
                    while (!quadratic && merit_change(s, t, pt, xn, Xn) > 0.25 * alpha * d.slope && alpha > 1e-16)
                    {
                        alpha *= 0.5;
                        trial(alpha, xn, Xn);
                    }
                    if (alpha <= 1e-16)
                        return d.decrement2 <= 1e-6 ? CenterResult::centered : CenterResult::stalled;
                    nun = d.nu_plus;
                }
                else
                {
                    const double r0 = kkt_residual_norm(s, t, pt.x, pt.X, pt.nu);
                    while (alpha > 1e-16)
                    {
                        nun = pt.nu + alpha * (d.nu_plus - pt.nu);
                        if (kkt_residual_norm(s, t, xn, Xn, nun) <= (1.0 - 0.01 * alpha) * r0)
                            break;
                        alpha *= 0.5;
                        trial(alpha, xn, Xn);
                    }
                    if (alpha <= 1e-16)
                        return CenterResult::stalled;
                }
                pt.x = std::move(xn);
                pt.X = std::move(Xn);
                pt.nu = std::move(nun);
                if (stop(pt))
                    return CenterResult::centered;
            }
            return CenterResult::slow;
        }

        // ---- phase I ----

        struct PhaseOne
        {
            bool feasible = false;
            bool numerical = false;
            Point start;
        };

        PhaseOne find_interior(const Standard &s, const SolverOptions &opt, int &newton_used)
        {
            const int n = s.n;
            const int nb = static_cast<int>(s.blocks.size());
            const int m = static_cast<int>(s.b.size());
            const int sig = n;

            Standard q;
            q.n = n + 1 + nb; // x, sigma, trace slacks
            q.c = Eigen::VectorXd::Zero(q.n);
            q.c[sig] = 1.0;
            q.a = Eigen::MatrixXd::Zero(m + nb, q.n);
            q.a.topLeftCorner(m, n) = s.a;
            q.b = Eigen::VectorXd::Zero(m + nb);
            q.b.head(m) = s.b;

            // X = Y - sigma I, so <C, X> = <C, Y> - sigma Tr(C)
            q.blocks = s.blocks;
            for (int bi = 0; bi < nb; ++bi)
            {
                auto &bl = q.blocks[static_cast<size_t>(bi)];
                for (Eigen::Index c = 0; c < bl.v.cols(); ++c)
                    q.a(bl.eq[static_cast<size_t>(c)], sig) -= bl.w[static_cast<size_t>(c)] * bl.v.col(c).squaredNorm();
                // trace slack: u_b - Tr(Y_b) = 0
                const int row = m + bi;
                q.a(row, n + 1 + bi) = 1.0;
                const Eigen::Index R = bl.v.cols();
                bl.v.conservativeResize(Eigen::NoChange, R + bl.size);
                bl.v.rightCols(bl.size) = Eigen::MatrixXcd::Identity(bl.size, bl.size);
                for (int i = 0; i < bl.size; ++i)
                {
                    bl.eq.push_back(row);
                    bl.w.push_back(-1.0);
                }
            }

            double sigma0 = 0.0;
            for (const auto &k : s.cones)
            {
                StdCone kq = k;
                kq.cols.push_back(sig);
                kq.f.conservativeResize(Eigen::NoChange, kq.f.cols() + 1);
                kq.f.col(kq.f.cols() - 1).setZero();
                const Eigen::VectorXd &z = k.g; // cone point at x = 0
                switch (k.kind)
                {
                case ConeKind::nonneg:
                    kq.f(0, kq.f.cols() - 1) = 1.0;
                    sigma0 = std::max(sigma0, -z[0]);
                    break;
                case ConeKind::soc:
                    kq.f(0, kq.f.cols() - 1) = 1.0;
                    sigma0 = std::max(sigma0, z.tail(z.size() - 1).norm() - z[0]);
                    break;
                default:
                    kq.f(0, kq.f.cols() - 1) = -1.0;
                    kq.f(1, kq.f.cols() - 1) = 1.0;
                    sigma0 = std::max(sigma0, std::max(1.0 - z[1], z[0]));
                    break;
                }
                q.cones.push_back(std::move(kq));
            }
            sigma0 += 1.0;

            auto nonneg = [&](std::vector<int> cols, std::vector<double> coefs, double g)
            {
                StdCone k;
                k.kind = ConeKind::nonneg;
                k.cols = std::move(cols);
                k.f = Eigen::Map<Eigen::MatrixXd>(coefs.data(), 1, static_cast<Eigen::Index>(coefs.size()));
                k.g = Eigen::VectorXd::Constant(1, g);
                q.cones.push_back(std::move(k));
            };
            nonneg({sig}, {1.0}, 1.0); // sigma >= -1 keeps phase I bounded
            for (int i = 0; i < n; ++i)
            {
                nonneg({i}, {1.0}, opt.phase1_box);
                nonneg({i}, {-1.0}, opt.phase1_box);
            }
            for (int bi = 0; bi < nb; ++bi)
                nonneg({n + 1 + bi}, {-1.0}, 1e4 * s.blocks[static_cast<size_t>(bi)].size);

            Point pt;
            pt.x = Eigen::VectorXd::Zero(q.n);
            pt.x[sig] = sigma0;
            for (int bi = 0; bi < nb; ++bi)
            {
                const int sz = s.blocks[static_cast<size_t>(bi)].size;
                pt.X.push_back(Eigen::MatrixXcd::Identity(sz, sz));
                pt.x[n + 1 + bi] = sz;
            }
            pt.nu = Eigen::VectorXd::Zero(m + nb);

            PhaseOne out;
            auto done = [&](const Point &p)
            {
                return p.x[sig] < -1e-3 && scaled_inf(q, equality_residual(q, p.x, p.X)) <= opt.feasibility;
            };
            const double nu = q.nu();
            double t = 1.0;
            for (;;)
            {
                const CenterResult r = center(q, t, pt, opt, newton_used, done);
                const double sigma = pt.x[sig];
                const bool eq_ok = scaled_inf(q, equality_residual(q, pt.x, pt.X)) <= opt.feasibility;
                if (sigma < 0.0 && eq_ok)
                {
                    out.feasible = true;
                    break;
                }
                if (r != CenterResult::centered)
                {
                    out.numerical = r == CenterResult::budget || r == CenterResult::slow || !(sigma > 1e-7);
                    break;
                }
                if (nu / t <= 1e-10 * std::max(1.0, std::abs(sigma)))
                    break; // converged with sigma >= 0: no interior point
                t *= opt.mu;
            }
            if (out.feasible)
            {
                const double sigma = pt.x[sig];
                out.start.x = pt.x.head(n);
                for (int bi = 0; bi < nb; ++bi)
                {
                    const int sz = s.blocks[static_cast<size_t>(bi)].size;
                    out.start.X.push_back(pt.X[static_cast<size_t>(bi)] - sigma * Eigen::MatrixXcd::Identity(sz, sz));
                }
                out.start.nu = Eigen::VectorXd::Zero(m);
            }
            return out;
        }
    }

    Solution solve(const ConvexProgram &program, const SolverOptions &options)
    {
        const Lowered low = lower(program);
        const Standard &s = low.std;
        Solution sol;
        int newton_used = 0;

        PhaseOne p1 = find_interior(s, options, newton_used);
        if (!p1.feasible)
        {
            sol.status = p1.numerical ? Status::numerical_limit : Status::infeasible;
            sol.iterations = newton_used;
            return sol;
        }

        Point pt = std::move(p1.start);
        const double nu = s.nu();
        double t = 1.0;
        auto never = [](const Point &) { return false; };
        Status status = Status::numerical_limit;
        for (;;)
        {
            const CenterResult r = center(s, t, pt, options, newton_used, never);
            if (r == CenterResult::budget)
                break;
            const double obj = s.c.dot(pt.x);
            if (nu / t <= options.tolerance * std::max(1.0, std::abs(obj)))
            {
                status = Status::optimal;
                break;
            }
            if (r == CenterResult::stalled || r == CenterResult::slow)
            {
                // Close enough to the optimum that the barrier is numerically flat.
                if (nu / t <= 1e-6 * std::max(1.0, std::abs(obj)))
                    status = Status::optimal;
                break;
            }
            t *= options.mu;
        }

        sol.status = status;
        sol.iterations = newton_used;
        sol.gap = nu / t;
        sol.x = pt.x.head(low.original_scalars);
        sol.blocks = pt.X;
        sol.primal_residual = scaled_inf(s, equality_residual(s, pt.x, pt.X));
        if (sol.status == Status::optimal && sol.primal_residual > 1e-7)
            sol.status = Status::numerical_limit;
        sol.objective = evaluate_objective(program, sol.x, sol.blocks);
        return sol;
    }
}
