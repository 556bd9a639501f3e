// SPDX-License-Identifier: Apache-2.0
//
// sparsebf: sparse receive array design for MaxSINR beamforming
// Copyright (C) 2026 The sparsebf authors
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

#ifndef SPARSEBF_BEAMFORMER_HPP
#define SPARSEBF_BEAMFORMER_HPP

#include "array_scene.hpp"
#include "selection.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <span>

namespace sparsebf
{
    struct SinrValue
    {
        double linear = 0.0;
        double db = -std::numeric_limits<double>::infinity();

        static SinrValue from_linear(double lin) { return {lin, linear_to_db(lin)}; }
    };

    // Weights over the full grid; zero outside the support.
    struct BeamformerWeights
    {
        CVector weights;
        SelectionVector support;
    };

    // Principal submatrix on the active indices, order preserved.
    inline CMatrix subarray(const CMatrix &r, const SelectionVector &z)
    {
        if (r.rows() != r.cols() || static_cast<std::size_t>(r.rows()) != z.size())
            throw invalid_argument("subarray: matrix size does not match selection length");
        const auto idx = z.indices();
        const auto p = static_cast<Eigen::Index>(idx.size());
        CMatrix out(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                out(i, j) = r(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                              static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
        return out;
    }

    namespace detail
    {
        inline constexpr double max_condition = 1e12;

        // Solver for a Hermitian positive definite system with a pivoted-LU
        // fallback. Throws singular_matrix_error when the reciprocal condition
        // estimate drops below 1 / max_condition.
        class HpdSolver
        {
        public:
            explicit HpdSolver(const CMatrix &a)
            {
                llt_.compute(a);
                if (llt_.info() == Eigen::Success && llt_.rcond() >= 1.0 / max_condition)
                    return;
                lu_.emplace(a);
                if (!(lu_->rcond() >= 1.0 / max_condition))
                    throw singular_matrix_error("correlation matrix is numerically singular (condition estimate > 1e12)");
            }

            bool cholesky() const noexcept { return !lu_.has_value(); }
            const Eigen::LLT<CMatrix> &llt() const noexcept { return llt_; }

            CVector solve(const CVector &b) const { return lu_ ? CVector(lu_->solve(b)) : CVector(llt_.solve(b)); }
            CMatrix solve(const CMatrix &b) const { return lu_ ? CMatrix(lu_->solve(b)) : CMatrix(llt_.solve(b)); }

        private:
            Eigen::LLT<CMatrix> llt_;
            std::optional<Eigen::PartialPivLU<CMatrix>> lu_;
        };

        // If r is (numerically) rank one, returns a vector u with r ∝ u u^H.
        inline std::optional<CVector> rank_one_direction(const CMatrix &r)
        {
            Eigen::Index j = 0;
            const double peak = r.diagonal().real().maxCoeff(&j);
            if (!(peak > 0.0))
                return std::nullopt;
            const CVector u = r.col(j);
            const CMatrix approx = (u * u.adjoint()) / peak;
            if ((r - approx).norm() <= 1e-10 * r.norm())
                return u;
            return std::nullopt;
        }

        inline void normalize_weights(CVector &w, const CMatrix &rs)
        {
            const double gain = (w.adjoint() * rs * w)(0).real();
            if (!(gain > 0.0) || !std::isfinite(gain))
                throw degenerate_error("beamformer: w^H R_s w is not positive");
            w /= std::sqrt(gain);
            for (Eigen::Index i = 0; i < w.size(); ++i)
            {
                const double mag = std::abs(w(i));
                if (mag > 0.0)
                {
                    w *= std::conj(w(i)) / mag;
                    w(i) = cplx(w(i).real(), 0.0);
                    break;
                }
            }
        }
    }

    // MaxSINR weights for a (sub)array given its desired-source correlation and
    // a positive definite total (or interference-plus-noise) correlation.
    // Result is the principal eigenvector of R_xx^{-1} R_s embedded on the
    // support, scaled so that w^H R_s w = 1 with the first nonzero weight real
    // and positive.
    inline BeamformerWeights max_sinr_weights(const CMatrix &rs_sub, const CMatrix &rxx_sub, const SelectionVector &support)
    {
        const auto p = static_cast<Eigen::Index>(support.cardinality());
        if (rs_sub.rows() != p || rs_sub.cols() != p || rxx_sub.rows() != p || rxx_sub.cols() != p)
            throw invalid_argument("max_sinr_weights: reduced matrices must be P x P");

        const detail::HpdSolver solver(rxx_sub);
        CVector w;
        if (auto u = detail::rank_one_direction(rs_sub))
        {
            w = solver.solve(*u);
        }
        else if (solver.cholesky())
        {
            // Whitened Hermitian problem: L^{-1} R_s L^{-H} y = lambda y, w = L^{-H} y.
            const auto &llt = solver.llt();
            const CMatrix linv_rs = llt.matrixL().solve(rs_sub);
            const CMatrix whitened = llt.matrixL().solve(linv_rs.adjoint()).adjoint();
            const CMatrix herm = 0.5 * (whitened + whitened.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
            const CVector y = eig.eigenvectors().col(p - 1);
            w = llt.matrixU().solve(y);
        }
        else
        {
            Eigen::ComplexEigenSolver<CMatrix> eig(solver.solve(rs_sub));
            Eigen::Index best = 0;
            eig.eigenvalues().real().maxCoeff(&best);
            w = eig.eigenvectors().col(best);
        }
        detail::normalize_weights(w, rs_sub);

        BeamformerWeights out{CVector::Zero(static_cast<Eigen::Index>(support.size())), support};
        const auto idx = support.indices();
        for (std::size_t i = 0; i < idx.size(); ++i)
            out.weights(static_cast<Eigen::Index>(idx[i])) = w(static_cast<Eigen::Index>(i));
        return out;
    }

    // Convenience overload: reduce the scenario matrices and solve.
    inline BeamformerWeights max_sinr_weights(const CorrelationSet &corr, const SelectionVector &z)
    {
        return max_sinr_weights(subarray(corr.source, z), subarray(corr.total, z), z);
    }

    // Output SINR  w^H R_s w / w^H R_s' w. Invariant to complex scaling of w.
    inline SinrValue output_sinr(const CVector &w, const CMatrix &rs, const CMatrix &rsp)
    {
        if (w.size() != rs.rows() || w.size() != rsp.rows())
            throw invalid_argument("output_sinr: dimension mismatch");
        const double scale = w.squaredNorm();
        if (!(scale > 0.0))
            throw degenerate_error("output_sinr: zero weight vector");
        const double num = (w.adjoint() * rs * w)(0).real();
        const double den = (w.adjoint() * rsp * w)(0).real();
        if (!(den >= 1e-15 * scale))
            throw degenerate_error("output_sinr: interference-plus-noise power below 1e-15");
        return SinrValue::from_linear(num / den);
    }

    inline SinrValue output_sinr(const BeamformerWeights &w, const CorrelationSet &corr)
    {
        return output_sinr(w.weights, corr.source, corr.interference_noise);
    }

    // SINR of a configuration through the public weight route.
    inline SinrValue configuration_sinr(const CorrelationSet &corr, const SelectionVector &z)
    {
        return output_sinr(max_sinr_weights(corr, z), corr);
    }

    // Fast configuration scorer for search loops. For a point source the
    // optimum SINR of a subarray has the closed form
    //   sigma^2 s_P^H (R_s'_P)^{-1} s_P,
    // evaluated with a Cholesky factorization of the P x P reduced matrix.
    // Holds scratch buffers, so use one instance per thread.
    class SinrEvaluator
    {
    public:
        explicit SinrEvaluator(const CorrelationSet &corr)
            : rsp_(corr.interference_noise), steering_(corr.source_steering), power_(corr.source_power) {}

        std::size_t grid_size() const noexcept { return static_cast<std::size_t>(rsp_.rows()); }

        double sinr_linear(std::span<const std::size_t> idx)
        {
            const auto p = static_cast<Eigen::Index>(idx.size());
            sub_.resize(p, p);
            vec_.resize(p);
            for (Eigen::Index i = 0; i < p; ++i)
            {
                const auto ii = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]);
                vec_(i) = steering_(ii);
                for (Eigen::Index j = 0; j <= i; ++j)
                    sub_(i, j) = rsp_(ii, static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
            }
            llt_.compute(sub_);
            if (llt_.info() != Eigen::Success)
                throw singular_matrix_error("SinrEvaluator: reduced interference-plus-noise matrix is not positive definite");
            // s^H R^{-1} s = || L^{-1} s ||^2
            llt_.matrixL().solveInPlace(vec_);
            return power_ * vec_.squaredNorm();
        }

        double sinr_linear(const SelectionVector &z)
        {
            const auto idx = z.indices();
            return sinr_linear(std::span<const std::size_t>(idx));
        }

    private:
        CMatrix rsp_;
        CVector steering_;
        double power_;
        CMatrix sub_;
        CVector vec_;
        Eigen::LLT<CMatrix, Eigen::Lower> llt_;
    };
}

#endif
