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

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace sparsebf;

namespace
{
    CorrelationSet noise_only(std::size_t n, double doa = 90.0)
    {
        Scenario scn;
        scn.desired = {doa, 1.0};
        return correlation_matrices({n, 0.5}, scn);
    }
}

TEST(Subarray, FullMaskUnchanged)
{
    const auto c = correlation_matrices({6, 0.5}, Scenario{{40, 1}, {{100, 3}}, 1});
    EXPECT_EQ((subarray(c.total, SelectionVector::full(6)) - c.total).norm(), 0.0);
}

TEST(Subarray, IdentityReduction)
{
    const CMatrix r = subarray(CMatrix::Identity(3, 3), SelectionVector::from_bits("101"));
    EXPECT_EQ((r - CMatrix::Identity(2, 2)).norm(), 0.0);
}

TEST(Subarray, PrincipalSubmatrixOfRandomHermitian)
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t)
    {
        CMatrix a = CMatrix::Random(8, 8);
        a = a + a.adjoint().eval();
        const auto idx = oracle::random_subset(rng, 8, 5);
        const auto z = SelectionVector::from_indices(8, idx);
        const CMatrix sub = subarray(a, z);
        EXPECT_EQ((sub - oracle::pick(a, idx)).norm(), 0.0);
        EXPECT_EQ((sub - sub.adjoint()).norm(), 0.0);
    }
}

TEST(MaxSinrWeights, MatchedFilterForWhiteNoise)
{
    const auto c = noise_only(7, 70.0);
    const auto w = max_sinr_weights(c, SelectionVector::full(7));
    const CVector s = c.source_steering;
    // w proportional to s: |<w, s>| = |w| |s|
    EXPECT_NEAR(std::abs(w.weights.dot(s)), w.weights.norm() * s.norm(), 1e-10);
}

TEST(MaxSinrWeights, ArrayGainOfTwelve)
{
    const auto c = noise_only(12);
    const auto sinr = configuration_sinr(c, SelectionVector::full(12));
    EXPECT_NEAR(sinr.db, 10.0 * std::log10(12.0), 1e-10);
}

TEST(MaxSinrWeights, CollinearInterferer)
{
    // Interferer at the source direction: s^H (a s s^H + b I)^{-1} s = N / (a N + b).
    Scenario scn;
    scn.desired = {75.0, 2.0};
    scn.interferers = {{75.0, 3.0}};
    scn.noise_power = 0.5;
    const auto c = correlation_matrices({6, 0.5}, scn);
    const double expected = 2.0 * 6.0 / (3.0 * 6.0 + 0.5);
    EXPECT_NEAR(configuration_sinr(c, SelectionVector::full(6)).linear, expected, 1e-12 * expected);
}

TEST(MaxSinrWeights, TwoElementPencilAgainstDenseEigensolve)
{
    Scenario scn;
    scn.desired = {90.0, 1.0};
    scn.interferers = {{60.0, 1.0}};
    const auto c = correlation_matrices({2, 0.5}, scn);
    const auto w = max_sinr_weights(c, SelectionVector::full(2));

    Eigen::ComplexEigenSolver<CMatrix> es(c.interference_noise.inverse() * c.source);
    Eigen::Index k = 0;
    es.eigenvalues().real().maxCoeff(&k);
    CVector ref = es.eigenvectors().col(k);
    ref /= std::sqrt((ref.adjoint() * c.source * ref)(0).real());
    ref *= std::conj(ref(0)) / std::abs(ref(0));
    EXPECT_LT((w.weights - ref).norm(), 1e-10);
    EXPECT_NEAR(output_sinr(w, c).linear, es.eigenvalues()(k).real(), 1e-10);
}

TEST(MaxSinrWeights, CanonicalScaleAndPhase)
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t)
    {
        const auto scn = oracle::random_scenario(rng);
        const auto c = correlation_matrices({8, 0.5}, scn);
        const auto z = SelectionVector::from_indices(8, oracle::random_subset(rng, 8, 4));
        const auto w = max_sinr_weights(c, z);
        EXPECT_NEAR((w.weights.adjoint() * c.source * w.weights)(0).real(), 1.0, 1e-10);
        const auto first = z.indices().front();
        EXPECT_GT(w.weights(static_cast<Eigen::Index>(first)).real(), 0.0);
        EXPECT_EQ(w.weights(static_cast<Eigen::Index>(first)).imag(), 0.0);
        for (std::size_t i = 0; i < 8; ++i)
            if (!z.active(i))
                EXPECT_EQ(w.weights(static_cast<Eigen::Index>(i)), cplx(0, 0));
    }
}

TEST(MaxSinrWeights, RankTwoSourceUsesGeneralRoute)
{
    // Two incoherent in-beam components in R_s exercise the eigen route.
    const ArrayGeometry g{6, 0.5};
    const CVector a = steering_vector(g, 80), b = steering_vector(g, 95);
    const CMatrix rs = a * a.adjoint() + 0.5 * b * b.adjoint();
    const CVector v = steering_vector(g, 30);
    const CMatrix rsp = 10.0 * v * v.adjoint() + CMatrix::Identity(6, 6);
    const auto z = SelectionVector::full(6);
    const auto w = max_sinr_weights(rs, CMatrix(rs + rsp), z);
    EXPECT_NEAR(output_sinr(w.weights, rs, rsp).linear, oracle::lambda_max(rs, rsp), 1e-9 * oracle::lambda_max(rs, rsp));
    const auto w2 = max_sinr_weights(rs, rsp, z);
    EXPECT_NEAR(output_sinr(w2.weights, rs, rsp).linear, output_sinr(w.weights, rs, rsp).linear, 1e-9);
}

TEST(MaxSinrWeights, SingularMatrixRejected)
{
    const ArrayGeometry g{4, 0.5};
    const CVector s = steering_vector(g, 60);
    const CMatrix rs = s * s.adjoint();
    EXPECT_THROW(max_sinr_weights(rs, rs, SelectionVector::full(4)), singular_matrix_error);
}

TEST(OutputSinr, ScaleInvariance)
{
    std::mt19937_64 rng(11);
    const auto c = correlation_matrices({8, 0.5}, oracle::random_scenario(rng));
    const CVector w = CVector::Random(8);
    const double base = output_sinr(w, c.source, c.interference_noise).linear;
    for (cplx k : {cplx(3, 0), cplx(0, -2), cplx(1e-3, 4e-3)})
        EXPECT_NEAR(output_sinr(CVector(k * w), c.source, c.interference_noise).linear, base, 1e-12 * base);
}

TEST(OutputSinr, DegenerateDenominator)
{
    const CMatrix rs = CMatrix::Identity(2, 2);
    CMatrix rsp = CMatrix::Zero(2, 2);
    rsp(1, 1) = 1.0;
    CVector w(2);
    w << cplx(1, 0), cplx(0, 0);
    EXPECT_THROW(output_sinr(w, rs, rsp), degenerate_error);
    EXPECT_THROW(output_sinr(CVector::Zero(2), rs, rsp), degenerate_error);
}

TEST(BeamformerProperties, EigenIdentityAndRouteEquivalence)
{
    std::mt19937_64 rng(21);
    for (int t = 0; t < 200; ++t)
    {
        const auto scn = oracle::random_scenario(rng);
        const std::size_t n = 4 + t % 7;
        const std::size_t p = 1 + t % n;
        const auto c = correlation_matrices({n, 0.5}, scn);
        const auto idx = oracle::random_subset(rng, n, p);
        const auto z = SelectionVector::from_indices(n, idx);
        const double lam = oracle::lambda_max(oracle::pick(c.source, idx), oracle::pick(c.interference_noise, idx));
        const double via_rxx = configuration_sinr(c, z).linear;
        const auto w_rsp = max_sinr_weights(subarray(c.source, z), subarray(c.interference_noise, z), z);
        const double via_rsp = output_sinr(w_rsp, c).linear;
        SinrEvaluator fast(c);
        EXPECT_LT(oracle::rel(via_rxx, lam), 1e-8);
        EXPECT_LT(oracle::rel(via_rsp, via_rxx), 1e-8);
        EXPECT_LT(oracle::rel(fast.sinr_linear(z), lam), 1e-8);
    }
}

TEST(BeamformerProperties, SubarrayNeverBeatsFullArray)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t)
    {
        const auto scn = oracle::random_scenario(rng);
        const auto c = correlation_matrices({10, 0.5}, scn);
        SinrEvaluator eval(c);
        const double full = eval.sinr_linear(SelectionVector::full(10));
        const auto z = SelectionVector::from_indices(10, oracle::random_subset(rng, 10, 1 + t % 9));
        EXPECT_LE(eval.sinr_linear(z), full * (1.0 + 1e-12));
    }
}
