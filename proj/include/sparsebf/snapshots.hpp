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

#ifndef SPARSEBF_SNAPSHOTS_HPP
#define SPARSEBF_SNAPSHOTS_HPP

#include "array_scene.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace sparsebf
{
    // T x N received samples, one snapshot per row.
    struct SnapshotBatch
    {
        CMatrix data;
        std::uint64_t rng_seed = 0;
        Scenario scenario;

        std::size_t snapshots() const noexcept { return static_cast<std::size_t>(data.rows()); }
        std::size_t sensors() const noexcept { return static_cast<std::size_t>(data.cols()); }
    };

    // x(t) = a(t) s + sum_l b_l(t) v_l + n(t) with BPSK amplitudes
    // a, b_l in {±sqrt(power)} and circular complex Gaussian noise of total
    // variance sigma_t^2 (split evenly between real and imaginary parts).
    inline SnapshotBatch simulate_snapshots(const ArrayGeometry &geom, const Scenario &scn, std::size_t t, std::uint64_t seed)
    {
        if (t < 1)
            throw invalid_argument("simulate_snapshots: need at least one snapshot");
        scn.check_physical();
        const auto n = static_cast<Eigen::Index>(geom.n_grid);

        std::vector<CVector> steer{steering_vector(geom, scn.desired.doa_deg)};
        std::vector<double> amp{std::sqrt(scn.desired.power)};
        for (const auto &i : scn.interferers)
        {
            steer.push_back(steering_vector(geom, i.doa_deg));
            amp.push_back(std::sqrt(i.power));
        }
        const double noise_sd = std::sqrt(scn.noise_power / 2.0);

        auto rng = make_engine(seed, 0x5a17);
        SnapshotBatch batch{CMatrix(static_cast<Eigen::Index>(t), n), seed, scn};
        CVector row(n);
        for (std::size_t ti = 0; ti < t; ++ti)
        {
            row.setZero();
            for (std::size_t src = 0; src < steer.size(); ++src)
            {
                const double symbol = (rng() >> 63) ? amp[src] : -amp[src];
                row += symbol * steer[src];
            }
            for (Eigen::Index k = 0; k < n; ++k)
            {
                const double re = standard_normal(rng);
                const double im = standard_normal(rng);
                row(k) += cplx(noise_sd * re, noise_sd * im);
            }
            batch.data.row(static_cast<Eigen::Index>(ti)) = row.transpose();
        }
        return batch;
    }

    // (1/T) sum_t x(t) x(t)^H
    inline CMatrix sample_covariance(const SnapshotBatch &batch)
    {
        if (batch.data.rows() < 1)
            throw invalid_argument("sample_covariance: empty batch");
        const auto &x = batch.data;
        CMatrix r = (x.transpose() * x.conjugate()) / static_cast<double>(x.rows());
        // Exact Hermitian symmetry; the product is symmetric only to rounding.
        for (Eigen::Index i = 0; i < r.rows(); ++i)
        {
            r(i, i) = cplx(r(i, i).real(), 0.0);
            for (Eigen::Index j = i + 1; j < r.cols(); ++j)
                r(j, i) = std::conj(r(i, j));
        }
        return r;
    }

    // Projects R onto Hermitian Toeplitz structure: each diagonal is replaced by
    // the mean of its entries. The mean is accumulated as an offset from the
    // first entry so an already-constant diagonal is reproduced exactly, which
    // makes the projection exactly idempotent.
    inline CMatrix toeplitz_average(const CMatrix &r)
    {
        if (r.rows() != r.cols())
            throw invalid_argument("toeplitz_average: square matrix required");
        const Eigen::Index n = r.rows();
        CMatrix out(n, n);
        for (Eigen::Index lag = 0; lag < n; ++lag)
        {
            const cplx anchor = r(0, lag);
            cplx offset(0.0, 0.0);
            for (Eigen::Index i = 0; i + lag < n; ++i)
                offset += r(i, i + lag) - anchor;
            cplx mean = anchor + offset / static_cast<double>(n - lag);
            if (lag == 0)
                mean = cplx(mean.real(), 0.0);
            for (Eigen::Index i = 0; i + lag < n; ++i)
            {
                out(i, i + lag) = mean;
                out(i + lag, i) = std::conj(mean);
            }
        }
        return out;
    }

    // Gaussian DOA jitter. variance_deg2 is the variance in squared degrees.
    struct PerturbationSpec
    {
        double variance_deg2 = 0.25;
        bool perturb_desired = true;
        bool perturb_interferers = true;

        void validate() const
        {
            if (!(variance_deg2 >= 0.0) || !std::isfinite(variance_deg2))
                throw invalid_argument("PerturbationSpec: variance must be >= 0");
        }
    };

    inline constexpr double min_perturbed_doa = 0.5;
    inline constexpr double max_perturbed_doa = 179.5;

    inline Scenario perturb_scenario(const Scenario &scn, const PerturbationSpec &pert, std::uint64_t seed)
    {
        pert.validate();
        Scenario out = scn;
        if (pert.variance_deg2 == 0.0)
            return out;
        const double sd = std::sqrt(pert.variance_deg2);
        auto rng = make_engine(seed, 0xd0a);
        auto shift = [&](double doa)
        { return std::clamp(doa + sd * standard_normal(rng), min_perturbed_doa, max_perturbed_doa); };
        if (pert.perturb_desired)
            out.desired.doa_deg = shift(out.desired.doa_deg);
        if (pert.perturb_interferers)
            for (auto &i : out.interferers)
                i.doa_deg = shift(i.doa_deg);
        return out;
    }

    // ----- Snapshot file -----------------------------------------------------
    // Little-endian layout:
    //   bytes 0..3   magic "SBSN"
    //   bytes 4..7   uint32 T (snapshots)
    //   bytes 8..11  uint32 N (sensors)
    //   bytes 12..15 uint32 layout tag, 1 = row-major interleaved (re, im) float64
    //   then T*N*2 float64 values: x_0(0).re, x_0(0).im, x_0(1).re, ...

    inline constexpr std::array<char, 4> snapshot_magic{'S', 'B', 'S', 'N'};
    inline constexpr std::uint32_t snapshot_layout_rowmajor_interleaved = 1;

    namespace detail
    {
        static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

        template <typename T>
        void write_le(std::ostream &os, T v)
        {
            os.write(reinterpret_cast<const char *>(&v), sizeof(T));
        }

        template <typename T>
        T read_le(std::istream &is)
        {
            T v{};
            is.read(reinterpret_cast<char *>(&v), sizeof(T));
            if (!is)
                throw format_error("unexpected end of binary file");
            return v;
        }
    }

    inline void write_snapshots(std::ostream &os, const SnapshotBatch &batch)
    {
        os.write(snapshot_magic.data(), 4);
        detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(batch.data.rows()));
        detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(batch.data.cols()));
        detail::write_le<std::uint32_t>(os, snapshot_layout_rowmajor_interleaved);
        for (Eigen::Index t = 0; t < batch.data.rows(); ++t)
            for (Eigen::Index k = 0; k < batch.data.cols(); ++k)
            {
                detail::write_le<double>(os, batch.data(t, k).real());
                detail::write_le<double>(os, batch.data(t, k).imag());
            }
    }

    inline CMatrix read_snapshots(std::istream &is)
    {
        std::array<char, 4> magic{};
        is.read(magic.data(), 4);
        if (!is || magic != snapshot_magic)
            throw format_error("snapshot file: bad magic");
        const auto t = detail::read_le<std::uint32_t>(is);
        const auto n = detail::read_le<std::uint32_t>(is);
        const auto layout = detail::read_le<std::uint32_t>(is);
        if (layout != snapshot_layout_rowmajor_interleaved)
            throw format_error("snapshot file: unsupported layout tag " + std::to_string(layout));
        CMatrix data(t, n);
        for (std::uint32_t ti = 0; ti < t; ++ti)
            for (std::uint32_t k = 0; k < n; ++k)
            {
                const double re = detail::read_le<double>(is);
                const double im = detail::read_le<double>(is);
                data(ti, k) = cplx(re, im);
            }
        return data;
    }
}

#endif
