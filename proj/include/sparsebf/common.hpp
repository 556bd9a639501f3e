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

#ifndef SPARSEBF_COMMON_HPP
#define SPARSEBF_COMMON_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sparsebf
{
    using cplx = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;

    inline constexpr double pi = std::numbers::pi;

    // ----- Error hierarchy ---------------------------------------------------
    // Every library failure derives from sparsebf::error so callers (the CLI)
    // can map categories onto exit codes.

    class error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class domain_error : public error
    {
    public:
        using error::error;
    };

    class invalid_argument : public error
    {
    public:
        using error::error;
    };

    class singular_matrix_error : public error
    {
    public:
        using error::error;
    };

    class degenerate_error : public error
    {
    public:
        using error::error;
    };

    class divergence_error : public error
    {
    public:
        using error::error;
    };

    class format_error : public error
    {
    public:
        using error::error;
    };

    class budget_exceeded_error : public error
    {
    public:
        budget_exceeded_error(std::uint64_t count, std::uint64_t budget)
            : error("enumeration budget exceeded: C(N,P) = " + std::to_string(count) +
                    " > budget " + std::to_string(budget)),
              count_(count), budget_(budget) {}

        std::uint64_t count() const noexcept { return count_; }
        std::uint64_t budget() const noexcept { return budget_; }

    private:
        std::uint64_t count_;
        std::uint64_t budget_;
    };

    inline double deg2rad(double deg) { return deg * pi / 180.0; }
    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

    // Derives an independent engine from a base seed and a stream index.
    // Identical (seed, stream) pairs always produce identical sequences.
    inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        return std::mt19937_64(seq);
    }

    // Standard normal draw via Box-Muller on the raw engine output.
    // Used instead of std::normal_distribution so seeded datasets do not depend
    // on the standard library vendor.
    inline double standard_normal(std::mt19937_64 &rng)
    {
        constexpr double scale = 1.0 / 9007199254740992.0; // 2^-53
        double u1 = 0.0;
        while (u1 == 0.0)
            u1 = static_cast<double>(rng() >> 11) * scale;
        const double u2 = static_cast<double>(rng() >> 11) * scale;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    // Uniform draw in [lo, hi).
    inline double uniform_real(std::mt19937_64 &rng, double lo, double hi)
    {
        constexpr double scale = 1.0 / 9007199254740992.0;
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * scale;
    }

    // Uniform integer in [lo, hi], rejection-sampled so it is unbiased.
    inline std::int64_t uniform_int(std::mt19937_64 &rng, std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo)
            throw invalid_argument("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
        if (span == 0) // full 64-bit range
            return static_cast<std::int64_t>(rng());
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t r = rng();
        while (r >= limit)
            r = rng();
        return lo + static_cast<std::int64_t>(r % span);
    }

    // ----- Deterministic parallel loop ---------------------------------------
    // Runs body(i) for i in [0, count). Callers write one result slot per index
    // and reduce the slots sequentially afterwards, which keeps every result
    // independent of the worker count.

    inline unsigned resolve_threads(unsigned requested)
    {
        if (requested != 0)
            return requested;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : hw;
    }

    template <typename Body>
    void parallel_for(std::size_t count, unsigned threads, Body &&body)
    {
        threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
        if (threads <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }
        std::vector<std::exception_ptr> failures(threads);
        {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (unsigned t = 0; t < threads; ++t)
            {
                pool.emplace_back([&, t]
                                  {
                    try
                    {
                        for (std::size_t i = t; i < count; i += threads)
                            body(i);
                    }
                    catch (...)
                    {
                        failures[t] = std::current_exception();
                    } });
            }
        }
        for (auto &f : failures)
            if (f)
                std::rethrow_exception(f);
    }

    // FNV-1a, used to fingerprint configuration documents in run manifests.
    inline std::uint64_t fnv1a64(const std::string &text)
    {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }
}

#endif
