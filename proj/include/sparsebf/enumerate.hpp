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

#ifndef SPARSEBF_ENUMERATE_HPP
#define SPARSEBF_ENUMERATE_HPP

#include "sbsa.hpp"

#include <optional>
#include <ostream>

namespace sparsebf
{
    struct EnumerateOptions
    {
        std::uint64_t budget = 10'000'000; // maximum C(N,P) accepted
        unsigned threads = 0;               // 0 = hardware concurrency
    };

    struct RankedConfiguration
    {
        SelectionVector selection;
        SinrValue sinr;
        std::optional<double> omega;
        std::uint64_t rank_id = 0; // lexicographic combination rank
    };

    // SINR values within this relative distance are treated as ties, which are
    // then broken by the lower configuration rank.
    inline constexpr double sinr_tie_tolerance = 1e-12;

    namespace detail
    {
        inline constexpr std::uint64_t enumeration_block = 4096;

        inline std::uint64_t checked_count(std::size_t n, std::size_t p, const EnumerateOptions &opts)
        {
            if (p < 1 || p > n)
                throw invalid_argument("enumerate: need 1 <= P <= N (P=" + std::to_string(p) + ", N=" + std::to_string(n) + ")");
            const std::uint64_t count = binomial(n, p);
            if (count > opts.budget)
                throw budget_exceeded_error(count, opts.budget);
            return count;
        }

        inline bool sinr_better(double cand, double best) { return cand > best + sinr_tie_tolerance * std::abs(best); }
        inline bool sinr_worse(double cand, double worst) { return cand < worst - sinr_tie_tolerance * std::abs(worst); }

        // Visits every configuration rank in [first, last) with its index set.
        template <typename Visit>
        void for_each_combination(std::size_t n, std::size_t p, std::uint64_t first, std::uint64_t last, Visit &&visit)
        {
            if (first >= last)
                return;
            auto comb = unrank_combination(n, p, first);
            for (std::uint64_t r = first; r < last; ++r)
            {
                visit(r, comb);
                next_combination(comb, n);
            }
        }
    }

    // Best and worst configurations found in one exhaustive pass.
    struct EnumerationExtremes
    {
        RankedConfiguration best;
        RankedConfiguration worst;
        std::uint64_t count = 0;
    };

    inline EnumerationExtremes enumerate_extremes(const CorrelationSet &corr, std::size_t p, const EnumerateOptions &opts = {})
    {
        const std::size_t n = corr.size();
        const std::uint64_t count = detail::checked_count(n, p, opts);
        const std::uint64_t blocks = (count + detail::enumeration_block - 1) / detail::enumeration_block;

        struct BlockResult
        {
            std::uint64_t best_rank = 0, worst_rank = 0;
            double best = -1.0, worst = std::numeric_limits<double>::infinity();
        };
        std::vector<BlockResult> per_block(blocks);
        parallel_for(static_cast<std::size_t>(blocks), opts.threads, [&](std::size_t b)
                     {
            SinrEvaluator eval(corr);
            BlockResult &out = per_block[b];
            const std::uint64_t first = b * detail::enumeration_block;
            const std::uint64_t last = std::min(count, first + detail::enumeration_block);
            detail::for_each_combination(n, p, first, last, [&](std::uint64_t r, const std::vector<std::size_t> &c)
                                         {
                const double v = eval.sinr_linear(c);
                if (r == first || detail::sinr_better(v, out.best)) { out.best = v; out.best_rank = r; }
                if (r == first || detail::sinr_worse(v, out.worst)) { out.worst = v; out.worst_rank = r; } }); });

        BlockResult total = per_block[0];
        for (std::size_t b = 1; b < per_block.size(); ++b)
        {
            if (detail::sinr_better(per_block[b].best, total.best))
            {
                total.best = per_block[b].best;
                total.best_rank = per_block[b].best_rank;
            }
            if (detail::sinr_worse(per_block[b].worst, total.worst))
            {
                total.worst = per_block[b].worst;
                total.worst_rank = per_block[b].worst_rank;
            }
        }

        auto make = [&](std::uint64_t rank, double sinr)
        {
            const auto idx = unrank_combination(n, p, rank);
            return RankedConfiguration{SelectionVector::from_indices(n, idx), SinrValue::from_linear(sinr), std::nullopt, rank};
        };
        return {make(total.best_rank, total.best), make(total.worst_rank, total.worst), count};
    }

    // Globally MaxSINR configuration; ties go to the lowest rank.
    inline RankedConfiguration enumerate_best(const ArrayGeometry &geom, const Scenario &scn, std::size_t p, const EnumerateOptions &opts = {})
    {
        return enumerate_extremes(correlation_matrices(geom, scn), p, opts).best;
    }

    // All C(N,P) configurations. Sorted ascending by Omega (ties by rank) when
    // with_objective is set, otherwise descending by SINR (ties by rank).
    inline std::vector<RankedConfiguration> enumerate_all_ranked(const ArrayGeometry &geom, const Scenario &scn, std::size_t p,
                                                                 bool with_objective, const EnumerateOptions &opts = {},
                                                                 std::size_t dft_length = 0)
    {
        const std::size_t n = geom.n_grid;
        const std::uint64_t count = detail::checked_count(n, p, opts);
        const CorrelationSet corr = correlation_matrices(geom, scn);
        const std::size_t k = dft_length == 0 ? default_dft_length(n) : dft_length;

        std::vector<RankedConfiguration> all(static_cast<std::size_t>(count));
        const std::uint64_t blocks = (count + detail::enumeration_block - 1) / detail::enumeration_block;
        parallel_for(static_cast<std::size_t>(blocks), opts.threads, [&](std::size_t b)
                     {
            SinrEvaluator eval(corr);
            std::optional<OmegaEvaluator> omega_eval;
            if (with_objective)
                omega_eval.emplace(geom, scn, k);
            const std::uint64_t first = b * detail::enumeration_block;
            const std::uint64_t last = std::min(count, first + detail::enumeration_block);
            detail::for_each_combination(n, p, first, last, [&](std::uint64_t r, const std::vector<std::size_t> &c)
                                         {
                auto &slot = all[static_cast<std::size_t>(r)];
                slot.selection = SelectionVector::from_indices(n, c);
                slot.sinr = SinrValue::from_linear(eval.sinr_linear(c));
                slot.rank_id = r;
                if (omega_eval)
                    slot.omega = omega_eval->omega(slot.selection.mask()); }); });

        if (with_objective)
            std::stable_sort(all.begin(), all.end(), [](const auto &a, const auto &b)
                             { return *a.omega < *b.omega; });
        else
            std::stable_sort(all.begin(), all.end(), [](const auto &a, const auto &b)
                             { return a.sinr.linear > b.sinr.linear; });
        return all;
    }

    // CSV: rank_id, mask_bits, sinr_db, omega ("nan" when not computed).
    inline void write_ranked_csv(std::ostream &os, const std::vector<RankedConfiguration> &list)
    {
        os << "rank_id,mask_bits,sinr_db,omega\n";
        os.precision(17);
        for (const auto &r : list)
        {
            os << r.rank_id << ',' << r.selection.to_bits() << ',' << r.sinr.db << ',';
            if (r.omega)
                os << *r.omega;
            else
                os << "nan";
            os << '\n';
        }
    }
}

#endif
