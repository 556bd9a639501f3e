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

#ifndef SPARSEBF_SELECTION_HPP
#define SPARSEBF_SELECTION_HPP

#include "common.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparsebf
{
    // Binary mask over the N grid points with exactly P active sensors.
    class SelectionVector
    {
    public:
        SelectionVector() = default;

        explicit SelectionVector(std::vector<std::uint8_t> mask) : mask_(std::move(mask))
        {
            for (auto &m : mask_)
                if (m > 1)
                    throw invalid_argument("SelectionVector: entries must be 0 or 1");
            cardinality_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
            if (mask_.empty() || cardinality_ == 0)
                throw invalid_argument("SelectionVector: at least one active sensor required");
        }

        static SelectionVector from_indices(std::size_t n, std::span<const std::size_t> active)
        {
            std::vector<std::uint8_t> mask(n, 0);
            for (auto i : active)
            {
                if (i >= n)
                    throw invalid_argument("SelectionVector: index out of range");
                if (mask[i])
                    throw invalid_argument("SelectionVector: duplicate index");
                mask[i] = 1;
            }
            return SelectionVector(std::move(mask));
        }

        // Parses "101100" style bit strings (index 0 first).
        static SelectionVector from_bits(std::string_view bits)
        {
            std::vector<std::uint8_t> mask;
            mask.reserve(bits.size());
            for (char c : bits)
            {
                if (c != '0' && c != '1')
                    throw format_error("SelectionVector: invalid mask character '" + std::string(1, c) + "'");
                mask.push_back(static_cast<std::uint8_t>(c - '0'));
            }
            return SelectionVector(std::move(mask));
        }

        static SelectionVector full(std::size_t n) { return SelectionVector(std::vector<std::uint8_t>(n, 1)); }

        std::size_t size() const noexcept { return mask_.size(); }
        std::size_t cardinality() const noexcept { return cardinality_; }
        bool active(std::size_t i) const { return mask_.at(i) != 0; }
        const std::vector<std::uint8_t> &mask() const noexcept { return mask_; }

        std::vector<std::size_t> indices() const
        {
            std::vector<std::size_t> idx;
            idx.reserve(cardinality_);
            for (std::size_t i = 0; i < mask_.size(); ++i)
                if (mask_[i])
                    idx.push_back(i);
            return idx;
        }

        std::string to_bits() const
        {
            std::string s;
            s.reserve(mask_.size());
            for (auto m : mask_)
                s.push_back(m ? '1' : '0');
            return s;
        }

        friend bool operator==(const SelectionVector &a, const SelectionVector &b) { return a.mask_ == b.mask_; }

    private:
        std::vector<std::uint8_t> mask_;
        std::size_t cardinality_ = 0;
    };

    // ----- Combinatorics -----------------------------------------------------
    // Configurations of equal cardinality are ordered lexicographically by their
    // sorted active-index lists: {0,1,2} < {0,1,3} < ... The rank in this order
    // is the stable configuration identifier used in files.

    // Saturates at UINT64_MAX instead of overflowing.
    inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
    {
        if (k > n)
            return 0;
        k = std::min(k, n - k);
        unsigned __int128 r = 1;
        for (std::uint64_t i = 1; i <= k; ++i)
        {
            r = r * (n - k + i) / i;
            if (r > std::numeric_limits<std::uint64_t>::max())
                return std::numeric_limits<std::uint64_t>::max();
        }
        return static_cast<std::uint64_t>(r);
    }

    inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank)
    {
        if (k == 0 || k > n)
            throw invalid_argument("unrank_combination: need 1 <= k <= n");
        if (rank >= binomial(n, k))
            throw invalid_argument("unrank_combination: rank out of range");
        std::vector<std::size_t> out;
        out.reserve(k);
        std::size_t next = 0;
        for (std::size_t slot = 0; slot < k; ++slot)
        {
            for (std::size_t c = next;; ++c)
            {
                // Number of combinations whose slot-th element is c.
                const std::uint64_t block = binomial(n - c - 1, k - slot - 1);
                if (rank < block)
                {
                    out.push_back(c);
                    next = c + 1;
                    break;
                }
                rank -= block;
            }
        }
        return out;
    }

    inline std::uint64_t rank_combination(std::size_t n, std::span<const std::size_t> sorted)
    {
        const std::size_t k = sorted.size();
        std::uint64_t rank = 0;
        std::size_t next = 0;
        for (std::size_t slot = 0; slot < k; ++slot)
        {
            for (std::size_t c = next; c < sorted[slot]; ++c)
                rank += binomial(n - c - 1, k - slot - 1);
            next = sorted[slot] + 1;
        }
        return rank;
    }

    inline std::uint64_t configuration_rank(const SelectionVector &z)
    {
        const auto idx = z.indices();
        return rank_combination(z.size(), idx);
    }

    // Advances a sorted index combination to its lexicographic successor.
    // Returns false after the last combination.
    inline bool next_combination(std::vector<std::size_t> &c, std::size_t n)
    {
        const std::size_t k = c.size();
        std::size_t i = k;
        while (i > 0)
        {
            --i;
            if (c[i] < n - k + i)
            {
                ++c[i];
                for (std::size_t j = i + 1; j < k; ++j)
                    c[j] = c[j - 1] + 1;
                return true;
            }
        }
        return false;
    }
}

#endif
