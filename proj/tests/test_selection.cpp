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

#include <sparsebf/selection.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <set>

using namespace sparsebf;

TEST(SelectionVector, Construction)
{
    const auto z = SelectionVector::from_bits("101100");
    EXPECT_EQ(z.size(), 6u);
    EXPECT_EQ(z.cardinality(), 3u);
    EXPECT_EQ(z.indices(), (std::vector<std::size_t>{0, 2, 3}));
    EXPECT_EQ(z.to_bits(), "101100");
    const std::vector<std::size_t> idx{0, 2, 3};
    EXPECT_EQ(SelectionVector::from_indices(6, idx), z);
    EXPECT_EQ(SelectionVector::full(4).to_bits(), "1111");
}

TEST(SelectionVector, Invalid)
{
    EXPECT_THROW(SelectionVector::from_bits("0000"), invalid_argument);
    EXPECT_THROW(SelectionVector::from_bits("10x1"), format_error);
    EXPECT_THROW(SelectionVector(std::vector<std::uint8_t>{1, 2}), invalid_argument);
    const std::vector<std::size_t> dup{1, 1};
    EXPECT_THROW(SelectionVector::from_indices(4, dup), invalid_argument);
    const std::vector<std::size_t> oob{4};
    EXPECT_THROW(SelectionVector::from_indices(4, oob), invalid_argument);
}

TEST(Combinatorics, Binomial)
{
    EXPECT_EQ(binomial(12, 6), 924u);
    EXPECT_EQ(binomial(16, 6), 8008u);
    EXPECT_EQ(binomial(24, 8), 735471u);
    EXPECT_EQ(binomial(5, 0), 1u);
    EXPECT_EQ(binomial(5, 7), 0u);
    EXPECT_EQ(binomial(62, 31), 465428353255261088u);
}

TEST(Combinatorics, RankUnrankRoundTripAndOrder)
{
    const std::size_t n = 9, k = 4;
    std::vector<std::size_t> c = unrank_combination(n, k, 0);
    EXPECT_EQ(c, (std::vector<std::size_t>{0, 1, 2, 3}));
    std::vector<std::size_t> prev;
    for (std::uint64_t r = 0; r < binomial(n, k); ++r)
    {
        const auto u = unrank_combination(n, k, r);
        EXPECT_EQ(u, c);
        EXPECT_EQ(rank_combination(n, u), r);
        if (!prev.empty())
            EXPECT_LT(prev, u);
        prev = u;
        const bool more = next_combination(c, n);
        EXPECT_EQ(more, r + 1 < binomial(n, k));
    }
}

TEST(Combinatorics, EnumeratesEverySubsetOnce)
{
    const std::size_t n = 10, k = 5;
    std::set<std::uint64_t> seen;
    auto c = unrank_combination(n, k, 0);
    do
    {
        std::uint64_t bits = 0;
        for (auto i : c)
            bits |= std::uint64_t{1} << i;
        EXPECT_TRUE(seen.insert(bits).second);
    } while (next_combination(c, n));
    std::size_t expected = 0;
    for (std::uint64_t b = 0; b < (1u << n); ++b)
        expected += std::popcount(b) == static_cast<int>(k);
    EXPECT_EQ(seen.size(), expected);
}

TEST(Combinatorics, ConfigurationRank)
{
    EXPECT_EQ(configuration_rank(SelectionVector::from_bits("111111000000")), 0u);
    EXPECT_EQ(configuration_rank(SelectionVector::from_bits("000000111111")), 923u);
}
