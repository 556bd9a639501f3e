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

#include <sparsebf/sparsebf.hpp>

#include <gtest/gtest.h>

using namespace sparsebf;

namespace
{
    std::vector<LabeledExample> random_examples(std::size_t count, std::size_t dim, unsigned seed)
    {
        std::srand(seed);
        std::vector<LabeledExample> out;
        for (std::size_t i = 0; i < count; ++i)
        {
            LabeledExample ex;
            ex.features.values = RVector::Random(static_cast<Eigen::Index>(dim));
            std::vector<std::size_t> idx{i % 4, 4 + i % 3};
            ex.label = SelectionVector::from_indices(8, idx);
            ex.scenario_id = i;
            out.push_back(ex);
        }
        return out;
    }
}

TEST(Nnc, ExactQueryReturnsStoredLabel)
{
    const auto data = random_examples(50, 15, 1);
    const NncIndex index(data);
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        EXPECT_EQ(index.nearest(data[i].features), i);
        EXPECT_EQ(nnc_predict(index, data[i].features), data[i].label);
    }
}

TEST(Nnc, SingleEntryAlwaysWins)
{
    const auto data = random_examples(1, 15, 2);
    const NncIndex index(data, NncMetric::mae);
    const auto queries = random_examples(10, 15, 3);
    for (const auto &q : queries)
        EXPECT_EQ(nnc_predict(index, q.features), data[0].label);
}

TEST(Nnc, ExhaustiveRescan)
{
    const auto data = random_examples(80, 7, 4);
    const auto queries = random_examples(40, 7, 5);
    for (auto metric : {NncMetric::mse, NncMetric::mae})
    {
        const NncIndex index(data, metric);
        for (const auto &q : queries)
        {
            const auto best = index.nearest(q.features);
            for (std::size_t i = 0; i < index.size(); ++i)
            {
                const RVector diff = data[i].features.values - q.features.values;
                const double d = metric == NncMetric::mse ? diff.squaredNorm() / 7.0 : diff.cwiseAbs().sum() / 7.0;
                EXPECT_LE(index.distance(best, q.features), d);
                if (i < best)
                    EXPECT_LT(index.distance(best, q.features), d);
            }
        }
    }
}

TEST(Nnc, TiesGoToLowestId)
{
    auto data = random_examples(6, 5, 6);
    data[4].features = data[1].features;
    const NncIndex index(data);
    EXPECT_EQ(index.nearest(data[4].features), 1u);
}

TEST(Nnc, Errors)
{
    EXPECT_THROW(NncIndex({}), invalid_argument);
    const NncIndex index(random_examples(3, 5, 7));
    EXPECT_THROW(index.nearest(FeatureVector{RVector::Zero(4)}), invalid_argument);
}
