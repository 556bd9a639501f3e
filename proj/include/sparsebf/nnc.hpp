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

#ifndef SPARSEBF_NNC_HPP
#define SPARSEBF_NNC_HPP

#include "mlp.hpp"

namespace sparsebf
{
    enum class NncMetric
    {
        mse,
        mae
    };

    // Nearest-neighbour-correlation lookup table: returns the stored label of the
    // closest training feature vector. Read-only after construction.
    class NncIndex
    {
    public:
        NncIndex(const std::vector<LabeledExample> &examples, NncMetric metric = NncMetric::mse) : metric_(metric)
        {
            if (examples.empty())
                throw invalid_argument("NncIndex: empty training set");
            const auto dim = examples.front().features.values.size();
            features_.resize(dim, static_cast<Eigen::Index>(examples.size()));
            labels_.reserve(examples.size());
            for (std::size_t i = 0; i < examples.size(); ++i)
            {
                const auto &f = examples[i].features.values;
                if (f.size() != dim)
                    throw invalid_argument("NncIndex: inconsistent feature dimension");
                if (!f.allFinite())
                    throw invalid_argument("NncIndex: non-finite feature row");
                features_.col(static_cast<Eigen::Index>(i)) = f;
                labels_.push_back(examples[i].label);
            }
        }

        std::size_t size() const noexcept { return labels_.size(); }
        NncMetric metric() const noexcept { return metric_; }
        const SelectionVector &label(std::size_t i) const { return labels_.at(i); }

        double distance(std::size_t i, const FeatureVector &q) const
        {
            const auto diff = features_.col(static_cast<Eigen::Index>(i)) - q.values;
            const auto dim = static_cast<double>(q.values.size());
            return metric_ == NncMetric::mse ? diff.squaredNorm() / dim : diff.cwiseAbs().sum() / dim;
        }

        // Exhaustive scan; ties go to the lowest stored id.
        std::size_t nearest(const FeatureVector &q) const
        {
            if (q.values.size() != features_.rows())
                throw invalid_argument("NncIndex: query dimension mismatch");
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < labels_.size(); ++i)
            {
                const double d = distance(i, q);
                if (d < best_d)
                {
                    best_d = d;
                    best = i;
                }
            }
            return best;
        }

    private:
        NncMetric metric_;
        RMatrix features_; // one stored example per column
        std::vector<SelectionVector> labels_;
    };

    inline SelectionVector nnc_predict(const NncIndex &index, const FeatureVector &query)
    {
        return index.label(index.nearest(query));
    }
}

#endif
