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

// Multilayer perceptron mapping full-aperture correlation lags to a sensor
// selection. Input layer 2N-1 (real parts of lags 0..N-1, imaginary parts of
// lags 1..N-1), ReLU hidden layers, linear output of size N trained with MSE
// against the 0/1 selection mask; the P largest outputs are the selection.

#ifndef SPARSEBF_MLP_HPP
#define SPARSEBF_MLP_HPP

#include "array_scene.hpp"
#include "selection.hpp"
#include "snapshots.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sparsebf
{
    struct FeatureVector
    {
        RVector values;

        std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
    };

    // [re r(0), re r(1), ..., re r(N-1), im r(1), ..., im r(N-1)]
    inline FeatureVector extract_features(const CMatrix &r)
    {
        const CVector lags = lag_vector(r);
        const auto n = lags.size();
        FeatureVector f{RVector(2 * n - 1)};
        for (Eigen::Index k = 0; k < n; ++k)
            f.values(k) = lags(k).real();
        for (Eigen::Index k = 1; k < n; ++k)
            f.values(n + k - 1) = lags(k).imag();
        return f;
    }

    struct LabeledExample
    {
        FeatureVector features;
        SelectionVector label;
        std::uint64_t scenario_id = 0;
        double look_doa_deg = 0.0;
        std::size_t n_interferers = 0; // stratum for the validation split; 0 if unknown
    };

    struct MlpModel
    {
        std::vector<std::size_t> layer_sizes; // input, hidden..., output
        std::vector<RMatrix> weights;         // layer l: (sizes[l+1] x sizes[l])
        std::vector<RVector> biases;
        RVector input_mean;  // features are standardized as (x - mean) / scale
        RVector input_scale;

        double look_doa_deg = 0.0;
        std::size_t n_grid = 0;
        std::size_t cardinality = 0;
        std::uint64_t config_hash = 0;
        bool trained = false;

        std::size_t n_layers() const noexcept { return weights.size(); }
        std::size_t input_size() const { return layer_sizes.front(); }
        std::size_t output_size() const { return layer_sizes.back(); }

        std::size_t parameter_count() const
        {
            std::size_t c = 0;
            for (std::size_t l = 0; l < weights.size(); ++l)
                c += static_cast<std::size_t>(weights[l].size() + biases[l].size());
            return c;
        }

        void check_dimensions() const
        {
            if (layer_sizes.size() < 2 || weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
                throw invalid_argument("MlpModel: inconsistent layer count");
            for (std::size_t l = 0; l < weights.size(); ++l)
            {
                if (static_cast<std::size_t>(weights[l].rows()) != layer_sizes[l + 1] ||
                    static_cast<std::size_t>(weights[l].cols()) != layer_sizes[l] ||
                    static_cast<std::size_t>(biases[l].size()) != layer_sizes[l + 1])
                    throw invalid_argument("MlpModel: layer " + std::to_string(l) + " dimensions do not chain");
            }
            if (static_cast<std::size_t>(input_mean.size()) != input_size() ||
                static_cast<std::size_t>(input_scale.size()) != input_size())
                throw invalid_argument("MlpModel: input standardization size mismatch");
        }
    };

    // [2N-1, 450, 250, 80, N]
    inline std::vector<std::size_t> default_layer_sizes(std::size_t n, const std::vector<std::size_t> &hidden = {450, 250, 80})
    {
        std::vector<std::size_t> sizes{2 * n - 1};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(n);
        return sizes;
    }

    // Xavier-uniform weights U(-a, a), a = sqrt(6 / (fan_in + fan_out)); zero biases.
    inline MlpModel make_mlp(const std::vector<std::size_t> &sizes, std::uint64_t seed)
    {
        if (sizes.size() < 2)
            throw invalid_argument("make_mlp: need at least input and output layers");
        MlpModel m;
        m.layer_sizes = sizes;
        auto rng = make_engine(seed, 0x71a);
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        {
            const auto in = static_cast<Eigen::Index>(sizes[l]);
            const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
            const double a = std::sqrt(6.0 / static_cast<double>(in + out));
            RMatrix w(out, in);
            for (Eigen::Index i = 0; i < out; ++i)
                for (Eigen::Index j = 0; j < in; ++j)
                    w(i, j) = uniform_real(rng, -a, a);
            m.weights.push_back(std::move(w));
            m.biases.push_back(RVector::Zero(out));
        }
        m.input_mean = RVector::Zero(static_cast<Eigen::Index>(sizes.front()));
        m.input_scale = RVector::Ones(static_cast<Eigen::Index>(sizes.front()));
        return m;
    }

    // ----- Forward / backward ------------------------------------------------

    enum class Mode
    {
        train,
        infer
    };

    // One mask per hidden layer; entries are 0 or 1/keep (inverted dropout).
    struct DropoutMasks
    {
        std::vector<RMatrix> masks;
    };

    inline DropoutMasks sample_dropout(const MlpModel &m, Eigen::Index batch, double keep, std::mt19937_64 &rng)
    {
        DropoutMasks d;
        for (std::size_t l = 0; l + 1 < m.n_layers(); ++l)
        {
            RMatrix mask(static_cast<Eigen::Index>(m.layer_sizes[l + 1]), batch);
            for (Eigen::Index j = 0; j < mask.cols(); ++j)
                for (Eigen::Index i = 0; i < mask.rows(); ++i)
                    mask(i, j) = uniform_real(rng, 0.0, 1.0) < keep ? 1.0 / keep : 0.0;
            d.masks.push_back(std::move(mask));
        }
        return d;
    }

    // Activations of a minibatch (one example per column).
    struct ForwardCache
    {
        std::vector<RMatrix> activations;  // [0] = standardized input, then each post-activation
        std::vector<RMatrix> preactivations;
        const DropoutMasks *dropout = nullptr;

        const RMatrix &output() const { return activations.back(); }
    };

    inline RMatrix standardize(const MlpModel &m, const RMatrix &raw)
    {
        return ((raw.colwise() - m.input_mean).array().colwise() / m.input_scale.array()).matrix();
    }

    inline ForwardCache forward_batch(const MlpModel &m, const RMatrix &raw_inputs, const DropoutMasks *dropout = nullptr)
    {
        if (static_cast<std::size_t>(raw_inputs.rows()) != m.input_size())
            throw invalid_argument("forward: feature dimension " + std::to_string(raw_inputs.rows()) +
                                   " does not match model input " + std::to_string(m.input_size()));
        ForwardCache c;
        c.dropout = dropout;
        c.activations.reserve(m.n_layers() + 1);
        c.preactivations.reserve(m.n_layers());
        c.activations.push_back(standardize(m, raw_inputs));
        for (std::size_t l = 0; l < m.n_layers(); ++l)
        {
            RMatrix z = m.weights[l] * c.activations.back();
            z.colwise() += m.biases[l];
            const bool hidden = l + 1 < m.n_layers();
            RMatrix a = hidden ? RMatrix(z.cwiseMax(0.0)) : z;
            if (hidden && dropout)
                a.array() *= dropout->masks.at(l).array();
            c.preactivations.push_back(std::move(z));
            c.activations.push_back(std::move(a));
        }
        return c;
    }

    // Scores for one feature vector. Train mode draws inverted-dropout masks
    // from `seed`; infer mode is deterministic and ignores the seed.
    inline RVector forward(const MlpModel &m, const FeatureVector &x, Mode mode, std::uint64_t seed = 0, double keep = 0.9)
    {
        if (mode == Mode::train && keep < 1.0)
        {
            auto rng = make_engine(seed, 0xd120);
            const DropoutMasks d = sample_dropout(m, 1, keep, rng);
            return forward_batch(m, x.values, &d).output().col(0);
        }
        return forward_batch(m, x.values).output().col(0);
    }

    struct Gradients
    {
        std::vector<RMatrix> weights;
        std::vector<RVector> biases;
    };

    // Backpropagates d(loss)/d(output) through a cached forward pass.
    inline Gradients backward(const MlpModel &m, const ForwardCache &c, const RMatrix &d_output)
    {
        const std::size_t layers = m.n_layers();
        Gradients g;
        g.weights.resize(layers);
        g.biases.resize(layers);
        RMatrix delta = d_output;
        for (std::size_t l = layers; l-- > 0;)
        {
            g.weights[l].noalias() = delta * c.activations[l].transpose();
            g.biases[l] = delta.rowwise().sum();
            if (l == 0)
                break;
            RMatrix back = m.weights[l].transpose() * delta;
            // Through dropout of hidden layer l-1 (stored in activations[l]) and its ReLU.
            if (c.dropout)
                back.array() *= c.dropout->masks.at(l - 1).array();
            back.array() *= (c.preactivations[l - 1].array() > 0.0).cast<double>();
            delta = std::move(back);
        }
        return g;
    }

    // Mean over all batch entries and outputs of (y - t)^2.
    inline double mse_loss(const RMatrix &outputs, const RMatrix &targets)
    {
        return (outputs - targets).squaredNorm() / static_cast<double>(outputs.size());
    }

    inline RMatrix mse_gradient(const RMatrix &outputs, const RMatrix &targets)
    {
        return 2.0 * (outputs - targets) / static_cast<double>(outputs.size());
    }

    // ----- ADAM --------------------------------------------------------------

    class AdamOptimizer
    {
    public:
        explicit AdamOptimizer(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
            : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

        std::uint64_t steps() const noexcept { return t_; }

        // One update over parameter blocks; block shapes are fixed on first use.
        void step(const std::vector<std::span<double>> &params, const std::vector<std::span<const double>> &grads)
        {
            if (params.size() != grads.size())
                throw invalid_argument("AdamOptimizer: parameter/gradient block count mismatch");
            if (m_.empty())
            {
                for (const auto &p : params)
                {
                    m_.emplace_back(p.size(), 0.0);
                    v_.emplace_back(p.size(), 0.0);
                }
            }
            if (m_.size() != params.size())
                throw invalid_argument("AdamOptimizer: parameter blocks changed between steps");
            ++t_;
            const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
            const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
            for (std::size_t b = 0; b < params.size(); ++b)
            {
                auto &m = m_[b];
                auto &v = v_[b];
                if (params[b].size() != m.size() || grads[b].size() != m.size())
                    throw invalid_argument("AdamOptimizer: block size mismatch");
                for (std::size_t i = 0; i < m.size(); ++i)
                {
                    const double g = grads[b][i];
                    m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
                    v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
                    const double mhat = m[i] / c1;
                    const double vhat = v[i] / c2;
                    params[b][i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
                }
            }
        }

    private:
        double lr_, beta1_, beta2_, eps_;
        std::uint64_t t_ = 0;
        std::vector<std::vector<double>> m_, v_;
    };

    namespace detail
    {
        inline std::vector<std::span<double>> parameter_blocks(MlpModel &m)
        {
            std::vector<std::span<double>> blocks;
            for (std::size_t l = 0; l < m.n_layers(); ++l)
            {
                blocks.emplace_back(m.weights[l].data(), static_cast<std::size_t>(m.weights[l].size()));
                blocks.emplace_back(m.biases[l].data(), static_cast<std::size_t>(m.biases[l].size()));
            }
            return blocks;
        }

        inline std::vector<std::span<const double>> gradient_blocks(const Gradients &g)
        {
            std::vector<std::span<const double>> blocks;
            for (std::size_t l = 0; l < g.weights.size(); ++l)
            {
                blocks.emplace_back(g.weights[l].data(), static_cast<std::size_t>(g.weights[l].size()));
                blocks.emplace_back(g.biases[l].data(), static_cast<std::size_t>(g.biases[l].size()));
            }
            return blocks;
        }
    }

    // ----- Training ----------------------------------------------------------

    struct TrainConfig
    {
        double learning_rate = 0.001;
        double dropout_keep = 0.9;
        std::size_t batch_size = 128;
        std::size_t epochs = 200;
        std::size_t patience = 20;          // epochs without validation improvement before stopping
        double validation_fraction = 0.1;
        std::vector<std::size_t> hidden = {450, 250, 80};
        bool standardize_inputs = true;
        std::uint64_t rng_seed = 0;
        // Candidate grids for train_tuned(); empty means the single value above.
        std::vector<std::size_t> tune_batch_sizes;
        std::vector<double> tune_learning_rates;

        void validate() const
        {
            if (!(dropout_keep > 0.0 && dropout_keep <= 1.0))
                throw invalid_argument("TrainConfig: dropout keep probability must be in (0, 1]");
            if (!(learning_rate > 0.0))
                throw invalid_argument("TrainConfig: learning rate must be positive");
            if (batch_size == 0 || epochs == 0)
                throw invalid_argument("TrainConfig: batch size and epochs must be positive");
            if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
                throw invalid_argument("TrainConfig: validation fraction must be in [0, 1)");
            for (auto b : tune_batch_sizes)
                if (b == 0)
                    throw invalid_argument("TrainConfig: tuning batch sizes must be positive");
            for (double lr : tune_learning_rates)
                if (!(lr > 0.0))
                    throw invalid_argument("TrainConfig: tuning learning rates must be positive");
        }

        nlohmann::json to_json() const
        {
            return {{"learning_rate", learning_rate}, {"dropout_keep", dropout_keep}, {"batch_size", batch_size},
                    {"epochs", epochs}, {"patience", patience}, {"validation_fraction", validation_fraction},
                    {"hidden", hidden}, {"standardize_inputs", standardize_inputs}, {"rng_seed", rng_seed},
                    {"tune_batch_sizes", tune_batch_sizes}, {"tune_learning_rates", tune_learning_rates}};
        }

        static TrainConfig from_json(const nlohmann::json &j)
        {
            TrainConfig c;
            c.learning_rate = j.value("learning_rate", c.learning_rate);
            c.dropout_keep = j.value("dropout_keep", c.dropout_keep);
            c.batch_size = j.value("batch_size", c.batch_size);
            c.epochs = j.value("epochs", c.epochs);
            c.patience = j.value("patience", c.patience);
            c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
            c.hidden = j.value("hidden", c.hidden);
            c.standardize_inputs = j.value("standardize_inputs", c.standardize_inputs);
            c.rng_seed = j.value("rng_seed", c.rng_seed);
            c.tune_batch_sizes = j.value("tune_batch_sizes", c.tune_batch_sizes);
            c.tune_learning_rates = j.value("tune_learning_rates", c.tune_learning_rates);
            c.validate();
            return c;
        }
    };

    struct TrainReport
    {
        std::vector<double> train_loss;      // per epoch, infer mode
        std::vector<double> validation_loss; // per epoch (empty without a validation split)
        std::size_t best_epoch = 0;
        std::size_t train_size = 0;
        std::size_t validation_size = 0;
    };

    struct TrainedModel
    {
        MlpModel model;
        TrainReport report;
    };

    namespace detail
    {
        inline void stack_examples(const std::vector<LabeledExample> &data, std::span<const std::size_t> idx, RMatrix &x, RMatrix &t)
        {
            const auto in = data.front().features.values.size();
            const auto out = static_cast<Eigen::Index>(data.front().label.size());
            x.resize(in, static_cast<Eigen::Index>(idx.size()));
            t.resize(out, static_cast<Eigen::Index>(idx.size()));
            for (std::size_t j = 0; j < idx.size(); ++j)
            {
                const auto &ex = data[idx[j]];
                x.col(static_cast<Eigen::Index>(j)) = ex.features.values;
                for (Eigen::Index k = 0; k < out; ++k)
                    t(k, static_cast<Eigen::Index>(j)) = ex.label.active(static_cast<std::size_t>(k)) ? 1.0 : 0.0;
            }
        }

        template <typename T>
        void shuffle(std::vector<T> &v, std::mt19937_64 &rng)
        {
            for (std::size_t i = v.size(); i > 1; --i)
                std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i - 1)))]);
        }

        // Validation split stratified by interferer count.
        inline void split_indices(const std::vector<LabeledExample> &data, double fraction, std::uint64_t seed,
                                  std::vector<std::size_t> &train, std::vector<std::size_t> &val)
        {
            std::map<std::size_t, std::vector<std::size_t>> strata;
            for (std::size_t i = 0; i < data.size(); ++i)
                strata[data[i].n_interferers].push_back(i);
            auto rng = make_engine(seed, 0x5b117);
            for (auto &[key, members] : strata)
            {
                shuffle(members, rng);
                const auto n_val = members.size() >= 2
                                       ? static_cast<std::size_t>(std::round(fraction * static_cast<double>(members.size())))
                                       : std::size_t{0};
                val.insert(val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
                train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val), members.end());
            }
            std::sort(train.begin(), train.end());
            std::sort(val.begin(), val.end());
        }

        inline double dataset_loss(const MlpModel &m, const RMatrix &x, const RMatrix &t)
        {
            return mse_loss(forward_batch(m, x).output(), t);
        }
    }

    // Minibatch ADAM on MSE with inverted dropout on hidden layers and early
    // stopping on validation loss; the parameters of the best validation epoch
    // are returned.
    inline TrainedModel train(const std::vector<LabeledExample> &dataset, const TrainConfig &cfg)
    {
        cfg.validate();
        if (dataset.empty())
            throw invalid_argument("train: empty dataset");
        const std::size_t in = dataset.front().features.size();
        const std::size_t n = dataset.front().label.size();
        const std::size_t p = dataset.front().label.cardinality();
        for (const auto &ex : dataset)
            if (ex.features.size() != in || ex.label.size() != n || ex.label.cardinality() != p)
                throw invalid_argument("train: dataset is not homogeneous in N and P");
        if (in != 2 * n - 1)
            throw invalid_argument("train: feature length must be 2N-1");

        std::vector<std::size_t> train_idx, val_idx;
        detail::split_indices(dataset, cfg.validation_fraction, cfg.rng_seed, train_idx, val_idx);

        TrainedModel out;
        MlpModel &m = out.model;
        m = make_mlp(default_layer_sizes(n, cfg.hidden), cfg.rng_seed);
        m.n_grid = n;
        m.cardinality = p;
        m.look_doa_deg = dataset.front().look_doa_deg;
        m.config_hash = fnv1a64(cfg.to_json().dump());

        RMatrix x_train, t_train, x_val, t_val;
        detail::stack_examples(dataset, train_idx, x_train, t_train);
        if (!val_idx.empty())
            detail::stack_examples(dataset, val_idx, x_val, t_val);

        if (cfg.standardize_inputs)
        {
            m.input_mean = x_train.rowwise().mean();
            const RMatrix centered = x_train.colwise() - m.input_mean;
            RVector sd = (centered.array().square().rowwise().sum() / static_cast<double>(x_train.cols())).sqrt();
            for (Eigen::Index i = 0; i < sd.size(); ++i)
                if (!(sd(i) > 1e-12 * (1.0 + std::abs(m.input_mean(i)))))
                    sd(i) = 1.0;
            m.input_scale = sd;
        }

        out.report.train_size = train_idx.size();
        out.report.validation_size = val_idx.size();

        AdamOptimizer adam(cfg.learning_rate);
        MlpModel best = m;
        double best_loss = std::numeric_limits<double>::infinity();
        std::size_t since_best = 0;

        std::vector<std::size_t> order(train_idx.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        RMatrix xb, tb;
        for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch)
        {
            auto rng = make_engine(cfg.rng_seed, 0xe90c0000ull + epoch);
            detail::shuffle(order, rng);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size)
            {
                const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
                const auto bsz = static_cast<Eigen::Index>(stop - start);
                xb.resize(x_train.rows(), bsz);
                tb.resize(t_train.rows(), bsz);
                for (Eigen::Index j = 0; j < bsz; ++j)
                {
                    xb.col(j) = x_train.col(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(j)]));
                    tb.col(j) = t_train.col(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(j)]));
                }
                std::optional<DropoutMasks> masks;
                if (cfg.dropout_keep < 1.0)
                    masks = sample_dropout(m, bsz, cfg.dropout_keep, rng);
                const ForwardCache cache = forward_batch(m, xb, masks ? &*masks : nullptr);
                const Gradients g = backward(m, cache, mse_gradient(cache.output(), tb));
                adam.step(detail::parameter_blocks(m), detail::gradient_blocks(g));
            }

            const double train_loss = detail::dataset_loss(m, x_train, t_train);
            if (!std::isfinite(train_loss))
                throw divergence_error("train: loss became non-finite at epoch " + std::to_string(epoch));
            out.report.train_loss.push_back(train_loss);
            double monitor = train_loss;
            if (!val_idx.empty())
            {
                monitor = detail::dataset_loss(m, x_val, t_val);
                out.report.validation_loss.push_back(monitor);
            }
            if (monitor < best_loss)
            {
                best_loss = monitor;
                best = m;
                out.report.best_epoch = epoch;
                since_best = 0;
            }
            else if (++since_best >= cfg.patience && cfg.patience > 0)
                break;
        }
        m = std::move(best);
        m.trained = true;
        return out;
    }

    struct TuningTrial
    {
        std::size_t batch_size = 0;
        double learning_rate = 0.0;
        double validation_loss = 0.0; // best over epochs
        std::size_t best_epoch = 0;
    };

    struct TunedModel
    {
        TrainedModel trained;
        TrainConfig chosen; // grids cleared, winning values filled in
        std::vector<TuningTrial> trials;
    };

    // Trains one model per (batch size, learning rate) pair and keeps the one
    // with the lowest validation loss; the test set is never consulted. Ties go
    // to the earlier pair, batch sizes outermost.
    inline TunedModel train_tuned(const std::vector<LabeledExample> &dataset, const TrainConfig &cfg)
    {
        cfg.validate();
        TrainConfig base = cfg;
        base.tune_batch_sizes.clear();
        base.tune_learning_rates.clear();
        const auto batches = cfg.tune_batch_sizes.empty() ? std::vector<std::size_t>{cfg.batch_size} : cfg.tune_batch_sizes;
        const auto rates = cfg.tune_learning_rates.empty() ? std::vector<double>{cfg.learning_rate} : cfg.tune_learning_rates;
        if (batches.size() * rates.size() > 1 && cfg.validation_fraction == 0.0)
            throw invalid_argument("train_tuned: a validation split is needed to compare candidates");

        std::optional<TunedModel> best;
        double best_v = 0.0;
        std::vector<TuningTrial> trials;
        for (auto b : batches)
            for (double lr : rates)
            {
                TrainConfig c = base;
                c.batch_size = b;
                c.learning_rate = lr;
                TrainedModel res = train(dataset, c);
                const double v = res.report.validation_loss.empty()
                                     ? res.report.train_loss[res.report.best_epoch]
                                     : *std::min_element(res.report.validation_loss.begin(), res.report.validation_loss.end());
                trials.push_back({b, lr, v, res.report.best_epoch});
                if (!best || v < best_v)
                {
                    best = TunedModel{std::move(res), c, {}};
                    best_v = v;
                }
            }
        best->trials = std::move(trials);
        return std::move(*best);
    }

    // Ones at the P largest scores; equal scores go to the lower index.
    inline SelectionVector predict_selection(const RVector &scores, std::size_t p)
    {
        const auto n = static_cast<std::size_t>(scores.size());
        if (p < 1 || p > n)
            throw invalid_argument("predict_selection: invalid P");
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b)); });
        order.resize(p);
        return SelectionVector::from_indices(n, order);
    }

    inline SelectionVector predict_selection(const MlpModel &m, const FeatureVector &x, std::size_t p)
    {
        return predict_selection(forward(m, x, Mode::infer), p);
    }

    // ----- Model files -------------------------------------------------------
    // Binary layout (little-endian):
    //   "SBMP"  uint32 version (=1)  uint32 N  uint32 P  float64 look_doa_deg
    //   uint32 n_sizes, then n_sizes x uint32 layer sizes
    //   per layer: weights row-major (out x in) float64, then biases float64
    //   input_mean (in) float64, input_scale (in) float64

    inline constexpr std::array<char, 4> model_magic{'S', 'B', 'M', 'P'};
    inline constexpr std::uint32_t model_version = 1;

    inline void write_model(std::ostream &os, const MlpModel &m)
    {
        m.check_dimensions();
        os.write(model_magic.data(), 4);
        detail::write_le<std::uint32_t>(os, model_version);
        detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.n_grid));
        detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.cardinality));
        detail::write_le<double>(os, m.look_doa_deg);
        detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.layer_sizes.size()));
        for (auto s : m.layer_sizes)
            detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s));
        for (std::size_t l = 0; l < m.n_layers(); ++l)
        {
            for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i)
                for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j)
                    detail::write_le<double>(os, m.weights[l](i, j));
            for (Eigen::Index i = 0; i < m.biases[l].size(); ++i)
                detail::write_le<double>(os, m.biases[l](i));
        }
        for (Eigen::Index i = 0; i < m.input_mean.size(); ++i)
            detail::write_le<double>(os, m.input_mean(i));
        for (Eigen::Index i = 0; i < m.input_scale.size(); ++i)
            detail::write_le<double>(os, m.input_scale(i));
    }

    inline MlpModel read_model(std::istream &is)
    {
        std::array<char, 4> magic{};
        is.read(magic.data(), 4);
        if (!is || magic != model_magic)
            throw format_error("model file: bad magic");
        const auto version = detail::read_le<std::uint32_t>(is);
        if (version != model_version)
            throw format_error("model file: unsupported version " + std::to_string(version));
        MlpModel m;
        m.n_grid = detail::read_le<std::uint32_t>(is);
        m.cardinality = detail::read_le<std::uint32_t>(is);
        m.look_doa_deg = detail::read_le<double>(is);
        const auto n_sizes = detail::read_le<std::uint32_t>(is);
        if (n_sizes < 2 || n_sizes > 64)
            throw format_error("model file: implausible layer count");
        for (std::uint32_t i = 0; i < n_sizes; ++i)
            m.layer_sizes.push_back(detail::read_le<std::uint32_t>(is));
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l)
        {
            RMatrix w(static_cast<Eigen::Index>(m.layer_sizes[l + 1]), static_cast<Eigen::Index>(m.layer_sizes[l]));
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j)
                    w(i, j) = detail::read_le<double>(is);
            RVector b(w.rows());
            for (Eigen::Index i = 0; i < b.size(); ++i)
                b(i) = detail::read_le<double>(is);
            m.weights.push_back(std::move(w));
            m.biases.push_back(std::move(b));
        }
        const auto in = static_cast<Eigen::Index>(m.layer_sizes.front());
        m.input_mean.resize(in);
        m.input_scale.resize(in);
        for (Eigen::Index i = 0; i < in; ++i)
            m.input_mean(i) = detail::read_le<double>(is);
        for (Eigen::Index i = 0; i < in; ++i)
            m.input_scale(i) = detail::read_le<double>(is);
        m.check_dimensions();
        m.trained = true;
        for (const auto &w : m.weights)
            if (!w.allFinite())
                throw format_error("model file: non-finite weights");
        return m;
    }

    // Sidecar metadata document written next to the binary model.
    inline nlohmann::json model_metadata(const MlpModel &m, const TrainConfig &cfg, const TrainReport &rep)
    {
        return {{"format", "sparsebf-mlp"},
                {"version", model_version},
                {"n_grid", m.n_grid},
                {"cardinality", m.cardinality},
                {"look_doa_deg", m.look_doa_deg},
                {"layer_sizes", m.layer_sizes},
                {"config_hash", m.config_hash},
                {"train_config", cfg.to_json()},
                {"train_size", rep.train_size},
                {"validation_size", rep.validation_size},
                {"best_epoch", rep.best_epoch},
                {"train_loss", rep.train_loss},
                {"validation_loss", rep.validation_loss}};
    }

    // ----- Dataset CSV -------------------------------------------------------
    // scenario_id, look_doa_deg, f_0 .. f_{2N-2}, label_mask_bits

    inline void write_dataset_csv(std::ostream &os, const std::vector<LabeledExample> &data)
    {
        if (data.empty())
            throw invalid_argument("write_dataset_csv: empty dataset");
        const auto nf = data.front().features.size();
        os << "scenario_id,look_doa_deg";
        for (std::size_t i = 0; i < nf; ++i)
            os << ",f_" << i;
        os << ",label_mask_bits\n";
        os.precision(17);
        for (const auto &ex : data)
        {
            os << ex.scenario_id << ',' << ex.look_doa_deg;
            for (Eigen::Index i = 0; i < ex.features.values.size(); ++i)
                os << ',' << ex.features.values(i);
            os << ',' << ex.label.to_bits() << '\n';
        }
    }

    inline std::vector<LabeledExample> read_dataset_csv(std::istream &is)
    {
        std::string line;
        if (!std::getline(is, line))
            throw format_error("dataset CSV: missing header");
        std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        if (columns < 4 || line.rfind("scenario_id,look_doa_deg,f_0", 0) != 0)
            throw format_error("dataset CSV: unexpected header");
        const std::size_t nf = columns - 3;

        std::vector<LabeledExample> data;
        std::size_t line_no = 1;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            std::stringstream ss(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ','))
                cells.push_back(cell);
            if (cells.size() != columns)
                throw format_error("dataset CSV: wrong column count on line " + std::to_string(line_no));
            try
            {
                LabeledExample ex;
                ex.scenario_id = std::stoull(cells[0]);
                ex.look_doa_deg = std::stod(cells[1]);
                ex.features.values.resize(static_cast<Eigen::Index>(nf));
                for (std::size_t i = 0; i < nf; ++i)
                    ex.features.values(static_cast<Eigen::Index>(i)) = std::stod(cells[2 + i]);
                ex.label = SelectionVector::from_bits(cells.back());
                if (2 * ex.label.size() - 1 != nf)
                    throw format_error("dataset CSV: mask length inconsistent with feature count on line " + std::to_string(line_no));
                data.push_back(std::move(ex));
            }
            catch (const std::logic_error &)
            {
                throw format_error("dataset CSV: malformed number on line " + std::to_string(line_no));
            }
        }
        return data;
    }
}

#endif
