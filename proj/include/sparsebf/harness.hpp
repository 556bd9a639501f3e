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

// Experiment orchestration: training-set generation with enumerated or SBSA
// labels, baseline configurations, evaluation ensembles and the ascending-Omega
// diagnostic. Every method's configuration is re-scored with exact MaxSINR
// weights on the asymptotic matrices of the true scenario.

#ifndef SPARSEBF_HARNESS_HPP
#define SPARSEBF_HARNESS_HPP

#include "enumerate.hpp"
#include "mlp.hpp"
#include "nnc.hpp"
#include "sbsa.hpp"
#include "snapshots.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>

namespace sparsebf
{
    enum class LabelSource
    {
        enumerate,
        sbsa
    };

    inline std::string to_string(LabelSource s) { return s == LabelSource::enumerate ? "enumerate" : "sbsa"; }

    inline LabelSource label_source_from_string(const std::string &s)
    {
        if (s == "enumerate" || s == "en")
            return LabelSource::enumerate;
        if (s == "sbsa")
            return LabelSource::sbsa;
        throw format_error("unknown label source '" + s + "' (expected enumerate or sbsa)");
    }

    struct ExperimentConfig
    {
        ArrayGeometry geom{12, 0.5};
        std::size_t cardinality = 6;
        std::vector<double> look_doas_deg{15, 30, 45, 60, 75, 90};
        double snr_db = 0.0;
        double inr_db_min = 10.0;
        double inr_db_max = 20.0;
        double interferer_grid_min_deg = 10.0;
        double interferer_grid_max_deg = 170.0;
        double interferer_grid_step_deg = 1.0;
        std::size_t l_min = 1; // interferer count drawn uniformly from [l_min, l_max]
        std::size_t l_max = 4;
        double noise_power = 1.0;
        std::size_t n_train = 30000;
        std::size_t n_test = 900;
        std::size_t snapshots = 0; // 0 = exact correlations
        bool toeplitz_average = true;
        LabelSource label_source = LabelSource::enumerate;
        // Off-grid test interferers; the desired DOA is untouched unless
        // robust_look_perturbation is set.
        PerturbationSpec test_perturbation{0.25, false, true};
        bool robust_look_perturbation = false;
        double look_perturbation_variance_deg2 = 0.25;
        std::size_t random_draws = 100;
        std::uint64_t enumeration_budget = 10'000'000;
        SbsaConfig sbsa;
        TrainConfig train;
        std::uint64_t seed = 1;
        unsigned threads = 0;

        void validate() const
        {
            geom.validate();
            if (cardinality < 1 || cardinality > geom.n_grid)
                throw invalid_argument("config: need 1 <= P <= N");
            if (look_doas_deg.empty())
                throw invalid_argument("config: look_doas_deg must not be empty");
            for (double d : look_doas_deg)
                if (!(d > 0.0 && d < 180.0))
                    throw domain_error("config: look DOAs must lie inside (0, 180)");
            if (!(interferer_grid_min_deg > 0.0 && interferer_grid_max_deg < 180.0 &&
                  interferer_grid_min_deg <= interferer_grid_max_deg && interferer_grid_step_deg > 0.0))
                throw domain_error("config: interferer grid must lie inside (0, 180)");
            if (l_min > l_max)
                throw invalid_argument("config: l_min > l_max");
            if (!(inr_db_min <= inr_db_max))
                throw invalid_argument("config: inr_db_min > inr_db_max");
            if (n_train < 1 || n_test < 1)
                throw invalid_argument("config: n_train and n_test must be >= 1");
            if (!(noise_power > 0.0))
                throw invalid_argument("config: noise_power must be positive");
            if (random_draws < 1)
                throw invalid_argument("config: random_draws must be >= 1");
            test_perturbation.validate();
            if (!(look_perturbation_variance_deg2 >= 0.0))
                throw invalid_argument("config: look perturbation variance must be >= 0");
            train.validate();
        }

        std::vector<double> interferer_grid() const
        {
            std::vector<double> grid;
            const auto steps = static_cast<long>(std::floor((interferer_grid_max_deg - interferer_grid_min_deg) / interferer_grid_step_deg + 1e-9));
            for (long i = 0; i <= steps; ++i)
                grid.push_back(interferer_grid_min_deg + static_cast<double>(i) * interferer_grid_step_deg);
            return grid;
        }

        nlohmann::json to_json() const
        {
            return {{"n_grid", geom.n_grid},
                    {"spacing_wavelengths", geom.spacing_wavelengths},
                    {"cardinality", cardinality},
                    {"look_doas_deg", look_doas_deg},
                    {"snr_db", snr_db},
                    {"inr_db", {inr_db_min, inr_db_max}},
                    {"interferer_grid_deg", {interferer_grid_min_deg, interferer_grid_max_deg, interferer_grid_step_deg}},
                    {"interferer_count", {l_min, l_max}},
                    {"noise_power", noise_power},
                    {"n_train", n_train},
                    {"n_test", n_test},
                    {"snapshots", snapshots},
                    {"toeplitz_average", toeplitz_average},
                    {"label_source", to_string(label_source)},
                    {"test_perturbation_variance_deg2", test_perturbation.variance_deg2},
                    {"robust_look_perturbation", robust_look_perturbation},
                    {"look_perturbation_variance_deg2", look_perturbation_variance_deg2},
                    {"random_draws", random_draws},
                    {"enumeration_budget", enumeration_budget},
                    {"sbsa", {{"dft_length", sbsa.dft_length}, {"n_starts", sbsa.n_starts}, {"rng_seed", sbsa.rng_seed}}},
                    {"train", train.to_json()},
                    {"seed", seed},
                    {"threads", threads}};
        }

        static ExperimentConfig from_json(const nlohmann::json &j)
        {
            ExperimentConfig c;
            try
            {
                c.geom.n_grid = j.value("n_grid", c.geom.n_grid);
                c.geom.spacing_wavelengths = j.value("spacing_wavelengths", c.geom.spacing_wavelengths);
                c.cardinality = j.value("cardinality", c.cardinality);
                c.look_doas_deg = j.value("look_doas_deg", c.look_doas_deg);
                c.snr_db = j.value("snr_db", c.snr_db);
                if (j.contains("inr_db"))
                {
                    const auto r = j.at("inr_db").get<std::vector<double>>();
                    if (r.size() != 2)
                        throw format_error("config: inr_db must be [min, max]");
                    c.inr_db_min = r[0];
                    c.inr_db_max = r[1];
                }
                if (j.contains("interferer_grid_deg"))
                {
                    const auto g = j.at("interferer_grid_deg").get<std::vector<double>>();
                    if (g.size() != 3)
                        throw format_error("config: interferer_grid_deg must be [min, max, step]");
                    c.interferer_grid_min_deg = g[0];
                    c.interferer_grid_max_deg = g[1];
                    c.interferer_grid_step_deg = g[2];
                }
                if (j.contains("interferer_count"))
                {
                    const auto l = j.at("interferer_count").get<std::vector<std::size_t>>();
                    if (l.size() != 2)
                        throw format_error("config: interferer_count must be [min, max]");
                    c.l_min = l[0];
                    c.l_max = l[1];
                }
                c.noise_power = j.value("noise_power", c.noise_power);
                c.n_train = j.value("n_train", c.n_train);
                c.n_test = j.value("n_test", c.n_test);
                c.snapshots = j.value("snapshots", c.snapshots);
                c.toeplitz_average = j.value("toeplitz_average", c.toeplitz_average);
                if (j.contains("label_source"))
                    c.label_source = label_source_from_string(j.at("label_source").get<std::string>());
                c.test_perturbation.variance_deg2 = j.value("test_perturbation_variance_deg2", c.test_perturbation.variance_deg2);
                c.robust_look_perturbation = j.value("robust_look_perturbation", c.robust_look_perturbation);
                c.look_perturbation_variance_deg2 = j.value("look_perturbation_variance_deg2", c.look_perturbation_variance_deg2);
                c.random_draws = j.value("random_draws", c.random_draws);
                c.enumeration_budget = j.value("enumeration_budget", c.enumeration_budget);
                if (j.contains("sbsa"))
                {
                    const auto &s = j.at("sbsa");
                    c.sbsa.dft_length = s.value("dft_length", c.sbsa.dft_length);
                    c.sbsa.n_starts = s.value("n_starts", c.sbsa.n_starts);
                    c.sbsa.rng_seed = s.value("rng_seed", c.sbsa.rng_seed);
                }
                if (j.contains("train"))
                    c.train = TrainConfig::from_json(j.at("train"));
                c.seed = j.value("seed", c.seed);
                c.threads = j.value("threads", c.threads);
            }
            catch (const nlohmann::json::exception &e)
            {
                throw format_error(std::string("config document: ") + e.what());
            }
            c.validate();
            return c;
        }
    };

    // Look directions are keyed in millidegrees.
    inline long look_key(double doa_deg) { return std::lround(doa_deg * 1000.0); }

    // ----- Scenario draws ----------------------------------------------------

    namespace detail
    {
        inline constexpr std::uint64_t train_stream = 0x7a00000000000000ull;
        inline constexpr std::uint64_t test_stream = 0x7e00000000000000ull;

        inline std::uint64_t scenario_stream(std::uint64_t kind, double look_deg, std::size_t index)
        {
            return kind ^ (static_cast<std::uint64_t>(look_key(look_deg)) << 32) ^ static_cast<std::uint64_t>(index);
        }

        // Interferers on the DOA grid (never at the look direction), INRs
        // uniform in dB.
        inline Scenario draw_grid_scenario(const ExperimentConfig &cfg, double look_deg, std::mt19937_64 &rng)
        {
            std::vector<double> grid;
            for (double g : cfg.interferer_grid())
                if (std::abs(g - look_deg) > 1e-9)
                    grid.push_back(g);
            const auto l = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(cfg.l_min), static_cast<std::int64_t>(cfg.l_max)));
            if (l > grid.size())
                throw invalid_argument("config: more interferers requested than grid points");

            Scenario scn;
            scn.noise_power = cfg.noise_power;
            scn.desired = {look_deg, cfg.noise_power * db_to_linear(cfg.snr_db)};
            for (std::size_t i = 0; i < l; ++i)
            {
                const auto j = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(grid.size() - 1)));
                std::swap(grid[i], grid[j]);
                const double inr = uniform_real(rng, cfg.inr_db_min, cfg.inr_db_max);
                scn.interferers.push_back({grid[i], cfg.noise_power * db_to_linear(inr)});
            }
            return scn;
        }
    }

    inline Scenario draw_training_scenario(const ExperimentConfig &cfg, double look_deg, std::size_t index)
    {
        auto rng = make_engine(cfg.seed, detail::scenario_stream(detail::train_stream, look_deg, index));
        return detail::draw_grid_scenario(cfg, look_deg, rng);
    }

    // Test scenarios: grid draw followed by Gaussian jitter of the interferer
    // DOAs (off-grid), optionally also jittering the true source direction.
    inline Scenario draw_test_scenario(const ExperimentConfig &cfg, double look_deg, std::size_t index)
    {
        const std::uint64_t stream = detail::scenario_stream(detail::test_stream, look_deg, index);
        auto rng = make_engine(cfg.seed, stream);
        Scenario scn = detail::draw_grid_scenario(cfg, look_deg, rng);
        scn = perturb_scenario(scn, cfg.test_perturbation, rng());
        if (cfg.robust_look_perturbation)
            scn = perturb_scenario(scn, {cfg.look_perturbation_variance_deg2, true, false}, rng());
        return scn;
    }

    // Features the network sees for a scenario: exact lags, or lags of a
    // finite-snapshot estimate (Toeplitz-averaged when configured).
    inline FeatureVector scenario_features(const ExperimentConfig &cfg, const Scenario &scn, const CorrelationSet &corr,
                                           std::uint64_t snapshot_seed)
    {
        if (cfg.snapshots == 0)
            return extract_features(corr.total);
        CMatrix est = sample_covariance(simulate_snapshots(cfg.geom, scn, cfg.snapshots, snapshot_seed));
        if (cfg.toeplitz_average)
            est = toeplitz_average(est);
        return extract_features(est);
    }

    inline SelectionVector label_for(const ExperimentConfig &cfg, const Scenario &scn, const CorrelationSet &corr, LabelSource source)
    {
        if (source == LabelSource::enumerate)
            return enumerate_extremes(corr, cfg.cardinality, {cfg.enumeration_budget, 1}).best.selection;
        SbsaConfig sc = cfg.sbsa;
        sc.threads = 1;
        return sbsa_select(cfg.geom, scn, cfg.cardinality, sc).selection;
    }

    // n_train labeled examples for one look direction.
    inline std::vector<LabeledExample> generate_dataset(const ExperimentConfig &cfg, double look_deg, LabelSource source)
    {
        cfg.validate();
        if (source == LabelSource::enumerate)
        {
            const auto count = binomial(cfg.geom.n_grid, cfg.cardinality);
            if (count > cfg.enumeration_budget)
                throw budget_exceeded_error(count, cfg.enumeration_budget);
        }
        std::vector<LabeledExample> data(cfg.n_train);
        parallel_for(cfg.n_train, cfg.threads, [&](std::size_t i)
                     {
            const Scenario scn = draw_training_scenario(cfg, look_deg, i);
            const CorrelationSet corr = correlation_matrices(cfg.geom, scn);
            auto &ex = data[i];
            ex.features = scenario_features(cfg, scn, corr, make_engine(cfg.seed, detail::scenario_stream(detail::train_stream ^ 0x5ull, look_deg, i))());
            ex.label = label_for(cfg, scn, corr, source);
            ex.scenario_id = i;
            ex.look_doa_deg = look_deg;
            ex.n_interferers = scn.n_interferers(); });
        return data;
    }

    // ----- Baselines ---------------------------------------------------------

    struct BaselineMasks
    {
        SelectionVector compact_ula; // first P grid points
        SelectionVector sparse_ula;  // P points at the largest equal stride from index 0
        SelectionVector random;      // uniform P-subset
    };

    inline SelectionVector compact_ula_mask(std::size_t n, std::size_t p)
    {
        std::vector<std::size_t> idx(p);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        return SelectionVector::from_indices(n, idx);
    }

    inline SelectionVector sparse_ula_mask(std::size_t n, std::size_t p)
    {
        const std::size_t stride = p > 1 ? (n - 1) / (p - 1) : 1;
        std::vector<std::size_t> idx(p);
        for (std::size_t i = 0; i < p; ++i)
            idx[i] = i * stride;
        return SelectionVector::from_indices(n, idx);
    }

    inline SelectionVector random_mask(std::size_t n, std::size_t p, std::mt19937_64 &rng)
    {
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < p; ++i)
            std::swap(pool[i], pool[static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)))]);
        pool.resize(p);
        return SelectionVector::from_indices(n, pool);
    }

    inline BaselineMasks baseline_masks(const ArrayGeometry &geom, std::size_t p, std::uint64_t seed)
    {
        geom.validate();
        if (p < 1 || p > geom.n_grid)
            throw invalid_argument("baseline_masks: need 1 <= P <= N");
        auto rng = make_engine(seed, 0xba5e);
        return {compact_ula_mask(geom.n_grid, p), sparse_ula_mask(geom.n_grid, p), random_mask(geom.n_grid, p, rng)};
    }

    // Minimum-SINR configuration of a scenario.
    inline SelectionVector worst_case_mask(const CorrelationSet &corr, std::size_t p, std::uint64_t budget = 10'000'000)
    {
        return enumerate_extremes(corr, p, {budget, 1}).worst.selection;
    }

    // ----- Evaluation --------------------------------------------------------

    // Trained artefacts for one look direction. Only dnn_en is mandatory.
    struct LookModels
    {
        std::optional<MlpModel> dnn_en;
        std::optional<MlpModel> dnn_sbsa;
        std::optional<NncIndex> nnc;
        std::optional<NncIndex> nnc_mae;
    };

    inline const std::vector<std::string> &method_names()
    {
        static const std::vector<std::string> names{"enumeration", "sbsa", "dnn_en", "dnn_sbsa", "nnc", "nnc_mae",
                                                    "compact_ula", "sparse_ula", "random", "worst_case"};
        return names;
    }

    struct ScenarioResult
    {
        double look_doa_deg = 0.0;
        std::size_t index = 0;
        std::size_t n_interferers = 0;
        std::map<std::string, double> sinr_db;     // per available method
        std::map<std::string, bool> exact_match;   // per mask-producing method
    };

    struct MethodSummary
    {
        double mean_sinr_db = 0.0;
        double exact_match_rate = std::numeric_limits<double>::quiet_NaN();
        double mean_gap_db = 0.0; // enumeration minus method, averaged per scenario
    };

    struct EvaluationReport
    {
        std::vector<std::string> methods; // available, in report order
        std::vector<ScenarioResult> scenarios;
        std::map<long, std::map<std::string, MethodSummary>> per_look; // keyed by look_key
        std::map<std::string, double> runtime_seconds;

        MethodSummary aggregate(const std::string &method) const
        {
            MethodSummary s;
            std::size_t count = 0, matched = 0, match_count = 0;
            for (const auto &r : scenarios)
            {
                s.mean_sinr_db += r.sinr_db.at(method);
                s.mean_gap_db += r.sinr_db.at("enumeration") - r.sinr_db.at(method);
                ++count;
                if (auto it = r.exact_match.find(method); it != r.exact_match.end())
                {
                    ++match_count;
                    matched += it->second ? 1 : 0;
                }
            }
            if (count > 0)
            {
                s.mean_sinr_db /= static_cast<double>(count);
                s.mean_gap_db /= static_cast<double>(count);
            }
            if (match_count > 0)
                s.exact_match_rate = static_cast<double>(matched) / static_cast<double>(match_count);
            return s;
        }
    };

    namespace detail
    {
        // SINR within the enumeration tie tolerance of the optimum counts as
        // dominated; anything above is an audit failure.
        inline void audit_dominance(double best_linear, double method_linear, const std::string &method)
        {
            if (method_linear > best_linear * (1.0 + sinr_tie_tolerance))
                throw error("dominance audit failed: method '" + method + "' exceeds the enumerated optimum");
        }
    }

    inline EvaluationReport evaluate(const ExperimentConfig &cfg, const std::map<long, LookModels> &models)
    {
        cfg.validate();
        const std::size_t n = cfg.geom.n_grid;
        const std::size_t p = cfg.cardinality;

        for (double look : cfg.look_doas_deg)
        {
            auto it = models.find(look_key(look));
            if (it == models.end() || !it->second.dnn_en)
                throw invalid_argument("evaluate: missing DNN-EN model for look DOA " + std::to_string(look));
        }
        auto available = [&](const std::string &m)
        {
            return std::all_of(cfg.look_doas_deg.begin(), cfg.look_doas_deg.end(), [&](double look)
                               {
                const auto &lm = models.at(look_key(look));
                if (m == "dnn_sbsa") return lm.dnn_sbsa.has_value();
                if (m == "nnc") return lm.nnc.has_value();
                if (m == "nnc_mae") return lm.nnc_mae.has_value();
                return true; });
        };

        EvaluationReport report;
        for (const auto &m : method_names())
            if (available(m))
                report.methods.push_back(m);
        const auto has = [&](const std::string &m)
        { return std::find(report.methods.begin(), report.methods.end(), m) != report.methods.end(); };

        const SelectionVector compact = compact_ula_mask(n, p);
        const SelectionVector sparse = sparse_ula_mask(n, p);

        const std::size_t per_look = cfg.n_test;
        const std::size_t total = per_look * cfg.look_doas_deg.size();
        report.scenarios.resize(total);
        std::vector<std::map<std::string, double>> timing(total);

        parallel_for(total, cfg.threads, [&](std::size_t job)
                     {
            using clock = std::chrono::steady_clock;
            const double look = cfg.look_doas_deg[job / per_look];
            const std::size_t index = job % per_look;
            const LookModels &lm = models.at(look_key(look));
            auto &res = report.scenarios[job];
            auto &tm = timing[job];
            res.look_doa_deg = look;
            res.index = index;

            const Scenario scn = draw_test_scenario(cfg, look, index);
            res.n_interferers = scn.n_interferers();
            const CorrelationSet corr = correlation_matrices(cfg.geom, scn);
            SinrEvaluator eval(corr);

            auto t0 = clock::now();
            const auto extremes = enumerate_extremes(corr, p, {cfg.enumeration_budget, 1});
            tm["enumeration"] = std::chrono::duration<double>(clock::now() - t0).count();
            const double best = extremes.best.sinr.linear;
            res.sinr_db["enumeration"] = extremes.best.sinr.db;
            res.sinr_db["worst_case"] = extremes.worst.sinr.db;

            auto score = [&](const std::string &method, const SelectionVector &mask)
            {
                const double lin = eval.sinr_linear(mask);
                detail::audit_dominance(best, lin, method);
                res.sinr_db[method] = linear_to_db(lin);
                res.exact_match[method] = mask == extremes.best.selection;
            };

            t0 = clock::now();
            SbsaConfig sc = cfg.sbsa;
            sc.threads = 1;
            score("sbsa", sbsa_select(cfg.geom, scn, p, sc).selection);
            tm["sbsa"] = std::chrono::duration<double>(clock::now() - t0).count();

            const FeatureVector features = scenario_features(cfg, scn, corr,
                make_engine(cfg.seed, detail::scenario_stream(detail::test_stream ^ 0x5ull, look, index))());
            t0 = clock::now();
            score("dnn_en", predict_selection(*lm.dnn_en, features, p));
            tm["dnn_en"] = std::chrono::duration<double>(clock::now() - t0).count();
            if (has("dnn_sbsa"))
            {
                t0 = clock::now();
                score("dnn_sbsa", predict_selection(*lm.dnn_sbsa, features, p));
                tm["dnn_sbsa"] = std::chrono::duration<double>(clock::now() - t0).count();
            }
            if (has("nnc"))
            {
                t0 = clock::now();
                score("nnc", nnc_predict(*lm.nnc, features));
                tm["nnc"] = std::chrono::duration<double>(clock::now() - t0).count();
            }
            if (has("nnc_mae"))
                score("nnc_mae", nnc_predict(*lm.nnc_mae, features));

            score("compact_ula", compact);
            score("sparse_ula", sparse);

            auto rng = make_engine(cfg.seed, detail::scenario_stream(detail::test_stream ^ 0xaull, look, index));
            double acc = 0.0;
            for (std::size_t d = 0; d < cfg.random_draws; ++d)
            {
                const double lin = eval.sinr_linear(random_mask(n, p, rng));
                detail::audit_dominance(best, lin, "random");
                acc += linear_to_db(lin);
            }
            res.sinr_db["random"] = acc / static_cast<double>(cfg.random_draws); });

        for (const auto &tm : timing)
            for (const auto &[k, v] : tm)
                report.runtime_seconds[k] += v;

        // Per-look summaries.
        for (double look : cfg.look_doas_deg)
        {
            EvaluationReport slice;
            for (const auto &r : report.scenarios)
                if (look_key(r.look_doa_deg) == look_key(look))
                    slice.scenarios.push_back(r);
            for (const auto &m : report.methods)
                report.per_look[look_key(look)][m] = slice.aggregate(m);
        }
        return report;
    }

    // Pairs (better, worse) whose means violate the expected ordering by more
    // than `slack_db`. Methods absent from the report are skipped.
    inline std::vector<std::pair<std::string, std::string>> ordering_violations(const EvaluationReport &rep, double slack_db = 0.15)
    {
        static const std::vector<std::pair<std::string, std::string>> chain{
            {"enumeration", "dnn_en"}, {"dnn_en", "nnc"}, {"enumeration", "sbsa"}, {"sbsa", "dnn_sbsa"},
            {"dnn_sbsa", "random"}, {"random", "worst_case"}};
        std::vector<std::pair<std::string, std::string>> bad;
        auto has = [&](const std::string &m)
        { return std::find(rep.methods.begin(), rep.methods.end(), m) != rep.methods.end(); };
        for (const auto &[hi, lo] : chain)
        {
            if (!has(hi) || !has(lo))
                continue;
            if (rep.aggregate(hi).mean_sinr_db + slack_db < rep.aggregate(lo).mean_sinr_db)
                bad.emplace_back(hi, lo);
        }
        return bad;
    }

    inline void write_report_scenarios_csv(std::ostream &os, const EvaluationReport &rep)
    {
        os << "look_doa_deg,scenario_index,n_interferers";
        for (const auto &m : rep.methods)
            os << ',' << m << "_sinr_db";
        os << '\n';
        os.precision(12);
        for (const auto &r : rep.scenarios)
        {
            os << r.look_doa_deg << ',' << r.index << ',' << r.n_interferers;
            for (const auto &m : rep.methods)
                os << ',' << r.sinr_db.at(m);
            os << '\n';
        }
    }

    inline void write_report_summary_csv(std::ostream &os, const EvaluationReport &rep)
    {
        os << "look_doa_deg,method,mean_sinr_db,mean_gap_to_enumeration_db,exact_match_rate\n";
        os.precision(12);
        auto row = [&](const std::string &look, const std::string &m, const MethodSummary &s)
        {
            os << look << ',' << m << ',' << s.mean_sinr_db << ',' << s.mean_gap_db << ',';
            if (std::isnan(s.exact_match_rate))
                os << "";
            else
                os << s.exact_match_rate;
            os << '\n';
        };
        for (const auto &[key, methods] : rep.per_look)
            for (const auto &m : rep.methods)
                row(std::to_string(static_cast<double>(key) / 1000.0), m, methods.at(m));
        for (const auto &m : rep.methods)
            row("all", m, rep.aggregate(m));
    }

    // ----- Ascending-Omega diagnostic ----------------------------------------

    struct Fig7Result
    {
        std::vector<RankedConfiguration> ranked; // ascending Omega
        double lower_half_mean_db = 0.0;         // low-Omega half
        double upper_half_mean_db = 0.0;
        std::size_t best_sinr_position = 0; // position of the MaxSINR configuration in Omega order
        std::size_t worst_sinr_position = 0;

        double half_difference_db() const { return lower_half_mean_db - upper_half_mean_db; }
        bool min_omega_is_best() const { return best_sinr_position == 0; }
    };

    inline Fig7Result fig7_diagnostic(const ArrayGeometry &geom, const Scenario &scn, std::size_t p, std::size_t dft_length = 0,
                                      const EnumerateOptions &opts = {})
    {
        Fig7Result out;
        out.ranked = enumerate_all_ranked(geom, scn, p, true, opts, dft_length);
        const std::size_t total = out.ranked.size();
        const std::size_t half = total / 2;
        double lo = 0.0, hi = 0.0;
        std::size_t best = 0, worst = 0;
        for (std::size_t i = 0; i < total; ++i)
        {
            const auto &r = out.ranked[i];
            (i < half ? lo : hi) += r.sinr.db;
            const auto &b = out.ranked[best];
            if (r.sinr.linear > b.sinr.linear || (r.sinr.linear == b.sinr.linear && r.rank_id < b.rank_id))
                best = i;
            const auto &w = out.ranked[worst];
            if (r.sinr.linear < w.sinr.linear || (r.sinr.linear == w.sinr.linear && r.rank_id < w.rank_id))
                worst = i;
        }
        out.lower_half_mean_db = half > 0 ? lo / static_cast<double>(half) : 0.0;
        out.upper_half_mean_db = total - half > 0 ? hi / static_cast<double>(total - half) : 0.0;
        out.best_sinr_position = best;
        out.worst_sinr_position = worst;
        return out;
    }

    inline void write_fig7_csv(std::ostream &os, const Fig7Result &res)
    {
        os << "position,rank_id,mask_bits,omega,sinr_db\n";
        os.precision(17);
        for (std::size_t i = 0; i < res.ranked.size(); ++i)
        {
            const auto &r = res.ranked[i];
            os << i << ',' << r.rank_id << ',' << r.selection.to_bits() << ',' << *r.omega << ',' << r.sinr.db << '\n';
        }
    }

    // ----- Run manifest ------------------------------------------------------

    inline constexpr const char *library_version = "1.0.0";

    inline nlohmann::json run_manifest(const std::string &command, const nlohmann::json &config, std::uint64_t seed,
                                       const nlohmann::json &extra = nlohmann::json::object())
    {
        return {{"command", command},
                {"config_hash", fnv1a64(config.dump())},
                {"config", config},
                {"seed", seed},
                {"versions", {{"sparsebf", library_version}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION)}}},
                {"outputs", extra}};
    }
}

#endif
