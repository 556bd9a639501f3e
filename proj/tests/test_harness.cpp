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

#include <set>
#include <sstream>

using namespace sparsebf;

namespace
{
    ExperimentConfig small_config()
    {
        ExperimentConfig cfg;
        cfg.geom = {8, 0.5};
        cfg.cardinality = 4;
        cfg.look_doas_deg = {60.0};
        cfg.n_train = 60;
        cfg.n_test = 12;
        cfg.random_draws = 10;
        cfg.train.epochs = 5;
        cfg.train.hidden = {32, 16, 8};
        cfg.seed = 3;
        return cfg;
    }

    std::map<long, LookModels> train_models(const ExperimentConfig &cfg, bool with_optional)
    {
        std::map<long, LookModels> models;
        for (double look : cfg.look_doas_deg)
        {
            const auto data = generate_dataset(cfg, look, LabelSource::enumerate);
            auto &lm = models[look_key(look)];
            lm.dnn_en = train(data, cfg.train).model;
            if (with_optional)
            {
                lm.dnn_sbsa = train(generate_dataset(cfg, look, LabelSource::sbsa), cfg.train).model;
                lm.nnc.emplace(data, NncMetric::mse);
                lm.nnc_mae.emplace(data, NncMetric::mae);
            }
        }
        return models;
    }
}

TEST(Config, JsonRoundTripAndValidation)
{
    ExperimentConfig cfg = small_config();
    cfg.label_source = LabelSource::sbsa;
    cfg.snapshots = 512;
    const auto back = ExperimentConfig::from_json(cfg.to_json());
    EXPECT_EQ(back.to_json(), cfg.to_json());

    auto j = cfg.to_json();
    j["look_doas_deg"] = {0.0};
    EXPECT_THROW(ExperimentConfig::from_json(j), domain_error);
    j = cfg.to_json();
    j["n_test"] = 0;
    EXPECT_THROW(ExperimentConfig::from_json(j), invalid_argument);
    j = cfg.to_json();
    j["label_source"] = "oracle";
    EXPECT_THROW(ExperimentConfig::from_json(j), format_error);
    j = cfg.to_json();
    j["inr_db"] = "loud";
    EXPECT_THROW(ExperimentConfig::from_json(j), format_error);
}

TEST(Config, Defaults)
{
    const ExperimentConfig cfg;
    EXPECT_EQ(cfg.look_doas_deg, (std::vector<double>{15, 30, 45, 60, 75, 90}));
    EXPECT_EQ(cfg.interferer_grid().size(), 161u);
    EXPECT_EQ(cfg.interferer_grid().front(), 10.0);
    EXPECT_EQ(cfg.interferer_grid().back(), 170.0);
    EXPECT_EQ(cfg.n_train, 30000u);
    EXPECT_EQ(cfg.n_test, 900u);
}

TEST(ScenarioDraws, RespectGridAndPolicy)
{
    const ExperimentConfig cfg;
    std::set<std::size_t> counts;
    for (std::size_t i = 0; i < 400; ++i)
    {
        const Scenario scn = draw_training_scenario(cfg, 60.0, i);
        counts.insert(scn.n_interferers());
        EXPECT_NO_THROW(scn.validate());
        EXPECT_EQ(scn.desired.doa_deg, 60.0);
        EXPECT_NEAR(scn.desired.power, 1.0, 1e-15);
        for (const auto &intf : scn.interferers)
        {
            EXPECT_EQ(intf.doa_deg, std::round(intf.doa_deg));
            EXPECT_GE(intf.doa_deg, 10.0);
            EXPECT_LE(intf.doa_deg, 170.0);
            EXPECT_NE(intf.doa_deg, 60.0);
            EXPECT_GE(linear_to_db(intf.power), 10.0 - 1e-12);
            EXPECT_LE(linear_to_db(intf.power), 20.0 + 1e-12);
        }
    }
    EXPECT_EQ(counts, (std::set<std::size_t>{1, 2, 3, 4}));
    const Scenario a = draw_training_scenario(cfg, 60.0, 7), b = draw_training_scenario(cfg, 60.0, 7);
    EXPECT_EQ(scenario_to_json(a), scenario_to_json(b));
}

TEST(ScenarioDraws, TestScenariosAreOffGrid)
{
    const ExperimentConfig cfg;
    std::size_t off = 0, total = 0;
    for (std::size_t i = 0; i < 100; ++i)
    {
        const Scenario scn = draw_test_scenario(cfg, 30.0, i);
        EXPECT_EQ(scn.desired.doa_deg, 30.0);
        for (const auto &intf : scn.interferers)
        {
            ++total;
            off += intf.doa_deg != std::round(intf.doa_deg);
        }
    }
    EXPECT_EQ(off, total);
}

TEST(GenerateDataset, NoiseOnlySingleExample)
{
    ExperimentConfig cfg = small_config();
    cfg.n_train = 1;
    cfg.l_min = cfg.l_max = 0;
    const auto data = generate_dataset(cfg, 60.0, LabelSource::enumerate);
    ASSERT_EQ(data.size(), 1u);
    EXPECT_EQ(data[0].label.to_bits(), "11110000");
    EXPECT_EQ(data[0].n_interferers, 0u);
}

TEST(GenerateDataset, DeterministicAndLabelled)
{
    const ExperimentConfig cfg = small_config();
    const auto a = generate_dataset(cfg, 60.0, LabelSource::enumerate);
    const auto b = generate_dataset(cfg, 60.0, LabelSource::enumerate);
    ASSERT_EQ(a.size(), 60u);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].features.values, b[i].features.values);
        EXPECT_EQ(a[i].label, b[i].label);
        const Scenario scn = draw_training_scenario(cfg, 60.0, i);
        EXPECT_EQ(a[i].label, enumerate_best(cfg.geom, scn, 4).selection);
    }
}

TEST(GenerateDataset, SnapshotFeaturesAreToeplitz)
{
    ExperimentConfig cfg = small_config();
    cfg.n_train = 5;
    cfg.snapshots = 512;
    const auto data = generate_dataset(cfg, 60.0, LabelSource::sbsa);
    const auto exact = [&]
    {
        ExperimentConfig c = cfg;
        c.snapshots = 0;
        return generate_dataset(c, 60.0, LabelSource::sbsa);
    }();
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        EXPECT_EQ(data[i].label, exact[i].label);
        const double err = (data[i].features.values - exact[i].features.values).norm() / exact[i].features.values.norm();
        EXPECT_GT(err, 0.0);
        EXPECT_LT(err, 0.3);
    }
}

TEST(GenerateDataset, BudgetPropagates)
{
    ExperimentConfig cfg = small_config();
    cfg.enumeration_budget = 10;
    EXPECT_THROW(generate_dataset(cfg, 60.0, LabelSource::enumerate), budget_exceeded_error);
}

TEST(Baselines, Masks)
{
    const auto b = baseline_masks({12, 0.5}, 6, 1);
    EXPECT_EQ(b.compact_ula.to_bits(), "111111000000");
    EXPECT_EQ(b.sparse_ula.to_bits(), "101010101010");
    EXPECT_EQ(b.random.cardinality(), 6u);
    EXPECT_EQ(sparse_ula_mask(16, 6).indices(), (std::vector<std::size_t>{0, 3, 6, 9, 12, 15}));
    EXPECT_EQ(sparse_ula_mask(5, 1).to_bits(), "10000");
    EXPECT_EQ(baseline_masks({12, 0.5}, 6, 1).random, b.random);
    EXPECT_THROW(baseline_masks({12, 0.5}, 13, 1), invalid_argument);
}

TEST(Baselines, RandomMasksAreUniform)
{
    auto rng = make_engine(4);
    std::vector<int> hits(8, 0);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i)
        for (auto k : random_mask(8, 3, rng).indices())
            ++hits[k];
    for (int h : hits)
        EXPECT_NEAR(h / static_cast<double>(draws), 3.0 / 8.0, 0.02);
}

TEST(Evaluate, MissingModel)
{
    const ExperimentConfig cfg = small_config();
    EXPECT_THROW(evaluate(cfg, {}), invalid_argument);
    std::map<long, LookModels> partial;
    partial[look_key(60.0)] = {};
    EXPECT_THROW(evaluate(cfg, partial), invalid_argument);
}

TEST(Evaluate, DominanceReproducibilityAndCsv)
{
    const ExperimentConfig cfg = small_config();
    const auto models = train_models(cfg, true);
    const auto rep = evaluate(cfg, models);
    EXPECT_EQ(rep.methods, method_names());
    ASSERT_EQ(rep.scenarios.size(), 12u);
    for (const auto &r : rep.scenarios)
    {
        const double best = r.sinr_db.at("enumeration");
        for (const auto &m : rep.methods)
            EXPECT_LE(r.sinr_db.at(m), best + 1e-9) << m;
        EXPECT_LE(r.sinr_db.at("worst_case"), r.sinr_db.at("random"));
        const Scenario scn = draw_test_scenario(cfg, 60.0, r.index);
        EXPECT_NEAR(best, enumerate_best(cfg.geom, scn, 4).sinr.db, 1e-12);
    }
    EXPECT_TRUE(std::isnan(rep.aggregate("enumeration").exact_match_rate));
    EXPECT_GE(rep.aggregate("sbsa").exact_match_rate, 0.0);

    std::ostringstream a1, a2, b1, b2;
    write_report_scenarios_csv(a1, rep);
    write_report_summary_csv(a2, rep);
    const auto again = evaluate(cfg, models);
    write_report_scenarios_csv(b1, again);
    write_report_summary_csv(b2, again);
    EXPECT_EQ(a1.str(), b1.str());
    EXPECT_EQ(a2.str(), b2.str());
    EXPECT_EQ(a1.str().substr(0, a1.str().find('\n')),
              "look_doa_deg,scenario_index,n_interferers,enumeration_sinr_db,sbsa_sinr_db,dnn_en_sinr_db,dnn_sbsa_sinr_db,"
              "nnc_sinr_db,nnc_mae_sinr_db,compact_ula_sinr_db,sparse_ula_sinr_db,random_sinr_db,worst_case_sinr_db");
}

TEST(Evaluate, OptionalMethodsOmitted)
{
    ExperimentConfig cfg = small_config();
    cfg.n_test = 4;
    const auto rep = evaluate(cfg, train_models(cfg, false));
    EXPECT_EQ(std::count(rep.methods.begin(), rep.methods.end(), "nnc"), 0);
    EXPECT_EQ(std::count(rep.methods.begin(), rep.methods.end(), "dnn_sbsa"), 0);
    EXPECT_EQ(rep.methods.size(), 7u);
}

TEST(Evaluate, IdenticalMasksGiveIdenticalRows)
{
    // A model whose scores reproduce the compact ULA agrees with that baseline exactly.
    ExperimentConfig cfg = small_config();
    cfg.n_test = 5;
    std::map<long, LookModels> models;
    MlpModel m = make_mlp(default_layer_sizes(8, {4}), 1);
    m.weights[0].setZero();
    m.weights[1].setZero();
    m.biases[1] << 8, 7, 6, 5, 4, 3, 2, 1;
    models[look_key(60.0)].dnn_en = m;
    const auto rep = evaluate(cfg, models);
    for (const auto &r : rep.scenarios)
        EXPECT_EQ(r.sinr_db.at("dnn_en"), r.sinr_db.at("compact_ula"));
}

TEST(Evaluate, DominanceAuditCatchesViolations)
{
    EXPECT_THROW(detail::audit_dominance(1.0, 1.0 + 1e-9, "x"), error);
    EXPECT_NO_THROW(detail::audit_dominance(1.0, 1.0, "x"));
}

TEST(OmegaTrend, NoInterferersDegeneratesToRankOrder)
{
    Scenario scn;
    scn.desired = {60.0, 1.0};
    const auto res = fig7_diagnostic({7, 0.5}, scn, 3);
    for (std::size_t i = 0; i < res.ranked.size(); ++i)
        EXPECT_EQ(res.ranked[i].rank_id, i);
    EXPECT_EQ(res.best_sinr_position, 0u);
}

TEST(OmegaTrend, TrendOnReducedFourInterfererScenario)
{
    Scenario scn;
    scn.desired = {60.0, 1.0};
    scn.interferers = {{154.0, db_to_linear(20)}, {55.0, db_to_linear(15)}, {117.0, db_to_linear(10)}, {50.0, db_to_linear(12)}};
    const auto res = fig7_diagnostic({16, 0.5}, scn, 6);
    EXPECT_EQ(res.ranked.size(), 8008u);
    EXPECT_GT(res.half_difference_db(), 0.0);
    std::ostringstream os;
    write_fig7_csv(os, res);
    const std::string text = os.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8009);
}

TEST(OmegaTrend, BudgetExceeded)
{
    Scenario scn;
    scn.desired = {60.0, 1.0};
    EXPECT_THROW(fig7_diagnostic({24, 0.5}, scn, 12, 0, {1000, 1}), budget_exceeded_error);
}

TEST(Manifest, HashTracksConfig)
{
    const auto a = run_manifest("eval", small_config().to_json(), 3);
    auto cfg = small_config();
    cfg.n_test = 13;
    const auto b = run_manifest("eval", cfg.to_json(), 3);
    EXPECT_NE(a.at("config_hash"), b.at("config_hash"));
    EXPECT_EQ(a.at("config_hash"), run_manifest("eval", small_config().to_json(), 3).at("config_hash"));
}
