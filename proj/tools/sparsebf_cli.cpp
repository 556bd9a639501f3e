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

// sparsebf command line: dataset generation, training, evaluation and the
// single-scenario diagnostics. Every command reads one JSON config document
// and writes CSV files plus manifest.json into --out-dir.
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 budget error.

#include <sparsebf/sparsebf.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sparsebf;

namespace
{
    struct CommonArgs
    {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::string out_dir = ".";
    };

    struct Loaded
    {
        nlohmann::json doc;
        ExperimentConfig cfg;
    };

    Loaded load(const CommonArgs &args)
    {
        std::ifstream in(args.config_path);
        if (!in)
            throw format_error("cannot open config document '" + args.config_path + "'");
        Loaded l;
        try
        {
            l.doc = nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw format_error(std::string("config document: ") + e.what());
        }
        if (args.seed)
        {
            l.doc["seed"] = *args.seed;
            l.doc["train"]["rng_seed"] = *args.seed;
        }
        l.cfg = ExperimentConfig::from_json(l.doc);
        fs::create_directories(args.out_dir);
        return l;
    }

    Scenario config_scenario(const Loaded &l)
    {
        if (!l.doc.contains("scenario"))
            throw format_error("config document has no 'scenario' block");
        return scenario_from_json(l.doc.at("scenario"));
    }

    std::string look_tag(double look)
    {
        std::ostringstream os;
        os << "look" << look;
        return os.str();
    }

    std::string dataset_name(LabelSource s, double look) { return "dataset_" + to_string(s) + "_" + look_tag(look) + ".csv"; }
    std::string model_name(LabelSource s, double look) { return "model_" + to_string(s) + "_" + look_tag(look) + ".bin"; }

    std::ofstream open_out(const fs::path &p)
    {
        std::ofstream os(p, std::ios::binary);
        if (!os)
            throw error("cannot write '" + p.string() + "'");
        return os;
    }

    void write_json(const fs::path &p, const nlohmann::json &j) { open_out(p) << j.dump(2) << '\n'; }

    void write_manifest(const CommonArgs &args, const Loaded &l, const std::string &cmd, const nlohmann::json &outputs)
    {
        write_json(fs::path(args.out_dir) / "manifest.json", run_manifest(cmd, l.cfg.to_json(), l.cfg.seed, outputs));
    }

    std::vector<LabelSource> sources_for(const std::string &opt, const ExperimentConfig &cfg)
    {
        if (opt.empty())
            return {cfg.label_source};
        if (opt == "both")
            return {LabelSource::enumerate, LabelSource::sbsa};
        return {label_source_from_string(opt)};
    }

    std::vector<LabeledExample> read_dataset(const fs::path &p)
    {
        std::ifstream in(p);
        if (!in)
            throw format_error("missing dataset '" + p.string() + "'");
        return read_dataset_csv(in);
    }

    // ----- commands ------------------------------------------------------

    nlohmann::json cmd_gen_data(const CommonArgs &args, const Loaded &l, const std::string &source_opt)
    {
        nlohmann::json outputs = nlohmann::json::array();
        for (auto src : sources_for(source_opt, l.cfg))
            for (double look : l.cfg.look_doas_deg)
            {
                const auto data = generate_dataset(l.cfg, look, src);
                const fs::path p = fs::path(args.out_dir) / dataset_name(src, look);
                auto os = open_out(p);
                write_dataset_csv(os, data);
                outputs.push_back(p.filename().string());
                std::cout << "wrote " << p.string() << " (" << data.size() << " examples)\n";
            }
        return outputs;
    }

    nlohmann::json cmd_train(const CommonArgs &args, const Loaded &l, const std::string &source_opt, const std::string &data_dir)
    {
        nlohmann::json outputs = nlohmann::json::array();
        for (auto src : sources_for(source_opt, l.cfg))
            for (double look : l.cfg.look_doas_deg)
            {
                const auto data = read_dataset(fs::path(data_dir.empty() ? args.out_dir : data_dir) / dataset_name(src, look));
                const auto tuned = train_tuned(data, l.cfg.train);
                const auto &res = tuned.trained;
                const fs::path p = fs::path(args.out_dir) / model_name(src, look);
                auto os = open_out(p);
                write_model(os, res.model);
                fs::path meta = p;
                meta.replace_extension(".json");
                auto doc = model_metadata(res.model, tuned.chosen, res.report);
                for (const auto &t : tuned.trials)
                    doc["tuning"].push_back({{"batch_size", t.batch_size}, {"learning_rate", t.learning_rate},
                                             {"validation_loss", t.validation_loss}, {"best_epoch", t.best_epoch}});
                write_json(meta, doc);
                outputs.push_back(p.filename().string());
                std::cout << "wrote " << p.string() << " (best epoch " << res.report.best_epoch << ", train loss "
                          << res.report.train_loss[res.report.best_epoch] << ")\n";
            }
        return outputs;
    }

    nlohmann::json cmd_eval(const CommonArgs &args, const Loaded &l, const std::string &model_dir, const std::string &data_dir)
    {
        const fs::path mdir = model_dir.empty() ? args.out_dir : model_dir;
        const fs::path ddir = data_dir.empty() ? args.out_dir : data_dir;
        std::map<long, LookModels> models;
        auto read_model_file = [](const fs::path &p) -> std::optional<MlpModel>
        {
            std::ifstream in(p, std::ios::binary);
            if (!in)
                return std::nullopt;
            return read_model(in);
        };
        for (double look : l.cfg.look_doas_deg)
        {
            auto &lm = models[look_key(look)];
            lm.dnn_en = read_model_file(mdir / model_name(LabelSource::enumerate, look));
            if (!lm.dnn_en)
                throw invalid_argument("missing DNN-EN model '" + (mdir / model_name(LabelSource::enumerate, look)).string() + "'");
            lm.dnn_sbsa = read_model_file(mdir / model_name(LabelSource::sbsa, look));
            const fs::path ds = ddir / dataset_name(LabelSource::enumerate, look);
            if (fs::exists(ds))
            {
                const auto data = read_dataset(ds);
                lm.nnc.emplace(data, NncMetric::mse);
                lm.nnc_mae.emplace(data, NncMetric::mae);
            }
        }
        const auto rep = evaluate(l.cfg, models);
        {
            auto os = open_out(fs::path(args.out_dir) / "eval_scenarios.csv");
            write_report_scenarios_csv(os, rep);
        }
        {
            auto os = open_out(fs::path(args.out_dir) / "eval_summary.csv");
            write_report_summary_csv(os, rep);
        }
        std::cout << "method           mean SINR (dB)  gap (dB)  exact match\n";
        for (const auto &m : rep.methods)
        {
            const auto s = rep.aggregate(m);
            std::printf("%-16s %14.3f %9.3f  %s\n", m.c_str(), s.mean_sinr_db, s.mean_gap_db,
                        std::isnan(s.exact_match_rate) ? "-" : std::to_string(s.exact_match_rate).c_str());
        }
        for (const auto &[hi, lo] : ordering_violations(rep))
            std::cout << "note: mean SINR of " << hi << " is below " << lo << " by more than 0.15 dB\n";
        nlohmann::json runtime;
        for (const auto &[k, v] : rep.runtime_seconds)
            runtime[k] = v;
        return {{"files", {"eval_scenarios.csv", "eval_summary.csv"}}, {"runtime_seconds", runtime}};
    }

    void write_masked_spectra(const fs::path &p, OmegaEvaluator &eval, const SelectionVector &z, std::size_t n_interferers)
    {
        auto os = open_out(p);
        os.precision(17);
        std::vector<Spectrum> cols{eval.source_spectrum(z.mask())};
        for (std::size_t l = 0; l < n_interferers; ++l)
            cols.push_back(eval.interferer_spectrum(l, z.mask()));
        os << "bin,desired";
        for (std::size_t l = 0; l < n_interferers; ++l)
            os << ",interferer_" << (l + 1);
        os << '\n';
        std::vector<double> peak;
        for (const auto &c : cols)
            peak.push_back(std::max(*std::max_element(c.values.begin(), c.values.end()), 1e-300));
        for (std::size_t m = 0; m < eval.dft_length(); ++m)
        {
            os << m;
            for (std::size_t c = 0; c < cols.size(); ++c)
                os << ',' << cols[c].values[m] / peak[c];
            os << '\n';
        }
    }

    void write_redundancy(const fs::path &dir, const std::string &tag, const SelectionVector &z, std::size_t k)
    {
        const auto red = selection_autocorrelation(z);
        {
            auto os = open_out(dir / ("spectra_" + tag + "_lag_redundancy.csv"));
            os << "lag,count\n";
            for (long lag = -red.max_lag(); lag <= red.max_lag(); ++lag)
                os << lag << ',' << red.at(lag) << '\n';
        }
        auto os = open_out(dir / ("spectra_" + tag + "_redundancy_dft.csv"));
        write_spectrum_csv(os, redundancy_spectrum(red, k));
    }

    nlohmann::json cmd_sbsa(const CommonArgs &args, const Loaded &l)
    {
        const Scenario scn = config_scenario(l);
        const auto &cfg = l.cfg;
        const auto res = sbsa_select(cfg.geom, scn, cfg.cardinality, cfg.sbsa);
        const fs::path dir = args.out_dir;
        const std::size_t k = cfg.sbsa.resolved_dft_length(cfg.geom.n_grid);
        {
            auto os = open_out(dir / "sbsa_result.csv");
            os.precision(17);
            os << "mask_bits,sinr_db,sinr_linear,best_start_index,omega\n";
            os << res.selection.to_bits() << ',' << res.sinr.db << ',' << res.sinr.linear << ','
               << res.starts[res.best_start].start_index << ',' << omega(res.selection, cfg.geom, scn, k) << '\n';
        }
        {
            auto os = open_out(dir / "sbsa_trace.csv");
            write_sbsa_trace_csv(os, res);
        }
        OmegaEvaluator eval(cfg.geom, scn, k);
        {
            auto os = open_out(dir / "spectra_desired_full.csv");
            write_spectrum_csv(os, signal_spectrum(steering_vector(cfg.geom, scn.desired.doa_deg), SelectionVector::full(cfg.geom.n_grid), k));
        }
        write_redundancy(dir, "sbsa", res.selection, k);
        write_masked_spectra(dir / "spectra_sbsa_masked.csv", eval, res.selection, scn.n_interferers());
        nlohmann::json out{{"mask", res.selection.to_bits()}, {"sinr_db", res.sinr.db}};
        std::cout << "SBSA mask " << res.selection.to_bits() << "  SINR " << res.sinr.db << " dB\n";

        // Enumerated best and worst configurations for comparison, when affordable.
        if (binomial(cfg.geom.n_grid, cfg.cardinality) <= cfg.enumeration_budget)
        {
            const auto ex = enumerate_extremes(correlation_matrices(cfg.geom, scn), cfg.cardinality, {cfg.enumeration_budget, cfg.threads});
            for (const auto &[tag, rc] : {std::pair{std::string("best"), ex.best}, std::pair{std::string("worst"), ex.worst}})
            {
                write_redundancy(dir, tag, rc.selection, k);
                write_masked_spectra(dir / ("spectra_" + tag + "_masked.csv"), eval, rc.selection, scn.n_interferers());
                out[tag] = {{"mask", rc.selection.to_bits()}, {"sinr_db", rc.sinr.db}};
                std::cout << "enumerated " << tag << " " << rc.selection.to_bits() << "  SINR " << rc.sinr.db << " dB\n";
            }
        }
        return out;
    }

    nlohmann::json cmd_enumerate(const CommonArgs &args, const Loaded &l, bool ranked, bool with_omega)
    {
        const Scenario scn = config_scenario(l);
        const auto &cfg = l.cfg;
        const EnumerateOptions opts{cfg.enumeration_budget, cfg.threads};
        const auto ex = enumerate_extremes(correlation_matrices(cfg.geom, scn), cfg.cardinality, opts);
        {
            auto os = open_out(fs::path(args.out_dir) / "enumerate_best.csv");
            os.precision(17);
            os << "which,rank_id,mask_bits,sinr_db\n";
            os << "best," << ex.best.rank_id << ',' << ex.best.selection.to_bits() << ',' << ex.best.sinr.db << '\n';
            os << "worst," << ex.worst.rank_id << ',' << ex.worst.selection.to_bits() << ',' << ex.worst.sinr.db << '\n';
        }
        std::cout << "best  " << ex.best.selection.to_bits() << "  " << ex.best.sinr.db << " dB\n"
                  << "worst " << ex.worst.selection.to_bits() << "  " << ex.worst.sinr.db << " dB\n"
                  << ex.count << " configurations\n";
        nlohmann::json files{"enumerate_best.csv"};
        if (ranked)
        {
            const auto list = enumerate_all_ranked(cfg.geom, scn, cfg.cardinality, with_omega, opts, cfg.sbsa.dft_length);
            auto os = open_out(fs::path(args.out_dir) / "enumerate_ranked.csv");
            write_ranked_csv(os, list);
            files.push_back("enumerate_ranked.csv");
        }
        return {{"files", files}, {"count", ex.count}};
    }

    nlohmann::json cmd_fig7(const CommonArgs &args, const Loaded &l)
    {
        const Scenario scn = config_scenario(l);
        const auto &cfg = l.cfg;
        const auto res = fig7_diagnostic(cfg.geom, scn, cfg.cardinality, cfg.sbsa.dft_length, {cfg.enumeration_budget, cfg.threads});
        {
            auto os = open_out(fs::path(args.out_dir) / "fig7.csv");
            write_fig7_csv(os, res);
        }
        {
            auto os = open_out(fs::path(args.out_dir) / "fig7_summary.csv");
            os.precision(12);
            os << "configurations,lower_half_mean_sinr_db,upper_half_mean_sinr_db,half_difference_db,best_sinr_position,worst_sinr_position\n";
            os << res.ranked.size() << ',' << res.lower_half_mean_db << ',' << res.upper_half_mean_db << ',' << res.half_difference_db()
               << ',' << res.best_sinr_position << ',' << res.worst_sinr_position << '\n';
        }
        std::cout << "lower-half mean " << res.lower_half_mean_db << " dB, upper-half mean " << res.upper_half_mean_db
                  << " dB, best-SINR configuration at position " << res.best_sinr_position << " of " << res.ranked.size() << '\n';
        return {{"files", {"fig7.csv", "fig7_summary.csv"}}, {"half_difference_db", res.half_difference_db()}};
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"sparsebf: sparse array design for MaxSINR beamforming"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string label_source, data_dir, model_dir;
    bool ranked = false, with_omega = false;

    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("config", args.config_path, "JSON config document")->required();
        sub->add_option("--seed", args.seed, "override the experiment seed (also seeds training)");
        sub->add_option("--out-dir", args.out_dir, "output directory")->capture_default_str();
    };

    auto *gen = app.add_subcommand("gen-data", "generate labeled training datasets");
    add_common(gen);
    gen->add_option("--label-source", label_source, "enumerate, sbsa or both (default: from config)");

    auto *tr = app.add_subcommand("train", "train one network per look direction");
    add_common(tr);
    tr->add_option("--label-source", label_source, "enumerate, sbsa or both (default: from config)");
    tr->add_option("--data-dir", data_dir, "directory holding the datasets (default: --out-dir)");

    auto *ev = app.add_subcommand("eval", "evaluate all methods on fresh test scenarios");
    add_common(ev);
    ev->add_option("--model-dir", model_dir, "directory holding the models (default: --out-dir)");
    ev->add_option("--data-dir", data_dir, "directory holding the NNC datasets (default: --out-dir)");

    auto *sb = app.add_subcommand("sbsa", "SBSA design for the config's scenario, with spectra dumps");
    add_common(sb);

    auto *en = app.add_subcommand("enumerate", "exhaustive search for the config's scenario");
    add_common(en);
    en->add_flag("--ranked", ranked, "also write every configuration");
    en->add_flag("--with-omega", with_omega, "rank by ascending Omega instead of SINR");

    auto *f7 = app.add_subcommand("fig7", "all configurations in ascending Omega order with SINR");
    add_common(f7);

    auto *cmp = app.add_subcommand("compare", "gen-data, train and eval with both label sources");
    add_common(cmp);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        const Loaded l = load(args);
        nlohmann::json outputs;
        std::string name;
        if (gen->parsed())
            name = "gen-data", outputs = cmd_gen_data(args, l, label_source);
        else if (tr->parsed())
            name = "train", outputs = cmd_train(args, l, label_source, data_dir);
        else if (ev->parsed())
            name = "eval", outputs = cmd_eval(args, l, model_dir, data_dir);
        else if (sb->parsed())
            name = "sbsa", outputs = cmd_sbsa(args, l);
        else if (en->parsed())
            name = "enumerate", outputs = cmd_enumerate(args, l, ranked, with_omega);
        else if (f7->parsed())
            name = "fig7", outputs = cmd_fig7(args, l);
        else if (cmp->parsed())
        {
            name = "compare";
            outputs["gen-data"] = cmd_gen_data(args, l, "both");
            outputs["train"] = cmd_train(args, l, "both", "");
            outputs["eval"] = cmd_eval(args, l, "", "");
        }
        write_manifest(args, l, name, outputs);
        return 0;
    }
    catch (const budget_exceeded_error &e)
    {
        std::cerr << "budget error: " << e.what() << '\n';
        return 3;
    }
    catch (const format_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const invalid_argument &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const domain_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
