#include "spikecode/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

#include "spikecode/classify.hpp"
#include "spikecode/metrics.hpp"

namespace spikecode {

namespace fs = std::filesystem;

namespace {

Json taus_json(const TimeConstants& t) {
  return {{"mem_s", t.mem_s}, {"syn_plus_s", t.syn_plus_s}, {"syn_minus_s", t.syn_minus_s}};
}

TimeConstants taus_from(const Json& j, const TimeConstants& d) {
  return {j.value("mem_s", d.mem_s), j.value("syn_plus_s", d.syn_plus_s), j.value("syn_minus_s", d.syn_minus_s)};
}

template <typename T>
void read_into(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Json to_json(const ExperimentConfig& c) {
  const auto& o = c.optimizer;
  const auto& r = c.robustness;
  const auto& k = c.classification;
  Json j;
  j["name"] = c.name;
  j["family"] = std::string(to_string(c.family));
  j["preset"] = std::string(to_string(o.task.preset));
  j["n"] = c.n;
  j["seeds"] = c.seeds;
  j["budget"] = {{"tau_rounds", c.budget.tau_rounds},
                 {"samples_per_round", c.budget.samples_per_round},
                 {"weight_steps", c.budget.weight_steps}};
  j["task"] = {{"n_stimuli", o.task.n_stimuli},
               {"train_fraction", o.task.train_fraction},
               {"val_fraction", o.task.val_fraction},
               {"delta", o.task.delta},
               {"delta_search_size", o.task.delta_search_size}};
  j["optimizer"] = {{"initial_taus", taus_json(o.initial_taus)},
                    {"initial_radius", o.initial_radius},
                    {"radius_decay", o.radius_decay},
                    {"tau_min_s", o.tau_min_s},
                    {"tau_max_s", o.tau_max_s},
                    {"sigma_het", o.sigma_het},
                    {"q", o.q},
                    {"theta", o.theta},
                    {"interleaved", o.interleaved}};
  j["robustness"] = {{"jitter_train_s", r.jitter_train_s}, {"jitter_test_s", r.jitter_test_s},
                     {"delete_train", r.delete_train},     {"delete_test", r.delete_test},
                     {"homog_w", r.homog_w},               {"homog_tau", r.homog_tau},
                     {"repeats", r.repeats},               {"seed", r.seed}};
  j["crosstype_stimuli"] = c.crosstype_stimuli;
  j["classification"] = {{"n_classes", k.n_classes},
                         {"per_class", k.per_class},
                         {"splits", k.protocol.splits},
                         {"n_train", k.protocol.n_train},
                         {"n_test", k.protocol.n_test},
                         {"seed", k.protocol.seed},
                         {"random_weights", k.random_weights}};
  j["figures"] = c.figures;
  return j;
}

ExperimentConfig experiment_from_json(const Json& j) {
  ExperimentConfig c;
  read_into(j, "name", c.name);
  if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
  if (j.contains("preset")) c.optimizer.task.preset = parse_preset(j.at("preset").get<std::string>());
  read_into(j, "n", c.n);
  read_into(j, "seeds", c.seeds);
  if (j.contains("budget")) {
    const auto& b = j.at("budget");
    read_into(b, "tau_rounds", c.budget.tau_rounds);
    read_into(b, "samples_per_round", c.budget.samples_per_round);
    read_into(b, "weight_steps", c.budget.weight_steps);
  }
  if (j.contains("task")) {
    const auto& t = j.at("task");
    auto& o = c.optimizer.task;
    read_into(t, "n_stimuli", o.n_stimuli);
    read_into(t, "train_fraction", o.train_fraction);
    read_into(t, "val_fraction", o.val_fraction);
    read_into(t, "delta", o.delta);
    read_into(t, "delta_search_size", o.delta_search_size);
  }
  if (j.contains("optimizer")) {
    const auto& s = j.at("optimizer");
    auto& o = c.optimizer;
    if (s.contains("initial_taus")) o.initial_taus = taus_from(s.at("initial_taus"), o.initial_taus);
    read_into(s, "initial_radius", o.initial_radius);
    read_into(s, "radius_decay", o.radius_decay);
    read_into(s, "tau_min_s", o.tau_min_s);
    read_into(s, "tau_max_s", o.tau_max_s);
    read_into(s, "sigma_het", o.sigma_het);
    read_into(s, "q", o.q);
    read_into(s, "theta", o.theta);
    read_into(s, "interleaved", o.interleaved);
  }
  if (j.contains("robustness")) {
    const auto& s = j.at("robustness");
    auto& r = c.robustness;
    read_into(s, "jitter_train_s", r.jitter_train_s);
    read_into(s, "jitter_test_s", r.jitter_test_s);
    read_into(s, "delete_train", r.delete_train);
    read_into(s, "delete_test", r.delete_test);
    read_into(s, "homog_w", r.homog_w);
    read_into(s, "homog_tau", r.homog_tau);
    read_into(s, "repeats", r.repeats);
    read_into(s, "seed", r.seed);
  }
  read_into(j, "crosstype_stimuli", c.crosstype_stimuli);
  if (j.contains("classification")) {
    const auto& s = j.at("classification");
    auto& k = c.classification;
    read_into(s, "n_classes", k.n_classes);
    read_into(s, "per_class", k.per_class);
    read_into(s, "splits", k.protocol.splits);
    read_into(s, "n_train", k.protocol.n_train);
    read_into(s, "n_test", k.protocol.n_test);
    read_into(s, "seed", k.protocol.seed);
    read_into(s, "random_weights", k.random_weights);
  }
  read_into(j, "figures", c.figures);
  for (const auto& f : c.figures) {
    if (f == "none") continue;
    if (std::find(kFigureStages.begin(), kFigureStages.end(), f) == kFigureStages.end()) {
      throw std::invalid_argument("unknown figure stage: " + f);
    }
  }
  if (c.seeds.empty()) throw std::invalid_argument("config needs at least one seed");
  return c;
}

PipelineError::PipelineError(std::string stage, const std::string& message)
    : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}

fs::path default_output_root() {
  if (const char* env = std::getenv("SPIKECODE_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

namespace {

using Rows = std::vector<std::vector<std::string>>;

std::string fmt(double v) { return format_double(v); }

template <typename F>
auto run_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(stage, e.what());
  }
}

std::vector<Encoding> all_encodings(const NetworkConfig& cfg, const TaskData& task) {
  const auto sim = simulation_options(task.grid);
  std::vector<Encoding> out;
  for (const StimulusSet* set : {&task.train, &task.val, &task.test}) {
    for (const auto& r : simulate_set(cfg, *set, sim)) out.push_back(encode(r));
  }
  return out;
}

}  // namespace

RunSummary run_pipeline(const ExperimentConfig& config, const fs::path& out_dir) {
  auto wants = [&](const std::string& f) {
    return config.figures.empty() || std::find(config.figures.begin(), config.figures.end(), f) != config.figures.end();
  };
  RunSummary summary;
  summary.dir = out_dir;
  run_stage("setup", [&] {
    fs::create_directories(out_dir);
    write_json(out_dir / "config.json", to_json(config));
  });

  Rows fig2b;
  Rows fig3;
  Rows fig4;
  Rows fig5;
  Rows fig6;
  auto flush = [&] {
    write_metrics_csv(out_dir / "metrics.csv", summary.metrics);
    if (wants("fig2b")) {
      write_csv(out_dir / "fig2b_pca_curve.csv",
                {"seed", "k", "train_kendall", "val_kendall", "cumulative_explained"}, fig2b);
    }
    if (wants("fig3")) {
      write_csv(out_dir / "fig3_robustness.csv",
                {"seed", "arm", "train_level", "test_level", "kendall", "score_pct"}, fig3);
    }
    if (wants("fig4")) {
      write_csv(out_dir / "fig4_tauratios.csv",
                {"seed", "n", "tau_mem_s", "tau_syn_plus_s", "tau_syn_minus_s", "plus_over_mem", "plus_over_minus"},
                fig4);
    }
    if (wants("fig5")) {
      write_csv(out_dir / "fig5_crosstype.csv",
                {"seed", "trained_family", "family", "in_type", "pearson", "kendall", "degenerate"}, fig5);
    }
    if (wants("fig6")) {
      write_csv(out_dir / "fig6_classification.csv", {"seed", "n_classes", "aligned", "mode", "split", "accuracy"},
                fig6);
    }
  };

  try {
    for (std::size_t si = 0; si < config.seeds.size(); ++si) {
      const auto seed = config.seeds[si];
      auto metric = [&](const std::string& name, double v) { summary.metrics.push_back({config.name, seed, name, v}); };
      const fs::path seed_dir = out_dir / ("seed_" + std::to_string(seed));

      const auto result = run_stage("optimize", [&] {
        return optimize(config.family, config.n, config.budget, seed, config.optimizer);
      });
      run_stage("write", [&] {
        fs::create_directories(seed_dir);
        write_json(seed_dir / "network.json", to_json(result.config));
        write_json(seed_dir / "decoder.json", to_json(result.fit.decoder));
        Rows hist;
        for (const auto& [eval, score] : result.state.history) hist.push_back({std::to_string(eval), fmt(score)});
        write_csv(seed_dir / "history.csv", {"evaluation", "best_val_kendall"}, hist);
        if (si == 0) {
          write_json(out_dir / "network.json", to_json(result.config));
          write_json(out_dir / "decoder.json", to_json(result.fit.decoder));
        }
      });

      run_stage("evaluate", [&] {
        const auto& rep = result.test_report;
        metric("delta", result.task.delta);
        metric("val_kendall", result.fit.val_score);
        metric("test_kendall", rep.kendall_mean);
        metric("test_pearson", rep.pearson_mean);
        metric("outlier_pct", rep.outlier_pct);
        metric("k", static_cast<double>(result.fit.decoder.k));
        metric("accepted_weight_steps", static_cast<double>(result.state.accepted_weight_steps));
        metric("tau_mem_s", result.config.taus.mem_s);
        metric("tau_syn_plus_s", result.config.taus.syn_plus_s);
        metric("tau_syn_minus_s", result.config.taus.syn_minus_s);
        const auto encs = all_encodings(result.config, result.task);
        const auto mi = mutation_index(encs);
        metric("mutation_index", mi.mi);
        double fired = 0.0;
        for (const auto& e : encs) fired += static_cast<double>(e.n_fired);
        metric("mean_fired_fraction", fired / static_cast<double>(encs.size() * config.n));
      });

      if (wants("fig2b")) {
        run_stage("fig2b", [&] {
          const auto& c = result.fit.curve;
          for (std::size_t k = 0; k < c.val_kendall.size(); ++k) {
            fig2b.push_back({std::to_string(seed), std::to_string(k + 1),
                             fmt(k < c.train_kendall.size() ? c.train_kendall[k] : 0.0), fmt(c.val_kendall[k]),
                             fmt(c.cumulative_explained[k])});
          }
        });
      }
      if (wants("fig3")) {
        run_stage("fig3", [&] {
          auto grid = config.robustness;
          grid.seed = derive_seed(grid.seed, seed);
          for (const auto& cell : robustness_sweep(result.config, result.task, grid)) {
            fig3.push_back({std::to_string(seed), cell.arm, fmt(cell.train_level), fmt(cell.test_level),
                            fmt(cell.kendall), fmt(cell.score_pct)});
          }
        });
      }
      if (wants("fig4")) {
        run_stage("fig4", [&] {
          const auto r = tau_ratio_report(result.config);
          const auto& t = result.config.taus;
          fig4.push_back({std::to_string(seed), std::to_string(config.n), fmt(t.mem_s), fmt(t.syn_plus_s),
                          fmt(t.syn_minus_s), fmt(r.plus_over_mem), fmt(r.plus_over_minus)});
        });
      }
      if (wants("fig5")) {
        run_stage("fig5", [&] {
          CrossTypeOptions opts;
          opts.n_stimuli = config.crosstype_stimuli;
          opts.seed = derive_seed(seed, 0xc7);
          opts.preset = config.optimizer.task.preset;
          for (const auto& e : in_out_type_eval(result.config, result.task.delta, config.family, opts)) {
            fig5.push_back({std::to_string(seed), std::string(to_string(config.family)),
                            std::string(to_string(e.family)), e.in_type ? "1" : "0", fmt(e.pearson), fmt(e.kendall),
                            e.degenerate ? "1" : "0"});
          }
        });
      }
      if (wants("fig6")) {
        run_stage("fig6", [&] {
          const auto& k = config.classification;
          const NetworkConfig net = k.random_weights
                                        ? init_config(config.n, config.optimizer.initial_taus, seed,
                                                      config.optimizer.sigma_het)
                                        : result.config;
          auto protocol = k.protocol;
          protocol.seed = derive_seed(protocol.seed, seed);
          for (bool aligned : {true, false}) {
            const auto data = build_classification_dataset(k.n_classes, k.per_class, aligned, derive_seed(seed, 0xc1a));
            std::vector<Waveform> waves;
            for (const auto& ex : data.examples) waves.push_back(ex.samples);
            const double delta = dataset_delta(waves, data.grid.fs_hz);
            for (auto mode : {FeatureMode::Raw, FeatureMode::Time, FeatureMode::Order}) {
              const auto acc = classify_experiment(dataset_features(data, &net, mode, delta), protocol);
              for (std::size_t s = 0; s < acc.size(); ++s) {
                fig6.push_back({std::to_string(seed), std::to_string(k.n_classes), aligned ? "1" : "0",
                                std::string(to_string(mode)), std::to_string(s), fmt(acc[s])});
              }
              summary.metrics.push_back({config.name, seed,
                                         std::string("accuracy_") + (aligned ? "aligned_" : "shifted_") +
                                             std::string(to_string(mode)),
                                         mean(acc)});
            }
          }
        });
      }
      flush();
    }
  } catch (...) {
    flush();
    throw;
  }
  flush();
  return summary;
}

}  // namespace spikecode
