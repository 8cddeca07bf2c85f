// Command-line driver: dataset generation, ADM conversion, training,
// encoding/decoding, analyses, classification and the acceptance suite.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "spikecode/acceptance.hpp"
#include "spikecode/analysis.hpp"
#include "spikecode/classify.hpp"
#include "spikecode/io.hpp"
#include "spikecode/metrics.hpp"
#include "spikecode/pipeline.hpp"

namespace fs = std::filesystem;
using namespace spikecode;

namespace {

// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

Budget parse_budget(const std::string& s) {
  if (s == "default") return {};
  if (s == "quick") return {3, 4, 40};
  Budget b;
  char x1 = 0;
  char x2 = 0;
  std::istringstream is(s);
  if (!(is >> b.tau_rounds >> x1 >> b.samples_per_round >> x2 >> b.weight_steps) || x1 != 'x' || x2 != 'x') {
    throw std::invalid_argument("budget must be default, quick or RxSxW (e.g. 10x8x300)");
  }
  return b;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false, got " + s);
}

ExperimentConfig load_run_config(const fs::path& run) { return experiment_from_json(read_json(run / "config.json")); }

fs::path seed_dir(const fs::path& run, std::uint64_t seed) { return run / ("seed_" + std::to_string(seed)); }

std::uint64_t pick_seed(const ExperimentConfig& cfg, long long requested) {
  if (requested < 0) return cfg.seeds.front();
  const auto s = static_cast<std::uint64_t>(requested);
  if (std::find(cfg.seeds.begin(), cfg.seeds.end(), s) == cfg.seeds.end()) {
    throw std::invalid_argument("seed " + std::to_string(s) + " is not part of this run");
  }
  return s;
}

void print_rows(std::ostream& os, const std::vector<MetricRow>& rows) {
  os << "run,seed,metric,value\n";
  for (const auto& r : rows) os << r.run << ',' << r.seed << ',' << r.metric << ',' << format_double(r.value) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spike-timing encoder toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample stimuli of one family, or a filtered-noise classification set");
  std::string gen_family = "DoubleGauss";
  std::string gen_preset = "sim";
  std::size_t gen_count = 300;
  std::uint64_t gen_seed = 1;
  int gen_classes = 0;
  std::size_t gen_per_class = 84;
  std::string gen_aligned = "true";
  std::string gen_out;
  gen->add_option("--family", gen_family, "Sinusoidal, Gabor, SingleGauss or DoubleGauss");
  gen->add_option("--preset", gen_preset, "sim or chip");
  gen->add_option("--count", gen_count, "Number of stimuli");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--classes", gen_classes, "Build the classification set with 6, 8 or 10 classes instead");
  gen->add_option("--per-class", gen_per_class);
  gen->add_option("--aligned", gen_aligned, "true or false");
  gen->add_option("--out", gen_out, "Output directory");

  // adm
  auto* adm = app.add_subcommand("adm", "Convert a generated dataset into UP/DN event streams");
  std::string adm_data;
  std::string adm_delta = "auto";
  std::string adm_out;
  adm->add_option("--data", adm_data, "Dataset directory written by generate")->required();
  adm->add_option("--delta", adm_delta, "auto or a threshold value");
  adm->add_option("--out", adm_out, "Output directory (default <data>/streams)");

  // train
  auto* train = app.add_subcommand("train", "Optimize a network and fit its readout");
  std::string tr_config;
  std::string tr_family = "DoubleGauss";
  std::string tr_preset = "sim";
  std::size_t tr_n = 64;
  std::vector<std::uint64_t> tr_seeds{1};
  std::string tr_budget = "default";
  std::size_t tr_stimuli = 300;
  double tr_delta = 0.0;
  std::vector<std::string> tr_figures;
  std::string tr_name = "run";
  std::string tr_out;
  train->add_option("--config", tr_config, "JSON experiment config (flags given explicitly override it)");
  auto* o_family = train->add_option("--family", tr_family);
  auto* o_preset = train->add_option("--preset", tr_preset);
  auto* o_n = train->add_option("--n", tr_n, "Network size");
  auto* o_seeds = train->add_option("--seed", tr_seeds, "One or more seeds");
  auto* o_budget = train->add_option("--budget", tr_budget, "default, quick or RxSxW (tau rounds x samples x weight steps)");
  auto* o_stimuli = train->add_option("--stimuli", tr_stimuli, "Stimuli per task");
  auto* o_delta = train->add_option("--delta", tr_delta, "Fixed ADM threshold (default: searched)");
  auto* o_figs = train->add_option("--figure", tr_figures, "fig2b, fig3, fig4, fig5, fig6 or all (repeatable)");
  auto* o_name = train->add_option("--name", tr_name);
  bool tr_interleaved = false;
  train->add_flag("--interleaved", tr_interleaved, "Alternate tau rounds with weight steps");
  train->add_option("--out", tr_out, "Run directory (default $SPIKECODE_OUT/<name>)");

  // encode
  auto* enc = app.add_subcommand("encode", "Encode event streams with a stored network (JSON lines)");
  std::string enc_network;
  std::vector<std::string> enc_streams;
  double enc_window = 0.2;
  double enc_dt = 2e-4;
  bool enc_streaming = false;
  double enc_trigger_window = 0.2;
  double enc_duration = 0.0;
  double enc_hold = 0.2;
  std::string enc_out;
  enc->add_option("--network", enc_network)->required();
  enc->add_option("--stream", enc_streams, "Stream CSV (time_s,channel); repeatable")->required();
  enc->add_option("--window", enc_window, "Integration window in seconds");
  enc->add_option("--dt", enc_dt);
  enc->add_flag("--streaming", enc_streaming, "Always-on mode with the rolling-window trigger");
  enc->add_option("--trigger-window", enc_trigger_window, "Rolling window for --streaming");
  enc->add_option("--duration", enc_duration, "Stream length for --streaming (default: last event + 2 windows)");
  enc->add_option("--hold", enc_hold, "Refractory hold per neuron for --streaming");
  enc->add_option("--out", enc_out, "Output file (default stdout)");

  // decode
  auto* dec = app.add_subcommand("decode", "Apply a stored readout to JSON-lines encodings");
  std::string dec_decoder;
  std::string dec_encodings;
  std::string dec_out;
  dec->add_option("--decoder", dec_decoder)->required();
  dec->add_option("--encodings", dec_encodings)->required();
  dec->add_option("--out", dec_out);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a trained run on its held-out test split");
  std::string ev_run;
  long long ev_seed = -1;
  std::string ev_out;
  eval->add_option("--run", ev_run)->required();
  eval->add_option("--seed", ev_seed, "Seed within the run (default: first)");
  eval->add_option("--out", ev_out);

  // analyze
  auto* ana = app.add_subcommand("analyze", "Sequence, robustness and cross-type analyses of a run");
  ana->require_subcommand(1);
  std::string an_run;
  long long an_seed = -1;
  std::string an_out;
  std::size_t an_repeats = 3;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--run", an_run)->required();
    sub->add_option("--seed", an_seed);
    sub->add_option("--out", an_out);
  };
  auto* an_mi = ana->add_subcommand("mi", "Mutation index and mean sequence");
  add_common(an_mi);
  auto* an_rob = ana->add_subcommand("robustness", "Jitter, deletion and homogenization sweep");
  add_common(an_rob);
  an_rob->add_option("--repeats", an_repeats);
  auto* an_ct = ana->add_subcommand("crosstype", "Frozen network, fresh readout per family");
  add_common(an_ct);

  // classify
  auto* cls = app.add_subcommand("classify", "Filtered-noise classification (per-split accuracy CSV)");
  std::string cl_mode = "order";
  int cl_classes = 6;
  std::string cl_aligned = "true";
  std::size_t cl_n = 128;
  std::string cl_network;
  bool cl_random = false;
  std::size_t cl_splits = 200;
  std::size_t cl_per_class = 84;
  std::uint64_t cl_seed = 1;
  std::string cl_out;
  cls->add_option("--mode", cl_mode, "time, order or raw");
  cls->add_option("--classes", cl_classes, "6, 8 or 10");
  cls->add_option("--aligned", cl_aligned, "true or false");
  cls->add_option("--n", cl_n, "Network size when no --network is given");
  cls->add_option("--network", cl_network, "Stored network JSON (default: optimize on Sinusoidal)");
  cls->add_flag("--random-weights", cl_random, "Use an untrained network");
  cls->add_option("--splits", cl_splits);
  cls->add_option("--per-class", cl_per_class);
  cls->add_option("--seed", cl_seed);
  cls->add_option("--out", cl_out);

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Run the acceptance suite and print a pass/fail table");
  std::uint64_t rep_seed = 1;
  bool rep_quick = false;
  std::string rep_out;
  rep->add_option("--seed", rep_seed);
  rep->add_flag("--quick", rep_quick, "Property checks only, reduced budgets");
  rep->add_option("--out", rep_out, "Output directory (default $SPIKECODE_OUT/reproduce)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (gen_classes != 0) {
        const auto data = build_classification_dataset(gen_classes, gen_per_class, parse_bool(gen_aligned), gen_seed);
        const fs::path out = gen_out.empty() ? default_output_root() / ("classes" + std::to_string(gen_classes)) : fs::path(gen_out);
        fs::create_directories(out);
        Json meta;
        meta["kind"] = "classification";
        meta["n_classes"] = data.n_classes;
        meta["aligned"] = data.aligned;
        meta["seed"] = data.seed;
        meta["grid"] = to_json(data.grid);
        write_json(out / "metadata.json", meta);
        std::vector<std::vector<std::string>> labels;
        for (std::size_t i = 0; i < data.examples.size(); ++i) {
          labels.push_back({std::to_string(i), std::to_string(data.examples[i].label), format_double(data.examples[i].shift_s)});
        }
        write_csv(out / "labels.csv", {"example", "label", "shift_s"}, labels);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < data.examples.size(); ++i) {
          std::vector<std::string> r{std::to_string(i)};
          for (double v : data.examples[i].samples) r.push_back(format_double(v));
          rows.push_back(std::move(r));
        }
        std::vector<std::string> header{"example"};
        for (std::size_t k = 0; k < data.grid.size(); ++k) header.push_back("x" + std::to_string(k));
        write_csv(out / "waveforms.csv", header, rows);
        std::cout << "wrote " << data.examples.size() << " examples to " << out.string() << '\n';
      } else {
        WaveformDataset d;
        d.family = parse_family(gen_family);
        d.preset = parse_preset(gen_preset);
        d.grid = default_grid(d.preset);
        d.seed = gen_seed;
        const auto spec = family_spec(d.family, d.preset);
        d.params = sample_params(spec, gen_count, gen_seed);
        for (const auto& p : d.params) d.waveforms.push_back(synthesize({spec, p, d.grid}));
        const fs::path out = gen_out.empty() ? default_output_root() / ("data_" + gen_family) : fs::path(gen_out);
        write_dataset(out, d);
        std::cout << "wrote " << d.waveforms.size() << " stimuli to " << out.string() << '\n';
      }
    } else if (*adm) {
      const auto d = read_dataset(adm_data);
      double delta = 0.0;
      if (adm_delta == "auto") {
        delta = dataset_delta(d.waveforms, d.grid.fs_hz);
      } else {
        delta = std::stod(adm_delta);
      }
      const fs::path out = adm_out.empty() ? fs::path(adm_data) / "streams" : fs::path(adm_out);
      fs::create_directories(out);
      for (std::size_t i = 0; i < d.waveforms.size(); ++i) {
        write_stream_csv(out / ("stream_" + std::to_string(i) + ".csv"), adm_encode(d.waveforms[i], d.grid.fs_hz, delta));
      }
      write_json(out / "adm.json", {{"delta", delta}, {"fs_hz", d.grid.fs_hz}, {"n_streams", d.waveforms.size()}});
      std::cout << "delta " << format_double(delta) << ", wrote " << d.waveforms.size() << " streams to " << out.string() << '\n';
    } else if (*train) {
      ExperimentConfig cfg;
      if (!tr_config.empty()) cfg = experiment_from_json(read_json(tr_config));
      if (tr_config.empty() || o_family->count()) cfg.family = parse_family(tr_family);
      if (tr_config.empty() || o_preset->count()) cfg.optimizer.task.preset = parse_preset(tr_preset);
      if (tr_config.empty() || o_n->count()) cfg.n = tr_n;
      if (tr_config.empty() || o_seeds->count()) cfg.seeds = tr_seeds;
      if (tr_config.empty() || o_budget->count()) cfg.budget = parse_budget(tr_budget);
      if (tr_config.empty() || o_stimuli->count()) cfg.optimizer.task.n_stimuli = tr_stimuli;
      if (o_delta->count()) cfg.optimizer.task.delta = tr_delta;
      if (tr_interleaved) cfg.optimizer.interleaved = true;
      if (tr_config.empty() || o_name->count()) cfg.name = tr_name;
      if (o_figs->count()) {
        cfg.figures.clear();
        for (const auto& f : tr_figures) {
          if (f != "all") cfg.figures.push_back(f);
        }
      } else if (tr_config.empty()) {
        cfg.figures = {"none"};
      }
      cfg = experiment_from_json(to_json(cfg));  // validates
      const fs::path out = tr_out.empty() ? default_output_root() / cfg.name : fs::path(tr_out);
      const auto summary = run_pipeline(cfg, out);
      for (const auto& r : summary.metrics) {
        if (r.metric == "test_kendall" || r.metric == "test_pearson" || r.metric == "val_kendall") {
          std::cout << "seed " << r.seed << ' ' << r.metric << ' ' << format_double(r.value) << '\n';
        }
      }
      std::cout << "run directory " << out.string() << '\n';
    } else if (*enc) {
      const auto cfg = network_from_json(read_json(enc_network));
      Output out(enc_out);
      for (const auto& path : enc_streams) {
        auto stream = read_stream_csv(path);
        if (!enc_streaming) {
          out.os() << to_json(encode(simulate(cfg, stream, {enc_window, enc_dt}))).dump() << '\n';
          continue;
        }
        double last = 0.0;
        for (double t : stream.up_times) last = std::max(last, t);
        for (double t : stream.dn_times) last = std::max(last, t);
        const double duration = enc_duration > 0.0 ? enc_duration : last + 2.0 * std::max(enc_trigger_window, enc_hold);
        const auto spikes = simulate_continuous(cfg, stream, duration, enc_dt, enc_hold);
        for (const auto& em : run_stream(spikes, cfg.size(), enc_trigger_window, duration, enc_dt)) {
          Json j = to_json(em.encoding);
          j["time_s"] = em.time_s;
          j["stream"] = path;
          out.os() << j.dump() << '\n';
        }
      }
    } else if (*dec) {
      const auto d = decoder_from_json(read_json(dec_decoder));
      std::ifstream is(dec_encodings);
      if (!is) throw std::runtime_error("cannot read " + dec_encodings);
      Output out(dec_out);
      out.os() << "index";
      for (std::size_t k = 0; k < d.n_outputs(); ++k) out.os() << ",p" << k;
      out.os() << '\n';
      std::string line;
      std::size_t idx = 0;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto p = predict(d, encoding_from_json(Json::parse(line)));
        out.os() << idx++;
        for (double v : p) out.os() << ',' << format_double(v);
        out.os() << '\n';
      }
    } else if (*eval) {
      const auto cfg = load_run_config(ev_run);
      const auto seed = pick_seed(cfg, ev_seed);
      const auto net = network_from_json(read_json(seed_dir(ev_run, seed) / "network.json"));
      const auto decoder = decoder_from_json(read_json(seed_dir(ev_run, seed) / "decoder.json"));
      const auto task = optimization_task(cfg.family, seed, cfg.optimizer);
      const auto test = make_samples(simulate_set(net, task.test, simulation_options(task.grid)), task.test.params);
      const auto r = evaluate(decoder, test);
      std::vector<MetricRow> rows{{cfg.name, seed, "test_kendall", r.kendall_mean},
                                  {cfg.name, seed, "test_pearson", r.pearson_mean},
                                  {cfg.name, seed, "outlier_pct", r.outlier_pct}};
      const auto names = param_names(cfg.family);
      for (std::size_t k = 0; k < r.kendall_per_param.size(); ++k) {
        rows.push_back({cfg.name, seed, "kendall_" + names[k], r.kendall_per_param[k]});
        rows.push_back({cfg.name, seed, "pearson_" + names[k], r.pearson_per_param[k]});
      }
      Output out(ev_out);
      print_rows(out.os(), rows);
    } else if (*ana) {
      const auto cfg = load_run_config(an_run);
      const auto seed = pick_seed(cfg, an_seed);
      const auto net = network_from_json(read_json(seed_dir(an_run, seed) / "network.json"));
      const auto task = optimization_task(cfg.family, seed, cfg.optimizer);
      Output out(an_out);
      if (*an_mi) {
        const auto sim = simulation_options(task.grid);
        std::vector<Encoding> encs;
        for (const StimulusSet* set : {&task.train, &task.val, &task.test}) {
          for (const auto& r : simulate_set(net, *set, sim)) encs.push_back(encode(r));
        }
        const auto st = mutation_index(encs);
        out.os() << "run,seed,rank,neuron,mean_time_s\n";
        for (std::size_t k = 0; k < st.order.size(); ++k) {
          out.os() << cfg.name << ',' << seed << ',' << k << ',' << st.order[k] << ',' << format_double(st.mean_times[k]) << '\n';
        }
        std::cerr << "mutation index " << format_double(st.mi) << " over " << st.per_trial_taus.size() << " trials"
                  << (st.degenerate ? " (degenerate)" : "") << '\n';
      } else if (*an_rob) {
        auto grid = cfg.robustness;
        grid.repeats = an_repeats;
        grid.seed = derive_seed(grid.seed, seed);
        out.os() << "run,seed,arm,train_level,test_level,kendall,score_pct\n";
        for (const auto& c : robustness_sweep(net, task, grid)) {
          out.os() << cfg.name << ',' << seed << ',' << c.arm << ',' << format_double(c.train_level) << ','
                   << format_double(c.test_level) << ',' << format_double(c.kendall) << ',' << format_double(c.score_pct) << '\n';
        }
      } else {
        CrossTypeOptions o;
        o.n_stimuli = cfg.crosstype_stimuli;
        o.seed = derive_seed(seed, 0xc7);
        o.preset = cfg.optimizer.task.preset;
        out.os() << "run,seed,family,in_type,pearson,kendall,degenerate\n";
        for (const auto& e : in_out_type_eval(net, task.delta, cfg.family, o)) {
          out.os() << cfg.name << ',' << seed << ',' << to_string(e.family) << ',' << e.in_type << ','
                   << format_double(e.pearson) << ',' << format_double(e.kendall) << ',' << e.degenerate << '\n';
        }
      }
    } else if (*cls) {
      const auto mode = parse_feature_mode(cl_mode);
      const bool aligned = parse_bool(cl_aligned);
      const auto data = build_classification_dataset(cl_classes, cl_per_class, aligned, cl_seed);
      NetworkConfig net;
      double delta = 0.0;
      if (mode != FeatureMode::Raw) {
        if (!cl_network.empty()) {
          net = network_from_json(read_json(cl_network));
        } else if (cl_random) {
          net = init_config(cl_n, {}, cl_seed);
        } else {
          std::cerr << "optimizing a Sinusoidal network with n=" << cl_n << '\n';
          net = optimize(SignalFamily::Sinusoidal, cl_n, Budget{}, cl_seed).config;
        }
        std::vector<Waveform> waves;
        for (const auto& ex : data.examples) waves.push_back(ex.samples);
        delta = dataset_delta(waves, data.grid.fs_hz);
      }
      SplitProtocol protocol;
      protocol.splits = cl_splits;
      protocol.seed = cl_seed;
      const auto acc = classify_experiment(dataset_features(data, &net, mode, delta), protocol);
      Output out(cl_out);
      out.os() << "split,mode,classes,aligned,accuracy\n";
      for (std::size_t s = 0; s < acc.size(); ++s) {
        out.os() << s << ',' << cl_mode << ',' << cl_classes << ',' << aligned << ',' << format_double(acc[s]) << '\n';
      }
      std::cerr << "mean accuracy " << format_double(mean(acc)) << " (sd " << format_double(stddev(acc)) << ")\n";
    } else if (*rep) {
      AcceptanceOptions opt;
      opt.seed = rep_seed;
      opt.quick = rep_quick;
      opt.work_dir = rep_out.empty() ? default_output_root() / "reproduce" : fs::path(rep_out);
      opt.log = [](const std::string& m) { std::cerr << "  .. " << m << '\n'; };
      opt.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
      const auto report = run_acceptance(opt);
      write_acceptance(opt.work_dir, report);
      std::cout << "\ncriterion  status  name\n";
      for (const auto& r : report.results) {
        const char* s = r.status == CriterionStatus::Pass ? "pass" : r.status == CriterionStatus::Fail ? "FAIL" : "skip";
        std::printf("%9d  %-6s  %s\n", r.id, s, r.name.c_str());
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
