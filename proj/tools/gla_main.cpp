// gla: anomaly detection for discrete event streams.
//
//   gla run   --input events.log --out results/ [options]
//   gla synth exp1 --seed 7 --out data.txt
//
// Exit codes: 0 success, 2 bad configuration, 3 input error, 4 numerical
// failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gla/gla.hpp"

namespace {

int run_command(const gla::GlaConfig &cfg) {
  const gla::OutlierReport report = gla::run(cfg);
  std::printf("windows:  %zu\n", report.windows.size());
  std::printf("clusters: %d\n", report.num_clusters);
  std::printf("outliers: %zu\n", report.outlier_ids.size());
  if (report.metrics) {
    const gla::Metrics &m = *report.metrics;
    std::printf("precision %.4f  recall %.4f  f1 %.4f%s\n", m.precision,
                m.recall, m.f1, m.degenerate ? "  (degenerate ratios)" : "");
  }
  const gla::StageTimings &t = report.timings;
  std::printf(
      "timings (ms): ingest %.1f  fit %.1f  gauge %.1f  embed %.1f  "
      "cluster %.1f  total %.1f\n",
      t.ingest_ms, t.fit_ms, t.gauge_ms, t.embed_ms, t.cluster_ms, t.total_ms);
  if (!cfg.out_dir.empty())
    std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
  return 0;
}

int synth_command(const std::string &experiment, std::uint64_t seed,
                  const std::string &out_path, std::string labels_path) {
  gla::LabeledDataset data;
  if (experiment == "exp1") {
    data = gla::gen_experiment1(seed);
  } else if (experiment == "exp2") {
    data = gla::gen_experiment2();
  } else {
    throw gla::ConfigError("unknown experiment: " + experiment);
  }
  if (labels_path.empty()) labels_path = out_path + ".labels.csv";
  gla::write_dataset(data, out_path, labels_path);
  std::printf("%s: %zu sequences of length %zu (%zu anomalous)\n",
              experiment.c_str(), data.windows.size(),
              data.windows.front().size(),
              static_cast<std::size_t>(
                  std::count(data.labels.begin(), data.labels.end(), 1)));
  std::printf("events:  %s\nlabels:  %s\n", out_path.c_str(),
              labels_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Unsupervised anomaly detection for discrete event streams: "
               "sliding windows are fitted with one HMM each, compared via "
               "gauge-sequence log-likelihoods, embedded with t-SNE, and "
               "clustered with HDBSCAN; noise points are the anomalies."};
  app.require_subcommand(1);

  gla::GlaConfig cfg;
  std::string format = "plain";
  std::string gauge_mode = "random";
  bool gauge_seed_set = false;
  bool tsne_seed_set = false;

  CLI::App *run = app.add_subcommand("run", "run the detection pipeline");
  run->add_option("--input", cfg.input_path, "event stream file");
  run->add_option("--format", format, "input format: plain or syslog")
      ->check(CLI::IsMember({"plain", "syslog"}));
  run->add_option("--app", cfg.app_filter,
                  "syslog mode: keep only this process name");
  run->add_option("--window-size", cfg.window_size, "window length n")
      ->capture_default_str();
  run->add_option("--shift", cfg.shift, "window shift (default n/2)");
  run->add_option("--states", cfg.states, "hidden states per HMM")
      ->capture_default_str();
  run->add_option("--restarts", cfg.restarts, "training restarts per window")
      ->capture_default_str();
  run->add_option("--max-iters", cfg.max_iters, "EM iteration cap")
      ->capture_default_str();
  run->add_option("--tol", cfg.tol, "EM convergence tolerance")
      ->capture_default_str();
  run->add_option("--gauge-mode", gauge_mode, "gauge selection: random or self")
      ->check(CLI::IsMember({"random", "self"}));
  run->add_option("--gauge-count", cfg.gauge_count,
                  "number of random gauge sequences")
      ->capture_default_str();
  run->add_option("--gauge-seed", cfg.gauge_seed, "gauge RNG seed")
      ->each([&](const std::string &) { gauge_seed_set = true; });
  run->add_option("--clamp-floor", cfg.clamp_floor,
                  "floor for -inf feature entries")
      ->capture_default_str();
  run->add_option("--perplexity", cfg.perplexity, "t-SNE perplexity")
      ->capture_default_str();
  run->add_option("--tsne-iters", cfg.tsne_iters, "t-SNE iterations")
      ->capture_default_str();
  run->add_option("--learning-rate", cfg.learning_rate, "t-SNE learning rate")
      ->capture_default_str();
  run->add_option("--tsne-seed", cfg.tsne_seed, "t-SNE init seed")
      ->each([&](const std::string &) { tsne_seed_set = true; });
  run->add_option("--min-cluster-size", cfg.min_cluster_size,
                  "HDBSCAN minimum cluster size")
      ->capture_default_str();
  run->add_option("--min-samples", cfg.min_samples,
                  "HDBSCAN core-distance neighbors (default min-cluster-size)");
  run->add_option("--seed", cfg.seed, "base seed; window k trains with seed+k")
      ->capture_default_str();
  run->add_option("--threads", cfg.threads,
                  "fitting threads (default hardware)");
  run->add_option("--out", cfg.out_dir, "output directory for artifacts");
  run->add_option("--labels", cfg.labels_path,
                  "ground-truth sidecar CSV for metrics");
  run->add_option("--features-in", cfg.features_in,
                  "skip fitting; embed and cluster this features.csv");
  run->add_flag("--dump-features", cfg.dump_features,
                "also write features.csv");
  run->add_option("--dump-models", cfg.dump_models_dir,
                  "write fitted HMM parameters as JSON into this directory");

  std::string experiment;
  std::uint64_t synth_seed = 42;
  std::string synth_out;
  std::string synth_labels;
  CLI::App *synth = app.add_subcommand("synth", "generate synthetic datasets");
  synth->add_option("experiment", experiment, "exp1 or exp2")
      ->required()
      ->check(CLI::IsMember({"exp1", "exp2"}));
  synth->add_option("--seed", synth_seed, "generator seed (exp1 only)")
      ->capture_default_str();
  synth->add_option("--out", synth_out, "events file to write")->required();
  synth->add_option("--labels-out", synth_labels,
                    "labels sidecar (default <out>.labels.csv)");

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      cfg.format = format == "plain" ? gla::InputFormat::plain
                                     : gla::InputFormat::syslog;
      cfg.gauge_mode = gauge_mode == "random" ? gla::GaugeMode::random
                                              : gla::GaugeMode::self;
      if (!gauge_seed_set) cfg.gauge_seed = cfg.seed;
      if (!tsne_seed_set) cfg.tsne_seed = cfg.seed;
      if (cfg.input_path.empty() && cfg.features_in.empty())
        throw gla::ConfigError("--input (or --features-in) is required");
      return run_command(cfg);
    }
    return synth_command(experiment, synth_seed, synth_out, synth_labels);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const gla::ConfigError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gla::InputError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const gla::NumericError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
