#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gla/errors.hpp"
#include "gla/events.hpp"
#include "gla/gauge.hpp"
#include "gla/hdbscan.hpp"
#include "gla/hmm.hpp"
#include "gla/metrics.hpp"
#include "gla/report.hpp"
#include "gla/tsne.hpp"

namespace gla {

struct GlaConfig {
  std::string input_path;
  InputFormat format = InputFormat::plain;
  std::string app_filter;

  std::size_t window_size = 20;
  std::size_t shift = 0;  ///< 0 resolves to window_size / 2

  std::size_t states = 20;
  std::size_t restarts = 1;
  std::size_t max_iters = 100;
  double tol = 1e-6;

  GaugeMode gauge_mode = GaugeMode::random;
  std::size_t gauge_count = 10;
  std::uint64_t gauge_seed = 42;
  double clamp_floor = kDefaultClampFloor;

  double perplexity = 30.0;
  std::size_t tsne_iters = 1000;
  double learning_rate = 200.0;
  std::uint64_t tsne_seed = 42;

  std::size_t min_cluster_size = 20;
  std::size_t min_samples = 0;  ///< 0 resolves to min_cluster_size

  std::uint64_t seed = 42;  ///< window k trains with seed + k
  std::size_t threads = 0;  ///< 0 resolves to hardware concurrency

  std::string out_dir;      ///< empty: compute only, write nothing
  std::string labels_path;  ///< optional ground-truth sidecar
  std::string features_in;  ///< optional: start from a dumped feature matrix
  std::string dump_models_dir;
  bool dump_features = false;

  std::size_t resolved_shift() const {
    return shift == 0 ? std::max<std::size_t>(window_size / 2, 1) : shift;
  }
  std::size_t resolved_min_samples() const {
    return min_samples == 0 ? min_cluster_size : min_samples;
  }
};

struct WindowRecord {
  int id = 0;             ///< 0-based window ordinal (matches all CSV ids)
  std::size_t start = 0;  ///< 1-based position in the source series; 0 if unknown
  int cluster = kNoise;
  double x = 0.0;
  double y = 0.0;
  bool anomaly = false;
};

struct StageTimings {
  double ingest_ms = 0.0;
  double fit_ms = 0.0;
  double gauge_ms = 0.0;
  double embed_ms = 0.0;
  double cluster_ms = 0.0;
  double total_ms = 0.0;
};

struct OutlierReport {
  std::string schema = "gla-report/1";
  std::vector<WindowRecord> windows;
  std::vector<int> outlier_ids;
  int num_clusters = 0;
  std::size_t clamped_features = 0;
  std::vector<std::string> alphabet;
  double kl_initial = 0.0;
  double kl_final = 0.0;
  std::optional<Metrics> metrics;
  /// Wall-clock timings; reported on the console only, never serialized, so
  /// identical seeds produce byte-identical report files.
  StageTimings timings;
};

namespace detail {

inline const char *format_name(InputFormat f) {
  return f == InputFormat::plain ? "plain" : "syslog";
}

inline const char *gauge_mode_name(GaugeMode m) {
  return m == GaugeMode::random ? "random" : "self";
}

inline nlohmann::ordered_json config_json(const GlaConfig &cfg) {
  nlohmann::ordered_json j;
  j["input"] = cfg.input_path;
  j["format"] = format_name(cfg.format);
  j["app_filter"] = cfg.app_filter;
  j["window_size"] = cfg.window_size;
  j["shift"] = cfg.resolved_shift();
  j["states"] = cfg.states;
  j["restarts"] = cfg.restarts;
  j["max_iters"] = cfg.max_iters;
  j["tol"] = cfg.tol;
  j["gauge_mode"] = gauge_mode_name(cfg.gauge_mode);
  j["gauge_count"] = cfg.gauge_count;
  j["gauge_seed"] = cfg.gauge_seed;
  j["clamp_floor"] = cfg.clamp_floor;
  j["perplexity"] = cfg.perplexity;
  j["tsne_iters"] = cfg.tsne_iters;
  j["learning_rate"] = cfg.learning_rate;
  j["tsne_seed"] = cfg.tsne_seed;
  j["min_cluster_size"] = cfg.min_cluster_size;
  j["min_samples"] = cfg.resolved_min_samples();
  j["seed"] = cfg.seed;
  j["features_in"] = cfg.features_in;
  return j;
}

inline nlohmann::ordered_json report_json(const OutlierReport &report,
                                          const GlaConfig &cfg) {
  nlohmann::ordered_json j;
  j["schema"] = report.schema;
  j["config"] = config_json(cfg);
  j["alphabet"] = report.alphabet;
  j["num_windows"] = report.windows.size();
  j["num_clusters"] = report.num_clusters;
  j["clamped_features"] = report.clamped_features;
  j["kl_initial"] = report.kl_initial;
  j["kl_final"] = report.kl_final;
  nlohmann::ordered_json windows = nlohmann::ordered_json::array();
  for (const auto &w : report.windows) {
    nlohmann::ordered_json rec;
    rec["id"] = w.id;
    rec["start"] = w.start;
    rec["cluster"] = w.cluster;
    rec["x"] = w.x;
    rec["y"] = w.y;
    rec["anomaly"] = w.anomaly;
    windows.push_back(std::move(rec));
  }
  j["windows"] = std::move(windows);
  j["outliers"] = report.outlier_ids;
  if (report.metrics) {
    const Metrics &m = *report.metrics;
    nlohmann::ordered_json mj;
    mj["true_positives"] = m.true_positives;
    mj["false_positives"] = m.false_positives;
    mj["false_negatives"] = m.false_negatives;
    mj["precision"] = m.precision;
    mj["recall"] = m.recall;
    mj["f1"] = m.f1;
    mj["degenerate"] = m.degenerate;
    j["metrics"] = std::move(mj);
  } else {
    j["metrics"] = nullptr;
  }
  return j;
}

/// Deterministic parallel map: each worker owns a contiguous index range and
/// writes results by index, so thread count never changes the output.
template <typename Fn>
inline void parallel_for(std::size_t count, std::size_t threads, Fn &&fn) {
  if (threads == 0) threads = std::max(std::thread::hardware_concurrency(), 1u);
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t begin = count * t / threads;
      const std::size_t end = count * (t + 1) / threads;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto &th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

inline nlohmann::ordered_json params_json(const HmmParams &p) {
  nlohmann::ordered_json j;
  j["num_states"] = p.num_states;
  j["num_symbols"] = p.num_symbols;
  j["pi"] = p.pi;
  nlohmann::ordered_json trans = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.num_states; ++i) {
    trans.push_back(std::vector<double>(p.trans.row(i).begin(),
                                        p.trans.row(i).end()));
  }
  j["trans"] = std::move(trans);
  nlohmann::ordered_json emit = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.num_states; ++i) {
    emit.push_back(std::vector<double>(p.emit.row(i).begin(),
                                       p.emit.row(i).end()));
  }
  j["emit"] = std::move(emit);
  return j;
}

}  // namespace detail

/// Runs the full chain: ingest -> windows -> per-window Baum-Welch -> gauge
/// features -> t-SNE -> HDBSCAN -> outliers, then writes report.json,
/// embedding.csv, clusters.csv, plot.svg (and features.csv on request) into
/// cfg.out_dir. With cfg.features_in set, the fitting stages are skipped and
/// the feature matrix is loaded instead. On failure any partially written
/// artifacts are removed.
inline OutlierReport run(const GlaConfig &cfg) {
  namespace fs = std::filesystem;
  const auto t_total = std::chrono::steady_clock::now();
  OutlierReport report;

  if (cfg.states == 0) throw ConfigError("state count must be positive");
  if (cfg.restarts == 0) throw ConfigError("restart count must be positive");

  Matrix<double> features;
  std::vector<WindowRecord> records;
  std::vector<FitReport> fits;

  if (!cfg.features_in.empty()) {
    features = read_features_csv(cfg.features_in);
    records.resize(features.rows());
    for (std::size_t k = 0; k < features.rows(); ++k)
      records[k].id = static_cast<int>(k);
  } else {
    auto t0 = std::chrono::steady_clock::now();
    const EventSeries series =
        ingest_file(cfg.input_path, cfg.format, cfg.app_filter);
    const std::vector<Window> windows =
        extract_windows(series, cfg.window_size, cfg.resolved_shift());
    report.alphabet = series.alphabet.symbols();
    report.timings.ingest_ms = detail::ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    fits.resize(windows.size());
    detail::parallel_for(windows.size(), cfg.threads, [&](std::size_t k) {
      fits[k] = fit_best(windows[k].codes, cfg.states, series.alphabet.size(),
                         cfg.seed + windows[k].index, cfg.restarts,
                         cfg.max_iters, cfg.tol);
    });
    report.timings.fit_ms = detail::ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const GaugeSet gauges =
        select_gauges(windows, series.alphabet, cfg.gauge_mode,
                      cfg.gauge_count, cfg.gauge_seed);
    features = feature_matrix(fits, gauges);
    report.timings.gauge_ms = detail::ms_since(t0);

    records.resize(windows.size());
    for (std::size_t k = 0; k < windows.size(); ++k) {
      records[k].id = static_cast<int>(k);
      records[k].start = windows[k].start;
    }
  }

  report.clamped_features = clamp_features(features, cfg.clamp_floor);

  auto t0 = std::chrono::steady_clock::now();
  const Embedding2D embedding = tsne(features, cfg.perplexity, cfg.tsne_iters,
                                     cfg.learning_rate, cfg.tsne_seed);
  report.kl_initial = embedding.kl_trace.front();
  report.kl_final = embedding.kl_trace.back();
  report.timings.embed_ms = detail::ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const ClusterResult clusters = hdbscan(embedding.points, cfg.min_cluster_size,
                                         cfg.resolved_min_samples());
  report.outlier_ids = outliers(clusters);
  report.num_clusters = clusters.num_clusters;
  report.timings.cluster_ms = detail::ms_since(t0);

  for (std::size_t k = 0; k < records.size(); ++k) {
    records[k].cluster = clusters.labels[k];
    records[k].x = embedding.points[k][0];
    records[k].y = embedding.points[k][1];
    records[k].anomaly = clusters.labels[k] == kNoise;
  }
  report.windows = std::move(records);

  if (!cfg.labels_path.empty()) {
    report.metrics = score(report.outlier_ids, read_labels_csv(cfg.labels_path),
                           report.windows.size());
  }
  report.timings.total_ms = detail::ms_since(t_total);

  if (cfg.out_dir.empty()) return report;

  std::vector<fs::path> written;
  try {
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    const auto emit = [&](const fs::path &p, const std::string &text) {
      written.push_back(p);
      detail::write_text_file(p.string(), text);
    };
    emit(dir / "report.json", detail::report_json(report, cfg).dump(2) + "\n");
    written.push_back(dir / "embedding.csv");
    write_embedding_csv((dir / "embedding.csv").string(), embedding.points);
    written.push_back(dir / "clusters.csv");
    write_clusters_csv((dir / "clusters.csv").string(), clusters.labels);
    emit(dir / "plot.svg", render_svg(embedding.points, clusters.labels));
    if (cfg.dump_features) {
      written.push_back(dir / "features.csv");
      write_features_csv((dir / "features.csv").string(), features);
    }
    if (!cfg.dump_models_dir.empty() && !fits.empty()) {
      fs::create_directories(cfg.dump_models_dir);
      for (std::size_t k = 0; k < fits.size(); ++k) {
        const fs::path p = fs::path(cfg.dump_models_dir) /
                           ("model_" + std::to_string(k) + ".json");
        written.push_back(p);
        detail::write_text_file(p.string(),
                                detail::params_json(fits[k].params).dump(2) +
                                    "\n");
      }
    }
  } catch (...) {
    std::error_code ec;
    for (const auto &p : written) fs::remove(p, ec);
    throw;
  }
  return report;
}

}  // namespace gla
