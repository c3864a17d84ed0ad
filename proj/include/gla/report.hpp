#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gla/errors.hpp"
#include "gla/hdbscan.hpp"
#include "gla/matrix.hpp"
#include "gla/synth.hpp"

namespace gla {

namespace detail {

/// Shortest round-trip decimal form, so CSV artifacts reload bit-exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << text;
  if (!out) throw InputError("failed writing file: " + path);
}

}  // namespace detail

inline void write_embedding_csv(const std::string &path,
                                const std::vector<Point2> &points) {
  std::ostringstream out;
  out << "window_id,x,y\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i << ',' << detail::format_double(points[i][0]) << ','
        << detail::format_double(points[i][1]) << '\n';
  }
  detail::write_text_file(path, out.str());
}

inline void write_clusters_csv(const std::string &path,
                               const std::vector<int> &labels) {
  std::ostringstream out;
  out << "window_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << i << ',' << labels[i] << '\n';
  detail::write_text_file(path, out.str());
}

inline void write_features_csv(const std::string &path,
                               const Matrix<double> &features) {
  std::ostringstream out;
  for (std::size_t c = 0; c < features.cols(); ++c)
    out << (c ? "," : "") << 'g' << (c + 1);
  out << '\n';
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c)
      out << (c ? "," : "") << detail::format_double(features(r, c));
    out << '\n';
  }
  detail::write_text_file(path, out.str());
}

inline Matrix<double> read_features_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open features file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty features file: " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("ragged features file: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("empty features file: " + path);
  Matrix<double> features(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      features(r, c) = rows[r][c];
  return features;
}

/// Labels sidecar: "window_id,label" with label 1 marking anomalies.
inline void write_labels_csv(const std::string &path,
                             const std::vector<int> &labels01) {
  std::ostringstream out;
  out << "window_id,label\n";
  for (std::size_t i = 0; i < labels01.size(); ++i)
    out << i << ',' << labels01[i] << '\n';
  detail::write_text_file(path, out.str());
}

/// Reads the sidecar back as the list of anomalous window ids.
inline std::vector<int> read_labels_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open labels file: " + path);
  std::vector<int> anomalous;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line.rfind("window_id", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError("malformed labels line: " + line);
    const int id = std::stoi(line.substr(0, comma));
    const int label = std::stoi(line.substr(comma + 1));
    if (label != 0) anomalous.push_back(id);
  }
  return anomalous;
}

/// Writes a dataset as a plain event-per-line file plus its labels sidecar.
inline void write_dataset(const LabeledDataset &data,
                          const std::string &events_path,
                          const std::string &labels_path) {
  std::ostringstream out;
  for (const auto &window : data.windows)
    for (const int code : window) out << data.alphabet.symbol(code) << '\n';
  detail::write_text_file(events_path, out.str());
  write_labels_csv(labels_path, data.labels);
}

/// Scatter plot of the embedding: cluster-colored dots, noise points drawn
/// as crosses. Byte-deterministic for fixed input.
inline std::string render_svg(const std::vector<Point2> &points,
                              const std::vector<int> &labels) {
  if (points.empty()) throw ConfigError("nothing to plot");
  static const char *kPalette[] = {"#4c78a8", "#f58518", "#54a24b", "#b279a2",
                                   "#e45756", "#72b7b2", "#eeca3b", "#9d755d",
                                   "#bab0ac", "#ff9da6", "#86bcb6", "#d67195"};
  constexpr int kPaletteSize = 12;
  constexpr double kSize = 720.0;
  constexpr double kMargin = 40.0;

  double min_x = points[0][0], max_x = points[0][0];
  double min_y = points[0][1], max_y = points[0][1];
  for (const auto &p : points) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  const double range_x = max_x - min_x > 0.0 ? max_x - min_x : 1.0;
  const double range_y = max_y - min_y > 0.0 ? max_y - min_y : 1.0;
  const double span = kSize - 2.0 * kMargin;
  const auto sx = [&](double x) { return kMargin + (x - min_x) / range_x * span; };
  // SVG y grows downward; flip so the plot reads like a chart.
  const auto sy = [&](double y) { return kSize - kMargin - (y - min_y) / range_y * span; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << ' ' << kSize
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string x = detail::format_fixed(sx(points[i][0]), 2);
    const std::string y = detail::format_fixed(sy(points[i][1]), 2);
    const int label = i < labels.size() ? labels[i] : 0;
    if (label == kNoise) {
      const double r = 5.0;
      out << "<path d=\"M " << detail::format_fixed(sx(points[i][0]) - r, 2)
          << ' ' << detail::format_fixed(sy(points[i][1]) - r, 2) << " L "
          << detail::format_fixed(sx(points[i][0]) + r, 2) << ' '
          << detail::format_fixed(sy(points[i][1]) + r, 2) << " M "
          << detail::format_fixed(sx(points[i][0]) - r, 2) << ' '
          << detail::format_fixed(sy(points[i][1]) + r, 2) << " L "
          << detail::format_fixed(sx(points[i][0]) + r, 2) << ' '
          << detail::format_fixed(sy(points[i][1]) - r, 2)
          << "\" stroke=\"#c62828\" stroke-width=\"2\" fill=\"none\"/>\n";
    } else {
      out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\""
          << kPalette[label % kPaletteSize] << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace gla
