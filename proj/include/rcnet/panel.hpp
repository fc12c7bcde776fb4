#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rcnet/errors.hpp"

namespace rcnet {

namespace detail {

inline std::string format_double(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

inline double parse_double(std::string_view field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw MalformedFile("cannot parse '" + std::string(field) + "' as a number");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace detail

/// A block of synchronized series, one row per node, one column per step.
struct TimeSeriesPanel {
  Eigen::MatrixXd values;  // node_count x sample_count
  double dt = 1.0;
  std::vector<std::string> labels;

  int node_count() const { return static_cast<int>(values.rows()); }
  long sample_count() const { return static_cast<long>(values.cols()); }
};

inline void check_panel(const TimeSeriesPanel& panel) {
  if (panel.values.rows() < 1 || panel.values.cols() < 1)
    throw DimensionMismatch("panel must hold at least one node and one sample");
  if (!(panel.dt > 0.0)) throw Error("panel time step must be positive");
  if (panel.labels.size() != static_cast<std::size_t>(panel.values.rows()))
    throw DimensionMismatch("panel has " + std::to_string(panel.labels.size()) +
                            " labels for " + std::to_string(panel.values.rows()) + " rows");
  if (!panel.values.allFinite()) throw Error("panel contains non-finite values");
}

/// Plain CSV with a leading time column: header "t,<label>,...", one row per
/// step. Values are printed with enough digits for an exact round trip.
inline void export_csv(const TimeSeriesPanel& panel, const std::filesystem::path& path) {
  check_panel(panel);
  for (const std::string& label : panel.labels)
    if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos)
      throw Error("label '" + label + "' cannot be written to CSV");
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "t";
  for (const std::string& label : panel.labels) out << ',' << label;
  out << '\n';
  const int m = panel.node_count();
  const long n = panel.sample_count();
  for (long k = 0; k < n; ++k) {
    out << detail::format_double(static_cast<double>(k) * panel.dt, 17);
    for (int j = 0; j < m; ++j) out << ',' << detail::format_double(panel.values(j, k), 17);
    out << '\n';
  }
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

inline TimeSeriesPanel import_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MalformedFile("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw MalformedFile("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header[0] != "t")
    throw MalformedFile("'" + path.string() + "': header must start with 't' and name at least one node");

  TimeSeriesPanel panel;
  panel.labels.assign(header.begin() + 1, header.end());
  const int m = static_cast<int>(panel.labels.size());

  std::vector<double> times;
  std::vector<double> data;  // column-major by step
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw MalformedFile("'" + path.string() + "' row " + std::to_string(row) + ": has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      try {
        v = detail::parse_double(fields[c]);
      } catch (const MalformedFile& e) {
        throw MalformedFile("'" + path.string() + "' row " + std::to_string(row) +
                            ", column '" + header[c] + "': " + e.what());
      }
      if (!std::isfinite(v))
        throw MalformedFile("'" + path.string() + "' row " + std::to_string(row) +
                            ", column '" + header[c] + "': value is not finite");
      if (c == 0)
        times.push_back(v);
      else
        data.push_back(v);
    }
  }
  const long n = static_cast<long>(times.size());
  if (n < 1) throw MalformedFile("'" + path.string() + "' has no data rows");

  panel.values.resize(m, n);
  for (long k = 0; k < n; ++k)
    for (int j = 0; j < m; ++j) panel.values(j, k) = data[k * m + j];
  panel.dt = n >= 2 ? times[1] - times[0] : 1.0;
  if (!(panel.dt > 0.0))
    throw MalformedFile("'" + path.string() + "': time column must be strictly increasing");
  return panel;
}

}  // namespace rcnet
