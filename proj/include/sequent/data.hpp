#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sequent/errors.hpp"
#include "sequent/rng.hpp"

namespace sequent {

struct Dataset {
  std::vector<double> features;  // row-major size() x dim
  std::vector<int> labels;
  int dim = 0;
  int classes = 0;
  std::string provenance;

  std::size_t size() const { return labels.size(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * static_cast<std::size_t>(dim),
                                                     static_cast<std::size_t>(dim));
  }

  void push_row(std::span<const double> x, int label) {
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    return counts;
  }

  void validate() const {
    if (labels.empty()) throw ConfigError("dataset is empty");
    if (features.size() != labels.size() * static_cast<std::size_t>(dim)) {
      throw ConfigError("dataset feature matrix shape mismatch");
    }
    for (int l : labels) {
      if (l < 0 || l >= classes) {
        throw ConfigError("dataset label " + std::to_string(l) + " outside [0, " +
                          std::to_string(classes) + ")");
      }
    }
    for (double f : features) {
      if (!std::isfinite(f)) throw ConfigError("dataset contains a non-finite feature");
    }
  }
};

/// Two interleaved half-circles: class 0 on (cos t, sin t), class 1 on
/// (1 - cos t, 0.5 - sin t), t uniform on [0, pi], plus per-coordinate
/// Gaussian noise. Class counts balanced within one sample.
inline Dataset make_moons(int n_samples, double noise_std, std::uint64_t seed) {
  if (n_samples < 2) throw ConfigError("make_moons requires n_samples >= 2");
  if (noise_std < 0.0) throw ConfigError("make_moons requires noise_std >= 0");
  Rng rng(derive_seed(seed, "data.moons"));
  Dataset ds;
  ds.dim = 2;
  ds.classes = 2;
  {
    std::ostringstream tag;
    tag << "moons(n=" << n_samples << ",noise=" << noise_std << ",seed=" << seed << ")";
    ds.provenance = tag.str();
  }
  const int n0 = (n_samples + 1) / 2;
  for (int i = 0; i < n_samples; ++i) {
    const int label = i < n0 ? 0 : 1;
    const double t = rng.uniform(0.0, std::numbers::pi);
    double x = label == 0 ? std::cos(t) : 1.0 - std::cos(t);
    double y = label == 0 ? std::sin(t) : 0.5 - std::sin(t);
    if (noise_std > 0.0) {
      x += rng.normal(0.0, noise_std);
      y += rng.normal(0.0, noise_std);
    }
    const double row[2] = {x, y};
    ds.push_row(row, label);
  }
  ds.validate();
  return ds;
}

/// Two spirals offset by pi: class c at radius r = t and angle
/// 2*pi*turns*t + c*pi for t uniform on (0, 1], plus Gaussian noise.
inline Dataset make_spirals(int n_samples, double noise_std, double turns, std::uint64_t seed) {
  if (n_samples < 2) throw ConfigError("make_spirals requires n_samples >= 2");
  if (noise_std < 0.0) throw ConfigError("make_spirals requires noise_std >= 0");
  if (!(turns > 0.0)) throw ConfigError("make_spirals requires turns > 0");
  Rng rng(derive_seed(seed, "data.spirals"));
  Dataset ds;
  ds.dim = 2;
  ds.classes = 2;
  {
    std::ostringstream tag;
    tag << "spirals(n=" << n_samples << ",noise=" << noise_std << ",turns=" << turns
        << ",seed=" << seed << ")";
    ds.provenance = tag.str();
  }
  const int n0 = (n_samples + 1) / 2;
  for (int i = 0; i < n_samples; ++i) {
    const int label = i < n0 ? 0 : 1;
    const double t = 1.0 - rng.next_double();  // (0, 1]
    const double angle = 2.0 * std::numbers::pi * turns * t + label * std::numbers::pi;
    double x = t * std::cos(angle);
    double y = t * std::sin(angle);
    if (noise_std > 0.0) {
      x += rng.normal(0.0, noise_std);
      y += rng.normal(0.0, noise_std);
    }
    const double row[2] = {x, y};
    ds.push_row(row, label);
  }
  ds.validate();
  return ds;
}

/// Stratified, seeded, disjoint and exhaustive train/test split.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                         std::uint64_t seed) {
  ds.validate();
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie strictly between 0 and 1");
  }
  Rng rng(derive_seed(seed, "data.split"));
  Dataset train, test;
  for (Dataset* part : {&train, &test}) {
    part->dim = ds.dim;
    part->classes = ds.classes;
  }
  train.provenance = ds.provenance + "/train";
  test.provenance = ds.provenance + "/test";
  for (int c = 0; c < ds.classes; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == c) idx.push_back(i);
    }
    if (idx.size() < 2) {
      throw ConfigError("class " + std::to_string(c) + " has fewer than 2 samples; cannot split");
    }
    rng.shuffle(idx);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      Dataset& dst = i < n_test ? test : train;
      dst.push_row(ds.row(idx[i]), c);
    }
  }
  if (train.labels.empty() || test.labels.empty()) {
    throw ConfigError("split produced an empty partition; adjust test_fraction");
  }
  return {std::move(train), std::move(test)};
}

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  void apply(std::span<double> row) const {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / stddev[j];
  }
};

/// Per-feature zero-mean unit-variance transform computed from the training
/// set only and applied to both partitions.
inline FeatureStats standardize(Dataset& train, Dataset& test) {
  train.validate();
  FeatureStats stats;
  stats.mean.assign(static_cast<std::size_t>(train.dim), 0.0);
  stats.stddev.assign(static_cast<std::size_t>(train.dim), 0.0);
  const auto n = static_cast<double>(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto row = train.row(i);
    for (int j = 0; j < train.dim; ++j) stats.mean[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
  }
  for (double& m : stats.mean) m /= n;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto row = train.row(i);
    for (int j = 0; j < train.dim; ++j) {
      const double d = row[static_cast<std::size_t>(j)] - stats.mean[static_cast<std::size_t>(j)];
      stats.stddev[static_cast<std::size_t>(j)] += d * d;
    }
  }
  for (int j = 0; j < train.dim; ++j) {
    auto& s = stats.stddev[static_cast<std::size_t>(j)];
    s = std::sqrt(s / n);
    if (!(s > 0.0)) {
      throw ConfigError("feature " + std::to_string(j) + " has zero variance; cannot standardize");
    }
  }
  for (Dataset* part : {&train, &test}) {
    for (std::size_t i = 0; i < part->size(); ++i) {
      stats.apply(std::span<double>(part->features)
                      .subspan(i * static_cast<std::size_t>(part->dim),
                               static_cast<std::size_t>(part->dim)));
    }
  }
  return stats;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ConfigError("line " + std::to_string(line_no) + ": cannot parse '" +
                      std::string(field) + "' as a number");
  }
  return value;
}

inline int parse_label(std::string_view field, std::size_t line_no) {
  field = trim(field);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ConfigError("line " + std::to_string(line_no) + ": cannot parse label '" +
                      std::string(field) + "' as an integer");
  }
  return value;
}

}  // namespace detail

/// Reads comma-separated rows of the form f_1,...,f_d,label (no header,
/// '.' decimal separator). Malformed rows are rejected with their line number.
inline Dataset load_features_csv(const std::string& path, int classes) {
  if (classes < 2) throw ConfigError("load_features_csv requires classes >= 2");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  Dataset ds;
  ds.classes = classes;
  ds.provenance = "file:" + path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) {
        fields.push_back(rest);
        break;
      }
      fields.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected features and a label");
    }
    if (ds.dim == 0) {
      ds.dim = static_cast<int>(fields.size()) - 1;
    } else if (static_cast<int>(fields.size()) - 1 != ds.dim) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(ds.dim) + " features, got " +
                        std::to_string(fields.size() - 1));
    }
    std::vector<double> row(static_cast<std::size_t>(ds.dim));
    for (int j = 0; j < ds.dim; ++j) row[static_cast<std::size_t>(j)] = detail::parse_double(fields[static_cast<std::size_t>(j)], line_no);
    const int label = detail::parse_label(fields.back(), line_no);
    if (label < 0 || label >= classes) {
      throw ConfigError("line " + std::to_string(line_no) + ": label " + std::to_string(label) +
                        " outside [0, " + std::to_string(classes) + ")");
    }
    ds.push_row(row, label);
  }
  if (ds.labels.empty()) throw ConfigError("data file '" + path + "' contains no rows");
  ds.validate();
  return ds;
}

/// Writes the CSV format read by load_features_csv. Floats use 17 significant
/// digits so a round-trip is bit-exact.
inline void save_features_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write data file '" + path + "'");
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto row = ds.row(i);
    for (double v : row) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << ds.labels[i] << '\n';
  }
  if (!out) throw ConfigError("failed writing data file '" + path + "'");
}

}  // namespace sequent
