#pragma once

#include <array>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>

#include "mhvit/errors.hpp"

namespace mhvit {

constexpr int kNumClasses = 3;
inline const std::array<const char*, 3> kClassNames = {"AD", "MCI", "HC"};

// 3x3 count matrix, rows = true class, columns = predicted class.
struct ConfusionMatrix {
  std::array<std::array<long, kNumClasses>, kNumClasses> counts{};

  long total() const {
    long t = 0;
    for (const auto& row : counts)
      for (long v : row) t += v;
    return t;
  }
  long row_sum(int t) const {
    long s = 0;
    for (long v : counts[t]) s += v;
    return s;
  }
  long col_sum(int p) const {
    long s = 0;
    for (int t = 0; t < kNumClasses; ++t) s += counts[t][p];
    return s;
  }
  long trace() const {
    long s = 0;
    for (int i = 0; i < kNumClasses; ++i) s += counts[i][i];
    return s;
  }
};

inline ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("predictions/labels length mismatch");
  if (predictions.empty()) throw std::invalid_argument("empty prediction list");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= kNumClasses || predictions[i] < 0 ||
        predictions[i] >= kNumClasses)
      throw std::invalid_argument("class index out of range");
    ++cm.counts[labels[i]][predictions[i]];
  }
  return cm;
}

// Per-class precision/recall/F1 plus their macro (unweighted) means.
// A class with a zero denominator has no defined value; it is reported as
// absent and excluded from the macro mean.
struct MetricsReport {
  double accuracy = 0.0;
  std::array<std::optional<double>, kNumClasses> precision, recall, f1;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
};

inline MetricsReport report(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total < 1) throw std::invalid_argument("empty confusion matrix");
  MetricsReport r;
  r.accuracy = static_cast<double>(cm.trace()) / total;
  auto macro = [](const std::array<std::optional<double>, kNumClasses>& vals) {
    double sum = 0.0;
    int n = 0;
    for (const auto& v : vals)
      if (v) {
        sum += *v;
        ++n;
      }
    return n > 0 ? sum / n : 0.0;
  };
  for (int c = 0; c < kNumClasses; ++c) {
    const long col = cm.col_sum(c), row = cm.row_sum(c);
    if (col > 0) r.precision[c] = static_cast<double>(cm.counts[c][c]) / col;
    if (row > 0) r.recall[c] = static_cast<double>(cm.counts[c][c]) / row;
    if (r.precision[c] && r.recall[c] && (*r.precision[c] + *r.recall[c]) > 0.0)
      r.f1[c] = 2.0 * *r.precision[c] * *r.recall[c] / (*r.precision[c] + *r.recall[c]);
  }
  r.macro_precision = macro(r.precision);
  r.macro_recall = macro(r.recall);
  r.macro_f1 = macro(r.f1);
  return r;
}

inline std::string render_confusion(const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "true\\pred";
  for (const char* n : kClassNames) os << std::setw(7) << n;
  os << '\n';
  for (int t = 0; t < kNumClasses; ++t) {
    os << std::setw(9) << kClassNames[t];
    for (int p = 0; p < kNumClasses; ++p) os << std::setw(7) << cm.counts[t][p];
    os << '\n';
  }
  return os.str();
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "true\\pred,AD,MCI,HC\n";
  for (int t = 0; t < kNumClasses; ++t) {
    os << kClassNames[t];
    for (int p = 0; p < kNumClasses; ++p) os << ',' << cm.counts[t][p];
    os << '\n';
  }
  return os.str();
}

// Flat CSV row (macro averaging; absent per-class values render empty).
inline std::string metrics_csv_header() {
  return "accuracy,macro_precision,macro_recall,macro_f1,"
         "precision_AD,precision_MCI,precision_HC,"
         "recall_AD,recall_MCI,recall_HC,f1_AD,f1_MCI,f1_HC";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto opt = [&](const std::optional<double>& v) {
    os << ',';
    if (v) os << *v;
  };
  os << r.accuracy << ',' << r.macro_precision << ',' << r.macro_recall << ',' << r.macro_f1;
  for (const auto& v : r.precision) opt(v);
  for (const auto& v : r.recall) opt(v);
  for (const auto& v : r.f1) opt(v);
  return os.str();
}

}  // namespace mhvit
