#include "provcard/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "provcard/errors.hpp"

namespace provcard {

ColumnStats compute_column_stats(const TabularFrame& frame, const std::string& column) {
  auto index = frame.column_index(column);
  if (!index) throw UnknownColumn(column, nearest_names(column, frame.column_names()));

  ColumnStats stats;
  stats.column = column;
  stats.dtype = frame.columns()[*index].dtype;
  stats.row_count = frame.num_rows();

  if (stats.dtype == DType::numeric) {
    std::vector<double> values;
    values.reserve(frame.num_rows());
    for (const auto& row : frame.rows()) {
      const CellValue& v = row[*index];
      if (v.is_number()) values.push_back(v.as_number());
    }
    stats.missing_count = stats.row_count - values.size();
    if (values.empty()) return stats;

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    stats.mean = mean;
    stats.stddev = std::sqrt(sq / static_cast<double>(values.size()));

    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    stats.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;

    const double lo = values.front(), hi = values.back();
    if (lo == hi) {
      stats.bins.push_back({lo, hi, n});
      return stats;
    }
    const double width = (hi - lo) / static_cast<double>(kHistogramBins);
    stats.bins.resize(kHistogramBins);
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      stats.bins[b].lower = b == 0 ? lo : stats.bins[b - 1].upper;
      stats.bins[b].upper = b + 1 == kHistogramBins ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
      // Bins are [lower, upper) except the last, which is closed.
      auto it = std::upper_bound(stats.bins.begin(), stats.bins.end(), v,
                                 [](double x, const HistogramBin& bin) { return x < bin.upper; });
      if (it == stats.bins.end()) it = std::prev(stats.bins.end());
      ++it->count;
    }
    return stats;
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& row : frame.rows()) {
    const CellValue& v = row[*index];
    if (v.is_missing()) {
      ++stats.missing_count;
    } else {
      ++counts[v.to_string()];
    }
  }
  stats.categories.assign(counts.begin(), counts.end());
  std::stable_sort(stats.categories.begin(), stats.categories.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return stats;
}

}  // namespace provcard
