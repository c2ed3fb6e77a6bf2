#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "provcard/frame.hpp"

namespace provcard {

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Summary of one column over its non-missing values. Numeric columns get
/// ten equal-width bins over [min, max] (one bin when min == max) and the
/// population standard deviation; every other dtype gets value counts.
struct ColumnStats {
  std::string column;
  DType dtype = DType::text;
  std::size_t row_count = 0;
  std::size_t missing_count = 0;

  std::vector<HistogramBin> bins;
  std::optional<double> mean;
  std::optional<double> median;
  std::optional<double> stddev;

  /// Sorted by descending count, then value.
  std::vector<std::pair<std::string, std::size_t>> categories;
};

inline constexpr std::size_t kHistogramBins = 10;

/// Throws UnknownColumn (with the nearest names) when `column` is absent.
ColumnStats compute_column_stats(const TabularFrame& frame, const std::string& column);

}  // namespace provcard
