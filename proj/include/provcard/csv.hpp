#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "provcard/frame.hpp"

namespace provcard {

/// Name of the leading column that carries stable row identifiers.
inline constexpr std::string_view kRowIdColumn = "__row_id";

/// Snapshot CSV: RFC 4180 quoting, a header row, and an optional leading
/// `__row_id` column (row ids default to 0..n-1 when it is absent). An
/// unquoted empty field is missing; a quoted empty field ("") is the empty
/// string.
///
/// Without `dtypes`, each column is typed at parse time: numeric when every
/// non-missing field is a decimal, boolean when every non-missing field is one
/// of 0/1/true/false (any case), categorical when it has at most 20 distinct
/// values, text otherwise. With `dtypes` (one per data column, e.g. from a
/// version's metadata) the given types are applied instead.
TabularFrame parse_snapshot_csv(std::string_view text,
                                const std::vector<DType>* dtypes = nullptr);

TabularFrame read_snapshot_csv(const std::filesystem::path& path,
                               const std::vector<DType>* dtypes = nullptr);

/// Writes the snapshot format read by parse_snapshot_csv, `__row_id` first.
std::string write_snapshot_csv(const TabularFrame& frame);

}  // namespace provcard
