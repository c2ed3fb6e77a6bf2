#pragma once

#include <string>
#include <vector>

namespace provcard {

/// A derived column and the existing columns it was computed from.
struct ColumnRelationship {
  std::string derived;
  std::vector<std::string> sources;

  friend bool operator==(const ColumnRelationship&, const ColumnRelationship&) = default;
};

/// Derived column -> source columns, in the order the derived columns were added.
using ColumnRelationships = std::vector<ColumnRelationship>;

}  // namespace provcard
