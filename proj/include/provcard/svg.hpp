#pragma once

#include <string>
#include <string_view>

#include "provcard/snapgrid.hpp"

namespace provcard {

struct CellStyle {
  std::string_view fill;
  std::string_view stroke;
  double stroke_width;
};

/// Legend colors: gray, blue and purple fills for unchanged, modified and
/// added cells; red, gray and yellow borders for removed, not-present and
/// query-matching cells.
CellStyle cell_style(CellState state);

/// Standalone SVG document for one grid, with a legend of all six states.
std::string render_svg(const SnapGrid& grid, std::string_view title = {});

}  // namespace provcard
