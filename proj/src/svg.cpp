#include "provcard/svg.hpp"

#include <algorithm>
#include <sstream>

namespace provcard {

namespace {

constexpr int kCellWidth = 112;
constexpr int kCellHeight = 30;
constexpr int kRowLabelWidth = 56;
constexpr int kTitleHeight = 28;
constexpr int kOverflowHeight = 18;
constexpr int kHeaderHeight = 30;
constexpr int kLegendHeight = 40;
constexpr int kMargin = 12;

constexpr CellState kLegendOrder[] = {CellState::unchanged, CellState::modified,
                                      CellState::added,     CellState::removed,
                                      CellState::not_present, CellState::query_match};

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void rect(std::ostringstream& out, int x, int y, int w, int h, const CellStyle& s,
          std::string_view extra = {}) {
  out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"" << s.fill << "\" stroke=\"" << s.stroke << "\" stroke-width=\"" << s.stroke_width
      << "\"" << extra << "/>\n";
}

void text(std::ostringstream& out, int x, int y, std::string_view body, std::string_view extra = {}) {
  out << "<text x=\"" << x << "\" y=\"" << y << "\"" << extra << ">" << escape(body) << "</text>\n";
}

}  // namespace

CellStyle cell_style(CellState state) {
  switch (state) {
    case CellState::unchanged: return {"#d9d9d9", "#ffffff", 1};
    case CellState::modified: return {"#9ecae1", "#ffffff", 1};
    case CellState::added: return {"#c5b0e8", "#ffffff", 1};
    case CellState::removed: return {"#ffffff", "#d62728", 2};
    case CellState::not_present: return {"#ffffff", "#9e9e9e", 2};
    case CellState::query_match: return {"#d9d9d9", "#f2c80f", 3};
  }
  return {"#d9d9d9", "#ffffff", 1};
}

std::string render_svg(const SnapGrid& grid, std::string_view title) {
  const int cols = static_cast<int>(grid.columns.size());
  const int rows = static_cast<int>(grid.rows.size());
  const int grid_top = kMargin + kTitleHeight + kOverflowHeight + kHeaderHeight;
  const int width = std::max(kMargin * 2 + kRowLabelWidth + cols * kCellWidth, 6 * 120 + kMargin * 2);
  const int height = grid_top + rows * kCellHeight + kMargin + kLegendHeight + kMargin;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) text(out, kMargin, kMargin + 16, title, " font-size=\"14\" font-weight=\"bold\"");

  const int left = kMargin + kRowLabelWidth;
  for (int c = 0; c < cols; ++c) {
    const auto& col = grid.columns[static_cast<std::size_t>(c)];
    const int x = left + c * kCellWidth;
    if (col.overflow_count) {
      text(out, x + kCellWidth / 2, kMargin + kTitleHeight + 13, std::to_string(*col.overflow_count),
           " text-anchor=\"middle\" fill=\"#555555\"");
    }
    const CellStyle header = col.header_state == CellState::unchanged ? CellStyle{"#f0f0f0", "#ffffff", 1}
                                                                      : cell_style(col.header_state);
    rect(out, x, kMargin + kTitleHeight + kOverflowHeight, kCellWidth, kHeaderHeight, header);
    text(out, x + kCellWidth / 2, kMargin + kTitleHeight + kOverflowHeight + 19, ellipsize(col.name, 16),
         " text-anchor=\"middle\" font-weight=\"bold\"");
  }

  for (int r = 0; r < rows; ++r) {
    const int y = grid_top + r * kCellHeight;
    text(out, kMargin, y + 19, std::to_string(grid.rows[static_cast<std::size_t>(r)]), " fill=\"#555555\"");
    for (int c = 0; c < cols; ++c) {
      const auto& cell = grid.cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const int x = left + c * kCellWidth;
      rect(out, x + 1, y + 1, kCellWidth - 2, kCellHeight - 2, cell_style(cell.state),
           cell.state == CellState::not_present ? " stroke-dasharray=\"4 2\"" : "");
      if (cell.query_hit && cell.state != CellState::query_match) {
        rect(out, x + 3, y + 3, kCellWidth - 6, kCellHeight - 6, {"none", "#f2c80f", 3});
      }
      text(out, x + kCellWidth / 2, y + 19, cell.display, " text-anchor=\"middle\"");
    }
  }

  // Relationship boxes outline the source column.
  for (const auto& box : grid.boxes) {
    for (int c = 0; c < cols; ++c) {
      if (grid.columns[static_cast<std::size_t>(c)].name != box.source) continue;
      rect(out, left + c * kCellWidth - 2, kMargin + kTitleHeight + kOverflowHeight - 2, kCellWidth + 4,
           kHeaderHeight + rows * kCellHeight + 4, {"none", "#b39ddb", 3});
    }
  }

  const int legend_y = grid_top + rows * kCellHeight + kMargin;
  for (std::size_t i = 0; i < std::size(kLegendOrder); ++i) {
    const int x = kMargin + static_cast<int>(i) * 120;
    rect(out, x, legend_y + 8, 18, 18, cell_style(kLegendOrder[i]),
         kLegendOrder[i] == CellState::not_present ? " stroke-dasharray=\"4 2\"" : "");
    text(out, x + 24, legend_y + 21, to_string(kLegendOrder[i]));
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace provcard
