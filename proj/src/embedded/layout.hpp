#pragma once

#include <string>
#include <vector>

#include "embedded/css.hpp"
#include "embedded/dom.hpp"
#include "uigym/image.hpp"

namespace uigym::embedded {

struct TextRun {
  double x = 0, y = 0;  // top-left, page coordinates
  std::string text;
  int scale = 1;
  bool bold = false;
  Color color{0, 0, 0};
};

struct LayoutBox {
  const DomNode* node = nullptr;
  double x = 0, y = 0, w = 0, h = 0;  // border box, page coordinates
  ComputedStyle style;
  std::vector<TextRun> runs;  // text painted together with this element
  bool fixed = false;         // subtree of a position:fixed root (viewport coords)
};

struct LayoutResult {
  std::vector<LayoutBox> boxes;  // paint order
  double content_width = 0;
  double content_height = 0;
};

/// Approximate block/inline/flex flow for the viewport. Absolute and fixed
/// boxes come after the normal flow, ordered by z-index then document order.
LayoutResult layout_document(const DomDocument& doc, StyleResolver& resolver,
                             int viewport_width, int viewport_height);

/// Topmost box under the point (page coordinates; fixed boxes are pinned to
/// the viewport, so the scroll offset is needed to test them). Boxes with
/// visibility:hidden are transparent to hits. Null only for an empty layout.
const LayoutBox* hit_test(const LayoutResult& layout, double x, double y,
                          double scroll_x = 0, double scroll_y = 0);

/// Bitmap font scale for a CSS font size, and the line box height it yields.
int font_scale(double font_size);
double line_height(int scale);

}  // namespace uigym::embedded
