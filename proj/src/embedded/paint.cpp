#include "embedded/paint.hpp"

#include <algorithm>
#include <cmath>

namespace uigym::embedded {
namespace {

int px(double v) { return static_cast<int>(std::lround(v)); }

Color border_color_of(const LayoutBox& box) {
  if (box.style.border_color) return *box.style.border_color;
  if (box.node && is_form_control(*box.node)) return Color{118, 118, 118};
  return box.style.color;
}

void paint_borders(Image& img, const LayoutBox& box, int sx, int sy) {
  const Color c = border_color_of(box);
  const int w = px(box.w), h = px(box.h);
  const int bt = px(box.style.border[0]), br = px(box.style.border[1]);
  const int bb = px(box.style.border[2]), bl = px(box.style.border[3]);
  if (bt > 0) fill_rect(img, sx, sy, w, bt, c);
  if (bb > 0) fill_rect(img, sx, sy + h - bb, w, bb, c);
  if (bl > 0) fill_rect(img, sx, sy, bl, h, c);
  if (br > 0) fill_rect(img, sx + w - br, sy, br, h, c);
}

bool is_check_input(const DomNode* node) {
  if (!node || node->tag != "input") return false;
  const std::string type = node->attr_or("type", "text");
  return type == "checkbox" || type == "radio";
}

}  // namespace

Image paint_page(const LayoutResult& layout, int viewport_width,
                 int viewport_height, double scroll_x, double scroll_y) {
  Image img(viewport_width, viewport_height, Color{255, 255, 255});

  // the html/body background covers the whole canvas
  for (const LayoutBox& box : layout.boxes) {
    if (!box.node) continue;
    if (box.node->tag == "html" || box.node->tag == "body") {
      if (box.style.background)
        fill_rect(img, 0, 0, viewport_width, viewport_height, *box.style.background);
      if (box.node->tag == "body") break;
    }
  }

  for (const LayoutBox& box : layout.boxes) {
    if (box.style.hidden) continue;
    const int sx = px(box.x - (box.fixed ? 0 : scroll_x));
    const int sy = px(box.y - (box.fixed ? 0 : scroll_y));
    const int w = px(box.w), h = px(box.h);
    if (sx >= viewport_width || sy >= viewport_height || sx + w <= 0 || sy + h <= 0) {
      // still draw its text, which may extend past the box
    } else {
      const bool is_canvas_background =
          box.node && (box.node->tag == "html" || box.node->tag == "body");
      if (box.style.background && !is_canvas_background)
        fill_rect(img, sx, sy, w, h, *box.style.background);
      paint_borders(img, box, sx, sy);
      if (is_check_input(box.node)) {
        const bool on = box.node->checked || box.node->has_attr("checked");
        draw_border(img, sx, sy, w, h, 1, Color{118, 118, 118});
        if (on) fill_rect(img, sx + 3, sy + 3, w - 6, h - 6, Color{32, 33, 36});
      }
      if (box.node && box.node->focused)
        draw_border(img, sx - 2, sy - 2, w + 4, h + 4, 2, Color{0, 95, 204});
    }
    for (const TextRun& run : box.runs) {
      const int tx = px(run.x - (box.fixed ? 0 : scroll_x));
      const int ty = px(run.y - (box.fixed ? 0 : scroll_y));
      if (ty >= viewport_height || ty + kGlyphHeight * run.scale <= 0) continue;
      draw_text(img, tx, ty, run.text, run.color, run.scale);
      if (run.bold) draw_text(img, tx + 1, ty, run.text, run.color, run.scale);
    }
  }

  // page scrollbar
  if (layout.content_height > viewport_height) {
    const int track_w = 10;
    const int tx = viewport_width - track_w;
    fill_rect(img, tx, 0, track_w, viewport_height, Color{241, 241, 241});
    const double ratio = viewport_height / layout.content_height;
    const int thumb_h = std::max(20, px(viewport_height * ratio));
    const double max_scroll = layout.content_height - viewport_height;
    const double at = max_scroll > 0 ? scroll_y / max_scroll : 0;
    const int thumb_y = px(at * (viewport_height - thumb_h));
    fill_rect(img, tx + 2, thumb_y, track_w - 4, thumb_h, Color{193, 193, 193});
  }
  return img;
}

}  // namespace uigym::embedded
