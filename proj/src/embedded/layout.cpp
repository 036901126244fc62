#include "embedded/layout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

namespace uigym::embedded {

int font_scale(double font_size) {
  return std::max(1, static_cast<int>(std::lround(font_size / 8.0)));
}

double line_height(int scale) { return kGlyphHeight * scale + 4; }

namespace {

constexpr double kSentinel = std::numeric_limits<double>::max();
constexpr int kMaxDepth = 100;

double run_width(const TextRun& run) { return text_width(run.text, run.scale); }

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Layouter {
  StyleResolver& resolver;
  int vw, vh;
  std::vector<LayoutBox> out;

  struct Deferred {
    const DomNode* node;
    const DomNode* containing;  // nullptr: the viewport
  };
  std::vector<Deferred> deferred;
  bool measuring = false;  // extent passes ignore centering

  Layouter(StyleResolver& r, int viewport_w, int viewport_h)
      : resolver(r), vw(viewport_w), vh(viewport_h) {}

  // -------------------------------------------------------------------------
  // inline flow
  // -------------------------------------------------------------------------

  struct LineItem {
    enum Kind { Word, Atom, Break } kind = Word;
    double w = 0, h = 0;
    double gap_before = 0;
    // word
    std::string text;
    int run_box = -1;
    int scale = 1;
    bool bold = false;
    Color color{0, 0, 0};
    // atom
    std::size_t box_start = 0, box_end = 0;
    // inline ancestors whose bounding boxes this item extends
    std::vector<int> owners;
  };

  struct InlineCtx {
    std::vector<LineItem> items;
    std::vector<int> inline_boxes;  // created eagerly while gathering
    bool pending_space = false;
  };

  void gather_text(InlineCtx& ctx, const std::string& text, int run_box,
                   const ComputedStyle& style, const std::vector<int>& owners) {
    const int scale = font_scale(style.font_size);
    std::string word;
    auto push_word = [&] {
      if (word.empty()) return;
      LineItem item;
      item.kind = LineItem::Word;
      item.text = word;
      item.w = text_width(word, scale);
      item.h = line_height(scale);
      item.run_box = run_box;
      item.scale = scale;
      item.bold = style.bold;
      item.color = style.color;
      item.owners = owners;
      item.gap_before =
          ctx.pending_space ? 7.0 * scale : 1.0 * scale;  // space vs glyph gap
      ctx.pending_space = false;
      ctx.items.push_back(std::move(item));
      word.clear();
    };
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        push_word();
        ctx.pending_space = true;
      } else {
        word += c;
      }
    }
    push_word();
  }

  void add_atom(InlineCtx& ctx, std::size_t box_start, std::size_t box_end,
                double w, double h, const std::vector<int>& owners) {
    LineItem item;
    item.kind = LineItem::Atom;
    item.w = w;
    item.h = h;
    item.box_start = box_start;
    item.box_end = box_end;
    item.owners = owners;
    item.gap_before = ctx.pending_space ? 4.0 : 0.0;
    ctx.pending_space = false;
    ctx.items.push_back(std::move(item));
  }

  void gather_inline(InlineCtx& ctx, const DomNode& node, int run_box,
                     std::vector<int> owners, double avail_w,
                     const DomNode* pos_anchor, int depth) {
    for (const auto& child : node.children) {
      if (!child->is_element()) {
        gather_text(ctx, child->text, run_box, out[run_box].style, owners);
        continue;
      }
      const ComputedStyle& st = resolver.resolve(*child);
      if (st.display == Display::None) continue;
      if (st.position == Position::Absolute || st.position == Position::Fixed) {
        deferred.push_back({child.get(),
                            st.position == Position::Fixed ? nullptr : pos_anchor});
        continue;
      }
      if (child->tag == "br") {
        LineItem item;
        item.kind = LineItem::Break;
        ctx.items.push_back(std::move(item));
        ctx.pending_space = false;
        continue;
      }
      if (st.display == Display::Inline && !is_atom_tag(*child)) {
        // eager box; bounds accumulate as its content is placed
        const int box_index = static_cast<int>(out.size());
        LayoutBox box;
        box.node = child.get();
        box.style = st;
        box.x = box.y = kSentinel;
        out.push_back(std::move(box));
        ctx.inline_boxes.push_back(box_index);
        std::vector<int> child_owners = owners;
        child_owners.push_back(box_index);
        gather_inline(ctx, *child, box_index, child_owners, avail_w,
                      st.position == Position::Relative ? child.get() : pos_anchor,
                      depth);
        continue;
      }
      // anything else participates as an atom
      const AtomRect atom = measure_atom(*child, avail_w, pos_anchor, depth + 1);
      add_atom(ctx, atom.start, atom.end, atom.w, atom.h, owners);
    }
  }

  /// Places accumulated items as wrapped lines; returns the height used.
  double flush(InlineCtx& ctx, double cx, double cy, double cw, int align) {
    double y = cy;
    std::size_t i = 0;
    const std::size_t n = ctx.items.size();
    while (i < n) {
      if (ctx.items[i].kind == LineItem::Break) {
        y += line_height(2);  // blank line for consecutive breaks
        ++i;
        continue;
      }
      // collect one line
      std::size_t j = i;
      double line_w = 0, line_h = 0;
      while (j < n && ctx.items[j].kind != LineItem::Break) {
        const LineItem& item = ctx.items[j];
        const double gap = j == i ? 0 : item.gap_before;
        if (j > i && line_w + gap + item.w > cw) break;
        line_w += gap + item.w;
        line_h = std::max(line_h, item.h);
        ++j;
      }
      if (j == i) {
        line_w = ctx.items[i].w;
        line_h = ctx.items[i].h;
        ++j;  // an oversized item still occupies one line
      }
      double x = cx;
      if (!measuring) {
        if (align == 1 && line_w < cw) x += (cw - line_w) / 2;
        if (align == 2 && line_w < cw) x += cw - line_w;
      }
      for (std::size_t k = i; k < j; ++k) {
        LineItem& item = ctx.items[k];
        if (k > i) x += item.gap_before;
        const double top = y + line_h - item.h;  // bottom-aligned
        if (item.kind == LineItem::Word) {
          TextRun run;
          run.x = x;
          run.y = top + 2;
          run.text = item.text;
          run.scale = item.scale;
          run.bold = item.bold;
          run.color = item.color;
          out[item.run_box].runs.push_back(std::move(run));
        } else {
          shift_boxes(item.box_start, item.box_end, x, top);
        }
        for (int owner : item.owners) expand_box(owner, x, top, item.w, item.h);
        x += item.w;
      }
      y += line_h;
      i = j;
      if (i < n && ctx.items[i].kind == LineItem::Break) ++i;  // line's own break
    }
    // inline boxes that never accumulated content collapse to a point
    for (int idx : ctx.inline_boxes) {
      if (out[idx].x == kSentinel) {
        out[idx].x = cx;
        out[idx].y = y;
        out[idx].w = out[idx].h = 0;
      }
    }
    ctx.items.clear();
    ctx.inline_boxes.clear();
    ctx.pending_space = false;
    return y - cy;
  }

  void expand_box(int index, double x, double y, double w, double h) {
    LayoutBox& box = out[index];
    if (box.x == kSentinel) {
      box.x = x;
      box.y = y;
      box.w = w;
      box.h = h;
      return;
    }
    const double right = std::max(box.x + box.w, x + w);
    const double bottom = std::max(box.y + box.h, y + h);
    box.x = std::min(box.x, x);
    box.y = std::min(box.y, y);
    box.w = right - box.x;
    box.h = bottom - box.y;
  }

  void shift_boxes(std::size_t start, std::size_t end, double dx, double dy) {
    for (std::size_t i = start; i < end; ++i) {
      LayoutBox& box = out[i];
      if (box.x != kSentinel) box.x += dx;
      if (box.y != kSentinel) box.y += dy;
      for (TextRun& run : box.runs) {
        run.x += dx;
        run.y += dy;
      }
    }
  }

  // -------------------------------------------------------------------------
  // atoms
  // -------------------------------------------------------------------------

  static bool is_atom_tag(const DomNode& node) {
    return node.tag == "input" || node.tag == "select" || node.tag == "textarea" ||
           node.tag == "img" || node.tag == "canvas";
  }

  struct AtomRect {
    std::size_t start, end;
    double w, h;
  };

  AtomRect measure_atom(const DomNode& node, double avail_w,
                        const DomNode* pos_anchor, int depth) {
    if (is_atom_tag(node)) return control_atom(node);
    // shrink-to-fit block measured at origin, shifted into place later
    const std::size_t start = out.size();
    const double fit = measure_extent(node, avail_w, pos_anchor, depth);
    const double h =
        layout_element(node, 0, 0, fit, std::nullopt, pos_anchor, depth);
    double w = 0;
    for (std::size_t i = start; i < out.size(); ++i) {
      if (out[i].x == kSentinel) continue;
      w = std::max(w, out[i].x + out[i].w);
      for (const TextRun& run : out[i].runs)
        w = std::max(w, run.x + run_width(run));
    }
    return {start, out.size(), w, h};
  }

  /// Preferred (shrink-to-fit) width: width-auto blocks stretch, so only
  /// explicitly sized boxes, controls and text runs count as content.
  double measure_extent(const DomNode& node, double avail_w,
                        const DomNode* pos_anchor, int depth) {
    const std::size_t mark = out.size();
    const std::size_t dmark = deferred.size();
    const bool was_measuring = measuring;
    measuring = true;
    layout_element(node, 0, 0, avail_w, std::nullopt, pos_anchor, depth);
    measuring = was_measuring;
    double extent = 0;
    for (std::size_t i = mark; i < out.size(); ++i) {
      if (out[i].x == kSentinel) continue;
      const bool sized = !out[i].style.width.is_auto() ||
                         (out[i].node && is_atom_tag(*out[i].node));
      if (sized) extent = std::max(extent, out[i].x + out[i].w);
      for (const TextRun& run : out[i].runs)
        extent = std::max(extent, run.x + run_width(run));
    }
    if (!out.empty() && mark < out.size()) {
      const ComputedStyle& rs = out[mark].style;
      extent += rs.margin[1] + rs.border[1] + rs.padding[1];
    }
    out.resize(mark);
    deferred.resize(dmark);
    return std::max(12.0, std::min(extent, avail_w));
  }

  AtomRect control_atom(const DomNode& node) {
    ComputedStyle st = resolver.resolve(node);
    const int scale = font_scale(st.font_size);
    const double lh = line_height(scale);
    const double bp_w = st.border[1] + st.border[3] + st.padding[1] + st.padding[3];
    const double bp_h = st.border[0] + st.border[2] + st.padding[0] + st.padding[2];

    double content_w = 170, content_h = lh;
    std::vector<TextRun> runs;
    Color placeholder_gray{117, 117, 117};

    const std::string type = to_lower(node.attr_or("type", "text"));
    if (node.tag == "input" && (type == "checkbox" || type == "radio")) {
      LayoutBox box;
      box.node = &node;
      box.style = st;
      box.w = box.h = 13;
      out.push_back(std::move(box));
      return {out.size() - 1, out.size(), 13, 13};
    }
    if (node.tag == "input" &&
        (type == "button" || type == "submit" || type == "reset")) {
      const std::string label =
          node.attr_or("value", type == "reset" ? "Reset" : "Submit");
      content_w = text_width(label, scale) + 8;
      TextRun run;
      run.text = label;
      run.scale = scale;
      run.bold = st.bold;
      run.color = st.color;
      run.x = st.border[3] + st.padding[3] + 4;
      run.y = st.border[0] + st.padding[0] + 2;
      runs.push_back(std::move(run));
    } else if (node.tag == "input") {
      if (const std::string* size = node.attr("size"))
        content_w = std::max(20.0, std::atof(size->c_str()) * kGlyphAdvance * scale);
      std::string text = node.value ? *node.value : node.attr_or("value", "");
      Color run_color = st.color;
      if (type == "password") text = std::string(text.size(), '*');
      if (text.empty()) {
        text = node.attr_or("placeholder", "");
        run_color = placeholder_gray;
      }
      if (!text.empty()) {
        TextRun run;
        run.text = text;
        run.scale = scale;
        run.color = run_color;
        run.x = st.border[3] + st.padding[3] + 1;
        run.y = st.border[0] + st.padding[0] + 2;
        runs.push_back(std::move(run));
      }
    } else if (node.tag == "select") {
      std::string selected;
      double widest = 40;
      for (const DomNode* option : node.element_children()) {
        if (option->tag != "option") continue;
        const std::string text = collapsed_text(*option);
        widest = std::max(widest, static_cast<double>(text_width(text, scale)));
        const std::string value = option->attr_or("value", text);
        if (selected.empty() || option->has_attr("selected")) selected = text;
        if (node.value && value == *node.value) selected = text;
      }
      content_w = widest + 24;
      if (!selected.empty()) {
        TextRun run;
        run.text = selected;
        run.scale = scale;
        run.color = st.color;
        run.x = st.border[3] + st.padding[3] + 1;
        run.y = st.border[0] + st.padding[0] + 2;
        runs.push_back(std::move(run));
      }
      TextRun arrow;
      arrow.text = "v";
      arrow.scale = 1;
      arrow.color = st.color;
      arrow.x = content_w + st.border[3] + st.padding[3] - 10;
      arrow.y = st.border[0] + st.padding[0] + (lh - kGlyphHeight) / 2;
      runs.push_back(std::move(arrow));
    } else if (node.tag == "textarea") {
      int rows = std::max(2, std::atoi(node.attr_or("rows", "2").c_str()));
      content_h = rows * lh;
      std::string text = node.value ? *node.value : collapsed_text(node);
      double ry = st.border[0] + st.padding[0] + 2;
      std::string line;
      int emitted = 0;
      auto push_line = [&] {
        if (!line.empty() && emitted < rows + 4) {
          TextRun run;
          run.text = line;
          run.scale = scale;
          run.color = st.color;
          run.x = st.border[3] + st.padding[3] + 1;
          run.y = ry;
          runs.push_back(std::move(run));
          ++emitted;
          ry += lh;
        }
        line.clear();
      };
      for (char c : text) {
        if (c == '\n') push_line();
        else line += c;
      }
      push_line();
    } else if (node.tag == "img" || node.tag == "canvas") {
      const double dw = node.tag == "canvas" ? 300 : 32;
      const double dh = node.tag == "canvas" ? 150 : 32;
      content_w = node.has_attr("width") ? std::atof(node.attr_or("width", "").c_str()) : dw;
      content_h = node.has_attr("height") ? std::atof(node.attr_or("height", "").c_str()) : dh;
      if (!st.background) st.background = Color{220, 220, 220};
    }

    if (!st.width.is_auto()) content_w = st.width.resolve(vw);
    if (!st.height.is_auto()) content_h = st.height.resolve(vh) - bp_h;
    content_w = std::max(content_w, 1.0);
    content_h = std::max(content_h, 1.0);

    LayoutBox box;
    box.node = &node;
    box.style = st;
    box.w = content_w + bp_w;
    box.h = content_h + bp_h;
    box.runs = std::move(runs);
    out.push_back(std::move(box));
    return {out.size() - 1, out.size(), out.back().w, out.back().h};
  }

  // -------------------------------------------------------------------------
  // block flow
  // -------------------------------------------------------------------------

  static bool inline_level(const ComputedStyle& st) {
    return st.display == Display::Inline || st.display == Display::InlineBlock;
  }

  /// Lays out one element as a block-level box at (x, y) in an available
  /// width; returns the margin-box height consumed in the flow.
  double layout_element(const DomNode& node, double x, double y, double avail_w,
                        std::optional<double> containing_h,
                        const DomNode* pos_anchor, int depth) {
    ComputedStyle st = resolver.resolve(node);
    if (depth > kMaxDepth) return 0;

    double ml = st.margin[3], mr = st.margin[1];
    const double mt = st.margin[0], mb = st.margin[2];
    const double bp_w = st.border[1] + st.border[3] + st.padding[1] + st.padding[3];
    const double bp_h = st.border[0] + st.border[2] + st.padding[0] + st.padding[2];

    double content_w;
    if (!st.width.is_auto()) {
      content_w = st.width.resolve(avail_w);
      const double extra = avail_w - content_w - bp_w -
                           (st.margin_left_auto ? 0 : ml) -
                           (st.margin_right_auto ? 0 : mr);
      if (extra > 0) {
        if (st.margin_left_auto && st.margin_right_auto) ml = mr = extra / 2;
        else if (st.margin_left_auto) ml = extra;
        else if (st.margin_right_auto) mr = extra;
      }
    } else {
      content_w = std::max(0.0, avail_w - ml - mr - bp_w);
    }

    // relative offset moves the box and its subtree, not its siblings
    double dx = 0, dy = 0;
    if (st.position == Position::Relative) {
      if (!st.left.is_auto()) dx = st.left.resolve(avail_w);
      else if (!st.right.is_auto()) dx = -st.right.resolve(avail_w);
      if (!st.top.is_auto()) dy = st.top.resolve(containing_h.value_or(0));
      else if (!st.bottom.is_auto()) dy = -st.bottom.resolve(containing_h.value_or(0));
    }

    const std::size_t box_index = out.size();
    {
      LayoutBox box;
      box.node = &node;
      box.style = st;
      box.x = x + ml + dx;
      box.y = y + mt + dy;
      box.w = content_w + bp_w;
      out.push_back(std::move(box));
    }
    const double cx = out[box_index].x + st.border[3] + st.padding[3];
    const double cy = out[box_index].y + st.border[0] + st.padding[0];

    std::optional<double> child_containing_h;
    if (!st.height.is_auto()) {
      if (st.height.unit == Length::Unit::Percent) {
        if (containing_h) child_containing_h = st.height.resolve(*containing_h);
      } else {
        child_containing_h = st.height.value;
      }
    }

    const DomNode* child_anchor =
        st.position != Position::Static ? &node : pos_anchor;

    double flow_h;
    if (st.display == Display::Flex && st.flex_row) {
      flow_h = flex_row_flow(node, cx, cy, content_w, box_index, st,
                             child_containing_h, child_anchor, depth);
    } else {
      flow_h = block_inline_flow(node, cx, cy, content_w, box_index, st,
                                 child_containing_h, child_anchor, depth,
                                 st.display == Display::Flex ? st.gap : 0.0);
    }

    double content_h = flow_h;
    if (child_containing_h) content_h = *child_containing_h;
    if (!st.min_height.is_auto()) {
      const double min_h = st.min_height.unit == Length::Unit::Percent
                               ? (containing_h ? st.min_height.resolve(*containing_h) : 0)
                               : st.min_height.value;
      content_h = std::max(content_h, min_h);
    }
    out[box_index].h = content_h + bp_h;
    return mt + out[box_index].h + mb;
  }

  double block_inline_flow(const DomNode& parent, double cx, double cy, double cw,
                           int box_index, const ComputedStyle& pstyle,
                           std::optional<double> containing_h,
                           const DomNode* pos_anchor, int depth, double gap) {
    double y = cy;
    InlineCtx ctx;
    bool first_block = true;
    for (const auto& child : parent.children) {
      if (!child->is_element()) {
        gather_text(ctx, child->text, box_index, out[box_index].style, {});
        continue;
      }
      const ComputedStyle& st = resolver.resolve(*child);
      if (st.display == Display::None) continue;
      if (st.position == Position::Absolute || st.position == Position::Fixed) {
        deferred.push_back({child.get(),
                            st.position == Position::Fixed ? nullptr : pos_anchor});
        continue;
      }
      if (child->tag == "br") {
        LineItem item;
        item.kind = LineItem::Break;
        ctx.items.push_back(std::move(item));
        ctx.pending_space = false;
        continue;
      }
      if (st.display == Display::Inline && !is_atom_tag(*child)) {
        const int idx = static_cast<int>(out.size());
        LayoutBox box;
        box.node = child.get();
        box.style = st;
        box.x = box.y = kSentinel;
        out.push_back(std::move(box));
        ctx.inline_boxes.push_back(idx);
        std::vector<int> owners{idx};
        gather_inline(ctx, *child, idx, owners, cw,
                      st.position == Position::Relative ? child.get() : pos_anchor,
                      depth);
        continue;
      }
      if (st.display == Display::InlineBlock || is_atom_tag(*child)) {
        const AtomRect atom = measure_atom(*child, cw, pos_anchor, depth + 1);
        add_atom(ctx, atom.start, atom.end, atom.w, atom.h, {});
        continue;
      }
      // block-level child
      y += flush(ctx, cx, y, cw, pstyle.text_align);
      if (!first_block && gap > 0) y += gap;
      first_block = false;
      y += layout_element(*child, cx, y, cw, containing_h, pos_anchor, depth + 1);
    }
    y += flush(ctx, cx, y, cw, pstyle.text_align);
    return y - cy;
  }

  double flex_row_flow(const DomNode& parent, double cx, double cy, double cw,
                       int box_index, const ComputedStyle& pstyle,
                       std::optional<double> /*containing_h*/,
                       const DomNode* pos_anchor, int depth) {
    // children sit on one unwrapped line separated by the gap
    InlineCtx ctx;
    for (const auto& child : parent.children) {
      if (!child->is_element()) {
        gather_text(ctx, child->text, box_index, out[box_index].style, {});
        continue;
      }
      const ComputedStyle& st = resolver.resolve(*child);
      if (st.display == Display::None) continue;
      if (st.position == Position::Absolute || st.position == Position::Fixed) {
        deferred.push_back({child.get(),
                            st.position == Position::Fixed ? nullptr : pos_anchor});
        continue;
      }
      const AtomRect atom = measure_atom(*child, cw, pos_anchor, depth + 1);
      add_atom(ctx, atom.start, atom.end, atom.w, atom.h, {});
    }
    double line_w = 0, line_h = 0;
    bool first = true;
    for (const LineItem& item : ctx.items) {
      if (!first) line_w += pstyle.gap > 0 ? pstyle.gap : item.gap_before;
      first = false;
      line_w += item.w;
      line_h = std::max(line_h, item.h);
    }
    double x = cx;
    if (!measuring) {
      if (pstyle.text_align == 1 && line_w < cw) x += (cw - line_w) / 2;
      if (pstyle.text_align == 2 && line_w < cw) x += cw - line_w;
    }
    first = true;
    for (LineItem& item : ctx.items) {
      if (!first) x += pstyle.gap > 0 ? pstyle.gap : item.gap_before;
      first = false;
      if (item.kind == LineItem::Word) {
        TextRun run;
        run.x = x;
        run.y = cy + 2;
        run.text = item.text;
        run.scale = item.scale;
        run.bold = item.bold;
        run.color = item.color;
        out[item.run_box].runs.push_back(std::move(run));
      } else {
        shift_boxes(item.box_start, item.box_end, x, cy);  // flex-start
      }
      x += item.w;
    }
    for (int idx : ctx.inline_boxes) {
      if (out[idx].x == kSentinel) {
        out[idx].x = cx;
        out[idx].y = cy;
        out[idx].w = out[idx].h = 0;
      }
    }
    return line_h;
  }

  // -------------------------------------------------------------------------
  // positioned elements
  // -------------------------------------------------------------------------

  struct Rect {
    double x, y, w, h;
    bool fixed;
  };

  Rect containing_rect(const DomNode* containing) {
    if (!containing) return {0, 0, double(vw), double(vh), true};
    for (std::size_t i = out.size(); i-- > 0;) {
      if (out[i].node == containing && out[i].x != kSentinel) {
        const LayoutBox& box = out[i];
        // the containing block is the padding box
        return {box.x + box.style.border[3], box.y + box.style.border[0],
                std::max(0.0, box.w - box.style.border[1] - box.style.border[3]),
                std::max(0.0, box.h - box.style.border[0] - box.style.border[2]),
                box.fixed};
      }
    }
    return {0, 0, double(vw), double(vh), false};
  }

  void place_positioned(const Deferred& d) {
    const DomNode& node = *d.node;
    const ComputedStyle st = resolver.resolve(node);
    const Rect cb = containing_rect(d.containing);
    const bool fixed = st.position == Position::Fixed || cb.fixed;

    const double ml = st.margin[3], mr = st.margin[1];

    double avail;
    if (!st.width.is_auto()) {
      avail = cb.w;
    } else if (!st.left.is_auto() && !st.right.is_auto()) {
      avail = std::max(0.0, cb.w - st.left.resolve(cb.w) - st.right.resolve(cb.w));
    } else {
      avail = std::min(cb.w, measure_extent(node, cb.w, &node, 0) + ml + mr);
    }

    const std::size_t mark = out.size();
    const double margin_h = layout_element(node, 0, 0, avail, cb.h, &node, 0);
    const LayoutBox& root = out[mark];
    const double bw = root.w + ml + mr;
    const double bh = margin_h;

    double x0, y0;
    if (!st.left.is_auto()) x0 = cb.x + st.left.resolve(cb.w);
    else if (!st.right.is_auto()) x0 = cb.x + cb.w - st.right.resolve(cb.w) - bw;
    else x0 = cb.x;
    if (!st.top.is_auto()) y0 = cb.y + st.top.resolve(cb.h);
    else if (!st.bottom.is_auto()) y0 = cb.y + cb.h - st.bottom.resolve(cb.h) - bh;
    else y0 = cb.y;

    shift_boxes(mark, out.size(), x0, y0);
    if (fixed) {
      for (std::size_t i = mark; i < out.size(); ++i) out[i].fixed = true;
    }
  }

  void process_deferred() {
    int guard = 0;
    while (!deferred.empty() && guard++ < 32) {
      std::vector<Deferred> wave = std::move(deferred);
      deferred.clear();
      std::stable_sort(wave.begin(), wave.end(),
                       [&](const Deferred& a, const Deferred& b) {
                         return resolver.resolve(*a.node).z_index <
                                resolver.resolve(*b.node).z_index;
                       });
      for (const Deferred& d : wave) place_positioned(d);
    }
  }
};

}  // namespace

LayoutResult layout_document(const DomDocument& doc, StyleResolver& resolver,
                             int viewport_width, int viewport_height) {
  Layouter layouter(resolver, viewport_width, viewport_height);
  LayoutResult result;
  if (!doc.root) return result;

  // the root box backs full-page hit testing and canvas background
  {
    LayoutBox html_box;
    html_box.node = doc.root.get();
    html_box.style = resolver.resolve(*doc.root);
    html_box.x = 0;
    html_box.y = 0;
    html_box.w = viewport_width;
    html_box.h = viewport_height;  // grows below
    layouter.out.push_back(std::move(html_box));
  }
  if (const DomNode* body = doc.body()) {
    layouter.layout_element(*body, 0, 0, viewport_width,
                            double(viewport_height), nullptr, 0);
  }
  layouter.process_deferred();

  double max_x = 0, max_y = 0;
  for (const LayoutBox& box : layouter.out) {
    if (box.x == kSentinel || box.fixed) continue;
    max_x = std::max(max_x, box.x + box.w);
    max_y = std::max(max_y, box.y + box.h);
    for (const TextRun& run : box.runs) {
      max_x = std::max(max_x, run.x + run_width(run));
      max_y = std::max(max_y, run.y + kGlyphHeight * run.scale);
    }
  }
  layouter.out[0].h = std::max(double(viewport_height), max_y);
  layouter.out[0].w = std::max(double(viewport_width), max_x);

  result.boxes = std::move(layouter.out);
  result.content_width = std::max(double(viewport_width), max_x);
  result.content_height = std::max(double(viewport_height), max_y);
  return result;
}

const LayoutBox* hit_test(const LayoutResult& layout, double x, double y,
                          double scroll_x, double scroll_y) {
  const LayoutBox* hit = nullptr;
  for (const LayoutBox& box : layout.boxes) {
    if (box.style.hidden) continue;
    const double px = box.fixed ? x - scroll_x : x;
    const double py = box.fixed ? y - scroll_y : y;
    if (px >= box.x && px < box.x + box.w && py >= box.y && py < box.y + box.h)
      hit = &box;
  }
  return hit;
}

}  // namespace uigym::embedded
