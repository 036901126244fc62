#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "embedded/dom.hpp"
#include "uigym/image.hpp"

namespace uigym::embedded {

// ---------------------------------------------------------------------------
// selectors
// ---------------------------------------------------------------------------

struct AttrTest {
  std::string name;
  char op = 0;  // 0: presence, '=', '^', '$', '*', '~'
  std::string value;
};

struct SimpleSelector {
  std::string tag;  // empty or "*" matches any
  std::string id;
  std::vector<std::string> classes;
  std::vector<AttrTest> attrs;
  std::vector<std::string> pseudos;        // e.g. "first-child", "nth-child(2n+1)"
  std::vector<SimpleSelector> not_inner;   // :not(...) arguments
};

struct ComplexSelector {
  // compound[0] is the subject's leftmost ancestor part; combinator[i]
  // relates compound[i] to compound[i+1] (' ', '>', '+', '~')
  std::vector<SimpleSelector> compounds;
  std::vector<char> combinators;
};

struct SelectorList {
  std::vector<ComplexSelector> selectors;
};

SelectorList parse_selector(const std::string& source);  // throws ParseError
bool matches(const DomNode& node, const SelectorList& list);
bool matches_complex(const DomNode& node, const ComplexSelector& selector);

/// Document-order (pre-order) list of matching elements.
std::vector<DomNode*> query_all(const DomDocument& doc, const std::string& selector);
DomNode* query_first(const DomDocument& doc, const std::string& selector);

/// (ids, classes+attrs+pseudos, tags)
std::array<int, 3> specificity(const ComplexSelector& selector);

// ---------------------------------------------------------------------------
// stylesheets and computed style
// ---------------------------------------------------------------------------

struct StyleRule {
  ComplexSelector selector;
  std::vector<std::pair<std::string, std::string>> declarations;
  int source_order = 0;
};

/// Parses stylesheet text. @media blocks are evaluated against the given
/// viewport (width conditions only); non-matching or unknown blocks are
/// dropped. @keyframes/@font-face/@import are skipped.
std::vector<StyleRule> parse_stylesheet(const std::string& text, int viewport_width);

enum class Display { Block, Inline, InlineBlock, Flex, None };
enum class Position { Static, Relative, Absolute, Fixed };

struct Length {
  enum class Unit { Px, Percent, Auto } unit = Unit::Auto;
  double value = 0;
  bool is_auto() const { return unit == Unit::Auto; }
  double resolve(double reference) const {
    return unit == Unit::Percent ? value * reference / 100.0 : value;
  }
};

struct ComputedStyle {
  Display display = Display::Block;
  Position position = Position::Static;
  Length left, top, right, bottom;
  Length width, height;
  Length min_height;
  double margin[4] = {0, 0, 0, 0};    // top right bottom left
  bool margin_left_auto = false;
  bool margin_right_auto = false;
  double padding[4] = {0, 0, 0, 0};
  double border[4] = {0, 0, 0, 0};
  std::optional<Color> border_color;
  std::optional<Color> background;
  Color color{0, 0, 0};
  double font_size = 16;
  bool bold = false;
  int text_align = 0;  // 0 left, 1 center, 2 right
  bool flex_row = true;
  double gap = 0;
  int z_index = 0;
  bool hidden = false;  // visibility: hidden
};

class StyleResolver {
 public:
  StyleResolver(const DomDocument& doc, int viewport_width, int viewport_height);

  /// Cascaded, inherited, defaulted style for an element.
  const ComputedStyle& resolve(const DomNode& node);

 private:
  ComputedStyle compute(const DomNode& node);

  const DomDocument& doc_;
  int viewport_width_;
  int viewport_height_;
  std::vector<StyleRule> rules_;
  std::map<const DomNode*, ComputedStyle> cache_;
};

std::optional<Color> parse_css_color(const std::string& text);

}  // namespace uigym::embedded
