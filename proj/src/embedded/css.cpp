#include "embedded/css.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "uigym/errors.hpp"

namespace uigym::embedded {
namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

// ---------------------------------------------------------------------------
// selector parsing
// ---------------------------------------------------------------------------

struct SelectorParser {
  const std::string& src;
  std::size_t pos = 0;

  explicit SelectorParser(const std::string& s) : src(s) {}

  bool done() const { return pos >= src.size(); }
  char peek() const { return src[pos]; }

  std::string ident() {
    std::string out;
    while (!done() && is_ident_char(peek())) out += src[pos++];
    return out;
  }

  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
  }

  SimpleSelector parse_compound() {
    SimpleSelector simple;
    bool any = false;
    while (!done()) {
      const char c = peek();
      if (c == '*') {
        ++pos;
        simple.tag = "*";
        any = true;
      } else if (is_ident_char(c)) {
        simple.tag = to_lower(ident());
        any = true;
      } else if (c == '#') {
        ++pos;
        simple.id = ident();
        if (simple.id.empty()) throw ParseError("empty id selector", pos);
        any = true;
      } else if (c == '.') {
        ++pos;
        const std::string cls = ident();
        if (cls.empty()) throw ParseError("empty class selector", pos);
        simple.classes.push_back(cls);
        any = true;
      } else if (c == '[') {
        ++pos;
        AttrTest test;
        skip_ws();
        test.name = to_lower(ident());
        if (test.name.empty()) throw ParseError("empty attribute selector", pos);
        skip_ws();
        if (!done() && (peek() == '^' || peek() == '$' || peek() == '*' || peek() == '~')) {
          test.op = src[pos++];
          if (done() || peek() != '=') throw ParseError("bad attribute operator", pos);
          ++pos;
        } else if (!done() && peek() == '=') {
          test.op = '=';
          ++pos;
        }
        if (test.op) {
          skip_ws();
          if (!done() && (peek() == '"' || peek() == '\'')) {
            const char quote = src[pos++];
            while (!done() && peek() != quote) test.value += src[pos++];
            if (done()) throw ParseError("unterminated attribute value", pos);
            ++pos;
          } else {
            while (!done() && peek() != ']' &&
                   !std::isspace(static_cast<unsigned char>(peek())))
              test.value += src[pos++];
          }
        }
        skip_ws();
        if (done() || peek() != ']') throw ParseError("expected ']'", pos);
        ++pos;
        simple.attrs.push_back(std::move(test));
        any = true;
      } else if (c == ':') {
        ++pos;
        if (!done() && peek() == ':') ++pos;  // pseudo-elements treated as classes
        std::string name = to_lower(ident());
        if (name.empty()) throw ParseError("empty pseudo selector", pos);
        if (!done() && peek() == '(') {
          ++pos;
          int depth = 1;
          std::string args;
          while (!done() && depth > 0) {
            if (peek() == '(') ++depth;
            if (peek() == ')') {
              --depth;
              if (depth == 0) break;
            }
            args += src[pos++];
          }
          if (done()) throw ParseError("unterminated pseudo arguments", pos);
          ++pos;
          if (name == "not") {
            SelectorParser inner(args);
            inner.skip_ws();
            simple.not_inner.push_back(inner.parse_compound());
          } else {
            simple.pseudos.push_back(name + "(" + trim(args) + ")");
          }
        } else {
          simple.pseudos.push_back(name);
        }
        any = true;
      } else {
        break;
      }
    }
    if (!any) throw ParseError("expected a selector", pos);
    return simple;
  }

  ComplexSelector parse_complex() {
    ComplexSelector complex;
    skip_ws();
    complex.compounds.push_back(parse_compound());
    while (!done()) {
      // detect combinator
      std::size_t mark = pos;
      bool saw_ws = false;
      while (!done() && std::isspace(static_cast<unsigned char>(peek()))) {
        ++pos;
        saw_ws = true;
      }
      if (done() || peek() == ',') {
        pos = mark;
        break;
      }
      char combinator = ' ';
      if (peek() == '>' || peek() == '+' || peek() == '~') {
        combinator = src[pos++];
        skip_ws();
      } else if (!saw_ws) {
        break;
      }
      complex.combinators.push_back(combinator);
      complex.compounds.push_back(parse_compound());
    }
    return complex;
  }
};

// ---------------------------------------------------------------------------
// selector matching
// ---------------------------------------------------------------------------

bool nth_matches(const std::string& expr, int index1) {
  // index1 is 1-based
  const std::string e = trim(to_lower(expr));
  if (e == "odd") return index1 % 2 == 1;
  if (e == "even") return index1 % 2 == 0;
  // an+b
  const std::size_t n_pos = e.find('n');
  if (n_pos == std::string::npos) {
    return index1 == std::atoi(e.c_str());
  }
  int a = 1;
  const std::string a_part = trim(e.substr(0, n_pos));
  if (a_part == "-") a = -1;
  else if (!a_part.empty()) a = std::atoi(a_part.c_str());
  int b = 0;
  const std::string b_part = trim(e.substr(n_pos + 1));
  if (!b_part.empty()) {
    std::string digits = b_part;
    digits.erase(std::remove_if(digits.begin(), digits.end(),
                                [](unsigned char c) { return std::isspace(c); }),
                 digits.end());
    b = std::atoi(digits.c_str());
  }
  if (a == 0) return index1 == b;
  const int k = index1 - b;
  return k % a == 0 && k / a >= 0;
}

bool pseudo_matches(const DomNode& node, const std::string& pseudo) {
  if (pseudo == "first-child") return node.element_index() == 0;
  if (pseudo == "last-child") {
    if (!node.parent) return true;
    return node.element_index() ==
           static_cast<int>(node.parent->element_children().size()) - 1;
  }
  if (pseudo == "only-child") {
    return node.parent && node.parent->element_children().size() == 1;
  }
  if (pseudo.rfind("nth-child(", 0) == 0) {
    const std::string args = pseudo.substr(10, pseudo.size() - 11);
    const int index = node.element_index();
    return index >= 0 && nth_matches(args, index + 1);
  }
  if (pseudo == "first-of-type" || pseudo == "last-of-type") {
    if (!node.parent) return true;
    std::vector<const DomNode*> same;
    for (const DomNode* sibling : node.parent->element_children())
      if (sibling->tag == node.tag) same.push_back(sibling);
    if (same.empty()) return false;
    return pseudo[0] == 'f' ? same.front() == &node : same.back() == &node;
  }
  if (pseudo == "checked") return node.checked || node.has_attr("checked");
  if (pseudo == "disabled") return node.has_attr("disabled");
  if (pseudo == "enabled") return is_form_control(node) && !node.has_attr("disabled");
  if (pseudo == "focus") return node.focused;
  if (pseudo == "root") return node.tag == "html";
  if (pseudo == "empty") {
    for (const auto& child : node.children) {
      if (child->is_element()) return false;
      if (!trim(child->text).empty()) return false;
    }
    return true;
  }
  if (pseudo == "required") return node.has_attr("required");
  // hover/active/visited and anything unknown never match in this engine
  return false;
}

bool attr_matches(const DomNode& node, const AttrTest& test) {
  const std::string* v = node.attr(test.name);
  // live value/checked state shadows the static attribute for form controls
  if (test.name == "value" && node.value) v = &*node.value;
  if (!v) return false;
  switch (test.op) {
    case 0: return true;
    case '=': return *v == test.value;
    case '^': return !test.value.empty() && v->rfind(test.value, 0) == 0;
    case '$':
      return v->size() >= test.value.size() && !test.value.empty() &&
             v->compare(v->size() - test.value.size(), test.value.size(),
                        test.value) == 0;
    case '*': return !test.value.empty() && v->find(test.value) != std::string::npos;
    case '~': {
      std::size_t start = 0;
      while (start <= v->size()) {
        std::size_t end = v->find(' ', start);
        if (end == std::string::npos) end = v->size();
        if (v->substr(start, end - start) == test.value) return true;
        start = end + 1;
      }
      return false;
    }
    default: return false;
  }
}

bool simple_matches(const DomNode& node, const SimpleSelector& simple) {
  if (!node.is_element()) return false;
  if (!simple.tag.empty() && simple.tag != "*" && node.tag != simple.tag) return false;
  if (!simple.id.empty() && node.attr_or("id", "") != simple.id) return false;
  if (!simple.classes.empty()) {
    const std::vector<std::string> classes = node.class_list();
    for (const std::string& wanted : simple.classes) {
      if (std::find(classes.begin(), classes.end(), wanted) == classes.end())
        return false;
    }
  }
  for (const AttrTest& test : simple.attrs) {
    if (!attr_matches(node, test)) return false;
  }
  for (const std::string& pseudo : simple.pseudos) {
    if (!pseudo_matches(node, pseudo)) return false;
  }
  for (const SimpleSelector& inner : simple.not_inner) {
    if (simple_matches(node, inner)) return false;
  }
  return true;
}

const DomNode* previous_element_sibling(const DomNode& node) {
  if (!node.parent) return nullptr;
  const DomNode* prev = nullptr;
  for (const auto& sibling : node.parent->children) {
    if (sibling.get() == &node) return prev;
    if (sibling->is_element()) prev = sibling.get();
  }
  return nullptr;
}

// right-to-left match: compound_index points at the compound already known
// to match `node`; walk the remaining combinators leftwards
bool match_upward(const DomNode& node, const ComplexSelector& sel,
                  std::size_t compound_index) {
  if (compound_index == 0) return true;
  const char combinator = sel.combinators[compound_index - 1];
  const SimpleSelector& target = sel.compounds[compound_index - 1];
  switch (combinator) {
    case ' ': {
      for (const DomNode* a = node.parent; a; a = a->parent) {
        if (simple_matches(*a, target) && match_upward(*a, sel, compound_index - 1))
          return true;
      }
      return false;
    }
    case '>': {
      const DomNode* p = node.parent;
      return p && simple_matches(*p, target) && match_upward(*p, sel, compound_index - 1);
    }
    case '+': {
      const DomNode* prev = previous_element_sibling(node);
      return prev && simple_matches(*prev, target) &&
             match_upward(*prev, sel, compound_index - 1);
    }
    case '~': {
      for (const DomNode* prev = previous_element_sibling(node); prev;
           prev = previous_element_sibling(*prev)) {
        if (simple_matches(*prev, target) && match_upward(*prev, sel, compound_index - 1))
          return true;
      }
      return false;
    }
    default: return false;
  }
}

}  // namespace

SelectorList parse_selector(const std::string& source) {
  SelectorList list;
  // split on top-level commas
  std::vector<std::string> parts;
  std::string current;
  int bracket = 0, paren = 0;
  char quote = 0;
  for (char c : source) {
    if (quote) {
      current += c;
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '[') ++bracket;
    else if (c == ']') --bracket;
    else if (c == '(') ++paren;
    else if (c == ')') --paren;
    if (c == ',' && bracket == 0 && paren == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);

  for (const std::string& part : parts) {
    const std::string trimmed = trim(part);
    if (trimmed.empty()) throw ParseError("empty selector in list", 0);
    SelectorParser parser(trimmed);
    ComplexSelector complex = parser.parse_complex();
    parser.skip_ws();
    if (!parser.done())
      throw ParseError("unexpected selector trailer '" + trimmed.substr(parser.pos) + "'",
                       parser.pos);
    list.selectors.push_back(std::move(complex));
  }
  return list;
}

bool matches_complex(const DomNode& node, const ComplexSelector& selector) {
  if (!simple_matches(node, selector.compounds.back())) return false;
  return match_upward(node, selector, selector.compounds.size() - 1);
}

bool matches(const DomNode& node, const SelectorList& list) {
  for (const ComplexSelector& sel : list.selectors) {
    if (matches_complex(node, sel)) return true;
  }
  return false;
}

std::vector<DomNode*> query_all(const DomDocument& doc, const std::string& selector) {
  const SelectorList list = parse_selector(selector);
  std::vector<DomNode*> out;
  doc.for_each_element([&](DomNode& node) {
    if (matches(node, list)) out.push_back(&node);
  });
  return out;
}

DomNode* query_first(const DomDocument& doc, const std::string& selector) {
  const std::vector<DomNode*> all = query_all(doc, selector);
  return all.empty() ? nullptr : all.front();
}

std::array<int, 3> specificity(const ComplexSelector& selector) {
  std::array<int, 3> s = {0, 0, 0};
  for (const SimpleSelector& simple : selector.compounds) {
    if (!simple.id.empty()) ++s[0];
    s[1] += static_cast<int>(simple.classes.size() + simple.attrs.size() +
                             simple.pseudos.size() + simple.not_inner.size());
    if (!simple.tag.empty() && simple.tag != "*") ++s[2];
  }
  return s;
}

// ---------------------------------------------------------------------------
// stylesheet parsing
// ---------------------------------------------------------------------------

namespace {

std::string strip_comments(const std::string& text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (i + 1 < text.size() && text[i] == '/' && text[i + 1] == '*') {
      const std::size_t end = text.find("*/", i + 2);
      i = end == std::string::npos ? text.size() : end + 2;
      continue;
    }
    out += text[i++];
  }
  return out;
}

bool media_condition_holds(const std::string& condition, int viewport_width) {
  // comma-separated clauses are OR'ed
  std::size_t start = 0;
  const std::string cond = to_lower(condition);
  while (start <= cond.size()) {
    std::size_t end = cond.find(',', start);
    if (end == std::string::npos) end = cond.size();
    std::string clause = trim(cond.substr(start, end - start));
    start = end + 1;
    if (clause.empty()) continue;
    bool holds = true;
    // evaluate each (feature: value) plus bare media types
    std::size_t i = 0;
    while (i < clause.size() && holds) {
      if (clause[i] == '(') {
        const std::size_t close = clause.find(')', i);
        if (close == std::string::npos) {
          holds = false;
          break;
        }
        const std::string feature = clause.substr(i + 1, close - i - 1);
        const std::size_t colon = feature.find(':');
        const std::string name = trim(colon == std::string::npos
                                          ? feature
                                          : feature.substr(0, colon));
        const std::string value =
            colon == std::string::npos ? "" : trim(feature.substr(colon + 1));
        const double px = std::atof(value.c_str());
        if (name == "min-width") holds = viewport_width >= px;
        else if (name == "max-width") holds = viewport_width <= px;
        else if (name == "min-height" || name == "max-height" || name == "orientation")
          holds = true;  // height/orientation never restrict the fixed viewport
        else holds = false;  // unknown feature: drop the block
        i = close + 1;
      } else {
        ++i;
      }
    }
    // media types: reject print-only clauses
    if (clause.rfind("print", 0) == 0) holds = false;
    if (holds) return true;
  }
  return false;
}

void parse_rules_into(const std::string& text, int viewport_width,
                      std::vector<StyleRule>& out, int& order) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;

    if (text[i] == '@') {
      const std::size_t name_start = i + 1;
      std::size_t j = name_start;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      const std::string at_name = to_lower(text.substr(name_start, j - name_start));
      // find either ';' (e.g. @import) or the block
      std::size_t brace = text.find('{', j);
      const std::size_t semi = text.find(';', j);
      if (semi != std::string::npos && (brace == std::string::npos || semi < brace)) {
        i = semi + 1;
        continue;
      }
      if (brace == std::string::npos) break;
      // matching close brace
      int depth = 1;
      std::size_t k = brace + 1;
      while (k < text.size() && depth > 0) {
        if (text[k] == '{') ++depth;
        if (text[k] == '}') --depth;
        ++k;
      }
      const std::string body = text.substr(brace + 1, k - brace - 2);
      if (at_name == "media") {
        const std::string condition = trim(text.substr(j, brace - j));
        if (media_condition_holds(condition, viewport_width))
          parse_rules_into(body, viewport_width, out, order);
      }
      // @keyframes/@font-face/@supports bodies are dropped
      i = k;
      continue;
    }

    const std::size_t brace = text.find('{', i);
    if (brace == std::string::npos) break;
    const std::string selector_text = trim(text.substr(i, brace - i));
    std::size_t close = text.find('}', brace);
    if (close == std::string::npos) close = text.size();
    const std::string decl_text = text.substr(brace + 1, close - brace - 1);
    i = close + 1;
    if (selector_text.empty()) continue;

    std::vector<std::pair<std::string, std::string>> declarations;
    std::size_t d = 0;
    while (d <= decl_text.size()) {
      std::size_t semi = decl_text.find(';', d);
      if (semi == std::string::npos) semi = decl_text.size();
      const std::string decl = trim(decl_text.substr(d, semi - d));
      d = semi + 1;
      if (decl.empty()) continue;
      const std::size_t colon = decl.find(':');
      if (colon == std::string::npos) continue;
      std::string prop = to_lower(trim(decl.substr(0, colon)));
      std::string value = trim(decl.substr(colon + 1));
      // strip !important
      const std::size_t bang = to_lower(value).find("!important");
      if (bang != std::string::npos) value = trim(value.substr(0, bang));
      declarations.emplace_back(std::move(prop), std::move(value));
    }
    if (declarations.empty()) continue;

    SelectorList list;
    try {
      list = parse_selector(selector_text);
    } catch (const ParseError&) {
      continue;  // drop unparseable rules, as browsers do
    }
    for (ComplexSelector& complex : list.selectors) {
      StyleRule rule;
      rule.selector = std::move(complex);
      rule.declarations = declarations;
      rule.source_order = order++;
      out.push_back(std::move(rule));
    }
  }
}

}  // namespace

std::vector<StyleRule> parse_stylesheet(const std::string& text, int viewport_width) {
  std::vector<StyleRule> rules;
  int order = 0;
  parse_rules_into(strip_comments(text), viewport_width, rules, order);
  return rules;
}

// ---------------------------------------------------------------------------
// colors, lengths, computed style
// ---------------------------------------------------------------------------

std::optional<Color> parse_css_color(const std::string& raw) {
  const std::string text = to_lower(trim(raw));
  if (text.empty()) return std::nullopt;
  if (text[0] == '#') {
    const std::string hex = text.substr(1);
    auto nibble = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      return -1;
    };
    if (hex.size() == 3) {
      const int r = nibble(hex[0]), g = nibble(hex[1]), b = nibble(hex[2]);
      if (r < 0 || g < 0 || b < 0) return std::nullopt;
      return Color{static_cast<std::uint8_t>(r * 17), static_cast<std::uint8_t>(g * 17),
                   static_cast<std::uint8_t>(b * 17)};
    }
    if (hex.size() == 6 || hex.size() == 8) {
      int v[6];
      for (int i = 0; i < 6; ++i) {
        v[i] = nibble(hex[i]);
        if (v[i] < 0) return std::nullopt;
      }
      return Color{static_cast<std::uint8_t>(v[0] * 16 + v[1]),
                   static_cast<std::uint8_t>(v[2] * 16 + v[3]),
                   static_cast<std::uint8_t>(v[4] * 16 + v[5])};
    }
    return std::nullopt;
  }
  if (text.rfind("rgb", 0) == 0) {
    const std::size_t open = text.find('(');
    const std::size_t close = text.find(')');
    if (open == std::string::npos || close == std::string::npos) return std::nullopt;
    std::vector<double> parts;
    std::string current;
    for (std::size_t i = open + 1; i <= close; ++i) {
      if (i == close || text[i] == ',' || text[i] == '/' ||
          std::isspace(static_cast<unsigned char>(text[i]))) {
        if (!current.empty()) {
          parts.push_back(std::atof(current.c_str()));
          current.clear();
        }
      } else {
        current += text[i];
      }
    }
    if (parts.size() < 3) return std::nullopt;
    if (parts.size() >= 4 && parts[3] < 0.05) return std::nullopt;  // transparent
    auto clamp = [](double v) {
      return static_cast<std::uint8_t>(std::max(0.0, std::min(255.0, v)));
    };
    return Color{clamp(parts[0]), clamp(parts[1]), clamp(parts[2])};
  }
  struct Named { const char* name; Color color; };
  static const Named kNamed[] = {
      {"black", {0, 0, 0}},          {"white", {255, 255, 255}},
      {"red", {255, 0, 0}},          {"green", {0, 128, 0}},
      {"blue", {0, 0, 255}},         {"yellow", {255, 255, 0}},
      {"orange", {255, 165, 0}},     {"purple", {128, 0, 128}},
      {"pink", {255, 192, 203}},     {"gray", {128, 128, 128}},
      {"grey", {128, 128, 128}},     {"lightgray", {211, 211, 211}},
      {"lightgrey", {211, 211, 211}},{"darkgray", {169, 169, 169}},
      {"silver", {192, 192, 192}},   {"teal", {0, 128, 128}},
      {"navy", {0, 0, 128}},         {"brown", {165, 42, 42}},
      {"cyan", {0, 255, 255}},       {"magenta", {255, 0, 255}},
      {"lime", {0, 255, 0}},         {"maroon", {128, 0, 0}},
      {"olive", {128, 128, 0}},      {"aqua", {0, 255, 255}},
      {"fuchsia", {255, 0, 255}},    {"gold", {255, 215, 0}},
      {"beige", {245, 245, 220}},    {"ivory", {255, 255, 240}},
      {"crimson", {220, 20, 60}},    {"coral", {255, 127, 80}},
      {"salmon", {250, 128, 114}},   {"khaki", {240, 230, 140}},
      {"lavender", {230, 230, 250}}, {"indigo", {75, 0, 130}},
      {"violet", {238, 130, 238}},   {"tomato", {255, 99, 71}},
      {"orangered", {255, 69, 0}},   {"steelblue", {70, 130, 180}},
      {"skyblue", {135, 206, 235}},  {"lightblue", {173, 216, 230}},
      {"royalblue", {65, 105, 225}}, {"dodgerblue", {30, 144, 255}},
      {"midnightblue", {25, 25, 112}},{"forestgreen", {34, 139, 34}},
      {"seagreen", {46, 139, 87}},   {"darkgreen", {0, 100, 0}},
      {"lightgreen", {144, 238, 144}},{"darkslategray", {47, 79, 79}},
      {"slategray", {112, 128, 144}},{"whitesmoke", {245, 245, 245}},
      {"ghostwhite", {248, 248, 255}},{"snow", {255, 250, 250}},
      {"linen", {250, 240, 230}},    {"honeydew", {240, 255, 240}},
      {"mintcream", {245, 255, 250}},{"aliceblue", {240, 248, 255}},
      {"goldenrod", {218, 165, 32}}, {"chocolate", {210, 105, 30}},
      {"tan", {210, 180, 140}},      {"wheat", {245, 222, 179}},
      {"firebrick", {178, 34, 34}},  {"darkred", {139, 0, 0}},
      {"hotpink", {255, 105, 180}},  {"deeppink", {255, 20, 147}},
      {"plum", {221, 160, 221}},     {"orchid", {218, 112, 214}},
      {"turquoise", {64, 224, 208}}, {"lightyellow", {255, 255, 224}},
      {"lemonchiffon", {255, 250, 205}},{"darkorange", {255, 140, 0}},
      {"cadetblue", {95, 158, 160}}, {"powderblue", {176, 224, 230}},
      {"rebeccapurple", {102, 51, 153}},{"slateblue", {106, 90, 205}},
      {"mediumseagreen", {60, 179, 113}},{"springgreen", {0, 255, 127}},
      {"palegreen", {152, 251, 152}},{"darkkhaki", {189, 183, 107}},
      {"peachpuff", {255, 218, 185}},{"mistyrose", {255, 228, 225}},
      {"gainsboro", {220, 220, 220}},{"thistle", {216, 191, 216}},
  };
  for (const Named& named : kNamed) {
    if (text == named.name) return named.color;
  }
  if (text == "transparent" || text == "none" || text == "inherit" ||
      text == "initial" || text == "unset" || text == "currentcolor")
    return std::nullopt;
  return std::nullopt;
}

namespace {

Length parse_length(const std::string& raw, double parent_font, int viewport_width,
                    int viewport_height) {
  const std::string text = to_lower(trim(raw));
  Length out;
  if (text.empty() || text == "auto" || text == "none" || text == "initial" ||
      text == "inherit" || text == "fit-content" || text == "max-content" ||
      text == "min-content")
    return out;
  const double value = std::atof(text.c_str());
  if (text.size() >= 1 && text.back() == '%') {
    out.unit = Length::Unit::Percent;
    out.value = value;
    return out;
  }
  out.unit = Length::Unit::Px;
  if (text.find("rem") != std::string::npos) out.value = value * 16.0;
  else if (text.find("em") != std::string::npos) out.value = value * parent_font;
  else if (text.find("vw") != std::string::npos) out.value = value * viewport_width / 100.0;
  else if (text.find("vh") != std::string::npos) out.value = value * viewport_height / 100.0;
  else if (text.find("pt") != std::string::npos) out.value = value * 4.0 / 3.0;
  else out.value = value;  // px or bare number
  return out;
}

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  int paren = 0;
  for (char c : text) {
    if (c == '(') ++paren;
    if (c == ')') --paren;
    if (std::isspace(static_cast<unsigned char>(c)) && paren == 0) {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

void apply_sides(double sides[4], const std::string& value, double parent_font,
                 int vw, int vh) {
  const std::vector<std::string> parts = split_ws(value);
  auto px = [&](const std::string& p) {
    const Length l = parse_length(p, parent_font, vw, vh);
    return l.is_auto() ? 0.0 : l.value;  // percent margins treated as 0
  };
  if (parts.empty()) return;
  if (parts.size() == 1) {
    const double v = px(parts[0]);
    sides[0] = sides[1] = sides[2] = sides[3] = v;
  } else if (parts.size() == 2) {
    sides[0] = sides[2] = px(parts[0]);
    sides[1] = sides[3] = px(parts[1]);
  } else if (parts.size() == 3) {
    sides[0] = px(parts[0]);
    sides[1] = sides[3] = px(parts[1]);
    sides[2] = px(parts[2]);
  } else {
    sides[0] = px(parts[0]);
    sides[1] = px(parts[1]);
    sides[2] = px(parts[2]);
    sides[3] = px(parts[3]);
  }
}

double border_width_token(const std::string& token, double parent_font, int vw, int vh) {
  if (token == "thin") return 1;
  if (token == "medium") return 3;
  if (token == "thick") return 5;
  const Length l = parse_length(token, parent_font, vw, vh);
  return l.unit == Length::Unit::Px ? l.value : 0;
}

void apply_declaration(ComputedStyle& style, const std::string& prop,
                       const std::string& value, const ComputedStyle& parent,
                       int vw, int vh) {
  const double pf = parent.font_size;
  const std::string lower_value = to_lower(trim(value));
  if (prop == "display") {
    if (lower_value == "none") style.display = Display::None;
    else if (lower_value == "inline") style.display = Display::Inline;
    else if (lower_value == "inline-block" || lower_value == "inline-flex")
      style.display = Display::InlineBlock;
    else if (lower_value == "flex") style.display = Display::Flex;
    else style.display = Display::Block;  // block/grid/list-item/table...
  } else if (prop == "position") {
    if (lower_value == "absolute") style.position = Position::Absolute;
    else if (lower_value == "fixed") style.position = Position::Fixed;
    else if (lower_value == "relative") style.position = Position::Relative;
    else style.position = Position::Static;
  } else if (prop == "left") style.left = parse_length(value, pf, vw, vh);
  else if (prop == "top") style.top = parse_length(value, pf, vw, vh);
  else if (prop == "right") style.right = parse_length(value, pf, vw, vh);
  else if (prop == "bottom") style.bottom = parse_length(value, pf, vw, vh);
  else if (prop == "width") style.width = parse_length(value, pf, vw, vh);
  else if (prop == "height") style.height = parse_length(value, pf, vw, vh);
  else if (prop == "max-width") {
    // treated as width when width is auto (common centering pattern)
    if (style.width.is_auto()) style.width = parse_length(value, pf, vw, vh);
  } else if (prop == "min-height") {
    style.min_height = parse_length(value, pf, vw, vh);
  } else if (prop == "margin") {
    apply_sides(style.margin, value, pf, vw, vh);
    const std::vector<std::string> parts = split_ws(lower_value);
    std::string left, right;
    if (parts.size() == 1) left = right = parts[0];
    else if (parts.size() == 2 || parts.size() == 3) left = right = parts[1];
    else if (parts.size() == 4) { right = parts[1]; left = parts[3]; }
    style.margin_left_auto = left == "auto";
    style.margin_right_auto = right == "auto";
  } else if (prop == "margin-top") style.margin[0] = parse_length(value, pf, vw, vh).value;
  else if (prop == "margin-right") {
    style.margin[1] = parse_length(value, pf, vw, vh).value;
    style.margin_right_auto = lower_value == "auto";
  } else if (prop == "margin-bottom") style.margin[2] = parse_length(value, pf, vw, vh).value;
  else if (prop == "margin-left") {
    style.margin[3] = parse_length(value, pf, vw, vh).value;
    style.margin_left_auto = lower_value == "auto";
  }
  else if (prop == "padding") apply_sides(style.padding, value, pf, vw, vh);
  else if (prop == "padding-top") style.padding[0] = parse_length(value, pf, vw, vh).value;
  else if (prop == "padding-right") style.padding[1] = parse_length(value, pf, vw, vh).value;
  else if (prop == "padding-bottom") style.padding[2] = parse_length(value, pf, vw, vh).value;
  else if (prop == "padding-left") style.padding[3] = parse_length(value, pf, vw, vh).value;
  else if (prop == "border" || prop == "border-top" || prop == "border-right" ||
           prop == "border-bottom" || prop == "border-left" || prop == "outline") {
    double width = 3;  // css initial border-width is medium
    bool has_style = false, style_none = false;
    std::optional<Color> color;
    for (const std::string& token : split_ws(lower_value)) {
      if (token == "none" || token == "hidden") { style_none = true; has_style = true; }
      else if (token == "solid" || token == "dashed" || token == "dotted" ||
               token == "double" || token == "groove" || token == "ridge" ||
               token == "inset" || token == "outset") has_style = true;
      else if (std::isdigit(static_cast<unsigned char>(token[0])) || token == "thin" ||
               token == "medium" || token == "thick" || token[0] == '.')
        width = border_width_token(token, pf, vw, vh);
      else if (auto c = parse_css_color(token)) color = c;
    }
    if (!has_style || style_none) width = style_none ? 0 : width;
    if (!has_style) width = 0;  // border: 1px alone has no style -> no border
    if (prop == "border" || prop == "outline") {
      for (double& side : style.border) side = width;
    } else if (prop == "border-top") style.border[0] = width;
    else if (prop == "border-right") style.border[1] = width;
    else if (prop == "border-bottom") style.border[2] = width;
    else if (prop == "border-left") style.border[3] = width;
    if (color) style.border_color = color;
  } else if (prop == "border-width") {
    apply_sides(style.border, value, pf, vw, vh);
  } else if (prop == "border-color") {
    style.border_color = parse_css_color(lower_value);
  } else if (prop == "background" || prop == "background-color") {
    // first parseable color token wins; gradients fall back to a stop color
    std::optional<Color> color = parse_css_color(lower_value);
    if (!color) {
      std::string cleaned = lower_value;
      for (char& c : cleaned) {
        if (c == '(' || c == ')' || c == ',') c = ' ';
      }
      for (const std::string& token : split_ws(cleaned)) {
        if (auto c = parse_css_color(token)) {
          color = c;
          break;
        }
      }
    }
    if (color) style.background = color;
    else if (lower_value == "transparent" || lower_value == "none")
      style.background.reset();
  } else if (prop == "color") {
    if (auto c = parse_css_color(lower_value)) style.color = *c;
  } else if (prop == "font-size") {
    if (lower_value == "small") style.font_size = 13;
    else if (lower_value == "medium") style.font_size = 16;
    else if (lower_value == "large") style.font_size = 18;
    else if (lower_value == "x-large") style.font_size = 24;
    else if (lower_value == "xx-large") style.font_size = 32;
    else {
      const Length l = parse_length(value, pf, vw, vh);
      if (l.unit == Length::Unit::Px && l.value > 0) style.font_size = l.value;
      else if (l.unit == Length::Unit::Percent) style.font_size = pf * l.value / 100.0;
    }
  } else if (prop == "font-weight") {
    style.bold = lower_value == "bold" || lower_value == "bolder" ||
                 std::atoi(lower_value.c_str()) >= 600;
  } else if (prop == "text-align") {
    if (lower_value == "center") style.text_align = 1;
    else if (lower_value == "right") style.text_align = 2;
    else style.text_align = 0;
  } else if (prop == "flex-direction") {
    style.flex_row = lower_value.rfind("column", 0) != 0;
  } else if (prop == "gap" || prop == "column-gap" || prop == "row-gap") {
    const Length l = parse_length(value, pf, vw, vh);
    if (l.unit == Length::Unit::Px) style.gap = l.value;
  } else if (prop == "z-index") {
    style.z_index = std::atoi(lower_value.c_str());
  } else if (prop == "visibility") {
    style.hidden = lower_value == "hidden" || lower_value == "collapse";
  } else if (prop == "opacity") {
    if (std::atof(lower_value.c_str()) < 0.05) style.hidden = true;
  }
  // unknown properties are ignored
}

void apply_tag_defaults(ComputedStyle& style, const DomNode& node) {
  const std::string& tag = node.tag;
  static const char* kInline[] = {"span", "a",    "b",     "i",    "em",   "strong",
                                  "small", "code", "u",     "s",    "sub",  "sup",
                                  "label", "abbr", "cite",  "q",    "time", "mark",
                                  "kbd"};
  static const char* kNone[] = {"head", "script", "style", "meta", "link",
                                "title", "template", "base", "noscript"};
  for (const char* t : kNone) {
    if (tag == t) {
      style.display = Display::None;
      return;
    }
  }
  for (const char* t : kInline) {
    if (tag == t) style.display = Display::Inline;
  }
  if (tag == "button" || tag == "input" || tag == "select" || tag == "textarea" ||
      tag == "img" || tag == "td" || tag == "th" || tag == "canvas")
    style.display = Display::InlineBlock;

  if (tag == "body") {
    style.margin[0] = style.margin[1] = style.margin[2] = style.margin[3] = 8;
  } else if (tag == "h1") {
    style.font_size = 32;
    style.bold = true;
    style.margin[0] = style.margin[2] = 21;
  } else if (tag == "h2") {
    style.font_size = 24;
    style.bold = true;
    style.margin[0] = style.margin[2] = 20;
  } else if (tag == "h3") {
    style.font_size = 19;
    style.bold = true;
    style.margin[0] = style.margin[2] = 18;
  } else if (tag == "h4") {
    style.font_size = 16;
    style.bold = true;
    style.margin[0] = style.margin[2] = 21;
  } else if (tag == "h5" || tag == "h6") {
    style.font_size = 13;
    style.bold = true;
    style.margin[0] = style.margin[2] = 22;
  } else if (tag == "p") {
    style.margin[0] = style.margin[2] = 16;
  } else if (tag == "ul" || tag == "ol") {
    style.margin[0] = style.margin[2] = 16;
    style.padding[3] = 40;
  } else if (tag == "blockquote") {
    style.margin[0] = style.margin[2] = 16;
    style.margin[1] = style.margin[3] = 40;
  } else if (tag == "button") {
    style.border[0] = style.border[1] = style.border[2] = style.border[3] = 1;
    style.padding[0] = style.padding[2] = 4;
    style.padding[1] = style.padding[3] = 10;
    style.background = Color{239, 239, 239};
    style.font_size = 13.3;
    style.text_align = 1;
  } else if (tag == "input" || tag == "textarea" || tag == "select") {
    style.border[0] = style.border[1] = style.border[2] = style.border[3] = 1;
    style.padding[0] = style.padding[2] = 2;
    style.padding[1] = style.padding[3] = 4;
    style.background = Color{255, 255, 255};
    style.font_size = 13.3;
  } else if (tag == "a") {
    style.color = Color{0, 0, 238};
  } else if (tag == "b" || tag == "strong") {
    style.bold = true;
  } else if (tag == "hr") {
    style.border[0] = style.border[2] = 1;
    style.margin[0] = style.margin[2] = 8;
  } else if (tag == "pre") {
    style.margin[0] = style.margin[2] = 13;
  } else if (tag == "table") {
    style.display = Display::Block;
  } else if (tag == "tr") {
    style.display = Display::Block;
  }
}

}  // namespace

StyleResolver::StyleResolver(const DomDocument& doc, int viewport_width,
                             int viewport_height)
    : doc_(doc), viewport_width_(viewport_width), viewport_height_(viewport_height) {
  // gather <style> contents in document order
  std::string css;
  doc.for_each_element([&](DomNode& node) {
    if (node.tag != "style") return;
    for (const auto& child : node.children) {
      if (!child->is_element()) css += child->text;
    }
    css += '\n';
  });
  rules_ = parse_stylesheet(css, viewport_width);
}

const ComputedStyle& StyleResolver::resolve(const DomNode& node) {
  auto it = cache_.find(&node);
  if (it != cache_.end()) return it->second;
  ComputedStyle style = compute(node);
  return cache_.emplace(&node, std::move(style)).first->second;
}

ComputedStyle StyleResolver::compute(const DomNode& node) {
  ComputedStyle parent_style;
  if (node.parent) parent_style = resolve(*node.parent);

  ComputedStyle style;
  // inherited properties
  style.color = parent_style.color;
  style.font_size = parent_style.font_size;
  style.bold = parent_style.bold;
  style.text_align = parent_style.text_align;
  style.hidden = parent_style.hidden;

  apply_tag_defaults(style, node);

  // matching rules by (specificity, source order)
  struct Applicable {
    std::array<int, 3> spec;
    int order;
    const StyleRule* rule;
  };
  std::vector<Applicable> applicable;
  for (const StyleRule& rule : rules_) {
    if (matches_complex(node, rule.selector))
      applicable.push_back({specificity(rule.selector), rule.source_order, &rule});
  }
  std::sort(applicable.begin(), applicable.end(),
            [](const Applicable& a, const Applicable& b) {
              if (a.spec != b.spec) return a.spec < b.spec;
              return a.order < b.order;
            });
  for (const Applicable& entry : applicable) {
    for (const auto& [prop, value] : entry.rule->declarations)
      apply_declaration(style, prop, value, parent_style, viewport_width_,
                        viewport_height_);
  }

  // inline style wins
  if (const std::string* inline_style = node.attr("style")) {
    std::size_t d = 0;
    const std::string& text = *inline_style;
    while (d <= text.size()) {
      std::size_t semi = text.find(';', d);
      if (semi == std::string::npos) semi = text.size();
      const std::string decl = text.substr(d, semi - d);
      d = semi + 1;
      const std::size_t colon = decl.find(':');
      if (colon == std::string::npos) continue;
      const std::string prop = to_lower(trim(decl.substr(0, colon)));
      const std::string value = trim(decl.substr(colon + 1));
      if (!prop.empty() && !value.empty())
        apply_declaration(style, prop, value, parent_style, viewport_width_,
                          viewport_height_);
    }
  }

  // the hidden attribute behaves like display:none
  if (node.has_attr("hidden")) style.display = Display::None;
  if (node.tag == "input") {
    const std::string type = to_lower(node.attr_or("type", "text"));
    if (type == "hidden") style.display = Display::None;
  }
  return style;
}

}  // namespace uigym::embedded
