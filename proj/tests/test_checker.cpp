#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "uigym/checker.hpp"
#include "uigym/errors.hpp"

using namespace uigym;

namespace {

// Probe over a fake page: selector -> {match count, text/value, attributes}.
struct FakeProbe : PageProbe {
  struct Entry {
    int count = 1;
    std::string text;
    std::map<std::string, std::string> attrs;
  };
  std::map<std::string, Entry> entries;

  int count_matches(const std::string& css) override {
    auto it = entries.find(css);
    return it == entries.end() ? 0 : it->second.count;
  }
  std::optional<std::string> extract(const std::string& css,
                                     const Extractor& extractor) override {
    auto it = entries.find(css);
    if (it == entries.end() || it->second.count == 0) return std::nullopt;
    if (extractor.kind == Extractor::Kind::Attribute) {
      auto attr = it->second.attrs.find(extractor.attribute);
      if (attr == it->second.attrs.end()) return std::nullopt;
      return attr->second;
    }
    return it->second.text;
  }
};

FakeProbe& set_text(FakeProbe& probe, const std::string& sel, const std::string& text) {
  probe.entries[sel] = {1, text, {}};
  return probe;
}

const std::vector<std::string> kPaperRules = {
    "#dailyMealCount >= 5",
    "#slides .slide:first-child button[aria-expanded] == 'true' OR "
    "#slides .slide:first-child.expanded exists",
    "#scoreValue >= 500",
    "#audioStatus == 'Paused' AND #syncBadge != 'Sync: Off'",
    "#io-json contains 'Social Ad' AND #io-json contains 'Search Ad' AND "
    "#io-json contains 'Landing Page' AND #io-json contains 'Consideration' AND "
    "#io-json contains 'Purchase'",
    "#lblSession == 'Short Break' AND #lblTime contains '05:00'",
};

}  // namespace

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

TEST_CASE("parses a numeric comparison predicate") {
  const CheckerExpr expr = parse_checker("#dailyMealCount >= 5");
  REQUIRE(expr.kind == CheckerExpr::Kind::Pred);
  CHECK(expr.pred.selector == "#dailyMealCount");
  CHECK(expr.pred.cmp == Comparator::Ge);
  REQUIRE(expr.pred.operand.has_value());
  const auto& num = std::get<NumberOperand>(*expr.pred.operand);
  CHECK(num.lexeme == "5");
  CHECK(num.value == 5.0);
  CHECK(expr.pred.extractor.kind == Extractor::Kind::TextOrValue);
}

TEST_CASE("parses OR of attribute equality and exists") {
  const CheckerExpr expr = parse_checker(
      "#slides .slide:first-child button[aria-expanded] == 'true' OR "
      "#slides .slide:first-child.expanded exists");
  REQUIRE(expr.kind == CheckerExpr::Kind::Or);
  REQUIRE(expr.children.size() == 2);
  const Predicate& left = expr.children[0].pred;
  CHECK(left.selector == "#slides .slide:first-child button[aria-expanded]");
  CHECK(left.cmp == Comparator::Eq);
  CHECK(left.extractor.kind == Extractor::Kind::Attribute);
  CHECK(left.extractor.attribute == "aria-expanded");
  CHECK(std::get<std::string>(*left.operand) == "true");
  const Predicate& right = expr.children[1].pred;
  CHECK(right.selector == "#slides .slide:first-child.expanded");
  CHECK(right.cmp == Comparator::Exists);
  CHECK_FALSE(right.operand.has_value());
}

TEST_CASE("parses AND of contains predicates") {
  const CheckerExpr expr =
      parse_checker("#io-json contains 'Social Ad' AND #io-json contains 'Search Ad'");
  REQUIRE(expr.kind == CheckerExpr::Kind::And);
  REQUIRE(expr.children.size() == 2);
  for (const CheckerExpr& child : expr.children) {
    CHECK(child.pred.selector == "#io-json");
    CHECK(child.pred.cmp == Comparator::Contains);
  }
  CHECK(std::get<std::string>(*expr.children[1].pred.operand) == "Search Ad");
}

TEST_CASE("AND binds tighter than OR; parens regroup") {
  const CheckerExpr flat = parse_checker("#a exists AND #b exists OR #c exists");
  REQUIRE(flat.kind == CheckerExpr::Kind::Or);
  REQUIRE(flat.children.size() == 2);
  CHECK(flat.children[0].kind == CheckerExpr::Kind::And);
  CHECK(flat.children[1].kind == CheckerExpr::Kind::Pred);

  const CheckerExpr grouped = parse_checker("#a exists AND (#b exists OR #c exists)");
  REQUIRE(grouped.kind == CheckerExpr::Kind::And);
  REQUIRE(grouped.children.size() == 2);
  CHECK(grouped.children[0].kind == CheckerExpr::Kind::Pred);
  CHECK(grouped.children[1].kind == CheckerExpr::Kind::Or);
}

TEST_CASE("same-kind nesting flattens so printing is canonical") {
  const CheckerExpr expr = parse_checker("(#a exists AND #b exists) AND #c exists");
  REQUIRE(expr.kind == CheckerExpr::Kind::And);
  CHECK(expr.children.size() == 3);
  CHECK(parse_checker("#a exists AND #b exists AND #c exists") == expr);
}

TEST_CASE("string escapes round-trip") {
  const CheckerExpr expr = parse_checker("#msg == 'it\\'s a\\ntest'");
  const std::string& operand = std::get<std::string>(*expr.pred.operand);
  CHECK(operand == "it's a\ntest");
  CHECK(parse_checker(print_checker(expr)) == expr);
}

TEST_CASE("quoted attribute values stay inside the selector") {
  const CheckerExpr expr = parse_checker("input[type='radio'] exists");
  CHECK(expr.pred.selector == "input[type='radio']");
  CHECK(expr.pred.cmp == Comparator::Exists);
  // [name='value'] is a match constraint, not an accessor
  CHECK(expr.pred.extractor.kind == Extractor::Kind::TextOrValue);
}

TEST_CASE("extractor uses the final simple selector only") {
  CHECK(parse_checker("#list li[data-id] exists").pred.extractor.kind ==
        Extractor::Kind::Attribute);
  CHECK(parse_checker("#a [foo] .b exists").pred.extractor.kind ==
        Extractor::Kind::TextOrValue);
  const Predicate pred = parse_checker("li[data-id][data-x='1'] exists").pred;
  CHECK(pred.extractor.kind == Extractor::Kind::Attribute);
  CHECK(pred.extractor.attribute == "data-id");
}

TEST_CASE("syntax errors carry positions") {
  CHECK_THROWS_AS(parse_checker("#x >="), ParseError);
  try {
    parse_checker("#x >=");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse_checker("#x"), ParseError);
  CHECK_THROWS_AS(parse_checker(""), ParseError);
  CHECK_THROWS_AS(parse_checker("#x == "), ParseError);
  CHECK_THROWS_AS(parse_checker("(#x exists"), ParseError);
  CHECK_THROWS_AS(parse_checker("#x exists)"), ParseError);
  CHECK_THROWS_AS(parse_checker("#x == 'unterminated"), ParseError);
  CHECK_THROWS_AS(parse_checker("AND #x exists"), ParseError);
  CHECK_THROWS_AS(parse_checker("#x exists AND"), ParseError);
}

TEST_CASE("numeric comparators reject string operands") {
  bool threw = false;
  try {
    parse_checker("#x >= 'abc'");
  } catch (const ParseError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("numeric") != std::string::npos);
  }
  CHECK(threw);
  CHECK_THROWS_AS(parse_checker("#x < 'abc'"), ParseError);
  CHECK_NOTHROW(parse_checker("#x == 'abc'"));
  CHECK_NOTHROW(parse_checker("#x >= -3.5"));
}

TEST_CASE("keywords are case-sensitive") {
  // lowercase "and" reads as a selector token, leaving two predicates unjoined
  CHECK_THROWS_AS(parse_checker("#a exists and #b exists"), ParseError);
  CHECK_THROWS_AS(parse_checker("#a EXISTS"), ParseError);
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

TEST_CASE("paper rules print back verbatim") {
  for (const std::string& rule : kPaperRules) {
    CAPTURE(rule);
    const CheckerExpr expr = parse_checker(rule);
    CHECK(print_checker(expr) == rule);
    CHECK(parse_checker(print_checker(expr)) == expr);
  }
}

TEST_CASE("printer keeps required parens and drops redundant ones") {
  CHECK(print_checker(parse_checker("#a exists AND (#b exists OR #c exists)")) ==
        "#a exists AND (#b exists OR #c exists)");
  CHECK(print_checker(parse_checker("(#a exists) AND ((#b exists))")) ==
        "#a exists AND #b exists");
  CHECK(print_checker(parse_checker("(#a exists AND #b exists) OR #c exists")) ==
        "#a exists AND #b exists OR #c exists");
}

TEST_CASE("parse-print-parse equals parse on randomized sources") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::vector<std::string> selectors = {"#a", "#b .c", "li[data-id]",
                                              "#list li:first-child", "input.box"};
  const std::vector<std::string> strings = {"Paused", "Sync: Off", "5 items", "x"};
  const std::vector<std::string> numbers = {"5", "500", "-3", "42.5", "0"};

  std::function<std::string(int)> gen_pred = [&](int) {
    std::uniform_int_distribution<std::size_t> sel(0, selectors.size() - 1);
    std::uniform_int_distribution<int> form(0, 3);
    const std::string s = selectors[sel(rng)];
    switch (form(rng)) {
      case 0: return s + " exists";
      case 1: {
        std::uniform_int_distribution<std::size_t> i(0, strings.size() - 1);
        return s + (coin(rng) ? " == '" : " != '") + strings[i(rng)] + "'";
      }
      case 2: {
        std::uniform_int_distribution<std::size_t> i(0, numbers.size() - 1);
        const std::vector<std::string> ops = {">=", ">", "<=", "<"};
        std::uniform_int_distribution<std::size_t> o(0, ops.size() - 1);
        return s + " " + ops[o(rng)] + " " + numbers[i(rng)];
      }
      default: {
        std::uniform_int_distribution<std::size_t> i(0, strings.size() - 1);
        return s + " contains '" + strings[i(rng)] + "'";
      }
    }
  };

  // returns source text plus whether its top level is an OR (needs parens
  // when embedded under AND)
  std::function<std::pair<std::string, bool>(int)> gen = [&](int depth)
      -> std::pair<std::string, bool> {
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 2 : 0);
    const int k = kind(rng);
    if (k == 0) {
      std::string text = gen_pred(0);
      if (depth > 0 && coin(rng)) text = "(" + text + ")";  // redundant parens
      return {text, false};
    }
    std::uniform_int_distribution<int> arity(2, 3);
    const int n = arity(rng);
    std::string text;
    for (int i = 0; i < n; ++i) {
      if (i) text += k == 1 ? " AND " : " OR ";
      auto [child, child_is_or] = gen(depth - 1);
      const bool need = k == 1 && child_is_or;
      if (need || (coin(rng) && k == 2 && !child_is_or && coin(rng)))
        child = "(" + child + ")";
      text += child;
    }
    return {text, k == 2};
  };

  for (int iter = 0; iter < 2000; ++iter) {
    const std::string source = gen(3).first;
    CAPTURE(source);
    const CheckerExpr first = parse_checker(source);
    const std::string printed = print_checker(first);
    CAPTURE(printed);
    const CheckerExpr second = parse_checker(printed);
    CHECK(first == second);
    CHECK(print_checker(second) == printed);
  }
}

// ---------------------------------------------------------------------------
// numeric prefix rule
// ---------------------------------------------------------------------------

TEST_CASE("parse_numeric_prefix accepts standalone leading numbers") {
  CHECK(parse_numeric_prefix("5") == 5.0);
  CHECK(parse_numeric_prefix("5 items") == 5.0);
  CHECK(parse_numeric_prefix("  42.5  ") == 42.5);
  CHECK(parse_numeric_prefix("-3") == -3.0);
  CHECK(parse_numeric_prefix("+7 left") == 7.0);
  CHECK(parse_numeric_prefix("05") == 5.0);
  CHECK_FALSE(parse_numeric_prefix("05:00").has_value());
  CHECK_FALSE(parse_numeric_prefix("items 5").has_value());
  CHECK_FALSE(parse_numeric_prefix("").has_value());
  CHECK_FALSE(parse_numeric_prefix("  ").has_value());
  CHECK_FALSE(parse_numeric_prefix("5items").has_value());
  CHECK_FALSE(parse_numeric_prefix("5.").has_value());
  CHECK_FALSE(parse_numeric_prefix(".5").has_value());
  CHECK_FALSE(parse_numeric_prefix("$5").has_value());
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

TEST_CASE("numeric comparison against displayed text") {
  FakeProbe probe;
  set_text(probe, "#dailyMealCount", "5");
  CHECK(eval_checker(parse_checker("#dailyMealCount >= 5"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#dailyMealCount >= 6"), probe).value);
  CHECK(eval_checker(parse_checker("#dailyMealCount == 5"), probe).value);
  CHECK(eval_checker(parse_checker("#dailyMealCount != 6"), probe).value);

  set_text(probe, "#items", "5 items");
  CHECK(eval_checker(parse_checker("#items >= 5"), probe).value);
  CHECK(eval_checker(parse_checker("#items == 5"), probe).value);
}

TEST_CASE("missing elements make predicates false, never errors") {
  FakeProbe probe;
  CHECK_FALSE(eval_checker(parse_checker("#ghost exists"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#ghost == 'x'"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#ghost != 'x'"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#ghost >= 0"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#ghost contains ''"), probe).value);
}

TEST_CASE("clock text fails numeric parse but supports contains") {
  FakeProbe probe;
  set_text(probe, "#lblTime", "05:00");
  set_text(probe, "#lblSession", "Short Break");
  CHECK_FALSE(eval_checker(parse_checker("#lblTime >= 5"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#lblTime == 5"), probe).value);
  CHECK(eval_checker(
            parse_checker("#lblSession == 'Short Break' AND #lblTime contains '05:00'"),
            probe)
            .value);
}

TEST_CASE("attribute extraction and equality") {
  FakeProbe probe;
  probe.entries["#slides .slide:first-child button[aria-expanded]"] =
      {1, "Expand", {{"aria-expanded", "true"}}};
  const CheckerExpr rule = parse_checker(kPaperRules[1]);
  CHECK(eval_checker(rule, probe).value);

  probe.entries["#slides .slide:first-child button[aria-expanded]"].attrs
      ["aria-expanded"] = "false";
  probe.entries["#slides .slide:first-child.expanded"] = {1, "", {}};
  CHECK(eval_checker(rule, probe).value);  // falls through to the exists arm

  probe.entries.erase("#slides .slide:first-child.expanded");
  CHECK_FALSE(eval_checker(rule, probe).value);
}

TEST_CASE("form control value comparison") {
  FakeProbe probe;
  set_text(probe, "#audioStatus", "Paused");
  set_text(probe, "#syncBadge", "Sync: On");
  CHECK(eval_checker(parse_checker(kPaperRules[3]), probe).value);
  set_text(probe, "#syncBadge", "Sync: Off");
  CHECK_FALSE(eval_checker(parse_checker(kPaperRules[3]), probe).value);
}

TEST_CASE("contains with a numeric operand is substring on the lexeme") {
  FakeProbe probe;
  set_text(probe, "#log", "went to 500 and beyond");
  CHECK(eval_checker(parse_checker("#log contains 500"), probe).value);
  CHECK_FALSE(eval_checker(parse_checker("#log contains 501"), probe).value);
}

// ---------------------------------------------------------------------------
// traces and explain
// ---------------------------------------------------------------------------

TEST_CASE("AND short-circuit marks later leaves skipped") {
  FakeProbe probe;  // both missing
  const EvalResult result =
      eval_checker(parse_checker("#a exists AND #b exists"), probe);
  CHECK_FALSE(result.value);
  REQUIRE(result.trace.size() == 2);
  CHECK(result.trace[0].outcome == PredicateTrace::Outcome::False);
  CHECK(result.trace[1].outcome == PredicateTrace::Outcome::Skipped);
  CHECK(result.truncated);
}

TEST_CASE("OR short-circuit skips after the first true") {
  FakeProbe probe;
  set_text(probe, "#a", "x");
  const EvalResult result =
      eval_checker(parse_checker("#a exists OR #b exists"), probe);
  CHECK(result.value);
  REQUIRE(result.trace.size() == 2);
  CHECK(result.trace[0].outcome == PredicateTrace::Outcome::True);
  CHECK(result.trace[1].outcome == PredicateTrace::Outcome::Skipped);
  CHECK(result.truncated);
}

TEST_CASE("full evaluation leaves no skips") {
  FakeProbe probe;
  set_text(probe, "#a", "x");
  set_text(probe, "#b", "y");
  const EvalResult result =
      eval_checker(parse_checker("#a exists AND #b exists"), probe);
  CHECK(result.value);
  REQUIRE(result.trace.size() == 2);
  CHECK_FALSE(result.truncated);
}

TEST_CASE("explain renders one deterministic line per leaf") {
  FakeProbe probe;
  set_text(probe, "#count", "5");
  const EvalResult result =
      eval_checker(parse_checker("#count >= 5 OR #ghost exists"), probe);
  const std::string text = explain(result);
  CHECK(text.find("[1] #count >= 5 => true (extracted \"5\")") != std::string::npos);
  CHECK(text.find("[2] #ghost exists => skipped") != std::string::npos);
  CHECK(text.find("overall: true") != std::string::npos);
  CHECK(explain(result) == text);
}

// ---------------------------------------------------------------------------
// properties: naive-oracle agreement and monotonicity
// ---------------------------------------------------------------------------

namespace {

// Independent reimplementation of the semantics without short-circuiting,
// used as the agreement oracle.
bool naive_eval(const CheckerExpr& expr, FakeProbe& probe) {
  switch (expr.kind) {
    case CheckerExpr::Kind::And: {
      bool all = true;
      for (const auto& c : expr.children)
        if (!naive_eval(c, probe)) all = false;
      return all;
    }
    case CheckerExpr::Kind::Or: {
      bool any = false;
      for (const auto& c : expr.children)
        if (naive_eval(c, probe)) any = true;
      return any;
    }
    case CheckerExpr::Kind::Pred: break;
  }
  const Predicate& pred = expr.pred;
  if (pred.cmp == Comparator::Exists) return probe.count_matches(pred.selector) > 0;
  const std::optional<std::string> got = probe.extract(pred.selector, pred.extractor);
  if (!got) return false;
  auto as_number = [](const std::string& s) -> std::optional<double> {
    std::string t = s;
    while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(t, &used);
    } catch (...) {
      return std::nullopt;
    }
    if (used == 0) return std::nullopt;
    // std::stod is laxer than the rule: reject hex/exponent/dot-edge forms
    for (std::size_t i = 0; i < used; ++i) {
      const char c = t[i];
      const bool ok = (c >= '0' && c <= '9') || c == '.' ||
                      (i == 0 && (c == '+' || c == '-'));
      if (!ok) return std::nullopt;
    }
    if (t[used - 1] == '.' || (used < t.size() && t[used] == '.')) return std::nullopt;
    if (used < t.size() && t[used] != ' ') return std::nullopt;
    return value;
  };
  if (pred.cmp == Comparator::Contains) {
    const std::string needle = std::holds_alternative<NumberOperand>(*pred.operand)
                                   ? std::get<NumberOperand>(*pred.operand).lexeme
                                   : std::get<std::string>(*pred.operand);
    return got->find(needle) != std::string::npos;
  }
  if (std::holds_alternative<NumberOperand>(*pred.operand)) {
    const std::optional<double> lhs = as_number(*got);
    if (!lhs) return false;
    const double rhs = std::get<NumberOperand>(*pred.operand).value;
    switch (pred.cmp) {
      case Comparator::Eq: return *lhs == rhs;
      case Comparator::Neq: return *lhs != rhs;
      case Comparator::Ge: return *lhs >= rhs;
      case Comparator::Gt: return *lhs > rhs;
      case Comparator::Le: return *lhs <= rhs;
      case Comparator::Lt: return *lhs < rhs;
      default: return false;
    }
  }
  const std::string& rhs = std::get<std::string>(*pred.operand);
  if (pred.cmp == Comparator::Eq) return *got == rhs;
  if (pred.cmp == Comparator::Neq) return *got != rhs;
  return false;
}

}  // namespace

TEST_CASE("evaluator agrees with the naive oracle on random pages") {
  std::mt19937 rng(99);
  const std::vector<std::string> selectors = {"#a", "#b", "#c", "#d", "#e"};
  const std::vector<std::string> texts = {"5",     "5 items", "05:00", "Paused",
                                          "Sync: Off", "hello", "42.5",  "-3",
                                          "Social Ad", "true",  ""};
  const std::vector<std::string> sources = {
      " exists",          " == '5'",          " == 'Paused'",   " != 'hello'",
      " >= 5",            " > 4",             " <= 42.5",       " < 0",
      " contains 'Ad'",   " contains '05'",   " == 5",          " != 5",
  };

  std::function<std::string(int)> gen = [&](int depth) -> std::string {
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 2 : 0);
    std::uniform_int_distribution<std::size_t> sel(0, selectors.size() - 1);
    std::uniform_int_distribution<std::size_t> form(0, sources.size() - 1);
    const int k = kind(rng);
    if (k == 0) return selectors[sel(rng)] + sources[form(rng)];
    std::uniform_int_distribution<int> arity(2, 3);
    std::string text;
    const int n = arity(rng);
    for (int i = 0; i < n; ++i) {
      if (i) text += k == 1 ? " AND " : " OR ";
      std::string child = gen(depth - 1);
      if (child.find(" OR ") != std::string::npos || child.find(" AND ") != std::string::npos)
        child = "(" + child + ")";
      text += child;
    }
    return text;
  };

  std::uniform_int_distribution<int> presence(0, 3);
  std::uniform_int_distribution<std::size_t> text_pick(0, texts.size() - 1);
  for (int iter = 0; iter < 10000; ++iter) {
    FakeProbe probe;
    for (const std::string& sel : selectors) {
      if (presence(rng) > 0) set_text(probe, sel, texts[text_pick(rng)]);
    }
    const std::string source = gen(3);
    CAPTURE(source);
    const CheckerExpr expr = parse_checker(source);
    CHECK(eval_checker(expr, probe).value == naive_eval(expr, probe));
  }
}

TEST_CASE("flipping a leaf false to true never flips AND or OR true to false") {
  std::mt19937 rng(1234);
  const int leaves = 6;
  std::vector<std::string> selectors;
  for (int i = 0; i < leaves; ++i) selectors.push_back("#p" + std::to_string(i));

  std::function<std::string(int, int&)> gen = [&](int depth, int& next) -> std::string {
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 2 : 0);
    const int k = kind(rng);
    if (k == 0 || next >= leaves) {
      const std::string sel = selectors[next % leaves];
      ++next;
      return sel + " exists";
    }
    std::string text;
    for (int i = 0; i < 2; ++i) {
      if (i) text += k == 1 ? " AND " : " OR ";
      std::string child = gen(depth - 1, next);
      if (child.find(' ') != std::string::npos && k == 1 &&
          child.find(" OR ") != std::string::npos)
        child = "(" + child + ")";
      text += child;
    }
    return text;
  };

  std::uniform_int_distribution<int> coin(0, 1);
  for (int iter = 0; iter < 2000; ++iter) {
    int next = 0;
    const std::string source = gen(3, next);
    const CheckerExpr expr = parse_checker(source);
    std::vector<bool> assignment(leaves);
    for (int i = 0; i < leaves; ++i) assignment[i] = coin(rng) == 1;

    auto eval_with = [&](const std::vector<bool>& bits) {
      FakeProbe probe;
      for (int i = 0; i < leaves; ++i)
        if (bits[i]) set_text(probe, selectors[i], "x");
      return eval_checker(expr, probe).value;
    };

    const bool base = eval_with(assignment);
    for (int i = 0; i < leaves; ++i) {
      if (assignment[i]) continue;
      std::vector<bool> flipped = assignment;
      flipped[i] = true;
      if (base) CHECK(eval_with(flipped));
    }
  }
}
