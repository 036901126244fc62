#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace uigym {

// Rule language for function checkers:
//
//   expr      := and_expr ('OR' and_expr)*
//   and_expr  := atom ('AND' atom)*
//   atom      := '(' expr ')' | predicate
//   predicate := selector ('exists' | comparator operand)
//
// Selectors are CSS and may contain spaces (descendant combinators); the
// selector is the maximal token run up to a comparator or keyword. Because
// '>' is the greater-than comparator, the child combinator cannot appear in
// a rule selector. Operands are single-quoted strings or bare numbers.
// AND/OR are uppercase; exists/contains lowercase. All case-sensitive.

enum class Comparator { Eq, Neq, Ge, Gt, Le, Lt, Contains, Exists };

const char* to_string(Comparator cmp);

/// Numeric operand keeps its source lexeme so printing round-trips exactly.
struct NumberOperand {
  std::string lexeme;
  double value = 0.0;
  bool operator==(const NumberOperand& other) const { return lexeme == other.lexeme; }
};

using Operand = std::variant<std::string, NumberOperand>;

/// How a predicate extracts its comparison value from the first CSS match.
/// TextOrValue: form controls yield their current value, anything else its
/// trimmed visible text. Attribute: the named attribute's value, derived
/// from a bare [name] test in the selector's final simple selector.
struct Extractor {
  enum class Kind { TextOrValue, Attribute } kind = Kind::TextOrValue;
  std::string attribute;  // set when kind == Attribute
  bool operator==(const Extractor&) const = default;
};

struct Predicate {
  std::string selector;  // normalized: tokens joined by single spaces
  Comparator cmp = Comparator::Exists;
  std::optional<Operand> operand;  // absent iff cmp == Exists
  Extractor extractor;

  bool operator==(const Predicate& other) const {
    return selector == other.selector && cmp == other.cmp &&
           operand == other.operand && extractor == other.extractor;
  }
};

struct CheckerExpr {
  enum class Kind { Pred, And, Or };
  Kind kind = Kind::Pred;
  Predicate pred;                    // for Kind::Pred
  std::vector<CheckerExpr> children; // for And/Or; always >= 2

  bool operator==(const CheckerExpr& other) const;
};

/// Parses rule source. Throws ParseError with a byte offset on bad syntax,
/// including operand type mismatches (numeric comparators need numbers).
CheckerExpr parse_checker(const std::string& source);

/// Canonical form: single-spaced, parenthesized only where precedence
/// requires. parse(print(parse(s))) == parse(s) for all valid s.
std::string print_checker(const CheckerExpr& expr);

/// Page access needed by the evaluator. Implemented by browser sessions.
class PageProbe {
 public:
  virtual ~PageProbe() = default;
  /// Number of elements matching the CSS selector.
  virtual int count_matches(const std::string& css) = 0;
  /// Extraction from the first match, or nullopt when nothing matches or a
  /// requested attribute is absent. TextOrValue returns whitespace-collapsed
  /// trimmed visible text for regular elements and the live value for form
  /// controls (input, textarea, select).
  virtual std::optional<std::string> extract(const std::string& css,
                                             const Extractor& extractor) = 0;
};

struct PredicateTrace {
  std::string source;                   // canonical predicate text
  std::optional<std::string> extracted; // value the page produced, if any
  enum class Outcome { True, False, Skipped } outcome = Outcome::Skipped;
};

struct EvalResult {
  bool value = false;
  std::vector<PredicateTrace> trace;  // one entry per leaf, in print order
  bool truncated = false;             // some leaves were short-circuited away
};

/// Evaluates the expression against a live page. A missing element or
/// unparseable numeric makes the predicate false; this never throws for
/// semantic misses, only for infrastructure failures from the probe.
EvalResult eval_checker(const CheckerExpr& expr, PageProbe& page);

/// Human-readable per-predicate trace with deterministic ordering.
std::string explain(const EvalResult& result);

/// Numeric extraction rule shared with the evaluator: the trimmed text must
/// start with a number followed by whitespace or end of string ("5 items"
/// parses to 5; "05:00" does not parse).
std::optional<double> parse_numeric_prefix(const std::string& text);

}  // namespace uigym
