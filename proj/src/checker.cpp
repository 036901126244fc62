#include "uigym/checker.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "uigym/errors.hpp"

namespace uigym {
namespace {

enum class TokKind { LParen, RParen, Word, Number, String, And, Or, Exists, Contains, Cmp, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;    // word text, decoded string value, number lexeme
  Comparator cmp = Comparator::Eq;
  std::size_t pos = 0; // byte offset in source
};

bool is_number_lexeme(const std::string& word) {
  std::size_t i = 0;
  if (i < word.size() && (word[i] == '-' || word[i] == '+')) ++i;
  std::size_t digits = 0;
  while (i < word.size() && std::isdigit(static_cast<unsigned char>(word[i]))) ++i, ++digits;
  if (digits == 0) return false;
  if (i < word.size() && word[i] == '.') {
    ++i;
    std::size_t frac = 0;
    while (i < word.size() && std::isdigit(static_cast<unsigned char>(word[i]))) ++i, ++frac;
    if (frac == 0) return false;
  }
  return i == word.size();
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { scan(); }
  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  void scan() {
    std::size_t i = 0;
    while (i < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[i]))) { ++i; continue; }
      if (src_[i] == '\'') {
        i = scan_string(i);
        continue;
      }
      i = scan_word(i);
    }
    tokens_.push_back({TokKind::End, "", Comparator::Eq, src_.size()});
  }

  // A quoted string at token-start is an operand. Escapes: \' \\ \n \t.
  std::size_t scan_string(std::size_t start) {
    std::string value;
    std::size_t i = start + 1;
    while (i < src_.size() && src_[i] != '\'') {
      if (src_[i] == '\\' && i + 1 < src_.size()) {
        const char c = src_[i + 1];
        if (c == 'n') value += '\n';
        else if (c == 't') value += '\t';
        else value += c;  // \' \\ and anything else: literal next char
        i += 2;
      } else {
        value += src_[i++];
      }
    }
    if (i >= src_.size()) throw ParseError("unterminated string operand", start);
    tokens_.push_back({TokKind::String, value, Comparator::Eq, start});
    return i + 1;
  }

  // Reads a whitespace-delimited word. Quotes inside the word (attribute
  // selectors like [name='v']) are carried through verbatim. Leading '('
  // and unbalanced trailing ')' become grouping parens.
  std::size_t scan_word(std::size_t start) {
    std::size_t i = start;
    std::string raw;
    while (i < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i]))) {
      if (src_[i] == '\'') {
        raw += src_[i++];
        while (i < src_.size() && src_[i] != '\'') {
          if (src_[i] == '\\' && i + 1 < src_.size()) raw += src_[i++];
          raw += src_[i++];
        }
        if (i >= src_.size()) throw ParseError("unterminated quote in selector", start);
        raw += src_[i++];
        continue;
      }
      raw += src_[i++];
    }

    std::size_t pos = start;
    while (!raw.empty() && raw.front() == '(') {
      tokens_.push_back({TokKind::LParen, "(", Comparator::Eq, pos});
      raw.erase(raw.begin());
      ++pos;
    }
    int opens = 0, closes = 0;
    for (char c : raw) {
      if (c == '(') ++opens;
      if (c == ')') ++closes;
    }
    std::size_t trailing = 0;
    while (!raw.empty() && raw.back() == ')' && closes > opens) {
      raw.pop_back();
      --closes;
      ++trailing;
    }
    if (!raw.empty()) classify(raw, pos);
    for (std::size_t k = 0; k < trailing; ++k) {
      tokens_.push_back({TokKind::RParen, ")", Comparator::Eq, pos + raw.size() + k});
    }
    return i;
  }

  void classify(const std::string& word, std::size_t pos) {
    Token tok;
    tok.text = word;
    tok.pos = pos;
    if (word == "AND") tok.kind = TokKind::And;
    else if (word == "OR") tok.kind = TokKind::Or;
    else if (word == "exists") tok.kind = TokKind::Exists;
    else if (word == "contains") tok.kind = TokKind::Contains;
    else if (word == "==") { tok.kind = TokKind::Cmp; tok.cmp = Comparator::Eq; }
    else if (word == "!=") { tok.kind = TokKind::Cmp; tok.cmp = Comparator::Neq; }
    else if (word == ">=") { tok.kind = TokKind::Cmp; tok.cmp = Comparator::Ge; }
    else if (word == ">")  { tok.kind = TokKind::Cmp; tok.cmp = Comparator::Gt; }
    else if (word == "<=") { tok.kind = TokKind::Cmp; tok.cmp = Comparator::Le; }
    else if (word == "<")  { tok.kind = TokKind::Cmp; tok.cmp = Comparator::Lt; }
    else if (is_number_lexeme(word)) tok.kind = TokKind::Number;
    else tok.kind = TokKind::Word;
    tokens_.push_back(std::move(tok));
  }

  const std::string& src_;
  std::vector<Token> tokens_;
};

// Extracts the attribute accessor from a bare [name] test in the final
// simple selector, if any. [name='value'] is a match constraint, not an
// accessor.
Extractor derive_extractor(const std::string& selector) {
  const std::size_t space = selector.find_last_of(' ');
  const std::string last = space == std::string::npos ? selector : selector.substr(space + 1);
  std::size_t i = 0;
  while ((i = last.find('[', i)) != std::string::npos) {
    const std::size_t close = last.find(']', i);
    if (close == std::string::npos) break;
    const std::string inside = last.substr(i + 1, close - i - 1);
    if (inside.find('=') == std::string::npos && !inside.empty()) {
      return {Extractor::Kind::Attribute, inside};
    }
    i = close + 1;
  }
  return {Extractor::Kind::TextOrValue, ""};
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lexer_(src) {}

  CheckerExpr parse() {
    CheckerExpr expr = parse_or();
    if (peek().kind != TokKind::End)
      throw ParseError("unexpected trailing token '" + peek().text + "'", peek().pos);
    return expr;
  }

 private:
  const Token& peek() const { return lexer_.tokens()[index_]; }
  const Token& advance() { return lexer_.tokens()[index_++]; }

  static void append_flattened(std::vector<CheckerExpr>& out, CheckerExpr child,
                               CheckerExpr::Kind kind) {
    if (child.kind == kind) {
      for (auto& grand : child.children) out.push_back(std::move(grand));
    } else {
      out.push_back(std::move(child));
    }
  }

  CheckerExpr parse_or() {
    std::vector<CheckerExpr> children;
    append_flattened(children, parse_and(), CheckerExpr::Kind::Or);
    while (peek().kind == TokKind::Or) {
      advance();
      append_flattened(children, parse_and(), CheckerExpr::Kind::Or);
    }
    if (children.size() == 1) return std::move(children.front());
    CheckerExpr expr;
    expr.kind = CheckerExpr::Kind::Or;
    expr.children = std::move(children);
    return expr;
  }

  CheckerExpr parse_and() {
    std::vector<CheckerExpr> children;
    append_flattened(children, parse_atom(), CheckerExpr::Kind::And);
    while (peek().kind == TokKind::And) {
      advance();
      append_flattened(children, parse_atom(), CheckerExpr::Kind::And);
    }
    if (children.size() == 1) return std::move(children.front());
    CheckerExpr expr;
    expr.kind = CheckerExpr::Kind::And;
    expr.children = std::move(children);
    return expr;
  }

  CheckerExpr parse_atom() {
    if (peek().kind == TokKind::LParen) {
      advance();
      CheckerExpr inner = parse_or();
      if (peek().kind != TokKind::RParen)
        throw ParseError("expected ')'", peek().pos);
      advance();
      return inner;
    }
    return parse_predicate();
  }

  CheckerExpr parse_predicate() {
    std::string selector;
    std::size_t start = peek().pos;
    while (peek().kind == TokKind::Word) {
      if (!selector.empty()) selector += ' ';
      selector += advance().text;
    }
    if (selector.empty())
      throw ParseError("expected a CSS selector", start);

    Predicate pred;
    pred.selector = selector;
    pred.extractor = derive_extractor(selector);

    const Token& op = peek();
    if (op.kind == TokKind::Exists) {
      advance();
      pred.cmp = Comparator::Exists;
    } else if (op.kind == TokKind::Contains || op.kind == TokKind::Cmp) {
      pred.cmp = op.kind == TokKind::Contains ? Comparator::Contains : op.cmp;
      advance();
      const Token& operand = peek();
      if (operand.kind == TokKind::String) {
        pred.operand = Operand{operand.text};
      } else if (operand.kind == TokKind::Number) {
        pred.operand = Operand{NumberOperand{operand.text, std::strtod(operand.text.c_str(), nullptr)}};
      } else {
        throw ParseError("expected a quoted string or number operand", operand.pos);
      }
      const bool numeric_cmp = pred.cmp == Comparator::Ge || pred.cmp == Comparator::Gt ||
                               pred.cmp == Comparator::Le || pred.cmp == Comparator::Lt;
      if (numeric_cmp && !std::holds_alternative<NumberOperand>(*pred.operand))
        throw ParseError("numeric comparator requires a numeric operand", operand.pos);
      advance();
    } else {
      throw ParseError("expected a comparator or 'exists' after selector", op.pos);
    }

    CheckerExpr expr;
    expr.kind = CheckerExpr::Kind::Pred;
    expr.pred = std::move(pred);
    return expr;
  }

  Lexer lexer_;
  std::size_t index_ = 0;
};

std::string quote_string(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

std::string print_operand(const Operand& operand) {
  if (const auto* num = std::get_if<NumberOperand>(&operand)) return num->lexeme;
  return quote_string(std::get<std::string>(operand));
}

std::string print_predicate(const Predicate& pred) {
  if (pred.cmp == Comparator::Exists) return pred.selector + " exists";
  return pred.selector + " " + to_string(pred.cmp) + " " + print_operand(*pred.operand);
}

void print_expr(const CheckerExpr& expr, std::string& out) {
  switch (expr.kind) {
    case CheckerExpr::Kind::Pred:
      out += print_predicate(expr.pred);
      return;
    case CheckerExpr::Kind::And:
      for (std::size_t i = 0; i < expr.children.size(); ++i) {
        if (i) out += " AND ";
        const bool needs_parens = expr.children[i].kind == CheckerExpr::Kind::Or;
        if (needs_parens) out += '(';
        print_expr(expr.children[i], out);
        if (needs_parens) out += ')';
      }
      return;
    case CheckerExpr::Kind::Or:
      for (std::size_t i = 0; i < expr.children.size(); ++i) {
        if (i) out += " OR ";
        print_expr(expr.children[i], out);
      }
      return;
  }
}

bool compare_numeric(Comparator cmp, double lhs, double rhs) {
  switch (cmp) {
    case Comparator::Eq: return lhs == rhs;
    case Comparator::Neq: return lhs != rhs;
    case Comparator::Ge: return lhs >= rhs;
    case Comparator::Gt: return lhs > rhs;
    case Comparator::Le: return lhs <= rhs;
    case Comparator::Lt: return lhs < rhs;
    default: return false;
  }
}

class Evaluator {
 public:
  explicit Evaluator(PageProbe& page) : page_(page) {}

  bool eval(const CheckerExpr& expr, EvalResult& result, bool skip) {
    switch (expr.kind) {
      case CheckerExpr::Kind::Pred:
        return eval_predicate(expr.pred, result, skip);
      case CheckerExpr::Kind::And: {
        bool value = true;
        for (const auto& child : expr.children) {
          const bool skip_child = skip || !value;
          const bool v = eval(child, result, skip_child);
          if (!skip_child && !v) value = false;
        }
        return value;
      }
      case CheckerExpr::Kind::Or: {
        bool value = false;
        for (const auto& child : expr.children) {
          const bool skip_child = skip || value;
          const bool v = eval(child, result, skip_child);
          if (!skip_child && v) value = true;
        }
        return value;
      }
    }
    return false;
  }

 private:
  bool eval_predicate(const Predicate& pred, EvalResult& result, bool skip) {
    PredicateTrace trace;
    trace.source = print_predicate(pred);
    if (skip) {
      trace.outcome = PredicateTrace::Outcome::Skipped;
      result.trace.push_back(std::move(trace));
      return false;
    }
    bool value = false;
    if (pred.cmp == Comparator::Exists) {
      const int matches = page_.count_matches(pred.selector);
      value = matches >= 1;
      trace.extracted = std::to_string(matches) + " match(es)";
    } else {
      const std::optional<std::string> extracted = page_.extract(pred.selector, pred.extractor);
      trace.extracted = extracted;
      if (extracted) {
        value = compare(pred, *extracted);
      }
      // missing element or attribute: predicate is false, never an error
    }
    trace.outcome = value ? PredicateTrace::Outcome::True : PredicateTrace::Outcome::False;
    result.trace.push_back(std::move(trace));
    return value;
  }

  static bool compare(const Predicate& pred, const std::string& extracted) {
    const Operand& operand = *pred.operand;
    if (pred.cmp == Comparator::Contains) {
      const std::string needle = std::holds_alternative<NumberOperand>(operand)
                                     ? std::get<NumberOperand>(operand).lexeme
                                     : std::get<std::string>(operand);
      return extracted.find(needle) != std::string::npos;
    }
    if (const auto* num = std::get_if<NumberOperand>(&operand)) {
      const std::optional<double> lhs = parse_numeric_prefix(extracted);
      if (!lhs) return false;  // unparseable extraction fails numeric predicates
      return compare_numeric(pred.cmp, *lhs, num->value);
    }
    const std::string& rhs = std::get<std::string>(operand);
    if (pred.cmp == Comparator::Eq) return extracted == rhs;
    if (pred.cmp == Comparator::Neq) return extracted != rhs;
    return false;
  }

  PageProbe& page_;
};

}  // namespace

const char* to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Eq: return "==";
    case Comparator::Neq: return "!=";
    case Comparator::Ge: return ">=";
    case Comparator::Gt: return ">";
    case Comparator::Le: return "<=";
    case Comparator::Lt: return "<";
    case Comparator::Contains: return "contains";
    case Comparator::Exists: return "exists";
  }
  return "==";
}

bool CheckerExpr::operator==(const CheckerExpr& other) const {
  if (kind != other.kind) return false;
  if (kind == Kind::Pred) return pred == other.pred;
  return children == other.children;
}

CheckerExpr parse_checker(const std::string& source) {
  return Parser(source).parse();
}

std::string print_checker(const CheckerExpr& expr) {
  std::string out;
  print_expr(expr, out);
  return out;
}

EvalResult eval_checker(const CheckerExpr& expr, PageProbe& page) {
  EvalResult result;
  Evaluator evaluator(page);
  result.value = evaluator.eval(expr, result, false);
  result.truncated = false;
  for (const auto& t : result.trace) {
    if (t.outcome == PredicateTrace::Outcome::Skipped) result.truncated = true;
  }
  return result;
}

std::string explain(const EvalResult& result) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const PredicateTrace& t = result.trace[i];
    out << "[" << (i + 1) << "] " << t.source << " => ";
    switch (t.outcome) {
      case PredicateTrace::Outcome::True: out << "true"; break;
      case PredicateTrace::Outcome::False: out << "false"; break;
      case PredicateTrace::Outcome::Skipped: out << "skipped"; break;
    }
    if (t.outcome != PredicateTrace::Outcome::Skipped) {
      if (t.extracted) {
        out << " (extracted \"" << *t.extracted << "\")";
      } else {
        out << " (no match)";
      }
    }
    out << "\n";
  }
  out << "overall: " << (result.value ? "true" : "false") << "\n";
  return out.str();
}

std::optional<double> parse_numeric_prefix(const std::string& text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (begin >= end) return std::nullopt;

  std::size_t i = begin;
  if (text[i] == '-' || text[i] == '+') ++i;
  std::size_t digits = 0;
  while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++digits;
  if (digits == 0) return std::nullopt;
  if (i < end && text[i] == '.') {
    std::size_t frac = 0;
    ++i;
    while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++frac;
    if (frac == 0) return std::nullopt;
  }
  // The prefix must stand alone: end of text or whitespace after it.
  if (i != end && !std::isspace(static_cast<unsigned char>(text[i]))) return std::nullopt;
  return std::strtod(text.substr(begin, i - begin).c_str(), nullptr);
}

}  // namespace uigym
