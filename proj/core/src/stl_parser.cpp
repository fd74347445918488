#include <cctype>
#include <cstdlib>

#include "cpsarch/stl.hpp"
#include "detail/number_format.hpp"

namespace cpsarch::stl {

namespace {

enum class Tok {
  End,
  Ident,
  Number,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Bang,
  AndAnd,
  OrOr,
  Arrow,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::string t, std::size_t pos) {
    tokens.push_back({kind, std::move(t), 0.0, pos});
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_')) {
        ++j;
      }
      push(Tok::Ident, std::string(text.substr(i, j - i)), start);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      const char* begin = text.data() + i;
      char* end = nullptr;
      double value = std::strtod(begin, &end);
      if (end == begin) {
        throw SyntaxError("stl: bad number at position " +
                          std::to_string(start));
      }
      Token t{Tok::Number,
              std::string(begin, static_cast<std::size_t>(end - begin)), value,
              start};
      tokens.push_back(std::move(t));
      i += static_cast<std::size_t>(end - begin);
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "&&") {
      push(Tok::AndAnd, "&&", start);
      i += 2;
      continue;
    }
    if (two == "||") {
      push(Tok::OrOr, "||", start);
      i += 2;
      continue;
    }
    if (two == "->") {
      push(Tok::Arrow, "->", start);
      i += 2;
      continue;
    }
    if (two == "<=") {
      push(Tok::Le, "<=", start);
      i += 2;
      continue;
    }
    if (two == ">=") {
      push(Tok::Ge, ">=", start);
      i += 2;
      continue;
    }
    switch (c) {
      case '(':
        push(Tok::LParen, "(", start);
        break;
      case ')':
        push(Tok::RParen, ")", start);
        break;
      case '[':
        push(Tok::LBracket, "[", start);
        break;
      case ']':
        push(Tok::RBracket, "]", start);
        break;
      case ',':
        push(Tok::Comma, ",", start);
        break;
      case '!':
        push(Tok::Bang, "!", start);
        break;
      case '<':
        push(Tok::Lt, "<", start);
        break;
      case '>':
        push(Tok::Gt, ">", start);
        break;
      case '+':
        push(Tok::Plus, "+", start);
        break;
      case '-':
        push(Tok::Minus, "-", start);
        break;
      case '*':
        push(Tok::Star, "*", start);
        break;
      default:
        throw SyntaxError(std::string("stl: unexpected character '") + c +
                          "' at position " + std::to_string(start));
    }
    ++i;
  }
  tokens.push_back({Tok::End, "", 0.0, text.size()});
  return tokens;
}

// Raised while speculatively parsing "( expr cmp expr )"; triggers a retry
// as a parenthesized formula.
struct PredicateMismatch {};

class Parser {
 public:
  Parser(std::string_view text, const SignalDeclarations& decls)
      : tokens_(tokenize(text)) {
    for (const SignalDeclaration& d : decls) names_.insert(d.name);
  }

  StlFormula parse() {
    FormulaPtr root = parse_implies();
    expect(Tok::End, "end of input");
    return StlFormula{root};
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  Token take() { return tokens_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(Tok kind, const char* what) {
    if (!accept(kind)) {
      fail(std::string("expected ") + what);
    }
  }
  [[noreturn]] void fail(const std::string& message) const {
    if (speculating_ > 0) throw PredicateMismatch{};
    throw SyntaxError("stl: " + message + " at position " +
                      std::to_string(peek().pos) +
                      (peek().kind == Tok::End ? " (end of input)"
                                               : " near '" + peek().text +
                                                     "'"));
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (accept(Tok::Arrow)) {
      FormulaPtr rhs = parse_implies();  // right-associative
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Implies;
      node->left = lhs;
      node->right = rhs;
      return node;
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (accept(Tok::OrOr)) {
      FormulaPtr rhs = parse_and();
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Or;
      node->left = lhs;
      node->right = rhs;
      lhs = node;
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (accept(Tok::AndAnd)) {
      FormulaPtr rhs = parse_unary();
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::And;
      node->left = lhs;
      node->right = rhs;
      lhs = node;
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    if (accept(Tok::Bang)) {
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Not;
      node->left = parse_unary();
      return node;
    }
    if (peek().kind == Tok::Ident &&
        (peek().text == "G" || peek().text == "F") &&
        tokens_[pos_ + 1].kind == Tok::LBracket) {
      bool globally = peek().text == "G";
      take();
      auto [lo, hi] = parse_interval();
      auto node = std::make_shared<Formula>();
      node->kind =
          globally ? Formula::Kind::Globally : Formula::Kind::Finally;
      node->lo = lo;
      node->hi = hi;
      node->left = parse_unary();
      return node;
    }
    return parse_primary();
  }

  std::pair<double, double> parse_interval() {
    expect(Tok::LBracket, "'['");
    double lo = parse_bound();
    expect(Tok::Comma, "','");
    double hi = parse_bound();
    expect(Tok::RBracket, "']'");
    if (lo < 0 || hi < 0) {
      throw BadInterval("stl: interval bounds must be nonnegative");
    }
    if (lo > hi) {
      throw BadInterval("stl: interval lower bound exceeds upper bound");
    }
    return {lo, hi};
  }

  double parse_bound() {
    bool negative = accept(Tok::Minus);
    if (peek().kind != Tok::Number) fail("expected interval bound");
    double v = take().number;
    return negative ? -v : v;
  }

  FormulaPtr parse_primary() {
    if (peek().kind == Tok::LParen) {
      // Could be "(x + 1) < 2" (parenthesized expression starting a
      // predicate) or a parenthesized formula; try the predicate first.
      std::size_t saved = pos_;
      ++speculating_;
      try {
        FormulaPtr pred = parse_predicate();
        --speculating_;
        return pred;
      } catch (const PredicateMismatch&) {
        --speculating_;
        pos_ = saved;
      }
      expect(Tok::LParen, "'('");
      FormulaPtr inner = parse_implies();
      expect(Tok::RParen, "')'");
      return inner;
    }
    return parse_predicate();
  }

  FormulaPtr parse_predicate() {
    ExprPtr lhs = parse_expr();
    CmpOp op;
    switch (peek().kind) {
      case Tok::Lt:
        op = CmpOp::Lt;
        break;
      case Tok::Le:
        op = CmpOp::Le;
        break;
      case Tok::Gt:
        op = CmpOp::Gt;
        break;
      case Tok::Ge:
        op = CmpOp::Ge;
        break;
      default:
        fail("expected comparison operator");
    }
    take();
    ExprPtr rhs = parse_expr();
    auto node = std::make_shared<Formula>();
    node->kind = Formula::Kind::Predicate;
    node->pred_lhs = lhs;
    node->cmp = op;
    node->pred_rhs = rhs;
    return node;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool add = take().kind == Tok::Plus;
      ExprPtr rhs = parse_term();
      auto node = std::make_shared<Expr>();
      node->kind = add ? Expr::Kind::Add : Expr::Kind::Sub;
      node->lhs = lhs;
      node->rhs = rhs;
      lhs = node;
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (accept(Tok::Star)) {
      ExprPtr rhs = parse_factor();
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Mul;
      node->lhs = lhs;
      node->rhs = rhs;
      lhs = node;
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    if (accept(Tok::Minus)) {
      ExprPtr operand = parse_factor();
      if (operand->kind == Expr::Kind::Constant) {
        // fold literal negation so "x + -2.5" round-trips unchanged
        auto folded = std::make_shared<Expr>();
        folded->kind = Expr::Kind::Constant;
        folded->value = -operand->value;
        return folded;
      }
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Neg;
      node->lhs = operand;
      return node;
    }
    if (peek().kind == Tok::Number) {
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Constant;
      node->value = take().number;
      return node;
    }
    if (peek().kind == Tok::Ident) {
      Token t = take();
      if (t.text == "abs") {
        expect(Tok::LParen, "'(' after abs");
        ExprPtr inner = parse_expr();
        expect(Tok::RParen, "')'");
        auto node = std::make_shared<Expr>();
        node->kind = Expr::Kind::Abs;
        node->lhs = inner;
        return node;
      }
      if (!names_.contains(t.text)) {
        // Inside a speculative "( expr cmp expr )" parse this may actually
        // be a temporal operator or negation; retry as a formula, which
        // reports the authoritative error if the name really is unknown.
        if (speculating_ > 0) throw PredicateMismatch{};
        throw UnknownSignal("stl: signal '" + t.text + "' is not declared");
      }
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::Signal;
      node->signal = t.text;
      return node;
    }
    if (accept(Tok::LParen)) {
      ExprPtr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    fail("expected expression");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int speculating_ = 0;
  std::set<std::string> names_;
};

}  // namespace

StlFormula parse_stl(std::string_view text, const SignalDeclarations& decls) {
  Parser parser(text, decls);
  return parser.parse();
}

namespace {

// Expression precedence: Add/Sub 1, Mul 2, leaves/unary 3.
int expr_prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
      return 2;
    default:
      return 3;
  }
}

void print_expr(const Expr& e, std::string& out) {
  auto child = [&out](const ExprPtr& c, int min_prec) {
    if (expr_prec(*c) < min_prec) {
      out += '(';
      print_expr(*c, out);
      out += ')';
    } else {
      print_expr(*c, out);
    }
  };
  switch (e.kind) {
    case Expr::Kind::Constant:
      out += detail::format_double(e.value);
      break;
    case Expr::Kind::Signal:
      out += e.signal;
      break;
    case Expr::Kind::Add:
      child(e.lhs, 1);
      out += " + ";
      child(e.rhs, 2);  // right operand needs parens if it is +/-
      break;
    case Expr::Kind::Sub:
      child(e.lhs, 1);
      out += " - ";
      child(e.rhs, 2);
      break;
    case Expr::Kind::Mul:
      child(e.lhs, 2);
      out += " * ";
      child(e.rhs, 3);
      break;
    case Expr::Kind::Neg:
      out += '-';
      child(e.lhs, 3);
      break;
    case Expr::Kind::Abs:
      out += "abs(";
      print_expr(*e.lhs, out);
      out += ')';
      break;
  }
}

std::string_view cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt:
      return "<";
    case CmpOp::Le:
      return "<=";
    case CmpOp::Gt:
      return ">";
    case CmpOp::Ge:
      return ">=";
  }
  return "<";
}

void print_formula(const Formula& f, std::string& out) {
  auto parenthesized = [&out](const FormulaPtr& sub) {
    out += '(';
    print_formula(*sub, out);
    out += ')';
  };
  switch (f.kind) {
    case Formula::Kind::Predicate:
      print_expr(*f.pred_lhs, out);
      out += ' ';
      out += cmp_text(f.cmp);
      out += ' ';
      print_expr(*f.pred_rhs, out);
      break;
    case Formula::Kind::Not:
      out += '!';
      parenthesized(f.left);
      break;
    case Formula::Kind::And:
      parenthesized(f.left);
      out += " && ";
      parenthesized(f.right);
      break;
    case Formula::Kind::Or:
      parenthesized(f.left);
      out += " || ";
      parenthesized(f.right);
      break;
    case Formula::Kind::Implies:
      parenthesized(f.left);
      out += " -> ";
      parenthesized(f.right);
      break;
    case Formula::Kind::Globally:
    case Formula::Kind::Finally:
      out += f.kind == Formula::Kind::Globally ? 'G' : 'F';
      out += '[';
      out += detail::format_double(f.lo);
      out += ',';
      out += detail::format_double(f.hi);
      out += "] ";
      parenthesized(f.left);
      break;
  }
}

void collect_signals(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Signal) out.insert(e.signal);
  if (e.lhs) collect_signals(*e.lhs, out);
  if (e.rhs) collect_signals(*e.rhs, out);
}

void collect_signals(const Formula& f, std::set<std::string>& out) {
  if (f.pred_lhs) collect_signals(*f.pred_lhs, out);
  if (f.pred_rhs) collect_signals(*f.pred_rhs, out);
  if (f.left) collect_signals(*f.left, out);
  if (f.right) collect_signals(*f.right, out);
}

}  // namespace

std::string to_string(const StlFormula& formula) {
  std::string out;
  print_formula(*formula.root, out);
  return out;
}

std::set<std::string> referenced_signals(const StlFormula& formula) {
  std::set<std::string> out;
  collect_signals(*formula.root, out);
  return out;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == Expr::Kind::Constant && a->value != b->value) return false;
  if (a->kind == Expr::Kind::Signal && a->signal != b->signal) return false;
  return structurally_equal(a->lhs, b->lhs) &&
         structurally_equal(a->rhs, b->rhs);
}

namespace {

bool node_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == Formula::Kind::Predicate) {
    return a->cmp == b->cmp && structurally_equal(a->pred_lhs, b->pred_lhs) &&
           structurally_equal(a->pred_rhs, b->pred_rhs);
  }
  if (a->kind == Formula::Kind::Globally ||
      a->kind == Formula::Kind::Finally) {
    if (a->lo != b->lo || a->hi != b->hi) return false;
  }
  return node_equal(a->left, b->left) && node_equal(a->right, b->right);
}

}  // namespace

bool structurally_equal(const StlFormula& a, const StlFormula& b) {
  return node_equal(a.root, b.root);
}

}  // namespace cpsarch::stl
