#include "nehari/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>

#include "nehari/errors.hpp"

namespace nehari::expr {
namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Token(Tok k, std::size_t off, double num = 0.0, std::string t = {})
      : kind(k), offset(off), number(num), text(std::move(t)) {}
  Tok kind;
  std::size_t offset;
  double number;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start};
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, start, 0.0, std::string(src_.substr(start, pos_ - start))};
    }
    ++pos_;
    switch (c) {
      case '+': return {Tok::Plus, start};
      case '-': return {Tok::Minus, start};
      case '*': return {Tok::Star, start};
      case '/': return {Tok::Slash, start};
      case '^': return {Tok::Caret, start};
      case '(': return {Tok::LParen, start};
      case ')': return {Tok::RParen, start};
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  Token lex_number(std::size_t start) {
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
    }
    const std::string text(src_.substr(start, pos_ - start));
    return {Tok::Number, start, std::strtod(text.c_str(), nullptr), text};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Binding powers.
constexpr int kAdditive = 10;
constexpr int kMultiplicative = 20;
constexpr int kUnary = 30;
constexpr int kPower = 40;

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(NodeKind kind, std::vector<NodePtr> children = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(children);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  NodePtr parse_all() {
    NodePtr e = parse_expr(0);
    if (cur_.kind != Tok::End) throw ParseError("unexpected trailing input", cur_.offset);
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) throw ParseError(std::string("expected ") + what, cur_.offset);
    advance();
  }

  static int infix_power(Tok t) {
    switch (t) {
      case Tok::Plus:
      case Tok::Minus: return kAdditive;
      case Tok::Star:
      case Tok::Slash: return kMultiplicative;
      case Tok::Caret: return kPower;
      default: return -1;
    }
  }

  NodePtr parse_expr(int min_power) {
    NodePtr lhs = parse_prefix();
    for (;;) {
      const int power = infix_power(cur_.kind);
      if (power < 0 || power <= min_power) break;
      const Tok op = cur_.kind;
      advance();
      // '^' is right-associative: the right operand may contain another '^'.
      NodePtr rhs = parse_expr(op == Tok::Caret ? power - 1 : power);
      NodeKind kind = NodeKind::Add;
      switch (op) {
        case Tok::Plus: kind = NodeKind::Add; break;
        case Tok::Minus: kind = NodeKind::Sub; break;
        case Tok::Star: kind = NodeKind::Mul; break;
        case Tok::Slash: kind = NodeKind::Div; break;
        default: kind = NodeKind::Pow; break;
      }
      lhs = make(kind, {lhs, rhs});
    }
    return lhs;
  }

  NodePtr parse_prefix() {
    const Token tok = cur_;
    switch (tok.kind) {
      case Tok::Number: {
        advance();
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Number;
        n->value = tok.number;
        return n;
      }
      case Tok::Minus:
        advance();
        return make(NodeKind::Neg, {parse_expr(kUnary)});
      case Tok::LParen: {
        advance();
        NodePtr inner = parse_expr(0);
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: return parse_identifier(tok);
      case Tok::End: throw ParseError("unexpected end of input", tok.offset);
      default: throw ParseError("unexpected token", tok.offset);
    }
  }

  NodePtr parse_identifier(const Token& tok) {
    advance();
    if (tok.text == "x") return make(NodeKind::VarX);
    if (tok.text == "y") return make(NodeKind::VarY);
    if (tok.text == "pi") return make(NodeKind::Pi);

    static constexpr struct {
      const char* name;
      Function fn;
    } kFunctions[] = {{"sin", Function::Sin},   {"cos", Function::Cos}, {"sqrt", Function::Sqrt},
                      {"log", Function::Log},   {"abs", Function::Abs}, {"exp", Function::Exp}};
    for (const auto& f : kFunctions) {
      if (tok.text != f.name) continue;
      expect(Tok::LParen, "'(' after function name");
      NodePtr arg = parse_expr(0);
      expect(Tok::RParen, "')'");
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Call;
      n->function = f.fn;
      n->children = {arg};
      return n;
    }
    throw UnknownIdentifier(tok.text, tok.offset);
  }

  Lexer lexer_;
  Token cur_{Tok::End, 0};
};

double eval_node(const Node& n, double x, double y) {
  switch (n.kind) {
    case NodeKind::Number: return n.value;
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Pi: return std::numbers::pi;
    case NodeKind::Neg: return -eval_node(*n.children[0], x, y);
    default: break;
  }
  if (n.kind == NodeKind::Call) {
    const double a = eval_node(*n.children[0], x, y);
    switch (n.function) {
      case Function::Sin: return std::sin(a);
      case Function::Cos: return std::cos(a);
      case Function::Abs: return std::fabs(a);
      case Function::Exp: return std::exp(a);
      case Function::Sqrt:
        if (a < 0.0) throw DomainError("sqrt of negative argument");
        return std::sqrt(a);
      case Function::Log:
        if (a < 0.0) throw DomainError("log of negative argument");
        if (a == 0.0) throw DomainError("log of zero");
        return std::log(a);
    }
  }
  const double a = eval_node(*n.children[0], x, y);
  const double b = eval_node(*n.children[1], x, y);
  switch (n.kind) {
    case NodeKind::Add: return a + b;
    case NodeKind::Sub: return a - b;
    case NodeKind::Mul: return a * b;
    case NodeKind::Div:
      if (b == 0.0) throw DivisionByZero("division by zero");
      return a / b;
    case NodeKind::Pow: {
      if (a == 0.0 && b < 0.0) throw DivisionByZero("zero raised to a negative power");
      const double r = std::pow(a, b);
      if (std::isnan(r)) throw DomainError("power of negative base with non-integer exponent");
      return r;
    }
    default: break;
  }
  throw DomainError("malformed expression tree");
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::VarX: out += 'x'; return;
    case NodeKind::VarY: out += 'y'; return;
    case NodeKind::Pi: out += "pi"; return;
    case NodeKind::Neg:
      out += "(-";
      print_node(*n.children[0], out);
      out += ')';
      return;
    case NodeKind::Call: {
      static constexpr const char* kNames[] = {"sin", "cos", "sqrt", "log", "abs", "exp"};
      out += kNames[static_cast<int>(n.function)];
      out += '(';
      print_node(*n.children[0], out);
      out += ')';
      return;
    }
    default: break;
  }
  char op = '+';
  switch (n.kind) {
    case NodeKind::Sub: op = '-'; break;
    case NodeKind::Mul: op = '*'; break;
    case NodeKind::Div: op = '/'; break;
    case NodeKind::Pow: op = '^'; break;
    default: break;
  }
  out += '(';
  print_node(*n.children[0], out);
  out += op;
  print_node(*n.children[1], out);
  out += ')';
}

}  // namespace

double Expr::operator()(double x, double y) const { return eval_node(*root_, x, y); }

Expr parse(std::string_view text) {
  Parser parser(text);
  return Expr(parser.parse_all(), std::string(text));
}

double evaluate(const Expr& e, double x, double y) { return e(x, y); }

std::string to_string(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  if (a.kind == NodeKind::Number && std::memcmp(&a.value, &b.value, sizeof(double)) != 0)
    return false;
  if (a.kind == NodeKind::Call && a.function != b.function) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

}  // namespace nehari::expr
