#pragma once

// Scalar expressions in x and y, used for potentials and starting functions.
//
// Grammar (whitespace ignored):
//   expr    := expr ('+'|'-') expr | expr ('*'|'/') expr | '-' expr
//            | expr '^' expr | primary
//   primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | sqrt | log | abs | exp
// Binding, tightest first: '^' (right-assoc), unary '-', '*' '/', '+' '-'.
// There is no implicit multiplication; "2x" is a syntax error.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace nehari::expr {

enum class NodeKind { Number, VarX, VarY, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Sqrt, Log, Abs, Exp };

struct Node {
  NodeKind kind;
  double value = 0.0;                        // Number
  Function function = Function::Sin;         // Call
  std::vector<std::shared_ptr<const Node>> children;
};

/// Immutable parsed expression. Copies share the tree.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> root, std::string source = {})
      : root_(std::move(root)), source_(std::move(source)) {}

  double operator()(double x, double y) const;

  const Node& root() const { return *root_; }
  bool empty() const { return !root_; }

  /// Text as given to parse(); empty when built programmatically.
  const std::string& source() const { return source_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Throws ParseError (with byte offset) or UnknownIdentifier.
Expr parse(std::string_view text);

/// Throws DomainError for sqrt/log/pow outside their real domain and
/// DivisionByZero for x/0 and 0^(negative).
double evaluate(const Expr& e, double x, double y);

/// Fully parenthesised text that parses back to the same tree. Number
/// literals are printed with 17 significant digits.
std::string to_string(const Expr& e);

bool structurally_equal(const Node& a, const Node& b);

}  // namespace nehari::expr
