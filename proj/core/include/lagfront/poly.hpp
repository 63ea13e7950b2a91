#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lagfront {

// Exact rational number with 64-bit numerator/denominator. Arithmetic throws
// DomainError on overflow instead of wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {}  // NOLINT(runtime/explicit)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Ordered list of variable names; a variable's index is its position.
class VariableSet {
 public:
  VariableSet() = default;
  explicit VariableSet(std::vector<std::string> names) : names_(std::move(names)) {}

  // q1..qk, x1..xn and optionally t, in that order.
  static VariableSet family(std::size_t k, std::size_t n, bool has_t);
  // prefix1..prefixcount, e.g. ("u", 2) -> u1, u2.
  static VariableSet indexed(std::string_view prefix, std::size_t count);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  // Returns size() when the name is not declared.
  std::size_t find(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

// Immutable abstract syntax tree of a polynomial expression:
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := '-' factor | base ('^' uint)?
//   base   := var | rational | '(' expr ')'
// Rational literals are `digits`, `digits/digits` or `digits.digits`, all kept
// exact. Nodes are shared, so copies are cheap.
class PolyExpr {
 public:
  enum class Kind { kConstant, kVariable, kSum, kProduct, kPower, kNegate };

  static PolyExpr constant(Rational value);
  static PolyExpr variable(std::size_t index);
  // signs[i] is +1 or -1; signs[0] must be +1.
  static PolyExpr sum(std::vector<PolyExpr> terms, std::vector<int> signs);
  static PolyExpr product(std::vector<PolyExpr> factors);
  static PolyExpr power(PolyExpr base, unsigned exponent);
  static PolyExpr negate(PolyExpr operand);

  Kind kind() const;
  const Rational& value() const;
  std::size_t variable_index() const;
  std::span<const PolyExpr> children() const;
  std::span<const int> signs() const;
  unsigned exponent() const;

  // Number of top-level additive terms (1 for anything but a sum).
  std::size_t term_count() const;
  // Highest variable index referenced, or -1 when the expression is constant.
  std::ptrdiff_t max_variable_index() const;

  friend bool operator==(const PolyExpr& a, const PolyExpr& b);

 private:
  struct Node;
  explicit PolyExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

PolyExpr parse_expression(std::string_view text, const VariableSet& vars);
PolyExpr parse_family(std::string_view text, std::size_t k, std::size_t n, bool has_t);
std::string print_expression(const PolyExpr& expr, const VariableSet& vars);

// Symbolic partial derivative on the tree. The result is not simplified.
PolyExpr differentiate(const PolyExpr& expr, std::size_t variable);

using Monomial = std::vector<std::uint16_t>;

// Expanded sparse polynomial with exact rational coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

  static Polynomial constant(std::size_t num_vars, Rational value);
  static Polynomial variable(std::size_t num_vars, std::size_t index);
  static Polynomial from_expression(const PolyExpr& expr, std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Total degree; -1 for the zero polynomial.
  int degree() const;
  Rational coefficient(const Monomial& m) const;

  Polynomial derivative(std::size_t variable) const;
  Polynomial truncated(int max_degree) const;
  // Value at the origin.
  Rational constant_term() const;

  double evaluate(std::span<const double> point) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  Polynomial pow(unsigned exponent) const;
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c);

  std::size_t num_vars_ = 0;
  std::map<Monomial, Rational> terms_;
};

}  // namespace lagfront
