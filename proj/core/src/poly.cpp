#include "lagfront/poly.hpp"

#include <cctype>
#include <numeric>
#include <utility>

#include "lagfront/errors.hpp"

namespace lagfront {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw DomainError("rational overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw DomainError("rational overflow");
  return out;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const std::int64_t l = checked_mul(a.den_ / g, b.den_);
  return {checked_add(checked_mul(a.num_, l / a.den_), checked_mul(b.num_, l / b.den_)), l};
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  // Cross-reduce first to keep intermediates small.
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  const std::int64_t n1 = g1 ? a.num_ / g1 : a.num_;
  const std::int64_t d2 = g1 ? b.den_ / g1 : b.den_;
  const std::int64_t n2 = g2 ? b.num_ / g2 : b.num_;
  const std::int64_t d1 = g2 ? a.den_ / g2 : a.den_;
  return {checked_mul(n1, n2), checked_mul(d1, d2)};
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw DomainError("division by zero rational");
  return a * Rational(b.den_, b.num_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

// ---------------------------------------------------------------------------

VariableSet VariableSet::family(std::size_t k, std::size_t n, bool has_t) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("q" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  if (has_t) names.emplace_back("t");
  return VariableSet(std::move(names));
}

VariableSet VariableSet::indexed(std::string_view prefix, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return VariableSet(std::move(names));
}

std::size_t VariableSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return names_.size();
}

// ---------------------------------------------------------------------------

struct PolyExpr::Node {
  Kind kind;
  Rational value;
  std::size_t index = 0;
  unsigned exponent = 0;
  std::vector<PolyExpr> children;
  std::vector<int> signs;
};

PolyExpr PolyExpr::constant(Rational value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kConstant;
  node->value = value;
  return PolyExpr(std::move(node));
}

PolyExpr PolyExpr::variable(std::size_t index) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kVariable;
  node->index = index;
  return PolyExpr(std::move(node));
}

PolyExpr PolyExpr::sum(std::vector<PolyExpr> terms, std::vector<int> signs) {
  if (terms.empty() || terms.size() != signs.size() || signs.front() != 1) {
    throw DomainError("malformed sum node");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::kSum;
  node->children = std::move(terms);
  node->signs = std::move(signs);
  return PolyExpr(std::move(node));
}

PolyExpr PolyExpr::product(std::vector<PolyExpr> factors) {
  if (factors.empty()) throw DomainError("empty product node");
  auto node = std::make_shared<Node>();
  node->kind = Kind::kProduct;
  node->children = std::move(factors);
  return PolyExpr(std::move(node));
}

PolyExpr PolyExpr::power(PolyExpr base, unsigned exponent) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kPower;
  node->exponent = exponent;
  node->children.push_back(std::move(base));
  return PolyExpr(std::move(node));
}

PolyExpr PolyExpr::negate(PolyExpr operand) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kNegate;
  node->children.push_back(std::move(operand));
  return PolyExpr(std::move(node));
}

PolyExpr::Kind PolyExpr::kind() const { return node_->kind; }
const Rational& PolyExpr::value() const { return node_->value; }
std::size_t PolyExpr::variable_index() const { return node_->index; }
std::span<const PolyExpr> PolyExpr::children() const { return node_->children; }
std::span<const int> PolyExpr::signs() const { return node_->signs; }
unsigned PolyExpr::exponent() const { return node_->exponent; }

std::size_t PolyExpr::term_count() const {
  return kind() == Kind::kSum ? node_->children.size() : 1;
}

std::ptrdiff_t PolyExpr::max_variable_index() const {
  if (kind() == Kind::kVariable) return static_cast<std::ptrdiff_t>(node_->index);
  std::ptrdiff_t best = -1;
  for (const auto& c : node_->children) best = std::max(best, c.max_variable_index());
  return best;
}

bool operator==(const PolyExpr& a, const PolyExpr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.value == y.value && x.index == y.index &&
         x.exponent == y.exponent && x.signs == y.signs && x.children == y.children;
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VariableSet& vars) : text_(text), vars_(vars) {}

  PolyExpr parse() {
    PolyExpr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  PolyExpr expr() {
    std::vector<PolyExpr> terms{term()};
    std::vector<int> signs{1};
    for (;;) {
      if (accept('+')) {
        signs.push_back(1);
      } else if (accept('-')) {
        signs.push_back(-1);
      } else {
        break;
      }
      terms.push_back(term());
    }
    if (terms.size() == 1) return terms.front();
    return PolyExpr::sum(std::move(terms), std::move(signs));
  }

  PolyExpr term() {
    std::vector<PolyExpr> factors{factor()};
    while (accept('*')) factors.push_back(factor());
    if (factors.size() == 1) return factors.front();
    return PolyExpr::product(std::move(factors));
  }

  PolyExpr factor() {
    if (accept('-')) return PolyExpr::negate(factor());
    PolyExpr b = base();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      const std::int64_t e = digits();
      if (pos_ == start) fail("expected unsigned integer exponent");
      if (e > 64) fail("exponent too large");
      return PolyExpr::power(std::move(b), static_cast<unsigned>(e));
    }
    return b;
  }

  std::int64_t digits() {
    std::int64_t value = 0;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (pos_ - start >= 18) fail("numeric literal too long");
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return value;
  }

  PolyExpr base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      PolyExpr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      const std::size_t index = vars_.find(name);
      if (index == vars_.size()) throw UndeclaredVariable(std::string(name));
      return PolyExpr::variable(index);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  PolyExpr number() {
    const std::int64_t whole = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      const std::size_t start = pos_;
      const std::int64_t frac = digits();
      if (pos_ == start) fail("expected digits after '.'");
      std::int64_t scale = 1;
      for (std::size_t i = start; i < pos_; ++i) scale *= 10;
      return PolyExpr::constant(Rational(whole) + Rational(frac, scale));
    }
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      const std::size_t start = pos_;
      const std::int64_t den = digits();
      if (pos_ == start) fail("expected denominator after '/'");
      if (den == 0) fail("zero denominator");
      return PolyExpr::constant(Rational(whole, den));
    }
    return PolyExpr::constant(Rational(whole));
  }

  std::string_view text_;
  const VariableSet& vars_;
  std::size_t pos_ = 0;
};

void print_into(const PolyExpr& e, const VariableSet& vars, std::string& out);

void print_wrapped(const PolyExpr& e, const VariableSet& vars, std::string& out, bool wrap) {
  if (wrap) out += '(';
  print_into(e, vars, out);
  if (wrap) out += ')';
}

void print_into(const PolyExpr& e, const VariableSet& vars, std::string& out) {
  using K = PolyExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      out += e.value().to_string();
      break;
    case K::kVariable:
      out += vars.name(e.variable_index());
      break;
    case K::kSum: {
      const auto kids = e.children();
      const auto signs = e.signs();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out += signs[i] > 0 ? " + " : " - ";
        print_wrapped(kids[i], vars, out, kids[i].kind() == K::kSum);
      }
      break;
    }
    case K::kProduct: {
      const auto kids = e.children();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out += '*';
        print_wrapped(kids[i], vars, out,
                      kids[i].kind() == K::kSum || kids[i].kind() == K::kProduct);
      }
      break;
    }
    case K::kPower: {
      const PolyExpr& b = e.children()[0];
      print_wrapped(b, vars, out, b.kind() != K::kVariable && b.kind() != K::kConstant);
      out += '^';
      out += std::to_string(e.exponent());
      break;
    }
    case K::kNegate: {
      const PolyExpr& c = e.children()[0];
      out += '-';
      print_wrapped(c, vars, out, c.kind() == K::kSum || c.kind() == K::kProduct);
      break;
    }
  }
}

}  // namespace

PolyExpr parse_expression(std::string_view text, const VariableSet& vars) {
  return Parser(text, vars).parse();
}

PolyExpr parse_family(std::string_view text, std::size_t k, std::size_t n, bool has_t) {
  const VariableSet vars = VariableSet::family(k, n, has_t);
  return parse_expression(text, vars);
}

std::string print_expression(const PolyExpr& expr, const VariableSet& vars) {
  std::string out;
  print_into(expr, vars, out);
  return out;
}

PolyExpr differentiate(const PolyExpr& e, std::size_t variable) {
  using K = PolyExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      return PolyExpr::constant(0);
    case K::kVariable:
      return PolyExpr::constant(e.variable_index() == variable ? 1 : 0);
    case K::kSum: {
      std::vector<PolyExpr> terms;
      for (const auto& c : e.children()) terms.push_back(differentiate(c, variable));
      const auto s = e.signs();
      return PolyExpr::sum(std::move(terms), std::vector<int>(s.begin(), s.end()));
    }
    case K::kProduct: {
      const auto kids = e.children();
      std::vector<PolyExpr> terms;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        std::vector<PolyExpr> factors(kids.begin(), kids.end());
        factors[i] = differentiate(kids[i], variable);
        terms.push_back(PolyExpr::product(std::move(factors)));
      }
      if (terms.size() == 1) return terms.front();
      return PolyExpr::sum(std::move(terms), std::vector<int>(kids.size(), 1));
    }
    case K::kPower: {
      const PolyExpr& b = e.children()[0];
      const unsigned p = e.exponent();
      if (p == 0) return PolyExpr::constant(0);
      return PolyExpr::product({PolyExpr::constant(static_cast<std::int64_t>(p)),
                                PolyExpr::power(b, p - 1), differentiate(b, variable)});
    }
    case K::kNegate:
      return PolyExpr::negate(differentiate(e.children()[0], variable));
  }
  return PolyExpr::constant(0);
}

// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(std::size_t num_vars, Rational value) {
  Polynomial p(num_vars);
  p.add_term(Monomial(num_vars, 0), value);
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) throw DomainError("variable index out of range");
  Polynomial p(num_vars);
  Monomial m(num_vars, 0);
  m[index] = 1;
  p.add_term(m, 1);
  return p;
}

Polynomial Polynomial::from_expression(const PolyExpr& e, std::size_t num_vars) {
  using K = PolyExpr::Kind;
  switch (e.kind()) {
    case K::kConstant:
      return constant(num_vars, e.value());
    case K::kVariable:
      return variable(num_vars, e.variable_index());
    case K::kSum: {
      Polynomial acc(num_vars);
      const auto kids = e.children();
      const auto signs = e.signs();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        const Polynomial t = from_expression(kids[i], num_vars);
        acc = signs[i] > 0 ? acc + t : acc - t;
      }
      return acc;
    }
    case K::kProduct: {
      Polynomial acc = constant(num_vars, 1);
      for (const auto& c : e.children()) acc = acc * from_expression(c, num_vars);
      return acc;
    }
    case K::kPower:
      return from_expression(e.children()[0], num_vars).pow(e.exponent());
    case K::kNegate:
      return -from_expression(e.children()[0], num_vars);
  }
  return Polynomial(num_vars);
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

int Polynomial::degree() const {
  int best = -1;
  for (const auto& [m, c] : terms_) {
    int d = 0;
    for (auto e : m) d += e;
    best = std::max(best, d);
  }
  return best;
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Polynomial Polynomial::derivative(std::size_t variable) const {
  Polynomial out(num_vars_);
  for (const auto& [m, c] : terms_) {
    if (m[variable] == 0) continue;
    Monomial d = m;
    d[variable] -= 1;
    out.add_term(d, c * Rational(m[variable]));
  }
  return out;
}

Polynomial Polynomial::truncated(int max_degree) const {
  Polynomial out(num_vars_);
  for (const auto& [m, c] : terms_) {
    int d = 0;
    for (auto e : m) d += e;
    if (d <= max_degree) out.terms_.emplace(m, c);
  }
  return out;
}

Rational Polynomial::constant_term() const { return coefficient(Monomial(num_vars_, 0)); }

double Polynomial::evaluate(std::span<const double> point) const {
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c.to_double();
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (unsigned e = 0; e < m[i]; ++e) term *= point[i];
    }
    total += term;
  }
  return total;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  out.num_vars_ = std::max(a.num_vars_, b.num_vars_);
  for (const auto& [m, c] : b.terms_) out.add_term(m, c);
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(std::max(a.num_vars_, b.num_vars_));
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m(ma.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint16_t>(ma[i] + mb[i]);
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(num_vars_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result = constant(num_vars_, 1);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1u;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace lagfront
