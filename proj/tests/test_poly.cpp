#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "lagfront/errors.hpp"
#include "lagfront/poly.hpp"

using namespace lagfront;

namespace {

// Normal-form germs of integral diagrams plus the families used across tests.
const std::vector<std::string> kGermCorpus = {
    "u2",
    "u1",
    "2/3*u1^3 + u2",
    "u1^2",
    "u2 - 1/2*u1",
    "u2^2",
    "3/4*u1^4 + 1/2*u1^2*u2 + u2",
    "u1^3 + u2*u1",
    "u2^3 + u1*u2",
    "-3*u2^2 + 4*u1*u2 + u1",
    "u2^3 + u1*u2^2",
    "(u1 - u2)^3*(2/5 - u1) - -u2",
    "-(u1*u2)^2 - (u1 + 1)*(u2 - 0.25)",
};

// Random expression generator over two variables.
PolyExpr random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  std::uniform_int_distribution<int> small(0, 6);
  switch (pick(rng)) {
    case 0:
      return PolyExpr::constant(Rational(small(rng), 1 + small(rng)));
    case 1:
      return PolyExpr::variable(static_cast<std::size_t>(small(rng) % 2));
    case 2: {
      std::vector<PolyExpr> terms{random_expr(rng, depth - 1), random_expr(rng, depth - 1)};
      std::vector<int> signs{1, small(rng) % 2 ? 1 : -1};
      return PolyExpr::sum(std::move(terms), std::move(signs));
    }
    case 3:
      return PolyExpr::product({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 4:
      return PolyExpr::power(random_expr(rng, depth - 1), static_cast<unsigned>(small(rng) % 4));
    default:
      return PolyExpr::negate(random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parse_family builds the documented term structure") {
  const PolyExpr fold = parse_family("q1^3 + x1*q1", 1, 1, false);
  CHECK(fold.kind() == PolyExpr::Kind::kSum);
  CHECK(fold.term_count() == 2);

  const PolyExpr cusp = parse_family("q1^4 + x1*q1^2 + x2*q1", 1, 2, false);
  CHECK(cusp.term_count() == 3);
  CHECK(cusp.max_variable_index() == 2);
}

TEST_CASE("undeclared variables and malformed input are reported") {
  try {
    parse_family("q1 + y1", 1, 1, false);
    FAIL("expected UndeclaredVariable");
  } catch (const UndeclaredVariable& e) {
    CHECK(e.variable() == "y1");
  }
  CHECK_THROWS_AS(parse_family("t*q1", 1, 1, false), UndeclaredVariable);
  CHECK_NOTHROW(parse_family("t*q1", 1, 1, true));

  try {
    parse_family("q1 + * x1", 1, 1, false);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(parse_family("q1^", 1, 1, false), SyntaxError);
  CHECK_THROWS_AS(parse_family("(q1 + x1", 1, 1, false), SyntaxError);
  CHECK_THROWS_AS(parse_family("q1/2", 1, 1, false), SyntaxError);
  CHECK_THROWS_AS(parse_family("1/0", 1, 1, false), SyntaxError);
  CHECK_THROWS_AS(parse_family("", 1, 1, false), SyntaxError);
}

TEST_CASE("rational literals stay exact") {
  const VariableSet u = VariableSet::indexed("u", 2);
  const Polynomial p = Polynomial::from_expression(parse_expression("2/3*u1^3 + 0.75*u2", u), 2);
  CHECK(p.coefficient({3, 0}) == Rational(2, 3));
  CHECK(p.coefficient({0, 1}) == Rational(3, 4));
  CHECK(Rational(4, -6) == Rational(-2, 3));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
}

TEST_CASE("parse-print-parse is the identity on the germ corpus") {
  const VariableSet u = VariableSet::indexed("u", 2);
  for (const auto& text : kGermCorpus) {
    CAPTURE(text);
    const PolyExpr first = parse_expression(text, u);
    const std::string printed = print_expression(first, u);
    CAPTURE(printed);
    CHECK(parse_expression(printed, u) == first);
  }
}

TEST_CASE("parse-print-parse is the identity on random trees") {
  const VariableSet u = VariableSet::indexed("u", 2);
  std::mt19937 rng(7);
  for (int i = 0; i < 300; ++i) {
    const PolyExpr e = random_expr(rng, 4);
    const std::string printed = print_expression(e, u);
    CAPTURE(printed);
    const PolyExpr reparsed = parse_expression(printed, u);
    CHECK(print_expression(reparsed, u) == printed);
    CHECK(parse_expression(print_expression(reparsed, u), u) == reparsed);
  }
}

TEST_CASE("tree derivative agrees with the expanded polynomial derivative") {
  const VariableSet u = VariableSet::indexed("u", 2);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (const auto& text : kGermCorpus) {
    const PolyExpr e = parse_expression(text, u);
    const Polynomial p = Polynomial::from_expression(e, 2);
    for (std::size_t var = 0; var < 2; ++var) {
      const Polynomial via_tree = Polynomial::from_expression(differentiate(e, var), 2);
      CHECK(via_tree == p.derivative(var));
    }
  }
  for (int i = 0; i < 100; ++i) {
    const PolyExpr e = random_expr(rng, 3);
    const Polynomial p = Polynomial::from_expression(e, 2);
    const Polynomial d = Polynomial::from_expression(differentiate(e, 1), 2);
    CHECK(d == p.derivative(1));
  }
}

TEST_CASE("polynomial evaluation and truncation") {
  const Polynomial p = Polynomial::from_expression(parse_family("q1^4 + x1*q1^2 + x2*q1", 1, 2, false), 3);
  const double pt[] = {1.0, -1.0, 0.5};
  CHECK(p.evaluate(pt) == doctest::Approx(0.5));
  CHECK(p.degree() == 4);
  CHECK(p.truncated(3).degree() == 3);
  CHECK(p.constant_term().is_zero());
  CHECK(Polynomial::from_expression(parse_family("(q1 + 1)^2 - q1^2 - 2*q1", 1, 0, false), 1) ==
        Polynomial::constant(1, 1));
}
