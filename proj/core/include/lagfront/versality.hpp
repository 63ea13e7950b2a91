#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lagfront/linalg.hpp"
#include "lagfront/poly.hpp"

namespace lagfront {

// Polynomials in `vars` variables modulo monomials of degree > degree_bound,
// with the monomial basis in graded-lexicographic order (degree first, then
// higher powers of earlier variables first).
class JetSpace {
 public:
  JetSpace(std::size_t vars, unsigned degree_bound);

  std::size_t vars() const { return vars_; }
  unsigned degree_bound() const { return degree_bound_; }
  std::size_t size() const { return basis_.size(); }
  const Monomial& monomial(std::size_t index) const { return basis_.at(index); }
  std::size_t index_of(const Monomial& m) const;

  // Coefficient vector of p, dropping terms above the degree bound.
  Vector project(const Polynomial& p) const;
  Polynomial monomial_polynomial(std::size_t index) const;
  std::string name(std::size_t index, const VariableSet& names) const;

 private:
  std::size_t vars_;
  unsigned degree_bound_;
  std::vector<Monomial> basis_;
  std::map<Monomial, std::size_t> index_;
};

struct VersalityReport {
  bool passes = false;
  std::size_t codimension_defect = 0;
  std::vector<Monomial> witnesses;          // basis monomials completing the span
  std::vector<std::string> witness_names;
  unsigned jet_degree = 0;
};

struct DeterminacyResult {
  std::size_t dimension = 0;  // at the requested degree
  bool infinite = false;      // the defect grows from degree l to l + 1
};

// Default truncation degree: twice the polynomial degree of f.
unsigned default_jet_degree(const PolyExpr& f, std::size_t k);

// f and the dFdx entries are expressions in q1..qk. Throws NotSingularGerm
// unless f(0) = 0 and grad f(0) = 0.
VersalityReport lagrangian_stability_check(const PolyExpr& f, const std::vector<PolyExpr>& dfdx,
                                           unsigned jet_degree, std::size_t k,
                                           double rank_epsilon = kDefaultRankEpsilon);

DeterminacyResult k_determinacy_dimension(const PolyExpr& f, unsigned jet_degree, std::size_t k,
                                          double rank_epsilon = kDefaultRankEpsilon);

// Criterion in the (q, t) jet space for f - t; t is the variable after qk.
VersalityReport sp_plus_versality_check(const PolyExpr& f, const std::vector<PolyExpr>& dfdx,
                                        unsigned jet_degree, std::size_t k,
                                        double rank_epsilon = kDefaultRankEpsilon);

// Number of q variables referenced by the expressions (at least 1).
std::size_t inferred_variable_count(const PolyExpr& f, const std::vector<PolyExpr>& dfdx);

}  // namespace lagfront
