#include "lagfront/versality.hpp"

#include <algorithm>
#include <numeric>

#include "lagfront/errors.hpp"

namespace lagfront {

namespace {

constexpr double kResidualFloor = 1e-6;

// All exponent vectors of total degree d, earlier variables' powers first.
void monomials_of_degree(std::size_t vars, unsigned d, Monomial& current, std::size_t slot,
                         std::vector<Monomial>& out) {
  if (slot + 1 == vars) {
    current[slot] = static_cast<std::uint16_t>(d);
    out.push_back(current);
    return;
  }
  for (unsigned e = d + 1; e-- > 0;) {
    current[slot] = static_cast<std::uint16_t>(e);
    monomials_of_degree(vars, d - e, current, slot + 1, out);
  }
}

unsigned monomial_degree(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0u);
}

void require_singular(const Polynomial& f) {
  if (!f.constant_term().is_zero()) throw NotSingularGerm("f(0) is not zero");
  for (std::size_t i = 0; i < f.num_vars(); ++i) {
    if (!f.derivative(i).constant_term().is_zero()) throw NotSingularGerm("grad f(0) is not zero");
  }
}

// Unit-normalised coefficient columns of the generators.
Matrix span_matrix(const JetSpace& jet, const std::vector<Polynomial>& generators) {
  std::vector<Vector> cols;
  for (const auto& g : generators) {
    Vector c = jet.project(g);
    const double n = c.norm();
    if (n > 0.0) cols.push_back(c / n);
  }
  Matrix m(static_cast<Eigen::Index>(jet.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return m;
}

// Greedy witnesses: basis monomials, in order, that are not yet in the span.
VersalityReport report_for(const JetSpace& jet, const std::vector<Polynomial>& generators,
                           const VariableSet& names, double rank_epsilon) {
  const Matrix m = span_matrix(jet, generators);
  const auto n = static_cast<Eigen::Index>(jet.size());
  Matrix basis(n, 0);
  if (m.cols() > 0) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Vector s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rank_epsilon * s(0)) ++r;
    basis = svd.matrixU().leftCols(r);
  }
  VersalityReport report;
  report.jet_degree = jet.degree_bound();
  report.codimension_defect = jet.size() - static_cast<std::size_t>(basis.cols());
  for (std::size_t i = 0; i < jet.size() && report.witnesses.size() < report.codimension_defect; ++i) {
    Vector e = Vector::Zero(n);
    e(static_cast<Eigen::Index>(i)) = 1.0;
    const Vector residual = e - basis * (basis.transpose() * e);
    if (residual.norm() <= kResidualFloor) continue;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = residual.normalized();
    report.witnesses.push_back(jet.monomial(i));
    report.witness_names.push_back(jet.name(i, names));
  }
  report.passes = report.codimension_defect == 0;
  return report;
}

// Products of every basis monomial with g.
void add_multiples(const JetSpace& jet, const Polynomial& g, std::vector<Polynomial>& out) {
  for (std::size_t i = 0; i < jet.size(); ++i) out.push_back(jet.monomial_polynomial(i) * g);
}

Polynomial lift(const PolyExpr& e, std::size_t vars) { return Polynomial::from_expression(e, vars); }

void check_variables(const PolyExpr& e, std::size_t k) {
  if (e.max_variable_index() >= static_cast<std::ptrdiff_t>(k)) {
    throw DomainError("expression uses more than " + std::to_string(k) + " variables");
  }
}

}  // namespace

JetSpace::JetSpace(std::size_t vars, unsigned degree_bound) : vars_(vars), degree_bound_(degree_bound) {
  if (vars == 0) throw DomainError("jet space needs at least one variable");
  Monomial current(vars, 0);
  for (unsigned d = 0; d <= degree_bound; ++d) monomials_of_degree(vars, d, current, 0, basis_);
  for (std::size_t i = 0; i < basis_.size(); ++i) index_[basis_[i]] = i;
}

std::size_t JetSpace::index_of(const Monomial& m) const {
  const auto it = index_.find(m);
  if (it == index_.end()) throw DomainError("monomial outside the jet space");
  return it->second;
}

Vector JetSpace::project(const Polynomial& p) const {
  if (p.num_vars() != vars_) throw DomainError("polynomial has the wrong number of variables");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(size()));
  for (const auto& [m, c] : p.terms()) {
    if (monomial_degree(m) > degree_bound_) continue;
    out(static_cast<Eigen::Index>(index_of(m))) = c.to_double();
  }
  return out;
}

Polynomial JetSpace::monomial_polynomial(std::size_t index) const {
  Polynomial p = Polynomial::constant(vars_, 1);
  const Monomial& m = basis_.at(index);
  for (std::size_t v = 0; v < vars_; ++v) {
    if (m[v] > 0) p = p * Polynomial::variable(vars_, v).pow(m[v]);
  }
  return p;
}

std::string JetSpace::name(std::size_t index, const VariableSet& names) const {
  const Monomial& m = basis_.at(index);
  std::string out;
  for (std::size_t v = 0; v < vars_; ++v) {
    if (m[v] == 0) continue;
    if (!out.empty()) out += "*";
    out += names.name(v);
    if (m[v] > 1) out += "^" + std::to_string(m[v]);
  }
  return out.empty() ? "1" : out;
}

unsigned default_jet_degree(const PolyExpr& f, std::size_t k) {
  return static_cast<unsigned>(std::max(2, 2 * lift(f, k).degree()));
}

std::size_t inferred_variable_count(const PolyExpr& f, const std::vector<PolyExpr>& dfdx) {
  std::ptrdiff_t top = f.max_variable_index();
  for (const auto& e : dfdx) top = std::max(top, e.max_variable_index());
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(top + 1, 1));
}

VersalityReport lagrangian_stability_check(const PolyExpr& f, const std::vector<PolyExpr>& dfdx,
                                           unsigned jet_degree, std::size_t k, double rank_epsilon) {
  check_variables(f, k);
  for (const auto& e : dfdx) check_variables(e, k);
  const Polynomial fp = lift(f, k);
  require_singular(fp);
  const JetSpace jet(k, jet_degree);
  std::vector<Polynomial> gens;
  for (std::size_t i = 0; i < k; ++i) add_multiples(jet, fp.derivative(i), gens);
  for (const auto& e : dfdx) gens.push_back(lift(e, k));
  gens.push_back(Polynomial::constant(k, 1));
  return report_for(jet, gens, VariableSet::indexed("q", k), rank_epsilon);
}

DeterminacyResult k_determinacy_dimension(const PolyExpr& f, unsigned jet_degree, std::size_t k,
                                          double rank_epsilon) {
  check_variables(f, k);
  const Polynomial fp = lift(f, k);
  require_singular(fp);
  auto defect = [&](unsigned degree) {
    const JetSpace jet(k, degree);
    std::vector<Polynomial> gens;
    for (std::size_t i = 0; i < k; ++i) add_multiples(jet, fp.derivative(i), gens);
    add_multiples(jet, fp, gens);
    return report_for(jet, gens, VariableSet::indexed("q", k), rank_epsilon).codimension_defect;
  };
  DeterminacyResult out;
  out.dimension = defect(jet_degree);
  out.infinite = defect(jet_degree + 1) > out.dimension;
  return out;
}

VersalityReport sp_plus_versality_check(const PolyExpr& f, const std::vector<PolyExpr>& dfdx,
                                        unsigned jet_degree, std::size_t k, double rank_epsilon) {
  check_variables(f, k);
  for (const auto& e : dfdx) check_variables(e, k);
  require_singular(lift(f, k));
  const std::size_t vars = k + 1;
  const Polynomial fp = lift(f, vars);
  const JetSpace jet(vars, jet_degree);
  std::vector<Polynomial> gens;
  for (std::size_t i = 0; i < k; ++i) add_multiples(jet, fp.derivative(i), gens);
  add_multiples(jet, fp - Polynomial::variable(vars, k), gens);
  for (const auto& e : dfdx) gens.push_back(lift(e, vars));
  gens.push_back(Polynomial::constant(vars, 1));
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("q" + std::to_string(i));
  names.push_back("t");
  return report_for(jet, gens, VariableSet(std::move(names)), rank_epsilon);
}

}  // namespace lagfront
