#include "lagfront/pdechar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "lagfront/errors.hpp"
#include "lagfront/parallel.hpp"

namespace lagfront {

namespace {

struct Layout {
  Eigen::Index n;
  Eigen::Index size() const { return n + 1 + n * n + n; }
};

Vector pack(const Layout& l, const Vector& x, double y, const Matrix& j, const Vector& w) {
  Vector s(l.size());
  s.head(l.n) = x;
  s(l.n) = y;
  s.segment(l.n + 1, l.n * l.n) = Eigen::Map<const Vector>(j.data(), l.n * l.n);
  s.tail(l.n) = w;
  return s;
}

StripSample unpack(const Layout& l, const Vector& s, double t) {
  StripSample out;
  out.t = t;
  out.x = s.head(l.n);
  out.y = s(l.n);
  out.dx_dx0 = Eigen::Map<const Matrix>(s.data() + l.n + 1, l.n, l.n);
  out.dy_dx0 = s.tail(l.n);
  return out;
}

Vector coefficient_point(const Vector& x, double y, double t) {
  Vector p(x.size() + 2);
  p << x, y, t;
  return p;
}

Vector rhs(const QuasiLinearPDE& pde, const Layout& l, const Vector& s, double t) {
  const Vector x = s.head(l.n);
  const double y = s(l.n);
  const Eigen::Map<const Matrix> j(s.data() + l.n + 1, l.n, l.n);
  const Vector w = s.tail(l.n);
  const Vector p = coefficient_point(x, y, t);

  Vector a(l.n);
  Matrix ax(l.n, l.n);
  Vector ay(l.n);
  for (Eigen::Index i = 0; i < l.n; ++i) {
    a(i) = pde.a[static_cast<std::size_t>(i)](p);
    const Vector g = grad(pde.a[static_cast<std::size_t>(i)], p);
    ax.row(i) = g.head(l.n).transpose();
    ay(i) = g(l.n);
  }
  const double b = pde.b(p);
  const Vector gb = grad(pde.b, p);

  const Matrix dj = ax * j + ay * w.transpose();
  const Vector dw = j.transpose() * gb.head(l.n) + gb(l.n) * w;
  return pack(l, a, b, dj, dw);
}

Vector rk4_step(const QuasiLinearPDE& pde, const Layout& l, const Vector& s, double t, double h) {
  const Vector k1 = rhs(pde, l, s, t);
  const Vector k2 = rhs(pde, l, s + 0.5 * h * k1, t + 0.5 * h);
  const Vector k3 = rhs(pde, l, s + 0.5 * h * k2, t + 0.5 * h);
  const Vector k4 = rhs(pde, l, s + h * k3, t + h);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<double> blowup_limits(const QuasiLinearPDE& pde) {
  std::vector<double> out(pde.n + 1, 1e8);
  for (std::size_t i = 0; i < pde.box.size() && i < out.size(); ++i) {
    out[i] = 10.0 * std::max(std::abs(pde.box[i].lo), std::abs(pde.box[i].hi));
  }
  return out;
}

void check_blowup(const Vector& s, Eigen::Index n, const std::vector<double>& limits, double t) {
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (!std::isfinite(s(i)) || std::abs(s(i)) > limits[static_cast<std::size_t>(i)]) {
      throw BlowUp("characteristic left ten times the box at t = " + std::to_string(t));
    }
  }
}

Vector state_of(const StripSample& s) {
  const Layout l{s.x.size()};
  return pack(l, s.x, s.y, s.dx_dx0, s.dy_dx0);
}

}  // namespace

VariableSet QuasiLinearPDE::coefficient_variables(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  names.push_back("y");
  names.push_back("t");
  return VariableSet(std::move(names));
}

namespace pde_catalog {

QuasiLinearPDE burgers(ScalarField phi, Box box) {
  const VariableSet vars = QuasiLinearPDE::coefficient_variables(1);
  return {1, {ScalarField::from_expression(parse_expression("2*y", vars), 3)},
          ScalarField::constant(3, 0.0), std::move(phi), std::move(box)};
}

QuasiLinearPDE transport(double speed, ScalarField phi, Box box) {
  return {1, {ScalarField::constant(3, speed)}, ScalarField::constant(3, 0.0), std::move(phi),
          std::move(box)};
}

QuasiLinearPDE stretching_transport(ScalarField phi, Box box) {
  const VariableSet vars = QuasiLinearPDE::coefficient_variables(1);
  return {1, {ScalarField::from_expression(parse_expression("x1", vars), 3)},
          ScalarField::constant(3, 0.0), std::move(phi), std::move(box)};
}

}  // namespace pde_catalog

std::vector<double> GeometricSolutionSheet::min_jacobian_det() const {
  std::vector<double> out(times.size(), std::numeric_limits<double>::infinity());
  for (const auto& strip : strips) {
    for (std::size_t j = 0; j < strip.trajectory.size(); ++j) {
      out[j] = std::min(out[j], strip.trajectory[j].jacobian_det());
    }
  }
  return out;
}

std::size_t GeometricSolutionSheet::time_index(double t) const {
  if (times.empty()) throw DomainError("empty sheet");
  const double k = std::round((t - times.front()) / dt);
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(times.size() - 1)));
}

GeometricSolutionSheet integrate_characteristics(const QuasiLinearPDE& pde,
                                                 const std::vector<Vector>& x0_grid,
                                                 Interval t_range, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_range.hi > t_range.lo) || !std::isfinite(t_range.lo) || !std::isfinite(t_range.hi)) {
    throw DomainError("time range must be finite and non-empty");
  }
  if (pde.a.size() != pde.n) throw DomainError("need one coefficient a_i per space variable");
  const Layout l{static_cast<Eigen::Index>(pde.n)};
  const auto steps = static_cast<std::size_t>(std::ceil((t_range.hi - t_range.lo) / dt - 1e-9));
  const double h = (t_range.hi - t_range.lo) / static_cast<double>(steps);
  const std::vector<double> limits = blowup_limits(pde);

  GeometricSolutionSheet sheet;
  sheet.pde = pde;
  sheet.dt = h;
  for (std::size_t j = 0; j <= steps; ++j) sheet.times.push_back(t_range.lo + h * static_cast<double>(j));
  sheet.strips.resize(x0_grid.size());

  parallel_for(x0_grid.size(), [&](std::size_t i) {
    const Vector& x0 = x0_grid[i];
    if (x0.size() != l.n) throw DomainError("initial point has wrong dimension");
    CharacteristicStrip& strip = sheet.strips[i];
    strip.x0 = x0;
    Vector s = pack(l, x0, pde.phi(x0), Matrix::Identity(l.n, l.n), grad(pde.phi, x0));
    strip.trajectory.reserve(steps + 1);
    strip.trajectory.push_back(unpack(l, s, sheet.times[0]));
    for (std::size_t j = 0; j < steps; ++j) {
      s = rk4_step(pde, l, s, sheet.times[j], h);
      check_blowup(s, l.n, limits, sheet.times[j + 1]);
      strip.trajectory.push_back(unpack(l, s, sheet.times[j + 1]));
    }
  });
  return sheet;
}

std::optional<double> breaking_time(const GeometricSolutionSheet& sheet, double tolerance) {
  if (sheet.strips.empty()) return std::nullopt;
  const Layout l{static_cast<Eigen::Index>(sheet.pde.n)};
  for (std::size_t j = 1; j < sheet.times.size(); ++j) {
    std::optional<double> first;
    for (const auto& strip : sheet.strips) {
      const StripSample& before = strip.trajectory[j - 1];
      if (before.jacobian_det() <= 0.0 || strip.trajectory[j].jacobian_det() > 0.0) continue;
      const Vector s0 = state_of(before);
      double lo = 0.0, hi = sheet.dt;
      while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const StripSample trial = unpack(l, rk4_step(sheet.pde, l, s0, before.t, mid), before.t + mid);
        if (trial.jacobian_det() > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double t = before.t + 0.5 * (lo + hi);
      if (!first || t < *first) first = t;
    }
    if (first) return first;
  }
  return std::nullopt;
}

std::size_t multivalued_count(const GeometricSolutionSheet& sheet, double x_hat, double t) {
  if (sheet.pde.n != 1) throw DomainError("multivalued_count needs n = 1");
  const std::size_t j = sheet.time_index(t);
  std::size_t count = 0;
  int prev = 0;
  bool first = true;
  for (const auto& strip : sheet.strips) {
    const double v = strip.trajectory[j].x(0) - x_hat;
    const int sign = (v > 0.0) - (v < 0.0);
    if (first) {
      count += sign == 0 ? 1 : 0;
      first = false;
    } else if (sign == 0) {
      count += prev != 0 ? 1 : 0;
    } else if (prev != 0 && sign != prev) {
      ++count;
    }
    prev = sign;
  }
  return count;
}

double tangency_check(const QuasiLinearPDE& pde, const ScalarField& f,
                      const std::vector<Vector>& samples) {
  const auto n = static_cast<Eigen::Index>(pde.n);
  double worst = 0.0;
  for (const auto& p : samples) {
    const Vector g = grad(f, p);
    double r = g(n + 1) + pde.b(p) * g(n);
    for (Eigen::Index i = 0; i < n; ++i) r += pde.a[static_cast<std::size_t>(i)](p) * g(i);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

namespace {

// Corner data of the maps (x0, t) -> x and (x0, t) -> y.
struct Corner {
  double v[2];    // x, y
  double s[2];    // d/dx0
  double t[2];    // d/dt
  double st[2];   // d2/dx0 dt
};

struct Hermite {
  double h[4];   // h00, h10, h01, h11
  double dh[4];

  explicit Hermite(double u) {
    const double u2 = u * u, u3 = u2 * u;
    h[0] = 2 * u3 - 3 * u2 + 1;
    h[1] = u3 - 2 * u2 + u;
    h[2] = -2 * u3 + 3 * u2;
    h[3] = u3 - u2;
    dh[0] = 6 * u2 - 6 * u;
    dh[1] = 3 * u2 - 4 * u + 1;
    dh[2] = -6 * u2 + 6 * u;
    dh[3] = 3 * u2 - 2 * u;
  }
};

class SurfacePatch {
 public:
  SurfacePatch(const GeometricSolutionSheet& sheet, std::size_t j0, std::size_t j1)
      : j0_(j0), times_(sheet.times.begin() + static_cast<std::ptrdiff_t>(j0),
                       sheet.times.begin() + static_cast<std::ptrdiff_t>(j1) + 1) {
    const auto& pde = sheet.pde;
    for (const auto& strip : sheet.strips) x0_.push_back(strip.x0(0));
    data_.resize(sheet.strips.size() * times_.size());
    for (std::size_t i = 0; i < sheet.strips.size(); ++i) {
      for (std::size_t j = 0; j < times_.size(); ++j) {
        const StripSample& s = sheet.strips[i].trajectory[j0 + j];
        if (s.jacobian_det() <= 0.0) throw DomainError("the sheet folds inside the time window");
        const Vector p = coefficient_point(s.x, s.y, s.t);
        const Vector ga = grad(pde.a[0], p);
        const Vector gb = grad(pde.b, p);
        const double jx = s.dx_dx0(0, 0), wy = s.dy_dx0(0);
        Corner& c = data_[i * times_.size() + j];
        c.v[0] = s.x(0);
        c.v[1] = s.y;
        c.s[0] = jx;
        c.s[1] = wy;
        c.t[0] = pde.a[0](p);
        c.t[1] = pde.b(p);
        c.st[0] = ga(0) * jx + ga(1) * wy;
        c.st[1] = gb(0) * jx + gb(1) * wy;
      }
    }
  }

  struct Eval {
    double y, y_x, y_t;
  };

  Eval operator()(double x, double t) const {
    if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12) throw DomainError("t outside the patch");
    const double dt = times_[1] - times_[0];
    const std::size_t j = std::min(static_cast<std::size_t>(std::max(0.0, (t - times_.front()) / dt)),
                                   times_.size() - 2);
    const double v = std::clamp((t - times_[j]) / dt, 0.0, 1.0);

    // Strip positions at time t are increasing before the fold.
    auto x_at = [&](std::size_t i) {
      const Hermite hv(v);
      const Corner& a = at(i, j);
      const Corner& b = at(i, j + 1);
      return hv.h[0] * a.v[0] + dt * hv.h[1] * a.t[0] + hv.h[2] * b.v[0] + dt * hv.h[3] * b.t[0];
    };
    std::size_t lo = 0, hi = x0_.size() - 1;
    if (x < x_at(lo) || x > x_at(hi)) throw DomainError("x outside the patch");
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_at(mid) <= x ? lo : hi) = mid;
    }
    const double ds = x0_[hi] - x0_[lo];
    double u = (x - x_at(lo)) / (x_at(hi) - x_at(lo));
    double out[2][3] = {};
    for (int iter = 0; iter < 30; ++iter) {
      evaluate(lo, j, u, v, ds, dt, out);
      const double step = (out[0][0] - x) / (out[0][1] * ds);
      u = std::clamp(u - step, 0.0, 1.0);
      if (std::abs(step) < 1e-15) break;
    }
    evaluate(lo, j, u, v, ds, dt, out);
    // out[k] = {value, d/dx0, d/dt} for k = x, y.
    const double y_x = out[1][1] / out[0][1];
    const double y_t = out[1][2] - y_x * out[0][2];
    return {out[1][0], y_x, y_t};
  }

 private:
  const Corner& at(std::size_t i, std::size_t j) const { return data_[i * times_.size() + j]; }

  void evaluate(std::size_t i, std::size_t j, double u, double v, double ds, double dt,
                double out[2][3]) const {
    const Hermite hu(u), hv(v);
    const Corner* c[2][2] = {{&at(i, j), &at(i, j + 1)}, {&at(i + 1, j), &at(i + 1, j + 1)}};
    for (int k = 0; k < 2; ++k) {
      double val = 0, du = 0, dv = 0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const Corner& q = *c[a][b];
          const int ia0 = 2 * a, ia1 = 2 * a + 1, ib0 = 2 * b, ib1 = 2 * b + 1;
          val += hu.h[ia0] * hv.h[ib0] * q.v[k] + ds * hu.h[ia1] * hv.h[ib0] * q.s[k] +
                 dt * hu.h[ia0] * hv.h[ib1] * q.t[k] + ds * dt * hu.h[ia1] * hv.h[ib1] * q.st[k];
          du += hu.dh[ia0] * hv.h[ib0] * q.v[k] + ds * hu.dh[ia1] * hv.h[ib0] * q.s[k] +
                dt * hu.dh[ia0] * hv.h[ib1] * q.t[k] + ds * dt * hu.dh[ia1] * hv.h[ib1] * q.st[k];
          dv += hu.h[ia0] * hv.dh[ib0] * q.v[k] + ds * hu.h[ia1] * hv.dh[ib0] * q.s[k] +
                dt * hu.h[ia0] * hv.dh[ib1] * q.t[k] + ds * dt * hu.h[ia1] * hv.dh[ib1] * q.st[k];
        }
      }
      out[k][0] = val;
      out[k][1] = du / ds;
      out[k][2] = dv / dt;
    }
  }

  std::size_t j0_;
  std::vector<double> times_;
  std::vector<double> x0_;
  std::vector<Corner> data_;
};

}  // namespace

ScalarField solution_surface(const GeometricSolutionSheet& sheet, Interval t_window) {
  if (sheet.pde.n != 1) throw DomainError("solution_surface needs n = 1");
  if (sheet.strips.size() < 2 || sheet.times.size() < 2) throw DomainError("sheet is too small");
  const std::size_t j0 = sheet.time_index(std::max(t_window.lo, sheet.times.front()));
  std::size_t j1 = sheet.time_index(std::min(t_window.hi, sheet.times.back()));
  if (j1 <= j0) j1 = std::min(j0 + 1, sheet.times.size() - 1);
  if (j1 <= j0) throw DomainError("empty time window");
  auto patch = std::make_shared<const SurfacePatch>(sheet, j0, j1);
  auto value = [patch](const Vector& p) { return p(1) - (*patch)(p(0), p(2)).y; };
  auto gradient = [patch](const Vector& p) {
    const auto e = (*patch)(p(0), p(2));
    Vector g(3);
    g << -e.y_x, 1.0, -e.y_t;
    return g;
  };
  return ScalarField(3, value, {}, gradient, {}, "solution surface");
}

}  // namespace lagfront
