#include "u1lab/symmetry.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "u1lab/error.hpp"

namespace u1lab {
namespace {

constexpr double kPi = std::numbers::pi;

bool near_multiple_of_pi(double x, double tol) {
  const double r = x / kPi;
  return std::abs(r - std::round(r)) < tol;
}

std::optional<Fraction> nearest_commensurate(double frak, int m_max) {
  if (std::abs(frak) >= 1.0) return std::nullopt;
  const double target = std::acos(frak) / kPi;
  std::optional<Fraction> best;
  double best_dist = 2.0;
  for (int m = 2; m <= m_max; ++m) {
    for (int p = 1; p < m; ++p) {
      if (std::gcd(p, m) != 1) continue;
      const double d = std::abs(static_cast<double>(p) / m - target);
      if (d < best_dist - 1e-15) {
        best_dist = d;
        best = Fraction{p, m};
      }
    }
  }
  return best;
}

// prod over sites of (c I + sh Z) restricted to [first, last]; `sign` flips sh.
PauliPoly z_exponential(int length, int first, int last, double log_q, double sign) {
  PauliPoly out = PauliPoly::identity(length);
  const double c = std::cosh(0.5 * log_q);
  const double sh = sign * std::sinh(0.5 * log_q);
  for (int site = first; site <= last; ++site) {
    PauliPoly factor = PauliPoly::identity(length, c);
    factor.add(PauliString::single(length, site, Letter::Z), sh);
    out = out * factor;
  }
  return out;
}

}  // namespace

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::phase_one: return "phase-I";
    case Phase::phase_two: return "phase-II";
    case Phase::critical: return "critical";
    case Phase::localized: return "localized";
    case Phase::free_point: return "free";
  }
  return "?";
}

PhasePoint classify(const GateParams& p, double tol) {
  PhasePoint pt;
  pt.params = p;
  pt.frak_d = p.frak_d();
  if (near_multiple_of_pi(2.0 * p.j_eff() * p.tau, tol) || !pt.frak_d) {
    pt.phase = Phase::localized;
  } else if (std::abs(std::abs(*pt.frak_d) - 1.0) < tol) {
    pt.phase = Phase::critical;
  } else if (std::abs(*pt.frak_d) < tol) {
    pt.phase = Phase::free_point;
  } else if (std::abs(*pt.frak_d) > 1.0) {
    pt.phase = Phase::phase_one;
  } else {
    pt.phase = Phase::phase_two;
    pt.nearest_rational = nearest_commensurate(*pt.frak_d, 12);
  }
  return pt;
}

cplx screw_phase(const GateParams& p) {
  const auto frak = p.frak_d();
  if (!frak) throw DomainError("phase undefined where sin(2 tau J) = 0");
  const double c2 = std::cos(2.0 * p.tau * p.delta);
  if (std::abs(c2) < 1e-14) throw DomainError("phase undefined where cos(2 tau delta) = 0");
  const double j = p.j_eff();
  return {*frak * std::cos(2.0 * p.tau * j) / c2, -p.b / std::sqrt(1.0 + p.d * p.d) * std::tan(2.0 * p.tau * p.delta)};
}

double screw_phase_tangent(const GateParams& p) {
  const double j = p.j_eff();
  double a = std::atan(-p.b / j * std::tan(2.0 * p.tau * j));
  if (a <= -kPi / 2) a += kPi;
  return a;
}

ScrewGenerator screw_generator(double theta, cplx e_i_alpha, int length) {
  if (length < 2 || length % 2 != 0) throw ConfigError("screw generator needs even L >= 2");
  ScrewGenerator g{theta, e_i_alpha, length, PauliPoly(length)};
  const cplx relative = std::polar(1.0, -2.0 * theta) * e_i_alpha;
  for (int l = 1; 2 * l <= length; ++l) {
    const cplx cell = std::polar(1.0, -4.0 * l * theta);
    g.s_plus += cell * PauliPoly::sigma_plus(length, 2 * l - 1);
    g.s_plus += (cell * relative) * PauliPoly::sigma_plus(length, 2 * l);
  }
  return g;
}

ScrewGenerator screw_generator(const GateParams& p, int length, double tol) {
  const PhasePoint pt = classify(p, tol);
  if (pt.phase != Phase::critical) {
    throw SymmetryError("not critical: screw SU(2) requires |frak_d| = 1 (got " +
                        std::string(phase_name(pt.phase)) + ")");
  }
  const cplx e = screw_phase(p);
  if (std::abs(std::abs(e) - 1.0) > 1e3 * tol) throw SymmetryError("phase equation has no unit-modulus solution");
  return screw_generator(p.theta(), e / std::abs(e), length);
}

double commutator_norm(const DenseOp& a, const DenseOp& b) {
  return (a * b - b * a).norm() / std::sqrt(static_cast<double>(a.rows()));
}

BoundaryResidual almost_commutation_residual(const PauliPoly& generator, const DensePropagator& u) {
  if (u.boundary != Boundary::open) throw ConfigError("boundary decomposition requires OBC");
  if (u.length > 12) throw ResourceError("residual evaluation limited to L <= 12");
  if (generator.length() != u.length) throw ShapeError("generator and propagator sizes differ");
  const DenseOp g = to_dense(generator);
  const PauliPoly r = poly_from_dense(u.matrix.adjoint() * g * u.matrix - g);

  BoundaryResidual out{PauliPoly(u.length), PauliPoly(u.length)};
  for (const auto& [s, c] : r.terms()) {
    const bool edge = s.letter(1) != Letter::I || s.letter(u.length) != Letter::I;
    (edge ? out.boundary : out.bulk).add(s, c);
  }
  out.bulk_norm = out.bulk.norm();
  out.boundary_norm = out.boundary.norm();
  out.total_norm = std::hypot(out.bulk_norm, out.boundary_norm);
  return out;
}

std::vector<QGroupPoint> qgroup_points(const GateParams& p, double k_max) {
  std::vector<QGroupPoint> out;
  const double j = p.j_eff();
  for (int s : {-1, 1}) {
    const double den = std::abs(j - s * p.delta);
    if (den < 1e-12) continue;
    for (int twice_k = 1; twice_k <= static_cast<int>(std::floor(2.0 * k_max + 1e-12)); ++twice_k) {
      QGroupPoint q;
      q.k = 0.5 * twice_k;
      q.s = s;
      q.tau = q.k * kPi / den;
      q.degenerate = std::abs(std::sin(2.0 * q.tau * j)) < 1e-12;
      out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end(), [](const QGroupPoint& a, const QGroupPoint& b) { return a.tau < b.tau; });
  return out;
}

double q_number(double x, double q) {
  if (std::abs(q - 1.0) < 1e-12) return x;
  return (std::pow(q, x) - std::pow(q, -x)) / (q - 1.0 / q);
}

PauliPoly q_number_of_z(int length, double q) {
  const Eigen::Index dim = Eigen::Index{1} << length;
  DenseOp d = DenseOp::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int z = length - 2 * std::popcount(static_cast<std::uint64_t>(i));
    d(i, i) = q_number(z, q);
  }
  return poly_from_dense(d);
}

QGroupGenerator qgroup_generator(const GateParams& p, int length, std::optional<int> branch, double tol) {
  if (length < 1) throw ConfigError("generator needs L >= 1");
  if (branch && *branch != 1 && *branch != -1) throw DomainError("branch must be +1 or -1");
  const double j = p.j_eff();
  QGroupGenerator g;
  g.length = length;
  g.theta = p.theta();
  if (std::abs(p.delta * p.delta - j * j) < tol) {
    g.s = branch.value_or(p.delta >= 0 ? 1 : -1);
  } else {
    const double den = std::sin(2.0 * p.tau * j);
    if (std::abs(den) < 1e-12) throw SymmetryError("not a U_q point: sin(2 tau J) = 0");
    const double ratio = std::sin(2.0 * p.tau * p.delta) / den;
    if (std::abs(std::abs(ratio) - 1.0) > tol) throw SymmetryError("not a U_q point");
    // |ratio| = 1 means 2 tau (J - s delta) = n pi for at least one sign s.
    std::optional<int> found;
    for (int s : {-1, 1}) {
      if (branch && s != *branch) continue;
      if (!found && near_multiple_of_pi(2.0 * p.tau * (j - s * p.delta), 1e-7)) found = s;
    }
    if (!found) throw SymmetryError("not a U_q point on the requested branch");
    g.s = *found;
    g.k = std::abs(p.tau * (j - g.s * p.delta)) / kPi;
  }
  const double c = j / std::sqrt(1.0 + p.d * p.d);
  const double root = std::sqrt(std::max(0.0, c * c - 1.0));
  const double big = c + root;
  g.q = (g.s * p.b > 0) ? big : 1.0 / big;
  const double log_q = std::log(g.q);

  g.s_plus = PauliPoly(length);
  const double shift = g.theta + 0.25 * kPi * (1 - g.s);
  for (int l = 1; l <= length; ++l) {
    const PauliPoly left = z_exponential(length, 1, l - 1, log_q, -1.0);
    const PauliPoly right = z_exponential(length, l + 1, length, log_q, 1.0);
    const cplx phase = std::polar(1.0, -2.0 * l * shift);
    g.s_plus += phase * (left * PauliPoly::sigma_plus(length, l) * right);
  }
  g.s_minus = g.s_plus.adjoint();
  return g;
}

std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi, int samples,
                               const std::function<double(double)>& pole) {
  std::vector<double> roots;
  if (!(hi > lo) || samples < 2) return roots;
  const double step = (hi - lo) / (samples - 1);
  // Stretches where f stays at rounding level (identically satisfied
  // conditions) are not reported as roots.
  constexpr double kFlat = 1e-12;
  double xa = lo, fa = f(lo);
  if (fa == 0.0) roots.push_back(lo);
  for (int i = 1; i < samples; ++i) {
    const double xb = lo + i * step;
    const double fb = f(xb);
    if (std::max(std::abs(fa), std::abs(fb)) < kFlat) {
      // flat
    } else if (fb == 0.0) {
      roots.push_back(xb);
    } else if (fa != 0.0 && std::signbit(fa) != std::signbit(fb) && std::isfinite(fa) && std::isfinite(fb)) {
      const bool across_pole = pole && std::signbit(pole(xa)) != std::signbit(pole(xb));
      if (!across_pole) {
        boost::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            f, xa, xb, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
        roots.push_back(0.5 * (r.first + r.second));
      }
    }
    xa = xb;
    fa = fb;
  }
  return roots;
}

namespace {

double frak_value(const GateParams& base, double tau) {
  const GateParams p = base.with_tau(tau);
  const double j = p.j_eff();
  return std::sin(2.0 * tau * p.delta) / std::sin(2.0 * tau * j) * j / std::sqrt(1.0 + p.d * p.d);
}

int scan_samples(const GateParams& base, double lo, double hi) {
  // Several probes per half period of the faster oscillation.
  const double w = 2.0 * std::max(base.j_eff(), std::abs(base.delta));
  return std::max(2000, static_cast<int>(200.0 * (hi - lo) * w / kPi));
}

}  // namespace

std::vector<FractalPoint> fractal_rationals(const GateParams& base, double tau_lo, double tau_hi, int m_max) {
  std::vector<FractalPoint> out;
  const auto pole = [&](double t) { return std::sin(2.0 * t * base.j_eff()); };
  const int samples = scan_samples(base, tau_lo, tau_hi);
  for (int m = 2; m <= m_max; ++m) {
    for (int p = 1; p < m; ++p) {
      if (std::gcd(p, m) != 1) continue;
      const double target = std::cos(kPi * p / m);
      const auto f = [&](double t) { return frak_value(base, t) - target; };
      for (double t : find_roots(f, tau_lo, tau_hi, samples, pole)) out.push_back({{p, m}, target, t});
    }
  }
  std::sort(out.begin(), out.end(), [](const FractalPoint& a, const FractalPoint& b) { return a.tau < b.tau; });
  return out;
}

std::vector<double> critical_taus(const GateParams& base, double tau_lo, double tau_hi) {
  std::vector<double> out;
  const auto pole = [&](double t) { return std::sin(2.0 * t * base.j_eff()); };
  const int samples = scan_samples(base, tau_lo, tau_hi);
  for (double target : {-1.0, 1.0}) {
    const auto f = [&](double t) { return frak_value(base, t) - target; };
    for (double t : find_roots(f, tau_lo, tau_hi, samples, pole)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> localization_taus(const GateParams& base, double tau_lo, double tau_hi) {
  std::vector<double> out;
  const double unit = kPi / (2.0 * base.j_eff());
  for (long k = std::max(1L, static_cast<long>(std::ceil(tau_lo / unit - 1e-12))); k * unit <= tau_hi + 1e-12; ++k) {
    out.push_back(k * unit);
  }
  return out;
}

std::vector<std::pair<double, double>> ballistic_windows(const GateParams& base, double tau_lo, double tau_hi) {
  std::vector<double> edges = critical_taus(base, tau_lo, tau_hi);
  for (double t : localization_taus(base, tau_lo, tau_hi)) edges.push_back(t);
  edges.push_back(tau_lo);
  edges.push_back(tau_hi);
  std::sort(edges.begin(), edges.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    if (b - a < 1e-12) continue;
    if (classify(base.with_tau(0.5 * (a + b))).phase != Phase::phase_two) continue;
    if (!out.empty() && std::abs(out.back().second - a) < 1e-12) out.back().second = b;
    else out.emplace_back(a, b);
  }
  return out;
}

std::vector<MapIdentity> parameter_map_residuals(const GateParams& p, int length) {
  const auto prop = [&](const GateParams& q) { return build_propagator(q, length, Boundary::open).matrix; };
  const DenseOp u = prop(p);
  std::vector<MapIdentity> out;

  const double s = std::sqrt(1.0 + p.d * p.d);
  const DenseOp w = twist_operator(p.theta(), length);
  out.push_back({"twist", distance_up_to_phase(w * prop({p.delta / s, 0.0, p.b / s, p.m / s, p.tau * s}) * w.adjoint(), u)});

  const DenseOp h = half_pi_twist(length);
  out.push_back({"half_pi_twist", distance_up_to_phase(h * u * h, prop({-p.delta, p.d, -p.b, -p.m, -p.tau}))});

  const DenseOp x = particle_hole(length);
  out.push_back({"particle_hole", distance_up_to_phase(x * u * x, prop({p.delta, -p.d, -p.b, -p.m, p.tau}))});

  const DenseOp r = reflection(length);
  out.push_back({"reflection", distance_up_to_phase(r * u * r, prop({p.delta, -p.d, -p.b, p.m, p.tau}))});
  return out;
}

}  // namespace u1lab
