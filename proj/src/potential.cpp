#include "kramers/potential.hpp"

#include <cmath>
#include <string>

#include "kramers/error.hpp"

namespace kramers {
namespace {

double horner(std::span<const double> c, double x) {
  if (c.empty()) return 0.0;
  double acc = c.back();
  for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * x + c[k];
  return acc;
}

std::vector<double> differentiate(const std::vector<double>& c) {
  if (c.size() <= 1) return {};
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be finite and > 0");
  }
}

constexpr int kScanPoints = 512;

struct Root {
  double x;
  int kind;  // +1 minimum (V' goes - to +), -1 maximum
};

double refine_root(const Potential& v, double a, double b) {
  double fa = v.eval(a, 1);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = v.eval(mid, 1);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  // Newton polish; only accept iterates that shrink |V'|.
  double x = 0.5 * (a + b);
  double best = std::abs(v.eval(x, 1));
  for (int it = 0; it < 8 && best > 1e-12; ++it) {
    const double curv = v.eval(x, 2);
    if (curv == 0.0) break;
    const double next = x - v.eval(x, 1) / curv;
    const double r = std::abs(v.eval(next, 1));
    if (!(r < best)) break;
    x = next;
    best = r;
  }
  return x;
}

}  // namespace

Potential::Potential(Kind kind, std::vector<double> coefficients,
                     std::optional<double> A, std::optional<double> B)
    : kind_(kind), A_(A), B_(B) {
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.empty()) coefficients.push_back(0.0);
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw ArgumentError("potential coefficients must be finite");
  }
  if (coefficients.size() - 1 > kMaxDegree) {
    throw ArgumentError("polynomial degree " + std::to_string(coefficients.size() - 1) +
                        " exceeds the maximum of 12");
  }
  derivs_[0] = std::move(coefficients);
  for (int k = 1; k <= kMaxOrder; ++k) derivs_[k] = differentiate(derivs_[k - 1]);
}

Potential Potential::cubic(double A, double B) {
  require_positive(A, "cubic A");
  require_positive(B, "cubic B");
  return Potential(Kind::cubic, {0.0, 0.0, A, -B}, A, B);
}

Potential Potential::double_well(double A, double B) {
  require_positive(A, "double_well A");
  require_positive(B, "double_well B");
  return Potential(Kind::double_well, {0.0, 0.0, A * B * B, -2.0 * A * B, A}, A, B);
}

Potential Potential::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw ArgumentError("polynomial needs at least one coefficient");
  return Potential(Kind::polynomial, std::move(coefficients), std::nullopt, std::nullopt);
}

Potential Potential::harmonic(double mass, double omega) {
  require_positive(mass, "mass");
  require_positive(omega, "omega");
  return polynomial({0.0, 0.0, 0.5 * mass * omega * omega});
}

std::span<const double> Potential::derivative_coefficients(int order) const {
  if (order < 0 || order > kMaxOrder) {
    throw ArgumentError("derivative order " + std::to_string(order) + " not in 0..4");
  }
  return derivs_[static_cast<std::size_t>(order)];
}

std::size_t Potential::degree() const { return derivs_[0].size() - 1; }

double Potential::eval(double x, int order) const {
  return horner(derivative_coefficients(order), x);
}

bool Potential::operator==(const Potential& other) const {
  return kind_ == other.kind_ && A_ == other.A_ && B_ == other.B_ &&
         derivs_[0] == other.derivs_[0];
}

std::string_view to_string(Potential::Kind kind) {
  switch (kind) {
    case Potential::Kind::cubic: return "cubic";
    case Potential::Kind::double_well: return "double_well";
    case Potential::Kind::polynomial: return "polynomial";
  }
  return "unknown";
}

double eval(const Potential& potential, double x, int order) {
  return potential.eval(x, order);
}

StationaryAnalysis find_stationary_points(const Potential& v, double mass,
                                          Interval bracket) {
  require_positive(mass, "mass");
  if (!(bracket.lo < bracket.hi) || !std::isfinite(bracket.lo) || !std::isfinite(bracket.hi)) {
    throw ArgumentError("bracket must satisfy lo < hi");
  }

  std::vector<Root> roots;
  const double h = (bracket.hi - bracket.lo) / (kScanPoints - 1);
  double xa = bracket.lo;
  double fa = v.eval(xa, 1);
  for (int i = 1; i < kScanPoints; ++i) {
    const double xb = (i == kScanPoints - 1) ? bracket.hi : bracket.lo + i * h;
    const double fb = v.eval(xb, 1);
    if (fa == 0.0) {
      // Exact grid hit; classify by curvature.
      const double c = v.eval(xa, 2);
      if (c != 0.0) roots.push_back({xa, c > 0.0 ? +1 : -1});
    } else if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      roots.push_back({refine_root(v, xa, xb), fa < 0.0 ? +1 : -1});
    }
    xa = xb;
    fa = fb;
  }
  if (roots.empty()) {
    throw StructureError("no sign change of V' in bracket [" + std::to_string(bracket.lo) +
                         ", " + std::to_string(bracket.hi) + "]");
  }

  std::size_t iw = 0;
  while (iw < roots.size() && roots[iw].kind != +1) ++iw;
  if (iw == roots.size()) throw StructureError("no minimum of V in bracket");
  std::size_t ib = iw + 1;
  while (ib < roots.size() && roots[ib].kind != -1) ++ib;
  if (ib == roots.size()) throw StructureError("no barrier maximum after the well minimum");

  StationaryAnalysis a;
  a.mass = mass;
  a.x0 = roots[iw].x;
  a.xb = roots[ib].x;
  for (std::size_t k = ib + 1; k < roots.size(); ++k) {
    if (roots[k].kind == +1) {
      a.xm = roots[k].x;
      break;
    }
  }
  a.curvature_well = v.eval(a.x0, 2);
  a.curvature_barrier = v.eval(a.xb, 2);
  if (!(a.curvature_well > 0.0)) throw StructureError("V''(x0) <= 0 at the candidate minimum");
  if (!(a.curvature_barrier < 0.0)) throw StructureError("V''(xb) >= 0 at the candidate barrier");
  a.v_well = v.eval(a.x0, 0);
  a.v_barrier = v.eval(a.xb, 0);
  a.barrier = a.v_barrier - a.v_well;
  if (!(a.barrier > 0.0)) throw StructureError("barrier height V(xb) - V(x0) is not positive");
  a.omega0 = std::sqrt(a.curvature_well / mass);
  a.omegab = std::sqrt(-a.curvature_barrier / mass);
  return a;
}

}  // namespace kramers
