#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kramers {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

// One-dimensional polynomial potential. Every kind is stored as ascending
// coefficients, so derivatives through fourth order are exact.
class Potential {
 public:
  enum class Kind { cubic, double_well, polynomial };

  static constexpr int kMaxOrder = 4;
  static constexpr std::size_t kMaxDegree = 12;

  // V = A x^2 - B x^3, A > 0, B > 0.
  static Potential cubic(double A, double B);
  // V = A x^2 (x - B)^2, A > 0, B > 0.
  static Potential double_well(double A, double B);
  // V = sum c_k x^k, degree <= 12.
  static Potential polynomial(std::vector<double> coefficients);
  // V = M omega^2 x^2 / 2.
  static Potential harmonic(double mass, double omega);

  Kind kind() const { return kind_; }
  // Shape parameters of the named kinds; empty for polynomial.
  std::optional<double> A() const { return A_; }
  std::optional<double> B() const { return B_; }

  std::span<const double> coefficients() const { return derivs_[0]; }
  // Ascending coefficients of the order-th derivative (order 0..4).
  std::span<const double> derivative_coefficients(int order) const;
  std::size_t degree() const;

  // order-th derivative at x; throws ArgumentError unless 0 <= order <= 4.
  double eval(double x, int order = 0) const;
  double operator()(double x) const { return eval(x, 0); }

  bool operator==(const Potential& other) const;

 private:
  Potential(Kind kind, std::vector<double> coefficients,
            std::optional<double> A, std::optional<double> B);

  Kind kind_;
  std::optional<double> A_;
  std::optional<double> B_;
  std::array<std::vector<double>, kMaxOrder + 1> derivs_;
};

std::string_view to_string(Potential::Kind kind);

// Free-function form of Potential::eval.
double eval(const Potential& potential, double x, int order);

struct StationaryAnalysis {
  double x0 = 0.0;                 // well minimum
  double xb = 0.0;                 // barrier maximum, xb > x0
  std::optional<double> xm;        // next minimum beyond xb, if bracketed
  double barrier = 0.0;            // V(xb) - V(x0)
  double omega0 = 0.0;             // sqrt(V''(x0) / M)
  double omegab = 0.0;             // sqrt(|V''(xb)| / M)
  double mass = 1.0;
  double curvature_well = 0.0;     // V''(x0)
  double curvature_barrier = 0.0;  // V''(xb), negative
  double v_well = 0.0;             // V(x0)
  double v_barrier = 0.0;          // V(xb)
};

// Roots of V' are located by a 512-point sign-change scan of the bracket,
// bisected, then Newton-polished to |V'| <= 1e-12. The leftmost minimum is
// the well, the first maximum after it is the barrier. Throws StructureError
// when that pattern is not found.
StationaryAnalysis find_stationary_points(const Potential& potential,
                                          double mass, Interval bracket);

}  // namespace kramers
