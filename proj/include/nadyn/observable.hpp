#pragma once

#include <string>

namespace nadyn {

/// Continuous test function from a fixed family with a known sup-norm on
/// [0, 1]: monomials x^j (j <= 8), cos(2 pi j x) and sin(2 pi j x) (j <= 4).
class Observable {
 public:
  enum class Kind { Monomial, Cosine, Sine };

  Observable(Kind kind, int order);

  static Observable monomial(int degree) { return {Kind::Monomial, degree}; }
  static Observable cosine(int j) { return {Kind::Cosine, j}; }
  static Observable sine(int j) { return {Kind::Sine, j}; }
  /// Accepts "1", "x", "x^j", "cos(j)", "sin(j)".
  static Observable parse(const std::string& text);

  Kind kind() const { return kind_; }
  int order() const { return order_; }
  std::string name() const;

  double operator()(double x) const;
  /// Exact integral over [a, b] from the antiderivative.
  double integral(double a, double b) const;
  /// sup |g| on [0, 1].
  double sup_norm() const;

 private:
  Kind kind_;
  int order_;
};

}  // namespace nadyn
