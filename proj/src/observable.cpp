#include "nadyn/observable.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <stdexcept>

namespace nadyn {

Observable::Observable(Kind kind, int order) : kind_(kind), order_(order) {
  const int max_order = kind == Kind::Monomial ? 8 : 4;
  const int min_order = kind == Kind::Monomial ? 0 : 1;
  if (order < min_order || order > max_order)
    throw std::invalid_argument("observable order out of range for " + name());
}

Observable Observable::parse(const std::string& text) {
  std::smatch m;
  if (text == "1") return monomial(0);
  if (text == "x") return monomial(1);
  if (std::regex_match(text, m, std::regex(R"(x\^(\d))"))) return monomial(std::stoi(m[1]));
  if (std::regex_match(text, m, std::regex(R"(cos\((\d)\))"))) return cosine(std::stoi(m[1]));
  if (std::regex_match(text, m, std::regex(R"(sin\((\d)\))"))) return sine(std::stoi(m[1]));
  throw std::invalid_argument("unknown observable '" + text + "'; use 1, x, x^j (j<=8), cos(j) or sin(j) (j<=4)");
}

std::string Observable::name() const {
  switch (kind_) {
    case Kind::Monomial:
      return order_ == 0 ? "1" : order_ == 1 ? "x" : "x^" + std::to_string(order_);
    case Kind::Cosine:
      return "cos(" + std::to_string(order_) + ")";
    case Kind::Sine:
      return "sin(" + std::to_string(order_) + ")";
  }
  return {};
}

double Observable::operator()(double x) const {
  const double w = 2.0 * std::numbers::pi * order_;
  switch (kind_) {
    case Kind::Monomial:
      return std::pow(x, order_);
    case Kind::Cosine:
      return std::cos(w * x);
    case Kind::Sine:
      return std::sin(w * x);
  }
  return 0.0;
}

double Observable::integral(double a, double b) const {
  const double w = 2.0 * std::numbers::pi * order_;
  switch (kind_) {
    case Kind::Monomial:
      if (order_ == 0) return b - a;
      return (std::pow(b, order_ + 1) - std::pow(a, order_ + 1)) / (order_ + 1);
    case Kind::Cosine:
      return (std::sin(w * b) - std::sin(w * a)) / w;
    case Kind::Sine:
      return (std::cos(w * a) - std::cos(w * b)) / w;
  }
  return 0.0;
}

double Observable::sup_norm() const { return 1.0; }

}  // namespace nadyn
