// Scalar self-interaction g(s) shared by the NLS and Soler equations, plus
// the derived functions g', G = int_0^s g and K = int_0^s t g'(t) dt.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "soliton/errors.hpp"

namespace soliton {

enum class Family { soler_power, polynomial, custom };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::soler_power: return "soler_power";
    case Family::polynomial: return "polynomial";
    case Family::custom: return "custom";
  }
  return "?";
}

enum class Which { g, gprime, G, K };

namespace detail {

inline double horner(std::span<const double> c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

inline double ipow(double s, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= s;
  return r;
}

}  // namespace detail

struct CustomFunctions {
  std::function<double(double)> g;
  std::function<double(double)> gprime;
  std::function<double(double)> G;
  std::optional<std::function<double(double)>> K;
  // K by adaptive quadrature of t g'(t) when no closed form was supplied.
  bool allow_quadrature_K = false;
};

/// Immutable description of g. The mass m is always g(0) and must be positive.
class NonlinearityModel {
 public:
  /// g(s) = m - s^k.
  static NonlinearityModel soler_power(int k, double m = 1.0) {
    if (k < 1) throw PreconditionError("soler_power: k must be a positive integer");
    if (!(m > 0.0)) throw PreconditionError("soler_power: m must be positive");
    NonlinearityModel model;
    model.family_ = Family::soler_power;
    model.k_ = k;
    model.coeffs_.assign(static_cast<std::size_t>(k) + 1, 0.0);
    model.coeffs_.front() = m;
    model.coeffs_.back() -= 1.0;
    model.derive_polynomials();
    return model;
  }

  /// g(s) = sum_i c_i s^i with c_0 = m > 0.
  static NonlinearityModel polynomial(std::vector<double> coefficients) {
    if (coefficients.empty() || !(coefficients.front() > 0.0))
      throw PreconditionError("polynomial: constant coefficient g(0) = m must be positive");
    NonlinearityModel model;
    model.family_ = Family::polynomial;
    model.coeffs_ = std::move(coefficients);
    model.derive_polynomials();
    return model;
  }

  static NonlinearityModel custom(CustomFunctions fns) {
    if (!fns.g || !fns.gprime || !fns.G)
      throw PreconditionError("custom: g, g' and G must all be supplied");
    const double m = fns.g(0.0);
    if (!(m > 0.0)) throw PreconditionError("custom: g(0) = m must be positive");
    NonlinearityModel model;
    model.family_ = Family::custom;
    model.custom_ = std::move(fns);
    return model;
  }

  Family family() const { return family_; }
  int power() const { return k_; }
  double mass() const { return family_ == Family::custom ? custom_.g(0.0) : coeffs_.front(); }
  /// Coefficients of g in increasing powers (empty for custom models).
  const std::vector<double>& coefficients() const { return coeffs_; }

  double g(double s) const {
    if (family_ == Family::custom) return custom_.g(s);
    if (family_ == Family::soler_power) return coeffs_.front() - detail::ipow(s, k_);
    return detail::horner(coeffs_, s);
  }

  double gprime(double s) const {
    if (family_ == Family::custom) return custom_.gprime(s);
    if (family_ == Family::soler_power) return -k_ * detail::ipow(s, k_ - 1);
    return detail::horner(dcoeffs_, s);
  }

  double G(double s) const {
    if (family_ == Family::custom) return custom_.G(s);
    return detail::horner(Gcoeffs_, s);
  }

  double K(double s) const {
    if (family_ != Family::custom) return detail::horner(Kcoeffs_, s);
    if (custom_.K) return (*custom_.K)(s);
    if (!custom_.allow_quadrature_K) throw ModelError("antiderivative unavailable");
    if (s == 0.0) return 0.0;
    auto integrand = [this](double t) { return t * custom_.gprime(t); };
    const double lo = std::min(0.0, s), hi = std::max(0.0, s);
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, lo, hi, 15, 1e-14);
    return s > 0 ? val : -val;
  }

  double eval(Which which, double s) const {
    switch (which) {
      case Which::g: return g(s);
      case Which::gprime: return gprime(s);
      case Which::G: return G(s);
      case Which::K: return K(s);
    }
    return 0.0;
  }

  std::string describe() const {
    if (family_ == Family::soler_power)
      return "soler_power(k=" + std::to_string(k_) + ", m=" + std::to_string(mass()) + ")";
    if (family_ == Family::polynomial) {
      std::string out = "polynomial(";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(coeffs_[i]);
      }
      return out + ")";
    }
    return "custom";
  }

 private:
  NonlinearityModel() = default;

  // G and K by coefficient shifts: c_i s^i -> c_i s^{i+1}/(i+1) and i c_i s^{i+1}/(i+1).
  void derive_polynomials() {
    const std::size_t n = coeffs_.size();
    dcoeffs_.assign(n > 1 ? n - 1 : 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) dcoeffs_[i - 1] = static_cast<double>(i) * coeffs_[i];
    Gcoeffs_.assign(n + 1, 0.0);
    Kcoeffs_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      Gcoeffs_[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
      Kcoeffs_[i + 1] = static_cast<double>(i) * coeffs_[i] / static_cast<double>(i + 1);
    }
  }

  Family family_ = Family::polynomial;
  int k_ = 0;
  std::vector<double> coeffs_;
  std::vector<double> dcoeffs_;
  std::vector<double> Gcoeffs_;
  std::vector<double> Kcoeffs_;
  CustomFunctions custom_;
};

/// True iff (n+1)/n G(s) - s g(s) > 0 at every sample. Samples must be nonzero.
inline bool check_gsg_condition(const NonlinearityModel& model, std::span<const double> s_samples,
                                int n = 1) {
  if (s_samples.empty()) throw PreconditionError("check_gsg_condition: no samples");
  if (n < 1) throw PreconditionError("check_gsg_condition: n must be >= 1");
  const double factor = static_cast<double>(n + 1) / n;
  for (double s : s_samples) {
    if (s == 0.0) throw PreconditionError("check_gsg_condition: s = 0 is excluded");
    if (!(factor * model.G(s) - s * model.g(s) > 0.0)) return false;
  }
  return true;
}

/// Nonlinearity of the real wave equation -psi_tt = -psi_xx + g(psi); g(0) = 0.
/// Polynomial in psi: g(psi) = sum_i c_i psi^i.
class NlwModel {
 public:
  explicit NlwModel(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    if (c_.empty()) c_.push_back(0.0);
    if (c_.front() != 0.0) throw PreconditionError("NLW nonlinearity must satisfy g(0) = 0");
    dc_.assign(c_.size() > 1 ? c_.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < c_.size(); ++i) dc_[i - 1] = static_cast<double>(i) * c_[i];
    Gc_.assign(c_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) Gc_[i + 1] = c_[i] / static_cast<double>(i + 1);
  }

  /// g(psi) = psi - psi^3.
  static NlwModel default_demo() { return NlwModel({0.0, 1.0, 0.0, -1.0}); }

  double g(double psi) const { return detail::horner(c_, psi); }
  double gprime(double psi) const { return detail::horner(dc_, psi); }
  double G(double psi) const { return detail::horner(Gc_, psi); }
  const std::vector<double>& coefficients() const { return c_; }

 private:
  std::vector<double> c_, dc_, Gc_;
};

}  // namespace soliton
