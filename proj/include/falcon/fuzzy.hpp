#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace falcon {

enum class TNorm { Goedel, Product, Lukasiewicz };

std::string_view to_string(TNorm t);
/// Accepts goedel|godel|product|lukasiewicz (case-insensitive).
TNorm parse_tnorm(std::string_view s);

/// θ(x,y)=0 iff x=0 or y=0. Goedel and Product qualify, Lukasiewicz does not.
constexpr bool is_strict(TNorm t) { return t != TNorm::Lukasiewicz; }

inline constexpr double kDegreeTolerance = 1e-9;

/// Clamps a degree into [0,1]; anything further than kDegreeTolerance outside
/// is a domain error.
template <std::floating_point Scalar>
Scalar checked_degree(Scalar x) {
  if (!(x >= -kDegreeTolerance && x <= 1 + kDegreeTolerance))
    throw std::domain_error("degree " + std::to_string(x) + " outside [0,1]");
  return std::clamp<Scalar>(x, 0, 1);
}

template <std::floating_point Scalar>
Scalar negation(Scalar x) {
  return Scalar(1) - checked_degree(x);
}

template <std::floating_point Scalar>
Scalar t_norm(TNorm family, Scalar x, Scalar y) {
  x = checked_degree(x);
  y = checked_degree(y);
  switch (family) {
    case TNorm::Goedel: return std::min(x, y);
    case TNorm::Product: return x * y;
    case TNorm::Lukasiewicz: return std::max<Scalar>(x - (1 - y), 0);
  }
  return 0;
}

/// κ(x,y) = ν(θ(ν(x), ν(y))).
template <std::floating_point Scalar>
Scalar t_conorm(TNorm family, Scalar x, Scalar y) {
  return negation(t_norm(family, negation(x), negation(y)));
}

/// Elementwise θ over Eigen arrays. No domain checks; this is the hot path.
template <typename DerivedX, typename DerivedY>
Eigen::ArrayXXd t_norm(TNorm family, const Eigen::ArrayBase<DerivedX>& x,
                       const Eigen::ArrayBase<DerivedY>& y) {
  switch (family) {
    case TNorm::Goedel: return x.min(y);
    case TNorm::Product: return x * y;
    case TNorm::Lukasiewicz: return (x - (1.0 - y)).max(0.0);
  }
  return {};
}

/// Partial derivatives of θ. At ties the left argument takes the whole
/// subgradient: min(x,y) at x==y gives (1,0), and the Lukasiewicz kink at
/// x+y==1 counts as the active branch.
template <typename DerivedX, typename DerivedY>
std::pair<Eigen::ArrayXXd, Eigen::ArrayXXd> t_norm_partials(
    TNorm family, const Eigen::ArrayBase<DerivedX>& x, const Eigen::ArrayBase<DerivedY>& y) {
  switch (family) {
    case TNorm::Goedel: {
      Eigen::ArrayXXd left = (x <= y).template cast<double>();
      return {left, 1.0 - left};
    }
    case TNorm::Product: return {y, x};
    case TNorm::Lukasiewicz: {
      Eigen::ArrayXXd active = (x - (1.0 - y) >= 0.0).template cast<double>();
      return {active, active};
    }
  }
  return {};
}

}  // namespace falcon
