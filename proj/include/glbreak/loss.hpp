#pragma once

// Loss family for generalized Laplace estimation.

#include <cmath>
#include <string>

#include "glbreak/errors.hpp"

namespace glbreak {

enum class LossKind { Squared, Absolute, Check, Polynomial };

struct LossSpec {
  LossKind kind = LossKind::Absolute;
  double tau = 0.5;       // check loss quantile level
  double exponent = 2.0;  // polynomial loss |r|^exponent

  static LossSpec squared() { return {LossKind::Squared, 0.5, 2.0}; }
  static LossSpec absolute() { return {LossKind::Absolute, 0.5, 1.0}; }
  static LossSpec check(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) fail(ErrorCode::InvalidArgument, "check loss needs tau in (0, 1)");
    return {LossKind::Check, tau, 1.0};
  }
  /// |r|^m; convex only for m >= 1, which is required.
  static LossSpec polynomial(double m) {
    if (!(m >= 1.0)) fail(ErrorCode::InvalidArgument, "polynomial loss needs exponent m >= 1 for a convex risk");
    return {LossKind::Polynomial, 0.5, m};
  }

  double operator()(double r) const {
    switch (kind) {
      case LossKind::Squared: return r * r;
      case LossKind::Absolute: return std::abs(r);
      case LossKind::Check: return (tau - (r <= 0.0 ? 1.0 : 0.0)) * r;
      case LossKind::Polynomial: return std::pow(std::abs(r), exponent);
    }
    return 0.0;
  }
};

inline std::string to_string(const LossSpec& loss) {
  switch (loss.kind) {
    case LossKind::Squared: return "squared";
    case LossKind::Absolute: return "absolute";
    case LossKind::Check: return "check(" + std::to_string(loss.tau) + ")";
    case LossKind::Polynomial: return "polynomial(" + std::to_string(loss.exponent) + ")";
  }
  return "absolute";
}

/// Parses "squared", "absolute", "check:TAU" or "polynomial:M".
inline LossSpec parse_loss(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto arg = [&] {
    if (colon == std::string::npos) fail(ErrorCode::InvalidArgument, "loss '" + name + "' needs a parameter");
    try {
      return std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad loss parameter in '" + text + "'");
    }
  };
  if (name == "squared") return LossSpec::squared();
  if (name == "absolute") return LossSpec::absolute();
  if (name == "check") return LossSpec::check(arg());
  if (name == "polynomial") return LossSpec::polynomial(arg());
  fail(ErrorCode::InvalidArgument, "unknown loss '" + text + "'");
}

}  // namespace glbreak
