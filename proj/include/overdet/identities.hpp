#pragma once

#include "overdet/analysis.hpp"

#include <string>

namespace overdet {

struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  /// abs_residual / max(|lhs|, |rhs|, scale_floor)
  double rel_residual = 0.0;
  double scale_floor = 0.0;
  /// Hex digest of shape, resolution, z and c.
  std::string inputs_hash;
};

/// 1e-12 (n + 4) |Omega| sup|u|; keeps rel_residual finite when both sides vanish.
double identity_scale_floor(const SolutionBundle& b);

/// (n + 4) int u = oint (Delta u)^2 (x - z).nu dS.
IdentityReport pucci_serrin(const SolutionBundle& b, Vec2 z);

/// int u (|D^2 v|^2 - (Delta v)^2 / n) = 1/4 oint (c^2 - (Delta u)^2)(dv/dnu + (x - z).nu / n) dS.
IdentityReport main_identity(const SolutionBundle& b, Vec2 z, const Real& c);

struct MainIdentityCheck {
  IdentityReport primary;    // bundle z and c
  IdentityReport secondary;  // alternative (z, c)
  double lhs_spread = 0.0;   // |lhs(primary) - lhs(secondary)|
};
/// Evaluates the identity at the bundle's (z, c) and at a second pair.
MainIdentityCheck main_identity_checked(const SolutionBundle& b, Vec2 z2, const Real& c2);

/// int u |D^2 h|^2 = 1/4 oint (c^2 - (Delta u)^2) dh/dnu dS.
IdentityReport harmonic_form(const SolutionBundle& b);

/// oint (dv/dnu + (x - z).nu / n) dS, zero for any z.
double zero_flux(const SolutionBundle& b, Vec2 z);

}  // namespace overdet
