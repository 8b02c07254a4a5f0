#pragma once

// Parameter domains and every constant derived from (alpha, beta).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>

#include "gcb/errors.hpp"

namespace gcb {

inline constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
inline constexpr double alpha_bullet_value = 19.0 / 24.0;

// Slack used when checking derived-constant ranges; closed-form roots lose a
// few ulps at the boundary alpha = 1/sqrt(2).
inline constexpr double constant_tolerance = 1e-12;

/// Lower edge of D': B(a) = (sqrt(1 + 4a) - 1) / 2.
inline double scriptB(double alpha) { return (std::sqrt(1.0 + 4.0 * alpha) - 1.0) / 2.0; }

/// R(t) = min{-t, t - 1}. `t |n| + R(t)` is the robust threshold for weight |n|.
inline double robustness_offset(double t) { return std::min(-t, t - 1.0); }

/// Shannon binary entropy in bits; H2(0) = H2(1) = 0.
inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Denominator of the external path length bound: (H2(a) + a H2(b/a)) / (1 + a).
inline double path_length_entropy(double alpha, double beta) {
  return (binary_entropy(alpha) + alpha * binary_entropy(beta / alpha)) / (1.0 + alpha);
}

struct domain_membership {
  bool in_d = false;               // a/2 <= b <= a^2, 1/2 <= a <= 1, (a,b) != (1,1)
  bool in_d_prime = false;         // 1/sqrt2 <= a < 3/4, B(a) <= b <= a^2
  bool in_d_double_prime = false;  // 2/3 <= b/a <= a < 3/4
};

inline domain_membership domain_check(double alpha, double beta) {
  domain_membership m;
  if (!std::isfinite(alpha) || !std::isfinite(beta)) return m;
  m.in_d = alpha / 2.0 <= beta && beta <= alpha * alpha && 0.5 <= alpha && alpha <= 1.0 &&
           !(alpha == 1.0 && beta == 1.0);
  m.in_d_prime =
      inv_sqrt2 <= alpha && alpha < 0.75 && scriptB(alpha) <= beta && beta <= alpha * alpha;
  const double gamma = beta / alpha;
  m.in_d_double_prime = 2.0 / 3.0 <= gamma && gamma <= alpha && alpha < 0.75;
  return m;
}

/// The user pair (alpha, beta) in D' and everything the routines and bounds derive from it.
///
/// `alpha_hat` is the constant the CGC / RCGC routines feed to C-balancing;
/// `alpha_hat_c` is the tighter constant for which standalone C-balancing is
/// proven. `eta` and `epsilon` parametrise the amortized rotation bound
/// O(k/eta + k/epsilon) and are informational only.
struct balance_params {
  double alpha = 0.0;
  double beta = 0.0;
  double scriptB = 0.0;
  double alpha_hat_c = 0.0;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double delta_gc = 0.0;  // min{alpha_hat, beta_hat / alpha}
  double alpha_bullet = alpha_bullet_value;
  double Delta = 0.0;
  double delta_potential = 0.0;  // half the per-rotation potential margin
  double eta = 0.0;
  double epsilon = 0.0;

  /// True when beta = alpha^2, i.e. the family coincides with BB[1 - alpha].
  bool bb_case() const { return std::abs(beta - alpha * alpha) <= constant_tolerance; }

  /// The potential margin min{alpha - alpha_hat, beta - beta_hat, 1/62} (before halving).
  double potential_margin() const { return 2.0 * delta_potential; }

  /// Amortized analysis degenerates (zero margin) on the boundary of D'.
  bool degenerate_amortization() const { return delta_potential <= 0.0; }

  /// Smallest subtree weight for which a rotating call must drop the potential sum.
  std::uint64_t potential_threshold_weight() const {
    if (degenerate_amortization()) return UINT64_MAX;
    const double w = std::ceil(2.0 / potential_margin());
    return std::max<std::uint64_t>(31, static_cast<std::uint64_t>(w));
  }
};

namespace detail {

inline void require_range(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << "derived constant out of range: " << what << " = " << value;
    throw invariant_violation(os.str());
  }
}

}  // namespace detail

/// Compute all derived constants. Throws domain_error outside D'.
inline balance_params derive_constants(double alpha, double beta) {
  if (!domain_check(alpha, beta).in_d_prime) {
    std::ostringstream os;
    os << "(alpha, beta) = (" << alpha << ", " << beta
       << ") is outside D' = {1/sqrt2 <= alpha < 3/4, B(alpha) <= beta <= alpha^2}";
    throw domain_error(os.str());
  }
  balance_params p;
  p.alpha = alpha;
  p.beta = beta;
  p.scriptB = scriptB(alpha);

  const double root = std::sqrt((1.0 - alpha) * (5.0 - alpha));
  p.alpha_hat_c = (1.0 + alpha - root) / (2.0 * (2.0 * alpha - 1.0));
  p.alpha_hat = (1.0 - 2.0 * alpha + 6.0 * alpha * alpha - root) / (5.0 * (2.0 * alpha - 1.0));
  p.beta_hat = alpha *
               (1.0 + alpha -
                std::sqrt((1.0 - alpha) * (1.0 - alpha) + 4.0 * alpha * (alpha * alpha - beta))) /
               (2.0 * (1.0 - alpha * alpha + beta));
  p.delta_gc = std::min(p.alpha_hat, p.beta_hat / alpha);
  p.Delta = path_length_entropy(alpha, beta);

  double margin = std::min(alpha - p.alpha_hat, 1.0 / 62.0);
  if (!p.bb_case()) margin = std::min(margin, beta - p.beta_hat);
  p.delta_potential = std::max(0.0, margin) / 2.0;

  p.eta = alpha - inv_sqrt2;
  p.epsilon = p.bb_case() ? 1.0 : std::min(beta - p.scriptB, alpha * alpha - beta);

  const double tol = constant_tolerance;
  detail::require_range(inv_sqrt2 - tol <= p.alpha_hat_c && p.alpha_hat_c <= alpha + tol,
                        "alpha_hat_c", p.alpha_hat_c);
  detail::require_range(inv_sqrt2 - tol <= p.alpha_hat && p.alpha_hat <= alpha + tol, "alpha_hat",
                        p.alpha_hat);
  detail::require_range(0.25 < p.beta_hat && p.beta_hat <= beta + tol, "beta_hat", p.beta_hat);
  detail::require_range(p.delta_gc <= p.alpha_hat, "delta_gc", p.delta_gc);
  detail::require_range(0.8 <= p.Delta && p.Delta <= 1.0, "Delta", p.Delta);
  return p;
}

struct bound_values {
  double height = 0.0;                // -2 log_beta(N + 1)
  double external_path_length = 0.0;  // (N + 1) log2(N + 1) / Delta
};

inline bound_values theoretical_bounds(std::uint64_t n_nodes, const balance_params& p) {
  const double n1 = static_cast<double>(n_nodes) + 1.0;
  bound_values b;
  b.height = -2.0 * std::log(n1) / std::log(p.beta);
  b.external_path_length = n1 * std::log2(n1) / p.Delta;
  return b;
}

}  // namespace gcb
