#pragma once

// Model radius Theta(t, c) and the time change dt/ds = Theta^alpha.

namespace icf {

struct RescaleContext {
  double alpha = 1.0;
  int n_dim = 2;
  /// Reference log-radius; inf log u0 <= c <= sup log u0.
  double c = 0.0;
};

/// Theta(t, c) = (alpha t / n + e^{alpha c})^{1/alpha}; e^{c + t/n} for alpha = 0.
double theta(double t, const RescaleContext& ctx);

enum class TimeDirection { t_to_s, s_to_t };

/// s(t) = (n / alpha) log(1 + alpha t / (n e^{alpha c})) and its inverse;
/// s = t when alpha = 0. Rejects negative input.
double time_map(double value, const RescaleContext& ctx, TimeDirection direction);

/// Midpoint reference constant for initial log-radius range [phi_min, phi_max].
RescaleContext midpoint_context(double alpha, int n_dim, double phi_min, double phi_max);

/// Throws config_value when c lies outside [phi_min, phi_max].
void validate_context(const RescaleContext& ctx, double phi_min, double phi_max);

}  // namespace icf
