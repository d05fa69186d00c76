#pragma once

// Reference implementations used as oracles by the acceptance suite. They
// share no code with the update engine.

#include <cmath>
#include <cstddef>
#include <vector>

namespace anolab::acceptance::reference {

/// Textbook AdamW (decoupled weight decay, bias-corrected moments).
class AdamW {
 public:
  struct Params {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
  };

  AdamW(std::size_t n, Params p) : p_(p), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& x, const std::vector<double>& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(p_.beta1, t_);
    const double c2 = 1.0 - std::pow(p_.beta2, t_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      m_[i] = p_.beta1 * m_[i] + (1.0 - p_.beta1) * g[i];
      v_[i] = p_.beta2 * v_[i] + (1.0 - p_.beta2) * g[i] * g[i];
      const double m_hat = m_[i] / c1;
      const double v_hat = v_[i] / c2;
      x[i] -= p_.lr * (m_hat / (std::sqrt(v_hat) + p_.eps) + p_.weight_decay * x[i]);
    }
  }

 private:
  Params p_;
  std::vector<double> m_, v_;
  double t_ = 0.0;
};

struct AnoTraceRow {
  int k;
  double x[2];
  double m[2];
  double v[2];
};

/// Ano on f(x) = 0.5 * (x0^2 + 4 x1^2) from x = (1, -0.5): lr 0.1, beta1
/// 0.92, beta2 0.99, eps 1e-8, weight decay 0.01.
inline constexpr AnoTraceRow kAnoQuadraticTrace[] = {
#include "ano_reference_trace.inc"
};

}  // namespace anolab::acceptance::reference
