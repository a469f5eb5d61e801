#include "bfgnn/adamw.hpp"

#include <cmath>
#include <string>

namespace bfgnn {

void AdamW::step(ParamSet& params, const GradientRecord& grad) {
  if (grad.size() != m_.size() || params.total() != m_.size())
    throw ValidationError("optimizer state size mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i]))
      throw NumericError("non-finite gradient at flat index " + std::to_string(i));
  }
  ++t_;
  double c1 = 1.0 - std::pow(settings_.beta1, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(settings_.beta2, static_cast<double>(t_));
  for (int id = 0; id < params.count(); ++id) {
    const auto& t = params.tensor(id);
    for (int i = 0; i < t.len; ++i) {
      std::size_t k = t.offset + static_cast<std::size_t>(i);
      double g = grad[k];
      m_[k] = settings_.beta1 * m_[k] + (1.0 - settings_.beta1) * g;
      v_[k] = settings_.beta2 * v_[k] + (1.0 - settings_.beta2) * g * g;
      double mhat = m_[k] / c1;
      double vhat = v_[k] / c2;
      double update = mhat / (std::sqrt(vhat) + settings_.eps);
      t.data[i] -= settings_.lr * (update + settings_.weight_decay * t.data[i]);
    }
  }
}

void add_l1_subgradient(const ParamSet& params, double lambda, GradientRecord& grad) {
  if (lambda == 0.0) return;
  if (grad.size() != params.total()) throw ValidationError("gradient size mismatch");
  for (int id = 0; id < params.count(); ++id) {
    const auto& t = params.tensor(id);
    for (int i = 0; i < t.len; ++i) {
      double x = t.data[i];
      if (x > 0.0)
        grad[t.offset + i] += lambda;
      else if (x < 0.0)
        grad[t.offset + i] -= lambda;
    }
  }
}

}  // namespace bfgnn
