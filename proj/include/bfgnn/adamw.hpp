#pragma once

#include <vector>

#include "bfgnn/tape.hpp"

namespace bfgnn {

struct AdamWSettings {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Decoupled weight-decay Adam with bias-corrected moments, operating over a
/// ParamSet's flat layout.
class AdamW {
 public:
  AdamW(std::size_t size, AdamWSettings settings)
      : settings_(settings), m_(size, 0.0), v_(size, 0.0) {}

  /// Throws ValidationError on a non-finite gradient entry, naming the index.
  void step(ParamSet& params, const GradientRecord& grad);

  long long step_count() const { return t_; }
  const AdamWSettings& settings() const { return settings_; }

 private:
  AdamWSettings settings_;
  std::vector<double> m_;
  std::vector<double> v_;
  long long t_ = 0;
};

/// Adds lambda * sign(theta) to grad; sign(0) contributes nothing, so exact
/// zeros stay at rest.
void add_l1_subgradient(const ParamSet& params, double lambda, GradientRecord& grad);

}  // namespace bfgnn
