#pragma once

#include "urbanembed/core/parameters.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace urbanembed {

struct AdamOptions {
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Decoupled; only applied to parameters flagged `decay`.
  double weight_decay = 0.001;
};

struct AdamState {
  std::map<std::string, Matrix> first_moment;
  std::map<std::string, Matrix> second_moment;
  std::int64_t step = 0;
};

class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // One bias-corrected update of every parameter. Parameters without an
  // entry in `grads` are treated as having zero gradient.
  void step(ParameterSet& params, const GradientMap& grads);

  const AdamOptions& options() const { return options_; }
  const AdamState& state() const { return state_; }

 private:
  AdamOptions options_;
  AdamState state_;
};

}  // namespace urbanembed
