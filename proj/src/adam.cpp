#include <cmath>

#include "braindec/error.hpp"
#include "braindec/train.hpp"

namespace braindec::models {

AdamState AdamState::for_params(const Parameters& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(Parameters& params, const Parameters& grads, AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw Error("adam: parameter, gradient and state block counts differ");
  }
  ++state.step;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].value;
    const auto& g = grads[i].value;
    if (p.rows() != g.rows() || p.cols() != g.cols()) throw Error("adam: gradient shape mismatch in " + params[i].name);
    auto& m = state.m[i].value;
    auto& v = state.v[i].value;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= cfg.learning_rate * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg.eps);
  }
}

}  // namespace braindec::models
