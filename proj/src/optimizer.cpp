#include "snet/optimizer.hpp"

#include <cmath>

namespace snet {

Optimizer::Optimizer(OptimizerSettings settings) : settings_(settings) {
  if (!(settings_.learning_rate > 0.0)) {
    throw Error("optimizer: learning rate must be positive");
  }
}

void Optimizer::step(Network& net) {
  if (!net.gradients_ready()) {
    throw Error("optimizer: step called without gradients (run backward first)");
  }
  auto params = net.parameters();
  ++step_;
  const double lr = settings_.learning_rate;
  if (settings_.kind == OptimizerKind::SGD) {
    for (Tensor* p : params) {
      auto d = p->data();
      auto g = p->grad();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= lr * g[i];
    }
  } else {
    if (m_.empty()) {
      for (Tensor* p : params) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
      }
    }
    if (m_.size() != params.size()) throw Error("optimizer: parameter layout changed");
    const double b1 = settings_.beta1;
    const double b2 = settings_.beta2;
    const double t = static_cast<double>(step_);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto d = params[k]->data();
      auto g = params[k]->grad();
      auto& m = m_[k];
      auto& v = v_[k];
      if (m.size() != d.size()) throw Error("optimizer: parameter layout changed");
      for (std::size_t i = 0; i < d.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        d[i] -= lr * mhat / (std::sqrt(vhat) + settings_.eps);
      }
    }
  }
  net.zero_grad();
}

}  // namespace snet
