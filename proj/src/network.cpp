#include "snet/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snet/kernels.hpp"

namespace snet {

double sigmoid(double x) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(1.0 / (1.0 + std::exp(-x)), lo, hi);
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Linear:
      return "Linear";
    case LayerKind::ReLU:
      return "ReLU";
    case LayerKind::Sigmoid:
      return "Sigmoid";
  }
  return "?";
}

Layer Layer::linear(std::size_t fan_in, std::size_t fan_out) {
  Layer l;
  l.kind = LayerKind::Linear;
  l.weight = Tensor({fan_in, fan_out});
  l.bias = Tensor({fan_out});
  l.weight.ensure_grad();
  l.bias.ensure_grad();
  l.in_dim = fan_in;
  l.out_dim = fan_out;
  return l;
}

Layer Layer::relu() {
  Layer l;
  l.kind = LayerKind::ReLU;
  return l;
}

Layer Layer::sigmoid() {
  Layer l;
  l.kind = LayerKind::Sigmoid;
  return l;
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  validate();
}

Network Network::mlp(const std::vector<std::size_t>& dims, LayerKind hidden,
                     std::optional<LayerKind> output) {
  if (dims.size() < 2) throw Error("mlp: need at least input and output dims");
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    layers.push_back(Layer::linear(dims[i], dims[i + 1]));
    const bool last = i + 2 == dims.size();
    const std::optional<LayerKind> act = last ? output : hidden;
    if (act) {
      if (*act == LayerKind::ReLU) layers.push_back(Layer::relu());
      if (*act == LayerKind::Sigmoid) layers.push_back(Layer::sigmoid());
    }
  }
  return Network(std::move(layers));
}

void Network::validate() const {
  std::size_t width = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.kind != LayerKind::Linear) continue;
    if (l.weight.shape() != std::vector<std::size_t>{l.in_dim, l.out_dim} ||
        l.bias.shape() != std::vector<std::size_t>{l.out_dim}) {
      throw Error("network: layer " + std::to_string(i) +
                  " has inconsistent parameter shapes");
    }
    if (width != 0 && width != l.in_dim) {
      throw Error("network: layer " + std::to_string(i) + " expects " +
                  std::to_string(l.in_dim) + " inputs but previous layer emits " +
                  std::to_string(width));
    }
    width = l.out_dim;
  }
}

void Network::init_he_uniform(Rng& rng) {
  for (Layer& l : layers_) {
    if (!l.has_params()) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in_dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : l.weight.data()) w = dist(rng);
    l.bias.fill(0.0);
  }
}

std::size_t Network::input_dim() const {
  for (const Layer& l : layers_) {
    if (l.has_params()) return l.in_dim;
  }
  return 0;
}

std::size_t Network::output_dim() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    if (it->has_params()) return it->out_dim;
  }
  return 0;
}

Tensor Network::run(const Tensor& x, std::vector<Tensor>* cache) const {
  if (x.rank() == 0 || x.rank() > 2) {
    throw Error("network: input must be a vector or (batch, features), got " +
                x.shape_string());
  }
  Tensor cur = x.rank() == 1 ? Tensor({1, x.size()}, std::vector<double>(
                                                          x.data().begin(),
                                                          x.data().end()))
                             : x;
  if (cache) cache->clear();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    const std::size_t batch = cur.rows();
    switch (l.kind) {
      case LayerKind::Linear: {
        if (cur.cols() != l.in_dim) {
          throw Error("network: layer " + std::to_string(i) + " (Linear) expects " +
                      std::to_string(l.in_dim) + " inputs, got " +
                      std::to_string(cur.cols()));
        }
        Tensor out({batch, l.out_dim});
        kernels::matmul({cur.data(), batch, l.in_dim},
                        {l.weight.data(), l.in_dim, l.out_dim},
                        {out.data(), batch, l.out_dim});
        const auto b = l.bias.data();
        for (std::size_t r = 0; r < batch; ++r) {
          auto row = out.row_span(r);
          for (std::size_t j = 0; j < l.out_dim; ++j) row[j] += b[j];
        }
        if (cache) cache->push_back(std::move(cur));
        cur = std::move(out);
        break;
      }
      case LayerKind::ReLU: {
        Tensor out = cur;
        for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
        if (cache) cache->push_back(std::move(cur));
        cur = std::move(out);
        break;
      }
      case LayerKind::Sigmoid: {
        Tensor out = cur;
        for (double& v : out.data()) v = sigmoid(v);
        if (cache) cache->push_back(std::move(cur));
        cur = std::move(out);
        break;
      }
    }
  }
  if (cache) cache->push_back(cur);  // final output, needed by Sigmoid backward
  return cur;
}

Tensor Network::forward(const Tensor& x) {
  Tensor out = run(x, &activations_);
  has_cache_ = true;
  return out;
}

Tensor Network::infer(const Tensor& x) const { return run(x, nullptr); }

void Network::backward(const Tensor& upstream) {
  if (!has_cache_) throw Error("network: backward called before forward");
  const Tensor& last = activations_.back();
  if (upstream.size() != last.size()) {
    throw Error("network: upstream gradient " + upstream.shape_string() +
                " does not match output " + last.shape_string());
  }
  Tensor g({last.rows(), last.cols()},
           std::vector<double>(upstream.data().begin(), upstream.data().end()));
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    Layer& l = layers_[idx];
    const Tensor& in = activations_[idx];
    const std::size_t batch = in.rows();
    switch (l.kind) {
      case LayerKind::Linear: {
        l.weight.ensure_grad();
        l.bias.ensure_grad();
        kernels::matmul_tn_acc({in.data(), batch, l.in_dim},
                               {g.data(), batch, l.out_dim},
                               {l.weight.grad(), l.in_dim, l.out_dim});
        kernels::col_sum_acc({g.data(), batch, l.out_dim}, l.bias.grad());
        if (idx == 0) break;  // input gradient is never consumed
        Tensor dx({batch, l.in_dim});
        kernels::matmul_nt({g.data(), batch, l.out_dim},
                           {l.weight.data(), l.in_dim, l.out_dim},
                           {dx.data(), batch, l.in_dim});
        g = std::move(dx);
        break;
      }
      case LayerKind::ReLU: {
        const auto x = in.data();
        auto gd = g.data();
        for (std::size_t i = 0; i < gd.size(); ++i) {
          if (!(x[i] > 0.0)) gd[i] = 0.0;
        }
        break;
      }
      case LayerKind::Sigmoid: {
        const auto y = activations_[idx + 1].data();
        auto gd = g.data();
        for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= y[i] * (1.0 - y[i]);
        break;
      }
    }
  }
  grads_ready_ = true;
}

std::vector<Tensor*> Network::parameters() {
  std::vector<Tensor*> out;
  for (Layer& l : layers_) {
    if (!l.has_params()) continue;
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Tensor*> Network::parameters() const {
  std::vector<const Tensor*> out;
  for (const Layer& l : layers_) {
    if (!l.has_params()) continue;
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const Tensor* p : parameters()) n += p->size();
  return n;
}

void Network::zero_grad() {
  for (Tensor* p : parameters()) {
    p->ensure_grad();
    p->zero_grad();
  }
  grads_ready_ = false;
}

double Network::l1_norm() const {
  double s = 0.0;
  for (const Tensor* p : parameters()) {
    for (double v : p->data()) s += std::abs(v);
  }
  return s;
}

void Network::add_l1_subgradient(double alpha) {
  if (alpha == 0.0) return;
  for (Tensor* p : parameters()) {
    p->ensure_grad();
    auto d = p->data();
    auto g = p->grad();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] > 0.0) {
        g[i] += alpha;
      } else if (d[i] < 0.0) {
        g[i] -= alpha;
      }
    }
  }
}

void Network::copy_parameters_from(const Network& other) {
  auto dst = parameters();
  auto src = other.parameters();
  if (dst.size() != src.size()) throw Error("network: copy between different stacks");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (!dst[i]->same_shape(*src[i])) {
      throw Error("network: copy between different parameter shapes");
    }
    std::copy(src[i]->data().begin(), src[i]->data().end(), dst[i]->data().begin());
  }
}

}  // namespace snet
