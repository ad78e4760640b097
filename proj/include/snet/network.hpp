#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snet/rng.hpp"
#include "snet/tensor.hpp"

namespace snet {

enum class LayerKind { Linear, ReLU, Sigmoid };

std::string to_string(LayerKind kind);

/// Logistic function clamped to the open interval (0, 1): saturated inputs map
/// to the nearest representable values inside it.
double sigmoid(double x);

/// One layer of a feed-forward stack. Linear layers own a (fan_in, fan_out)
/// weight and a (fan_out) bias; activations own nothing.
struct Layer {
  LayerKind kind = LayerKind::Linear;
  Tensor weight;
  Tensor bias;
  std::size_t in_dim = 0;  // 0 for activations: shape follows the input
  std::size_t out_dim = 0;

  static Layer linear(std::size_t fan_in, std::size_t fan_out);
  static Layer relu();
  static Layer sigmoid();

  bool has_params() const { return kind == LayerKind::Linear; }
};

/// Ordered stack of layers. `forward` caches activations for `backward`;
/// `infer` is the cache-free const path used for target networks and
/// evaluation.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<Layer> layers);

  /// Linear layers with `hidden` activations between them and an optional
  /// activation after the last one.
  static Network mlp(const std::vector<std::size_t>& dims, LayerKind hidden,
                     std::optional<LayerKind> output);

  /// He-style uniform fan-in init: U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero bias.
  void init_he_uniform(Rng& rng);

  Tensor forward(const Tensor& x);
  Tensor infer(const Tensor& x) const;

  /// Accumulates parameter gradients of the scalar loss whose gradient with
  /// respect to the last forward output is `upstream`.
  void backward(const Tensor& upstream);

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  std::size_t param_count() const;
  void zero_grad();
  bool gradients_ready() const { return grads_ready_; }
  void mark_gradients_consumed() { grads_ready_ = false; }

  /// Sum of |p| over every parameter.
  double l1_norm() const;
  /// grad += alpha * sign(p) for every parameter (subgradient 0 at p == 0).
  void add_l1_subgradient(double alpha);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::span<Layer> layers() { return layers_; }
  std::span<const Layer> layers() const { return layers_; }

  /// Copies parameter values (not caches or grads) from a same-shaped network.
  void copy_parameters_from(const Network& other);

 private:
  Tensor run(const Tensor& x, std::vector<Tensor>* cache) const;
  void validate() const;

  std::vector<Layer> layers_;
  std::vector<Tensor> activations_;  // activations_[i] = input of layer i
  bool has_cache_ = false;
  bool grads_ready_ = false;
};

}  // namespace snet
