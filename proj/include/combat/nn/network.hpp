#pragma once
#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "combat/rep/features.hpp"
#include "combat/rng.hpp"
#include "combat/tensor.hpp"

namespace combat::nn {

// Trunk widths.  Three 3x3 same-padding conv layers feed one fully connected
// layer, which feeds the two heads.
constexpr int kConv1 = 16;
constexpr int kConv2 = 32;
constexpr int kConv3 = 64;
constexpr int kKernel = 3;

// All parameters as named tensors so the optimizer, the serializer and
// finite-difference probes can walk them uniformly.  Conv weights are stored
// GEMM-ready as {9*in_channels, out_channels} (patch offset major, channel
// minor), matching the im2col patch layout; biases are flat vectors.
struct NetworkParams {
  int board_size = 11;
  int hidden = 256;
  Tensor conv1_w, conv1_b;
  Tensor conv2_w, conv2_b;
  Tensor conv3_w, conv3_b;
  Tensor fc_w, fc_b;          // {kConv3*N*N, hidden}
  Tensor policy_w, policy_b;  // {hidden, N*N+1}
  Tensor value_w, value_b;    // {hidden, 1}

  int action_dim() const { return board_size * board_size + 1; }

  // Weights uniform in ±1/sqrt(fan_in), biases zero.
  static NetworkParams init(int board_size, int hidden, Rng& rng);
  // Same shapes, all zeros: gradient and moment buffers.
  static NetworkParams zeros_like(const NetworkParams& other);

  std::vector<std::pair<std::string, Tensor*>> named();
  std::vector<std::pair<std::string, const Tensor*>> named() const;
};

// Everything the backward pass reuses.  Activations are pixel-major
// [batch*N*N, channels]; head activations are [batch, dim].
struct ForwardPass {
  int batch = 0;
  Eigen::MatrixXd p1, z1;  // im2col patches and pre-activations per conv
  Eigen::MatrixXd p2, z2;
  Eigen::MatrixXd p3, z3;
  Eigen::MatrixXd flat;    // [batch, kConv3*N*N], channel-major per sample
  Eigen::MatrixXd hact;    // [batch, hidden], tanh outputs
  Eigen::MatrixXd logits;  // [batch, N*N+1]
  Eigen::VectorXd values;  // [batch]
};

ForwardPass forward(const NetworkParams& net, const std::vector<rep::FeatureTensor>& batch);
ForwardPass forward(const NetworkParams& net, const rep::FeatureTensor& single);

// Chain rule from head seeds to parameters: accumulates d(sum over the batch
// of dlogits·logits + dvalues·values)/dθ into `grad` (+=, callers zero it).
// The seeds carry objective weighting and sign; nothing here rescales them.
void backward(const NetworkParams& net, const ForwardPass& fp, const Eigen::MatrixXd& dlogits,
              const Eigen::VectorXd& dvalues, NetworkParams& grad);

}  // namespace combat::nn
