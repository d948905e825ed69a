#include "combat/nn/network.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "combat/rep/layout.hpp"

namespace combat::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tensors are row-major {rows, cols}; map them for GEMM without copying.
Eigen::Map<const RowMat> mat(const Tensor& t) {
  return {t.ptr(), static_cast<Eigen::Index>(t.dims[0]), static_cast<Eigen::Index>(t.dims[1])};
}
Eigen::Map<RowMat> mat(Tensor& t) {
  return {t.ptr(), static_cast<Eigen::Index>(t.dims[0]), static_cast<Eigen::Index>(t.dims[1])};
}
Eigen::Map<const Eigen::VectorXd> vec(const Tensor& t) {
  return {t.ptr(), static_cast<Eigen::Index>(t.size())};
}
Eigen::Map<Eigen::VectorXd> vec(Tensor& t) {
  return {t.ptr(), static_cast<Eigen::Index>(t.size())};
}

// Same-padding 3x3 patch extraction.  Row layout follows the activations
// (sample-major, pixel within); column k*C+ch holds channel ch at kernel
// offset k = (dr+1)*3 + (dc+1).  Out-of-board taps stay zero.
Eigen::MatrixXd im2col(const Eigen::MatrixXd& act, int batch, int n) {
  const Eigen::Index channels = act.cols();
  const int pixels = n * n;
  Eigen::MatrixXd patches = Eigen::MatrixXd::Zero(act.rows(), 9 * channels);
  for (int m = 0; m < batch; ++m) {
    const int base = m * pixels;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const int row = base + r * n + c;
        for (int dr = -1; dr <= 1; ++dr) {
          const int rr = r + dr;
          if (rr < 0 || rr >= n) continue;
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            if (cc < 0 || cc >= n) continue;
            const int k = (dr + 1) * 3 + (dc + 1);
            patches.block(row, k * channels, 1, channels) =
                act.block(base + rr * n + cc, 0, 1, channels);
          }
        }
      }
  }
  return patches;
}

// Adjoint of im2col: scatter patch-gradients back onto the activation grid.
void col2im_accumulate(const Eigen::MatrixXd& dpatches, int batch, int n,
                       Eigen::MatrixXd& dact) {
  const Eigen::Index channels = dact.cols();
  const int pixels = n * n;
  for (int m = 0; m < batch; ++m) {
    const int base = m * pixels;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const int row = base + r * n + c;
        for (int dr = -1; dr <= 1; ++dr) {
          const int rr = r + dr;
          if (rr < 0 || rr >= n) continue;
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            if (cc < 0 || cc >= n) continue;
            const int k = (dr + 1) * 3 + (dc + 1);
            dact.block(base + rr * n + cc, 0, 1, channels) +=
                dpatches.block(row, k * channels, 1, channels);
          }
        }
      }
  }
}

}  // namespace

NetworkParams NetworkParams::init(int board_size, int hidden, Rng& rng) {
  NetworkParams p;
  p.board_size = board_size;
  p.hidden = hidden;
  const std::size_t pixels = static_cast<std::size_t>(board_size) * board_size;
  const std::size_t c0 = rep::kNumChannels;

  p.conv1_w = Tensor({9 * c0, kConv1});
  p.conv1_b = Tensor({kConv1});
  p.conv2_w = Tensor({9 * kConv1, kConv2});
  p.conv2_b = Tensor({kConv2});
  p.conv3_w = Tensor({9 * kConv2, kConv3});
  p.conv3_b = Tensor({kConv3});
  p.fc_w = Tensor({kConv3 * pixels, static_cast<std::size_t>(hidden)});
  p.fc_b = Tensor({static_cast<std::size_t>(hidden)});
  p.policy_w = Tensor({static_cast<std::size_t>(hidden),
                       static_cast<std::size_t>(p.action_dim())});
  p.policy_b = Tensor({static_cast<std::size_t>(p.action_dim())});
  p.value_w = Tensor({static_cast<std::size_t>(hidden), 1});
  p.value_b = Tensor({1});

  auto scatter = [&rng](Tensor& t) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.dims[0]));
    for (double& x : t.data) x = rng.uniform(-bound, bound);
  };
  scatter(p.conv1_w);
  scatter(p.conv2_w);
  scatter(p.conv3_w);
  scatter(p.fc_w);
  scatter(p.policy_w);
  scatter(p.value_w);
  return p;
}

NetworkParams NetworkParams::zeros_like(const NetworkParams& other) {
  NetworkParams p;
  p.board_size = other.board_size;
  p.hidden = other.hidden;
  auto src = other.named();
  auto dst = p.named();
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i].second = Tensor(src[i].second->dims);
  return p;
}

std::vector<std::pair<std::string, Tensor*>> NetworkParams::named() {
  return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b}, {"conv2_w", &conv2_w},
          {"conv2_b", &conv2_b}, {"conv3_w", &conv3_w}, {"conv3_b", &conv3_b},
          {"fc_w", &fc_w},       {"fc_b", &fc_b},       {"policy_w", &policy_w},
          {"policy_b", &policy_b}, {"value_w", &value_w}, {"value_b", &value_b}};
}

std::vector<std::pair<std::string, const Tensor*>> NetworkParams::named() const {
  return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b}, {"conv2_w", &conv2_w},
          {"conv2_b", &conv2_b}, {"conv3_w", &conv3_w}, {"conv3_b", &conv3_b},
          {"fc_w", &fc_w},       {"fc_b", &fc_b},       {"policy_w", &policy_w},
          {"policy_b", &policy_b}, {"value_w", &value_w}, {"value_b", &value_b}};
}

ForwardPass forward(const NetworkParams& net, const std::vector<rep::FeatureTensor>& batch) {
  if (batch.empty()) throw std::invalid_argument("forward needs at least one sample");
  const int n = net.board_size;
  const int pixels = n * n;
  const int m_count = static_cast<int>(batch.size());

  Eigen::MatrixXd a0(static_cast<Eigen::Index>(m_count) * pixels, rep::kNumChannels);
  for (int m = 0; m < m_count; ++m) {
    const rep::FeatureTensor& f = batch[static_cast<std::size_t>(m)];
    if (f.board_size != n ||
        f.data.size() != static_cast<std::size_t>(rep::kNumChannels) * pixels)
      throw std::invalid_argument("feature tensor does not match network geometry");
    for (int ch = 0; ch < rep::kNumChannels; ++ch)
      for (int p = 0; p < pixels; ++p)
        a0(static_cast<Eigen::Index>(m) * pixels + p, ch) =
            f.data[static_cast<std::size_t>(ch) * pixels + p];
  }

  ForwardPass fp;
  fp.batch = m_count;
  fp.p1 = im2col(a0, m_count, n);
  fp.z1 = (fp.p1 * mat(net.conv1_w)).rowwise() + vec(net.conv1_b).transpose();
  Eigen::MatrixXd a1 = fp.z1.cwiseMax(0.0);
  fp.p2 = im2col(a1, m_count, n);
  fp.z2 = (fp.p2 * mat(net.conv2_w)).rowwise() + vec(net.conv2_b).transpose();
  Eigen::MatrixXd a2 = fp.z2.cwiseMax(0.0);
  fp.p3 = im2col(a2, m_count, n);
  fp.z3 = (fp.p3 * mat(net.conv3_w)).rowwise() + vec(net.conv3_b).transpose();
  Eigen::MatrixXd a3 = fp.z3.cwiseMax(0.0);

  // Flatten channel-major per sample: flat(m, ch*P + p) = a3(m*P + p, ch).
  fp.flat.resize(m_count, static_cast<Eigen::Index>(kConv3) * pixels);
  for (int m = 0; m < m_count; ++m)
    for (int ch = 0; ch < kConv3; ++ch)
      for (int p = 0; p < pixels; ++p)
        fp.flat(m, static_cast<Eigen::Index>(ch) * pixels + p) =
            a3(static_cast<Eigen::Index>(m) * pixels + p, ch);

  Eigen::MatrixXd hpre = (fp.flat * mat(net.fc_w)).rowwise() + vec(net.fc_b).transpose();
  fp.hact = hpre.array().tanh();
  fp.logits = (fp.hact * mat(net.policy_w)).rowwise() + vec(net.policy_b).transpose();
  fp.values = (fp.hact * mat(net.value_w)).col(0).array() + net.value_b.data[0];
  return fp;
}

ForwardPass forward(const NetworkParams& net, const rep::FeatureTensor& single) {
  return forward(net, std::vector<rep::FeatureTensor>{single});
}

void backward(const NetworkParams& net, const ForwardPass& fp, const Eigen::MatrixXd& dlogits,
              const Eigen::VectorXd& dvalues, NetworkParams& grad) {
  const int n = net.board_size;
  const int pixels = n * n;
  const int m_count = fp.batch;
  if (dlogits.rows() != m_count || dlogits.cols() != net.action_dim() ||
      dvalues.size() != m_count)
    throw std::invalid_argument("head seed shapes do not match the forward pass");

  mat(grad.policy_w) += fp.hact.transpose() * dlogits;
  vec(grad.policy_b) += dlogits.colwise().sum().transpose();
  mat(grad.value_w) += fp.hact.transpose() * dvalues;
  grad.value_b.data[0] += dvalues.sum();

  Eigen::MatrixXd dh = dlogits * mat(net.policy_w).transpose();
  dh.noalias() += dvalues * mat(net.value_w).transpose();
  Eigen::MatrixXd dzfc = dh.array() * (1.0 - fp.hact.array().square());

  mat(grad.fc_w) += fp.flat.transpose() * dzfc;
  vec(grad.fc_b) += dzfc.colwise().sum().transpose();
  Eigen::MatrixXd dflat = dzfc * mat(net.fc_w).transpose();

  Eigen::MatrixXd da3(static_cast<Eigen::Index>(m_count) * pixels, kConv3);
  for (int m = 0; m < m_count; ++m)
    for (int ch = 0; ch < kConv3; ++ch)
      for (int p = 0; p < pixels; ++p)
        da3(static_cast<Eigen::Index>(m) * pixels + p, ch) =
            dflat(m, static_cast<Eigen::Index>(ch) * pixels + p);

  Eigen::MatrixXd dz3 = da3.array() * (fp.z3.array() > 0.0).cast<double>();
  mat(grad.conv3_w) += fp.p3.transpose() * dz3;
  vec(grad.conv3_b) += dz3.colwise().sum().transpose();
  Eigen::MatrixXd dp3 = dz3 * mat(net.conv3_w).transpose();
  Eigen::MatrixXd da2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_count) * pixels, kConv2);
  col2im_accumulate(dp3, m_count, n, da2);

  Eigen::MatrixXd dz2 = da2.array() * (fp.z2.array() > 0.0).cast<double>();
  mat(grad.conv2_w) += fp.p2.transpose() * dz2;
  vec(grad.conv2_b) += dz2.colwise().sum().transpose();
  Eigen::MatrixXd dp2 = dz2 * mat(net.conv2_w).transpose();
  Eigen::MatrixXd da1 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_count) * pixels, kConv1);
  col2im_accumulate(dp2, m_count, n, da1);

  Eigen::MatrixXd dz1 = da1.array() * (fp.z1.array() > 0.0).cast<double>();
  mat(grad.conv1_w) += fp.p1.transpose() * dz1;
  vec(grad.conv1_b) += dz1.colwise().sum().transpose();
  // No gradient past the input planes.
}

}  // namespace combat::nn
