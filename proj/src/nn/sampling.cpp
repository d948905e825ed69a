#include "combat/nn/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace combat::nn {

std::vector<double> softmax(const double* logits, int n) {
  double hi = logits[0];
  for (int i = 1; i < n; ++i) hi = std::max(hi, logits[i]);
  std::vector<double> p(static_cast<std::size_t>(n));
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    p[static_cast<std::size_t>(i)] = std::exp(logits[i] - hi);
    z += p[static_cast<std::size_t>(i)];
  }
  for (double& x : p) x /= z;
  return p;
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Rounding left a sliver at the top; take the last plausible index.
  for (std::size_t i = probs.size(); i-- > 0;)
    if (probs[i] > 0.0) return static_cast<int>(i);
  return static_cast<int>(probs.size()) - 1;
}

int argmax(const double* logits, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (logits[i] > logits[best]) best = i;
  return best;
}

}  // namespace combat::nn
