#pragma once
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace combat {

// Dense row-major nd-array of doubles.  All learner parameters, gradients and
// optimizer moments use this one shape-carrying container so that optimizer
// updates, serialization and finite-difference probes can iterate parameters
// uniformly.
struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> d) : dims(std::move(d)) {
    data.assign(size_from(dims), 0.0);
  }

  static std::size_t size_from(const std::vector<std::size_t>& d) {
    std::size_t n = 1;
    for (std::size_t x : d) n *= x;
    return n;
  }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Tensor& o) const { return dims == o.dims; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }
};

inline void check_same_shape(const Tensor& a, const Tensor& b, const std::string& what) {
  if (!a.same_shape(b)) throw std::invalid_argument("shape mismatch: " + what);
}

}  // namespace combat
