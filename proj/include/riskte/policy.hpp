#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace riskte {

// Two-layer update network with a rectifier after the first layer and two
// scalar heads (head 0 drives contention logits, head 1 drives gates).
// Weights are row-major: w1[h * input + i], w2[o * hidden + h].
struct PolicyParams {
  int input_dim = 8;
  int hidden_dim = 64;
  int output_dim = 2;
  std::vector<double> w1, b1, w2, b2;

  std::size_t size() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }
  // Flat view used by the optimizer and the finite-difference probes:
  // order w1, b1, w2, b2.
  double& coord(std::size_t i);
  double coord(std::size_t i) const;
};

struct PolicyGrad {
  std::vector<double> w1, b1, w2, b2;

  static PolicyGrad zeros_like(const PolicyParams& p);
  void add_scaled(const PolicyGrad& other, double scale);
  void scale(double s);
  double& coord(std::size_t i);
};

// Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)), zero biases.
// Fill order: w1 row-major, then w2 row-major.
PolicyParams init_params(std::uint64_t seed, int input_dim = 8,
                         int hidden_dim = 64, int output_dim = 2);

// out = w2 * rect(w1 * s + b1) + b2. hidden may be null; when given it
// receives the pre-activation values (size hidden_dim).
void policy_forward(const PolicyParams& p, const double* s, double* out,
                    double* pre_activation = nullptr);

// Exact reverse-mode gradients; the rectifier subgradient at 0 is 0.
// Accumulates into grad; ds (size input_dim) may be null.
void policy_backward(const PolicyParams& p, const double* s,
                     const double* upstream, PolicyGrad& grad, double* ds);

// Versioned JSON parameter file; values round-trip bit-exactly.
void save_params(const PolicyParams& p, const std::string& path,
                 const std::string& metadata_json = "{}");
PolicyParams load_params(const std::string& path);

}  // namespace riskte
