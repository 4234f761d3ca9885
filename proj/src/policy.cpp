#include "riskte/policy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "riskte/rng.hpp"
#include "json.hpp"

namespace riskte {

using nlohmann::json;

namespace {

double& flat_coord(std::vector<double>& w1, std::vector<double>& b1,
                   std::vector<double>& w2, std::vector<double>& b2,
                   std::size_t i) {
  if (i < w1.size()) return w1[i];
  i -= w1.size();
  if (i < b1.size()) return b1[i];
  i -= b1.size();
  if (i < w2.size()) return w2[i];
  i -= w2.size();
  if (i >= b2.size()) throw std::out_of_range("policy coordinate out of range");
  return b2[i];
}

}  // namespace

double& PolicyParams::coord(std::size_t i) { return flat_coord(w1, b1, w2, b2, i); }
double PolicyParams::coord(std::size_t i) const {
  return const_cast<PolicyParams*>(this)->coord(i);
}
double& PolicyGrad::coord(std::size_t i) { return flat_coord(w1, b1, w2, b2, i); }

PolicyGrad PolicyGrad::zeros_like(const PolicyParams& p) {
  PolicyGrad g;
  g.w1.assign(p.w1.size(), 0.0);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2.assign(p.w2.size(), 0.0);
  g.b2.assign(p.b2.size(), 0.0);
  return g;
}

void PolicyGrad::add_scaled(const PolicyGrad& o, double scale) {
  for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += scale * o.w1[i];
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += scale * o.b1[i];
  for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += scale * o.w2[i];
  for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += scale * o.b2[i];
}

void PolicyGrad::scale(double s) {
  for (double& v : w1) v *= s;
  for (double& v : b1) v *= s;
  for (double& v : w2) v *= s;
  for (double& v : b2) v *= s;
}

PolicyParams init_params(std::uint64_t seed, int input_dim, int hidden_dim,
                         int output_dim) {
  PolicyParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.output_dim = output_dim;
  p.w1.resize(static_cast<std::size_t>(hidden_dim) * input_dim);
  p.b1.assign(hidden_dim, 0.0);
  p.w2.resize(static_cast<std::size_t>(output_dim) * hidden_dim);
  p.b2.assign(output_dim, 0.0);
  Rng rng(seed);
  double a1 = std::sqrt(6.0 / (input_dim + hidden_dim));
  for (double& w : p.w1) w = rng.uniform(-a1, a1);
  double a2 = std::sqrt(6.0 / (hidden_dim + output_dim));
  for (double& w : p.w2) w = rng.uniform(-a2, a2);
  return p;
}

void policy_forward(const PolicyParams& p, const double* s, double* out,
                    double* pre_activation) {
  const int I = p.input_dim, H = p.hidden_dim, O = p.output_dim;
  double local[256];
  double* pre = pre_activation ? pre_activation : local;
  for (int h = 0; h < H; ++h) {
    double acc = p.b1[h];
    const double* row = &p.w1[static_cast<std::size_t>(h) * I];
    for (int i = 0; i < I; ++i) acc += row[i] * s[i];
    pre[h] = acc;
  }
  for (int o = 0; o < O; ++o) {
    double acc = p.b2[o];
    const double* row = &p.w2[static_cast<std::size_t>(o) * H];
    for (int h = 0; h < H; ++h)
      if (pre[h] > 0.0) acc += row[h] * pre[h];
    out[o] = acc;
  }
}

void policy_backward(const PolicyParams& p, const double* s,
                     const double* upstream, PolicyGrad& grad, double* ds) {
  const int I = p.input_dim, H = p.hidden_dim, O = p.output_dim;
  double pre[256];
  double out[8];
  policy_forward(p, s, out, pre);

  double dh[256] = {0.0};
  for (int o = 0; o < O; ++o) {
    double g = upstream[o];
    grad.b2[o] += g;
    double* gw2 = &grad.w2[static_cast<std::size_t>(o) * H];
    const double* w2 = &p.w2[static_cast<std::size_t>(o) * H];
    for (int h = 0; h < H; ++h) {
      if (pre[h] > 0.0) {
        gw2[h] += g * pre[h];
        dh[h] += g * w2[h];
      }
    }
  }
  if (ds)
    for (int i = 0; i < I; ++i) ds[i] = 0.0;
  for (int h = 0; h < H; ++h) {
    if (pre[h] <= 0.0) continue;  // rectifier subgradient at 0 is 0
    double g = dh[h];
    if (g == 0.0) continue;
    grad.b1[h] += g;
    double* gw1 = &grad.w1[static_cast<std::size_t>(h) * I];
    const double* w1 = &p.w1[static_cast<std::size_t>(h) * I];
    for (int i = 0; i < I; ++i) {
      gw1[i] += g * s[i];
      if (ds) ds[i] += g * w1[i];
    }
  }
}

void save_params(const PolicyParams& p, const std::string& path,
                 const std::string& metadata_json) {
  json j;
  j["format_version"] = 1;
  j["input_dim"] = p.input_dim;
  j["hidden_dim"] = p.hidden_dim;
  j["output_dim"] = p.output_dim;
  j["w1"] = p.w1;
  j["b1"] = p.b1;
  j["w2"] = p.w2;
  j["b2"] = p.b2;
  j["metadata"] = json::parse(metadata_json);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write parameter file: " + path);
  out << j.dump(2) << "\n";
}

PolicyParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": parameter parse error: " + e.what());
  }
  if (j.value("format_version", 0) != 1)
    throw std::runtime_error(path + ": unsupported parameter format version");
  PolicyParams p;
  p.input_dim = j.at("input_dim").get<int>();
  p.hidden_dim = j.at("hidden_dim").get<int>();
  p.output_dim = j.at("output_dim").get<int>();
  p.w1 = j.at("w1").get<std::vector<double>>();
  p.b1 = j.at("b1").get<std::vector<double>>();
  p.w2 = j.at("w2").get<std::vector<double>>();
  p.b2 = j.at("b2").get<std::vector<double>>();
  if (p.w1.size() != static_cast<std::size_t>(p.hidden_dim) * p.input_dim ||
      p.b1.size() != static_cast<std::size_t>(p.hidden_dim) ||
      p.w2.size() != static_cast<std::size_t>(p.output_dim) * p.hidden_dim ||
      p.b2.size() != static_cast<std::size_t>(p.output_dim))
    throw std::runtime_error(path + ": parameter shape mismatch");
  return p;
}

}  // namespace riskte
