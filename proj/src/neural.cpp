#include "mib/neural.hpp"

#include <cmath>
#include <stdexcept>

#include "mib/rng.hpp"

namespace mib {
namespace {

double activate(Activation act, double z) {
  switch (act) {
    case Activation::Identity: return z;
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Sigmoid: return sigmoid(z);
    case Activation::Tanh: return std::tanh(z);
  }
  return z;
}

// Derivative in terms of the pre-activation z and the activation value a.
double activate_grad(Activation act, double z, double a) {
  switch (act) {
    case Activation::Identity: return 1.0;
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return a * (1.0 - a);
    case Activation::Tanh: return 1.0 - a * a;
  }
  return 1.0;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

DenseNet make_net(const std::vector<size_t>& widths,
                  const std::vector<Activation>& acts, uint64_t seed) {
  if (widths.size() < 2 || acts.size() != widths.size() - 1)
    throw std::runtime_error("make_net: widths/activations mismatch");
  SplitMix64 rng(seed);
  DenseNet net;
  for (size_t t = 0; t + 1 < widths.size(); ++t) {
    Layer layer;
    layer.in = widths[t];
    layer.out = widths[t + 1];
    layer.act = acts[t];
    const double a =
        std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    layer.w.resize(layer.out * layer.in);
    for (auto& w : layer.w) w = rng.next_double(-a, a);
    layer.b.assign(layer.out, 0.0);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

ForwardTrace forward_trace(const DenseNet& net, const std::vector<double>& x) {
  if (x.size() != net.input_size())
    throw std::runtime_error("forward: input size mismatch");
  ForwardTrace trace;
  trace.activations.push_back(x);
  for (const Layer& layer : net.layers) {
    const std::vector<double>& in = trace.activations.back();
    std::vector<double> z(layer.out);
    for (size_t i = 0; i < layer.out; ++i) {
      double s = layer.b[i];
      for (size_t j = 0; j < layer.in; ++j) s += layer.w[i * layer.in + j] * in[j];
      z[i] = s;
    }
    std::vector<double> a(layer.out);
    for (size_t i = 0; i < layer.out; ++i) a[i] = activate(layer.act, z[i]);
    trace.pre.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

std::vector<double> forward(const DenseNet& net, const std::vector<double>& x) {
  return forward_trace(net, x).activations.back();
}

Gradients zero_gradients(const DenseNet& net) {
  Gradients g;
  for (const Layer& layer : net.layers) {
    g.w.emplace_back(layer.w.size(), 0.0);
    g.b.emplace_back(layer.b.size(), 0.0);
  }
  g.input.assign(net.input_size(), 0.0);
  return g;
}

Gradients backward(const DenseNet& net, const ForwardTrace& trace,
                   const std::vector<double>& upstream) {
  if (upstream.size() != net.output_size())
    throw std::runtime_error("backward: upstream size mismatch");
  Gradients g = zero_gradients(net);
  std::vector<double> grad_out = upstream;
  for (size_t t = net.layers.size(); t-- > 0;) {
    const Layer& layer = net.layers[t];
    const std::vector<double>& in = trace.activations[t];
    std::vector<double> delta(layer.out);
    for (size_t i = 0; i < layer.out; ++i)
      delta[i] = grad_out[i] *
                 activate_grad(layer.act, trace.pre[t][i], trace.activations[t + 1][i]);
    for (size_t i = 0; i < layer.out; ++i) {
      for (size_t j = 0; j < layer.in; ++j)
        g.w[t][i * layer.in + j] = delta[i] * in[j];
      g.b[t][i] = delta[i];
    }
    std::vector<double> grad_in(layer.in, 0.0);
    for (size_t i = 0; i < layer.out; ++i)
      for (size_t j = 0; j < layer.in; ++j)
        grad_in[j] += delta[i] * layer.w[i * layer.in + j];
    grad_out = std::move(grad_in);
  }
  g.input = std::move(grad_out);
  return g;
}

void accumulate(Gradients& acc, const Gradients& g) {
  for (size_t t = 0; t < acc.w.size(); ++t) {
    for (size_t i = 0; i < acc.w[t].size(); ++i) acc.w[t][i] += g.w[t][i];
    for (size_t i = 0; i < acc.b[t].size(); ++i) acc.b[t][i] += g.b[t][i];
  }
}

void scale_gradients(Gradients& g, double s) {
  for (auto& wl : g.w)
    for (auto& v : wl) v *= s;
  for (auto& bl : g.b)
    for (auto& v : bl) v *= s;
}

void sgd_step(DenseNet& net, const Gradients& grads, double lr) {
  for (size_t t = 0; t < net.layers.size(); ++t) {
    Layer& layer = net.layers[t];
    for (size_t i = 0; i < layer.w.size(); ++i) {
      if (!std::isfinite(grads.w[t][i]))
        throw std::runtime_error("sgd_step: non-finite weight gradient");
      layer.w[i] -= lr * grads.w[t][i];
      if (!std::isfinite(layer.w[i]))
        throw std::runtime_error("sgd_step: weight became non-finite");
    }
    for (size_t i = 0; i < layer.b.size(); ++i) {
      if (!std::isfinite(grads.b[t][i]))
        throw std::runtime_error("sgd_step: non-finite bias gradient");
      layer.b[i] -= lr * grads.b[t][i];
      if (!std::isfinite(layer.b[i]))
        throw std::runtime_error("sgd_step: bias became non-finite");
    }
  }
}

}  // namespace mib
