#pragma once

#include <cstdint>
#include <vector>

namespace mib {

enum class Activation { Identity, Relu, Sigmoid, Tanh };

struct Layer {
  size_t in = 0;
  size_t out = 0;
  std::vector<double> w;  // out x in, row-major
  std::vector<double> b;  // out
  Activation act = Activation::Identity;
};

struct DenseNet {
  std::vector<Layer> layers;

  size_t input_size() const { return layers.front().in; }
  size_t output_size() const { return layers.back().out; }
};

/// widths = {in, h1, ..., out}; acts has widths.size()-1 entries. Weights
/// start uniform in (-a, a) with a = sqrt(6/(fan_in+fan_out)); biases zero.
DenseNet make_net(const std::vector<size_t>& widths,
                  const std::vector<Activation>& acts, uint64_t seed);

std::vector<double> forward(const DenseNet& net, const std::vector<double>& x);

struct ForwardTrace {
  // activations[t] is the input to layer t; activations.back() is the output.
  std::vector<std::vector<double>> activations;
  // pre[t] is layer t's pre-activation.
  std::vector<std::vector<double>> pre;

  const std::vector<double>& output() const { return activations.back(); }
};

ForwardTrace forward_trace(const DenseNet& net, const std::vector<double>& x);

struct Gradients {
  std::vector<std::vector<double>> w;  // per layer, same shape as Layer::w
  std::vector<std::vector<double>> b;
  std::vector<double> input;  // gradient with respect to the net input
};

Gradients zero_gradients(const DenseNet& net);

/// Backpropagates upstream (d loss / d output) through the trace.
Gradients backward(const DenseNet& net, const ForwardTrace& trace,
                   const std::vector<double>& upstream);

/// acc += g for the parameter blocks (the input block is left alone).
void accumulate(Gradients& acc, const Gradients& g);
void scale_gradients(Gradients& g, double s);

/// params -= lr * grads. Throws if any gradient or updated parameter is
/// non-finite.
void sgd_step(DenseNet& net, const Gradients& grads, double lr);

double sigmoid(double z);

}  // namespace mib
