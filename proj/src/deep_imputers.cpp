#include "mib/deep_imputers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mib/errors.hpp"
#include "mib/parallel.hpp"

namespace mib {
namespace {

size_t resolve_hidden(size_t requested, size_t d) {
  if (requested > 0) return requested;
  return std::max<size_t>(2, (d + 1) / 2);
}

std::vector<double> mean_filled_row(const DataMatrix& m, size_t i,
                                    const std::vector<double>& means) {
  std::vector<double> x(m.cols);
  for (size_t j = 0; j < m.cols; ++j)
    x[j] = m.is_observed(i, j) ? m.at(i, j) : means[j];
  return x;
}

}  // namespace

AeImputer::AeImputer(ImputerSpec spec, const DataMatrix& train)
    : FittedImputer(std::move(spec), train.cols) {
  const ImputerSpec& sp = this->spec();
  if (sp.ae_batch < 1) throw ConfigError("autoencoder batch must be >= 1");
  if (!(sp.ae_lr > 0.0)) throw ConfigError("autoencoder lr must be > 0");
  const size_t n = train.rows;
  const size_t d = train.cols;
  const size_t h = resolve_hidden(sp.ae_hidden, d);
  col_means_ = column_means(train, true);
  net_ = make_net({d, h, d}, {Activation::Tanh, Activation::Identity},
                  derive_seed(sp.seed, 1));

  auto observed_mse = [&]() {
    double s = 0.0;
    size_t cnt = 0;
    for (size_t i = 0; i < n; ++i) {
      const std::vector<double> x = mean_filled_row(train, i, col_means_);
      const std::vector<double> out = forward(net_, x);
      for (size_t j = 0; j < d; ++j) {
        if (!train.is_observed(i, j)) continue;
        const double e = out[j] - x[j];
        s += e * e;
        ++cnt;
      }
    }
    return cnt ? s / static_cast<double>(cnt) : 0.0;
  };
  loss_curve_.push_back(observed_mse());

  SplitMix64 shuffle_rng(derive_seed(sp.seed, 2));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t batch = std::min<size_t>(sp.ae_batch, n);
  for (size_t epoch = 0; epoch < sp.ae_epochs; ++epoch) {
    shuffle_inplace(order, shuffle_rng);
    for (size_t start = 0; start < n; start += batch) {
      const size_t stop = std::min(start + batch, n);
      Gradients acc = zero_gradients(net_);
      for (size_t t = start; t < stop; ++t) {
        const size_t i = order[t];
        const std::vector<double> x = mean_filled_row(train, i, col_means_);
        const ForwardTrace trace = forward_trace(net_, x);
        std::vector<double> upstream(d, 0.0);
        for (size_t j = 0; j < d; ++j)
          if (train.is_observed(i, j)) upstream[j] = 2.0 * (trace.output()[j] - x[j]);
        accumulate(acc, backward(net_, trace, upstream));
      }
      scale_gradients(acc, 1.0 / static_cast<double>(stop - start));
      sgd_step(net_, acc, sp.ae_lr);
    }
    loss_curve_.push_back(observed_mse());
  }
}

void AeImputer::fill_missing(DataMatrix& m) const {
  par_for(m.rows, [&](size_t i) {
    bool any = false;
    for (size_t j = 0; j < m.cols; ++j)
      if (!m.is_observed(i, j)) any = true;
    if (!any) return;
    const std::vector<double> x = mean_filled_row(m, i, col_means_);
    const std::vector<double> out = forward(net_, x);
    for (size_t j = 0; j < m.cols; ++j)
      if (!m.is_observed(i, j)) m.values[m.index(i, j)] = out[j];
  });
}

std::vector<double> GainImputer::make_hint(const std::vector<double>& mask_vec,
                                           double hint_rate, SplitMix64& rng) {
  std::vector<double> h(mask_vec.size());
  for (size_t j = 0; j < mask_vec.size(); ++j) {
    const bool revealed = rng.next_double() < hint_rate;
    h[j] = revealed ? mask_vec[j] : 0.5;
  }
  return h;
}

std::vector<double> GainImputer::discriminate(const std::vector<double>& completed,
                                              const std::vector<double>& hint) const {
  std::vector<double> in = completed;
  in.insert(in.end(), hint.begin(), hint.end());
  std::vector<double> z = forward(d_, in);
  for (double& v : z) v = sigmoid(v);
  return z;
}

GainImputer::GainImputer(ImputerSpec spec, const DataMatrix& train)
    : FittedImputer(std::move(spec), train.cols) {
  const ImputerSpec& sp = this->spec();
  if (sp.gain_hint_rate < 0.0 || sp.gain_hint_rate > 1.0)
    throw ConfigError("gain hint_rate must be in [0, 1]");
  if (!(sp.gain_alpha > 0.0)) throw ConfigError("gain alpha must be > 0");
  if (sp.gain_batch < 1) throw ConfigError("gain batch must be >= 1");
  if (!(sp.gain_lr > 0.0)) throw ConfigError("gain lr must be > 0");
  const size_t n = train.rows;
  const size_t d = train.cols;
  const size_t h = std::max<size_t>(2, d);
  // The discriminator net emits logits; discriminate() applies the sigmoid,
  // which keeps the cross-entropy gradient in the well-behaved p - m form.
  g_ = make_net({2 * d, h, d}, {Activation::Tanh, Activation::Identity},
                derive_seed(sp.seed, 1));
  d_ = make_net({2 * d, h, d}, {Activation::Tanh, Activation::Identity},
                derive_seed(sp.seed, 2));
  transform_seed_ = derive_seed(sp.seed, 3);

  const size_t batch = std::min<size_t>(sp.gain_batch, n);
  const size_t batches_per_epoch = (n + batch - 1) / batch;
  const size_t epochs =
      sp.gain_epochs ? sp.gain_epochs
                     : std::max<size_t>(1, (2000 + batches_per_epoch - 1) / batches_per_epoch);

  std::vector<std::vector<double>> mask_vec(n, std::vector<double>(d));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j)
      mask_vec[i][j] = train.is_observed(i, j) ? 1.0 : 0.0;

  auto g_input = [&](size_t i, const std::vector<double>& filled) {
    std::vector<double> in = filled;
    in.insert(in.end(), mask_vec[i].begin(), mask_vec[i].end());
    return in;
  };
  auto recon_mse = [&]() {
    double s = 0.0;
    size_t cnt = 0;
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> filled(d, 0.0);
      for (size_t j = 0; j < d; ++j)
        if (train.is_observed(i, j)) filled[j] = train.at(i, j);
      const std::vector<double> g = forward(g_, g_input(i, filled));
      for (size_t j = 0; j < d; ++j) {
        if (!train.is_observed(i, j)) continue;
        const double e = g[j] - train.at(i, j);
        s += e * e;
        ++cnt;
      }
    }
    return cnt ? s / static_cast<double>(cnt) : 0.0;
  };
  recon_curve_.push_back(recon_mse());

  SplitMix64 shuffle_rng(derive_seed(sp.seed, 4));
  SplitMix64 sample_rng(derive_seed(sp.seed, 5));  // noise and hint draws
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});

  struct SampleState {
    size_t row = 0;
    std::vector<double> filled;  // data with noise at missing coords
    ForwardTrace g_trace;
    std::vector<double> completed;  // mask*filled + (1-mask)*generated
    std::vector<double> hint;
  };

  for (size_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle_inplace(order, shuffle_rng);
    for (size_t start = 0; start < n; start += batch) {
      const size_t stop = std::min(start + batch, n);
      const size_t bsz = stop - start;
      std::vector<SampleState> states(bsz);
      // Discriminator step: predict the mask from the completed sample.
      Gradients d_acc = zero_gradients(d_);
      for (size_t t = 0; t < bsz; ++t) {
        SampleState& st = states[t];
        st.row = order[start + t];
        st.filled.assign(d, 0.0);
        for (size_t j = 0; j < d; ++j) {
          st.filled[j] = train.is_observed(st.row, j)
                             ? train.at(st.row, j)
                             : sample_rng.next_double(0.0, 0.01);
        }
        st.g_trace = forward_trace(g_, g_input(st.row, st.filled));
        const std::vector<double>& gen = st.g_trace.output();
        st.completed.resize(d);
        for (size_t j = 0; j < d; ++j)
          st.completed[j] = mask_vec[st.row][j] > 0.5 ? st.filled[j] : gen[j];
        st.hint = make_hint(mask_vec[st.row], sp.gain_hint_rate, sample_rng);

        std::vector<double> d_in = st.completed;
        d_in.insert(d_in.end(), st.hint.begin(), st.hint.end());
        const ForwardTrace d_trace = forward_trace(d_, d_in);
        std::vector<double> upstream(d);
        for (size_t j = 0; j < d; ++j)
          upstream[j] = sigmoid(d_trace.output()[j]) - mask_vec[st.row][j];
        accumulate(d_acc, backward(d_, d_trace, upstream));
      }
      scale_gradients(d_acc, 1.0 / static_cast<double>(bsz));
      sgd_step(d_, d_acc, sp.gain_lr);

      // Generator step against the updated discriminator: fool it at the
      // missing coordinates while reconstructing the observed ones.
      Gradients g_acc = zero_gradients(g_);
      for (size_t t = 0; t < bsz; ++t) {
        const SampleState& st = states[t];
        std::vector<double> d_in = st.completed;
        d_in.insert(d_in.end(), st.hint.begin(), st.hint.end());
        const ForwardTrace d_trace = forward_trace(d_, d_in);
        std::vector<double> d_upstream(d, 0.0);
        for (size_t j = 0; j < d; ++j)
          if (mask_vec[st.row][j] < 0.5)
            d_upstream[j] = sigmoid(d_trace.output()[j]) - 1.0;
        const std::vector<double> dx =
            backward(d_, d_trace, d_upstream).input;  // d loss / d completed

        size_t n_obs = 0;
        for (size_t j = 0; j < d; ++j)
          if (mask_vec[st.row][j] > 0.5) ++n_obs;
        std::vector<double> g_upstream(d, 0.0);
        const std::vector<double>& gen = st.g_trace.output();
        for (size_t j = 0; j < d; ++j) {
          if (mask_vec[st.row][j] < 0.5) {
            g_upstream[j] = dx[j];
          } else if (n_obs > 0) {
            g_upstream[j] = 2.0 * sp.gain_alpha * (gen[j] - st.filled[j]) /
                            static_cast<double>(n_obs);
          }
        }
        accumulate(g_acc, backward(g_, st.g_trace, g_upstream));
      }
      scale_gradients(g_acc, 1.0 / static_cast<double>(bsz));
      sgd_step(g_, g_acc, sp.gain_lr);
    }
    recon_curve_.push_back(recon_mse());
  }
}

void GainImputer::fill_missing(DataMatrix& m) const {
  const size_t d = n_cols();
  // Noise is drawn row-major up front so the result does not depend on how
  // the per-row forward passes are scheduled.
  std::vector<double> filled(m.rows * d);
  SplitMix64 noise(transform_seed_);
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < d; ++j)
      filled[i * d + j] =
          m.is_observed(i, j) ? m.at(i, j) : noise.next_double(0.0, 0.01);

  par_for(m.rows, [&](size_t i) {
    bool any = false;
    for (size_t j = 0; j < d; ++j)
      if (!m.is_observed(i, j)) any = true;
    if (!any) return;
    std::vector<double> in(filled.begin() + static_cast<ptrdiff_t>(i * d),
                           filled.begin() + static_cast<ptrdiff_t>((i + 1) * d));
    in.resize(2 * d);
    for (size_t j = 0; j < d; ++j) in[d + j] = m.is_observed(i, j) ? 1.0 : 0.0;
    const std::vector<double> gen = forward(g_, in);
    for (size_t j = 0; j < d; ++j)
      if (!m.is_observed(i, j)) m.values[m.index(i, j)] = gen[j];
  });
}

std::unique_ptr<FittedImputer> make_autoencoder_imputer(const ImputerSpec& spec,
                                                        const DataMatrix& train) {
  return std::make_unique<AeImputer>(spec, train);
}

std::unique_ptr<FittedImputer> make_gain_imputer(const ImputerSpec& spec,
                                                 const DataMatrix& train) {
  return std::make_unique<GainImputer>(spec, train);
}

}  // namespace mib
