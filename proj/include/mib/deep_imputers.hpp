#pragma once

#include <memory>
#include <vector>

#include "mib/data_matrix.hpp"
#include "mib/imputer.hpp"
#include "mib/neural.hpp"
#include "mib/rng.hpp"

namespace mib {

/// Denoising autoencoder over mean-filled rows. Reconstruction loss covers
/// observed cells only, so unobserved sentinels never influence training.
class AeImputer : public FittedImputer {
 public:
  AeImputer(ImputerSpec spec, const DataMatrix& train);

  const DenseNet& net() const { return net_; }
  // Observed-cell reconstruction MSE before training and after each epoch.
  const std::vector<double>& loss_curve() const { return loss_curve_; }

 protected:
  void fill_missing(DataMatrix& m) const override;

 private:
  DenseNet net_;
  std::vector<double> col_means_;
  std::vector<double> loss_curve_;
};

/// Adversarial imputer: a generator proposes values at missing coordinates
/// and a discriminator learns to tell observed from generated coordinates,
/// guided by a partial hint of the true mask.
class GainImputer : public FittedImputer {
 public:
  GainImputer(ImputerSpec spec, const DataMatrix& train);

  const DenseNet& generator() const { return g_; }
  // Per-coordinate probability that the coordinate is real, in (0, 1).
  std::vector<double> discriminate(const std::vector<double>& completed,
                                   const std::vector<double>& hint) const;
  // Observed-coordinate reconstruction MSE before training and after each epoch.
  const std::vector<double>& recon_curve() const { return recon_curve_; }

  /// H = B .* M + 0.5 * (1 - B) with B ~ Bernoulli(hint_rate) per coordinate.
  static std::vector<double> make_hint(const std::vector<double>& mask_vec,
                                       double hint_rate, SplitMix64& rng);

 protected:
  void fill_missing(DataMatrix& m) const override;

 private:
  DenseNet g_;  // [filled row; mask] -> row of candidate values
  DenseNet d_;  // [completed row; hint] -> per-coordinate logits
  uint64_t transform_seed_ = 0;
  std::vector<double> recon_curve_;
};

std::unique_ptr<FittedImputer> make_autoencoder_imputer(const ImputerSpec& spec,
                                                        const DataMatrix& train);
std::unique_ptr<FittedImputer> make_gain_imputer(const ImputerSpec& spec,
                                                 const DataMatrix& train);

}  // namespace mib
