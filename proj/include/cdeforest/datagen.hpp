#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cdeforest/dataset.hpp"

namespace cdeforest {

enum class Variant { multimodal_s31, transition_fig1, ridge_2d, functional };

const char* to_string(Variant variant);
/// Throws ConfigError for an unknown name.
Variant parse_variant(const std::string& name);

struct SyntheticConfig {
  std::size_t n = 1000;
  double sigma = 0.25;
  std::uint64_t seed = 0;
  Variant variant = Variant::multimodal_s31;
  /// Pointwise standard deviation of the functional variant's curve noise.
  double curve_noise = 0.5;
};

/// Conventional noise level of each variant (0.25, 0.3, 0.02, 0.1).
double default_sigma(Variant variant);

/// X_1..X_10, Z_1..Z_10 ~ U(0,1); S uniform on {1,2};
/// Y ~ N(+floor(sum X), sigma) when S = 1, N(-floor(sum X), sigma) when S = 2.
/// Covariates x1..x10 then z1..z10; response y.
Dataset gen_multimodal(const SyntheticConfig& config);

/// x ~ U(0,1); y ~ N(0, sigma) for x < 0.5, otherwise an equal mixture of
/// N(-1, sigma) and N(1, sigma).
Dataset gen_transition(const SyntheticConfig& config);

/// Latent t ~ U(0.5, 1.5), covariate x = t (1 + N(0, 0.05)), y1 ~ U(0.2, 0.9)
/// and y2 = t / sqrt(y1) + N(0, sigma): responses concentrate on the curved
/// ridge y2 sqrt(y1) ~ t. The latent t of each row is written to `latent`
/// when given.
Dataset gen_ridge_2d(const SyntheticConfig& config, std::vector<double>* latent = nullptr);

/// Curves on 500 uniform points of [0,1]: f(s) = a bump(s) + noise(s), with
/// bump a Gaussian bump centred at 0.6 of width 0.1 and noise a random Fourier
/// series of pointwise standard deviation curve_noise (0.5). Response y = a + N(0, sigma),
/// a ~ U(0,2). One functional block, no scalar covariates.
Dataset gen_functional(const SyntheticConfig& config);

inline constexpr std::size_t kFunctionalPoints = 500;
inline constexpr double kBumpCenter = 0.6;
inline constexpr double kBumpWidth = 0.1;

Dataset generate(const SyntheticConfig& config);

}  // namespace cdeforest
