#include "cdeforest/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cdeforest/errors.hpp"
#include "cdeforest/parallel.hpp"

namespace cdeforest {

namespace {

// Frequencies of the functional noise; 1..kNoiseFrequencies cycles on [0,1].
constexpr int kNoiseFrequencies = 40;

void check_sigma(const SyntheticConfig& config) {
  if (!(config.sigma > 0.0)) throw ConfigError("sigma must be positive");
}

}  // namespace

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::multimodal_s31: return "multimodal_s31";
    case Variant::transition_fig1: return "transition_fig1";
    case Variant::ridge_2d: return "ridge_2d";
    case Variant::functional: return "functional";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::multimodal_s31, Variant::transition_fig1, Variant::ridge_2d,
                    Variant::functional}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + name + "'");
}

double default_sigma(Variant variant) {
  switch (variant) {
    case Variant::multimodal_s31: return 0.25;
    case Variant::transition_fig1: return 0.3;
    case Variant::ridge_2d: return 0.02;
    case Variant::functional: return 0.1;
  }
  return 0.25;
}

Dataset gen_multimodal(const SyntheticConfig& config) {
  check_sigma(config);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::bernoulli_distribution second(0.5);
  std::normal_distribution<double> noise(0.0, config.sigma);

  Dataset data;
  data.covariates = Matrix(config.n, 20);
  data.responses = Matrix(config.n, 1);
  for (std::size_t i = 0; i < config.n; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 20; ++c) {
      data.covariates(i, c) = unif(rng);
      if (c < 10) sum += data.covariates(i, c);
    }
    const double center = std::floor(sum);
    data.responses(i, 0) = (second(rng) ? -center : center) + noise(rng);
  }
  for (int c = 1; c <= 10; ++c) data.covariate_names.push_back("x" + std::to_string(c));
  for (int c = 1; c <= 10; ++c) data.covariate_names.push_back("z" + std::to_string(c));
  data.response_names = {"y"};
  return data;
}

Dataset gen_transition(const SyntheticConfig& config) {
  check_sigma(config);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::bernoulli_distribution upper(0.5);
  std::normal_distribution<double> noise(0.0, config.sigma);

  Dataset data;
  data.covariates = Matrix(config.n, 1);
  data.responses = Matrix(config.n, 1);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double x = unif(rng);
    const bool up = upper(rng);
    const double e = noise(rng);
    data.covariates(i, 0) = x;
    data.responses(i, 0) = x < 0.5 ? e : (up ? 1.0 : -1.0) + e;
  }
  data.covariate_names = {"x"};
  data.response_names = {"y"};
  return data;
}

Dataset gen_ridge_2d(const SyntheticConfig& config, std::vector<double>* latent) {
  check_sigma(config);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> latent_draw(0.5, 1.5);
  std::uniform_real_distribution<double> first(0.2, 0.9);
  std::normal_distribution<double> jitter(0.0, 0.05);
  std::normal_distribution<double> noise(0.0, config.sigma);

  Dataset data;
  data.covariates = Matrix(config.n, 1);
  data.responses = Matrix(config.n, 2);
  if (latent) latent->resize(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double t = latent_draw(rng);
    if (latent) (*latent)[i] = t;
    data.covariates(i, 0) = t * (1.0 + jitter(rng));
    const double y1 = first(rng);
    data.responses(i, 0) = y1;
    data.responses(i, 1) = t / std::sqrt(y1) + noise(rng);
  }
  data.covariate_names = {"x"};
  data.response_names = {"y1", "y2"};
  return data;
}

Dataset gen_functional(const SyntheticConfig& config) {
  check_sigma(config);
  if (config.curve_noise < 0.0) throw ConfigError("curve noise must be non-negative");
  Rng rng(config.seed);
  std::uniform_real_distribution<double> amplitude(0.0, 2.0);
  std::normal_distribution<double> standard(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, config.sigma);

  const std::size_t m = kFunctionalPoints;
  FunctionalBlock block;
  block.domain_points.resize(m);
  for (std::size_t k = 0; k < m; ++k) block.domain_points[k] = static_cast<double>(k) / (m - 1);
  block.values = Matrix(config.n, m);

  // Pointwise variance of sum_f (u_f cos + v_f sin) with unit normals is K.
  const double coef_scale = config.curve_noise / std::sqrt(static_cast<double>(kNoiseFrequencies));
  Dataset data;
  data.responses = Matrix(config.n, 1);
  std::vector<double> cos_coef(kNoiseFrequencies);
  std::vector<double> sin_coef(kNoiseFrequencies);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double a = amplitude(rng);
    for (int f = 0; f < kNoiseFrequencies; ++f) {
      cos_coef[f] = coef_scale * standard(rng);
      sin_coef[f] = coef_scale * standard(rng);
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double s = block.domain_points[k];
      const double z = (s - kBumpCenter) / kBumpWidth;
      double value = a * std::exp(-0.5 * z * z);
      for (int f = 0; f < kNoiseFrequencies; ++f) {
        const double phase = 2.0 * std::numbers::pi * (f + 1) * s;
        value += cos_coef[f] * std::cos(phase) + sin_coef[f] * std::sin(phase);
      }
      block.values(i, k) = value;
    }
    data.responses(i, 0) = a + noise(rng);
  }
  data.functional.push_back(std::move(block));
  data.covariates = Matrix(config.n, 0);
  data.response_names = {"y"};
  return data;
}

Dataset generate(const SyntheticConfig& config) {
  switch (config.variant) {
    case Variant::multimodal_s31: return gen_multimodal(config);
    case Variant::transition_fig1: return gen_transition(config);
    case Variant::ridge_2d: return gen_ridge_2d(config);
    case Variant::functional: return gen_functional(config);
  }
  throw ConfigError("unknown variant");
}

}  // namespace cdeforest
