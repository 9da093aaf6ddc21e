#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "vtpalm/image.hpp"
#include "vtpalm/keyvalue.hpp"
#include "vtpalm/tactile.hpp"

namespace vtpalm::mapper {

inline constexpr std::size_t kInputs = 5;   // I_R, I_G, I_B, u, v
inline constexpr std::size_t kOutputs = 2;  // G_u, G_v

struct MlpConfig {
  std::vector<std::size_t> hidden_sizes{16, 64, 32, 8};
  double dropout_p = 0.3;  // on the last hidden layer
  double learning_rate = 3e-5;
  std::size_t max_epochs = 120;
  std::size_t patience = 10;
  std::size_t batch_size = 64;
  double validation_fraction = 0.15;
  std::uint64_t seed = 42;
  // After early stopping, re-solve the output layer for mean L1 on the training
  // split with dropout off. Dropout on the narrow last layer otherwise leaves
  // inference outputs shrunk towards zero.
  bool refit_output = true;

  void validate() const;
  static MlpConfig from_config(const KeyValueConfig& cfg);
};

/// Dense layer y = W x + b, W stored row-major (out x in).
struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;
};

struct MlpWeights {
  std::vector<Layer> layers;

  /// Kaiming-uniform weights (bound 1 / sqrt(fan_in)), zero biases.
  static MlpWeights initialize(std::span<const std::size_t> hidden_sizes, std::uint64_t seed);

  void validate() const;
  std::size_t parameter_count() const;
  /// Forward pass without dropout.
  std::array<double, kOutputs> predict(const std::array<double, kInputs>& x) const;

  bool operator==(const MlpWeights& other) const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_l1 = 0.0;
  double val_l1 = 0.0;
  double val_mse = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_l1 = 0.0;
  double final_val_mse = 0.0;  // of the returned weights
  double final_val_l1 = 0.0;   // of the returned weights
  bool output_refit = false;
  bool stopped_early = false;
  std::size_t train_size = 0;
  std::size_t val_size = 0;

  bool operator==(const TrainingLog&) const = default;
};

struct TrainResult {
  MlpWeights weights;
  TrainingLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(std::span<const tactile::GradientSample> dataset, const MlpConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Mean L1 loss over both outputs and its gradient with respect to every
/// parameter, dropout disabled. Gradients share the layout of `weights`.
struct LossGradient {
  double loss = 0.0;
  std::vector<Layer> grads;
};
LossGradient loss_and_gradient(const MlpWeights& weights, std::span<const tactile::GradientSample> batch);

/// Per-pixel forward pass over `domain` (whole frame when null); other pixels get (0, 0).
GradientField infer_gradients(const MlpWeights& weights, const RasterImage& image, const SegMask* domain = nullptr);

/// Nearest training sample in (I_R, I_G, I_B, 0.25 u, 0.25 v) space; its label is copied.
GradientField lookup_baseline(std::span<const tactile::GradientSample> dataset, const RasterImage& image,
                              const SegMask* domain = nullptr);

/// Model inputs for pixel (u, v).
std::array<double, kInputs> pixel_features(const RasterImage& image, std::size_t u, std::size_t v);

// "VTPW", u32 layer count, then per layer u32 in, u32 out, f32 weights, f32 biases.
void write_weights(const std::filesystem::path& path, const MlpWeights& weights);
MlpWeights read_weights(const std::filesystem::path& path);

void write_log_csv(const std::filesystem::path& path, const TrainingLog& log);

}  // namespace vtpalm::mapper
