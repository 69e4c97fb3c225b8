#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "intent/signal.hpp"

namespace intent {

/// A named slice of the flat parameter vector.
struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Three residual conv blocks (kernels 3, 5, 7; C channels; same padding;
/// ReLU after the sum), global average pooling over time, one-logit head.
/// Block 1 maps 3 -> C and uses a 1-wide projection on its skip path when C != 3.
class ResidualConvNet {
public:
  static constexpr std::array<std::size_t, 3> kKernels{3, 5, 7};

  ResidualConvNet() = default;
  ResidualConvNet(std::size_t in_channels, std::size_t channels, std::uint64_t seed = 0);

  std::size_t in_channels() const { return in_channels_; }
  std::size_t channels() const { return channels_; }
  std::uint64_t seed() const { return seed_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<ParamGroup>& groups() const { return groups_; }
  const ParamGroup& group(std::string_view name) const;
  std::span<double> group_params(std::string_view name);

  bool has_projection(std::size_t block) const { return block_in(block) != channels_; }
  std::size_t block_in(std::size_t block) const { return block == 0 ? in_channels_ : channels_; }

  /// Offsets into params() for block b.
  struct BlockLayout {
    std::size_t conv_w, conv_b, proj_w;  // proj_w == npos when the skip is the identity
  };
  const BlockLayout& layout(std::size_t block) const { return layout_[block]; }
  std::size_t head_w() const { return head_w_; }
  std::size_t head_b() const { return head_b_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  void build_layout();

  std::size_t in_channels_ = 3;
  std::size_t channels_ = 32;
  std::uint64_t seed_ = 0;
  std::vector<double> params_;
  std::vector<ParamGroup> groups_;
  std::array<BlockLayout, 3> layout_{};
  std::size_t head_w_ = 0;
  std::size_t head_b_ = 0;
};

/// Analytic parameter count: sum over blocks of (k*c_in*C + C), projections, head.
std::size_t expected_param_count(std::size_t in_channels, std::size_t channels);

/// Fan-in scaled uniform weights, zero biases. Deterministic in `seed`.
ResidualConvNet init_model(std::uint64_t seed, std::size_t channels = 32, std::size_t in_channels = kAxes);

/// Raw logit for one window (length N, in_channels rows).
double forward_logit(const ResidualConvNet& net, const WindowTensor& x);

/// Sigmoid scores for a batch. Throws Error(Data) on shape mismatch.
std::vector<double> forward(const ResidualConvNet& net, std::span<const WindowTensor> batch);

/// Mean binary cross-entropy over the batch; if `grad` is non-empty it receives
/// d(loss)/d(params) (same layout as params()).
double loss_and_gradient(const ResidualConvNet& net, std::span<const WindowTensor> batch,
                         std::span<const std::size_t> indices, std::span<double> grad);

double sigmoid(double z);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t folds = 3;
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t channels = 32;
  std::uint64_t seed = 0;
  bool parallel_folds = false;

  void validate() const;
};

struct Ensemble {
  std::vector<ResidualConvNet> members;
};

struct TrainResult {
  Ensemble ensemble;
  std::vector<double> fold_val_auc;                 // after the final epoch
  std::vector<std::vector<double>> epoch_val_auc;   // [fold][epoch]
  std::vector<std::vector<double>> epoch_train_loss;  // [fold][epoch], mean over batches
};

/// Adam state for one network.
class AdamOptimizer {
public:
  AdamOptimizer(std::size_t n, const TrainConfig& cfg);
  void step(std::span<double> params, std::span<const double> grad);

private:
  double lr_, b1_, b2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

/// Runs one epoch of shuffled mini-batch Adam over `train_idx`; returns mean batch loss.
double train_epoch(ResidualConvNet& net, AdamOptimizer& opt, std::span<const WindowTensor> data,
                   std::vector<std::size_t>& train_idx, std::size_t batch_size, std::uint64_t shuffle_seed);

/// Stratified k-fold split; returns fold index per sample.
std::vector<std::size_t> stratified_folds(std::span<const WindowTensor> data, std::size_t folds,
                                          std::uint64_t seed);

/// One network per fold, each trained on the other folds for cfg.epochs.
TrainResult train(std::span<const WindowTensor> data, const TrainConfig& cfg);

/// Mean of the members' sigmoid outputs.
std::vector<double> predict(const Ensemble& ensemble, std::span<const WindowTensor> windows);

void save_checkpoint(const ResidualConvNet& net, const std::filesystem::path& path);
ResidualConvNet load_checkpoint(const std::filesystem::path& path);
std::string serialize_checkpoint(const ResidualConvNet& net);
ResidualConvNet deserialize_checkpoint(std::string_view bytes, const std::string& source = "<ckpt>");

}  // namespace intent
