#include "intent/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "intent/error.hpp"
#include "intent/eval.hpp"
#include "intent/rng.hpp"
#include "intent/text_io.hpp"

namespace intent {

namespace {

constexpr std::size_t kBlocks = ResidualConvNet::kKernels.size();

// out[o][t] += sum_i sum_j w[o][i][j] * x[i][t + j - pad], zero padded.
void conv_accumulate(const double* w, std::size_t c_in, std::size_t c_out, std::size_t k, const double* x,
                     std::size_t n, double* out) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k - 1) / 2;
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t o = 0; o < c_out; ++o) {
    double* orow = out + o * n;
    for (std::size_t i = 0; i < c_in; ++i) {
      const double* xrow = x + i * n;
      const double* wk = w + (o * c_in + i) * k;
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(sn, sn - shift);
        const double wv = wk[j];
        for (std::ptrdiff_t t = lo; t < hi; ++t) orow[t] += wv * xrow[t + shift];
      }
    }
  }
}

// Gradients of conv_accumulate given dout; dx may be null.
void conv_backward(const double* w, std::size_t c_in, std::size_t c_out, std::size_t k, const double* x,
                   std::size_t n, const double* dout, double* dw, double* dx) {
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k - 1) / 2;
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t o = 0; o < c_out; ++o) {
    const double* drow = dout + o * n;
    for (std::size_t i = 0; i < c_in; ++i) {
      const double* xrow = x + i * n;
      const double* wk = w + (o * c_in + i) * k;
      double* dwk = dw + (o * c_in + i) * k;
      double* dxrow = dx ? dx + i * n : nullptr;
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(sn, sn - shift);
        double acc = 0.0;
        for (std::ptrdiff_t t = lo; t < hi; ++t) acc += drow[t] * xrow[t + shift];
        dwk[j] += acc;
        if (dxrow) {
          const double wv = wk[j];
          for (std::ptrdiff_t t = lo; t < hi; ++t) dxrow[t + shift] += wv * drow[t];
        }
      }
    }
  }
}

// Activations kept for the backward pass. acts[0] is the input.
struct Workspace {
  std::size_t n = 0;
  std::array<std::vector<double>, kBlocks + 1> acts;
  std::vector<double> pooled;
  std::vector<double> da, dz, dx;

  void resize(const ResidualConvNet& net, std::size_t len) {
    n = len;
    acts[0].resize(net.in_channels() * n);
    for (std::size_t b = 1; b <= kBlocks; ++b) acts[b].resize(net.channels() * n);
    pooled.resize(net.channels());
    da.resize(net.channels() * n);
    dz.resize(net.channels() * n);
    dx.resize(net.channels() * n);
  }
};

void check_shape(const ResidualConvNet& net, const WindowTensor& x, std::size_t expected_len) {
  if (x.length == 0 || x.values.size() != net.in_channels() * x.length) {
    throw Error(ErrorKind::Data, fmt::format("shape mismatch: expected {} x N input, got {} values for N={}",
                                             net.in_channels(), x.values.size(), x.length));
  }
  if (expected_len != 0 && x.length != expected_len) {
    throw Error(ErrorKind::Data,
                fmt::format("shape mismatch: window length {} differs from batch length {}", x.length, expected_len));
  }
}

double run_forward(const ResidualConvNet& net, const WindowTensor& x, Workspace& ws) {
  if (ws.n != x.length || ws.acts[0].size() != net.in_channels() * x.length) ws.resize(net, x.length);
  const std::size_t n = x.length;
  const std::size_t c = net.channels();
  const auto p = net.params();
  std::copy(x.values.begin(), x.values.end(), ws.acts[0].begin());
  for (std::size_t b = 0; b < kBlocks; ++b) {
    const auto& L = net.layout(b);
    const std::size_t c_in = net.block_in(b);
    const double* in = ws.acts[b].data();
    double* out = ws.acts[b + 1].data();
    for (std::size_t o = 0; o < c; ++o) std::fill(out + o * n, out + (o + 1) * n, p[L.conv_b + o]);
    conv_accumulate(&p[L.conv_w], c_in, c, ResidualConvNet::kKernels[b], in, n, out);
    if (L.proj_w == ResidualConvNet::npos) {
      for (std::size_t i = 0; i < c * n; ++i) out[i] += in[i];
    } else {
      conv_accumulate(&p[L.proj_w], c_in, c, 1, in, n, out);
    }
    for (std::size_t i = 0; i < c * n; ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  }
  const double* last = ws.acts[kBlocks].data();
  double logit = p[net.head_b()];
  for (std::size_t o = 0; o < c; ++o) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += last[o * n + t];
    ws.pooled[o] = s / static_cast<double>(n);
    logit += p[net.head_w() + o] * ws.pooled[o];
  }
  return logit;
}

// Accumulates d(dlogit * logit)/d(params) into grad, using activations in ws.
void run_backward(const ResidualConvNet& net, Workspace& ws, double dlogit, std::span<double> grad) {
  const std::size_t n = ws.n;
  const std::size_t c = net.channels();
  const auto p = net.params();
  grad[net.head_b()] += dlogit;
  for (std::size_t o = 0; o < c; ++o) {
    grad[net.head_w() + o] += dlogit * ws.pooled[o];
    const double g = dlogit * p[net.head_w() + o] / static_cast<double>(n);
    std::fill(ws.da.begin() + static_cast<std::ptrdiff_t>(o * n),
              ws.da.begin() + static_cast<std::ptrdiff_t>((o + 1) * n), g);
  }
  for (std::size_t bb = kBlocks; bb-- > 0;) {
    const auto& L = net.layout(bb);
    const std::size_t c_in = net.block_in(bb);
    const double* in = ws.acts[bb].data();
    const double* out = ws.acts[bb + 1].data();
    for (std::size_t i = 0; i < c * n; ++i) ws.dz[i] = out[i] > 0.0 ? ws.da[i] : 0.0;
    for (std::size_t o = 0; o < c; ++o) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += ws.dz[o * n + t];
      grad[L.conv_b + o] += s;
    }
    const bool need_dx = bb > 0;
    double* dx = need_dx ? ws.dx.data() : nullptr;
    if (need_dx) std::fill(ws.dx.begin(), ws.dx.begin() + static_cast<std::ptrdiff_t>(c_in * n), 0.0);
    conv_backward(&p[L.conv_w], c_in, c, ResidualConvNet::kKernels[bb], in, n, ws.dz.data(), &grad[L.conv_w], dx);
    if (L.proj_w == ResidualConvNet::npos) {
      if (need_dx) {
        for (std::size_t i = 0; i < c * n; ++i) dx[i] += ws.dz[i];
      }
    } else {
      conv_backward(&p[L.proj_w], c_in, c, 1, in, n, ws.dz.data(), &grad[L.proj_w], dx);
    }
    if (need_dx) std::copy(ws.dx.begin(), ws.dx.begin() + static_cast<std::ptrdiff_t>(c_in * n), ws.da.begin());
  }
}

double bce_with_logit(double logit, double y) {
  return std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t expected_param_count(std::size_t in_channels, std::size_t channels) {
  std::size_t total = 0;
  for (std::size_t b = 0; b < kBlocks; ++b) {
    const std::size_t c_in = b == 0 ? in_channels : channels;
    total += ResidualConvNet::kKernels[b] * c_in * channels + channels;
    if (c_in != channels) total += c_in * channels;
  }
  return total + channels + 1;
}

ResidualConvNet::ResidualConvNet(std::size_t in_channels, std::size_t channels, std::uint64_t seed)
    : in_channels_(in_channels), channels_(channels), seed_(seed) {
  if (in_channels == 0 || channels == 0) throw Error(ErrorKind::Config, "channel counts must be >= 1");
  build_layout();
}

void ResidualConvNet::build_layout() {
  groups_.clear();
  std::size_t off = 0;
  auto add = [&](std::string name, std::size_t size) {
    groups_.push_back({std::move(name), off, size});
    off += size;
    return off - size;
  };
  for (std::size_t b = 0; b < kBlocks; ++b) {
    const std::size_t c_in = block_in(b);
    auto& L = layout_[b];
    L.conv_w = add(fmt::format("block{}.conv.weight", b + 1), kKernels[b] * c_in * channels_);
    L.conv_b = add(fmt::format("block{}.conv.bias", b + 1), channels_);
    L.proj_w = c_in != channels_ ? add(fmt::format("block{}.skip.weight", b + 1), c_in * channels_) : npos;
  }
  head_w_ = add("head.weight", channels_);
  head_b_ = add("head.bias", 1);
  params_.assign(off, 0.0);
}

const ParamGroup& ResidualConvNet::group(std::string_view name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return g;
  }
  throw Error(ErrorKind::Config, fmt::format("no parameter group '{}'", name));
}

std::span<double> ResidualConvNet::group_params(std::string_view name) {
  const auto& g = group(name);
  return std::span<double>(params_).subspan(g.offset, g.size);
}

ResidualConvNet init_model(std::uint64_t seed, std::size_t channels, std::size_t in_channels) {
  ResidualConvNet net(in_channels, channels, seed);
  Rng rng(seed);
  auto fill_uniform = [&](std::size_t off, std::size_t size, double fan_in, double gain) {
    const double bound = std::sqrt(gain / fan_in);
    auto p = net.params();
    for (std::size_t i = 0; i < size; ++i) p[off + i] = rng.uniform(-bound, bound);
  };
  for (std::size_t b = 0; b < kBlocks; ++b) {
    const auto& L = net.layout(b);
    const std::size_t c_in = net.block_in(b);
    const std::size_t k = ResidualConvNet::kKernels[b];
    fill_uniform(L.conv_w, k * c_in * channels, static_cast<double>(k * c_in), 6.0);
    if (L.proj_w != ResidualConvNet::npos) {
      fill_uniform(L.proj_w, c_in * channels, static_cast<double>(c_in), 6.0);
    }
  }
  fill_uniform(net.head_w(), channels, static_cast<double>(channels), 3.0);
  return net;
}

double forward_logit(const ResidualConvNet& net, const WindowTensor& x) {
  check_shape(net, x, 0);
  Workspace ws;
  return run_forward(net, x, ws);
}

std::vector<double> forward(const ResidualConvNet& net, std::span<const WindowTensor> batch) {
  std::vector<double> scores;
  scores.reserve(batch.size());
  Workspace ws;
  const std::size_t len = batch.empty() ? 0 : batch.front().length;
  for (const auto& x : batch) {
    check_shape(net, x, len);
    scores.push_back(sigmoid(run_forward(net, x, ws)));
  }
  return scores;
}

double loss_and_gradient(const ResidualConvNet& net, std::span<const WindowTensor> batch,
                         std::span<const std::size_t> indices, std::span<double> grad) {
  if (indices.empty()) return 0.0;
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != net.param_count()) {
    throw Error(ErrorKind::Config, "gradient buffer size does not match parameter count");
  }
  Workspace ws;
  const double scale = 1.0 / static_cast<double>(indices.size());
  double loss = 0.0;
  const std::size_t len = batch[indices.front()].length;
  for (auto idx : indices) {
    const auto& x = batch[idx];
    check_shape(net, x, len);
    const double y = x.label ? 1.0 : 0.0;
    const double logit = run_forward(net, x, ws);
    loss += bce_with_logit(logit, y);
    if (want_grad) run_backward(net, ws, (sigmoid(logit) - y) * scale, grad);
  }
  return loss * scale;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw Error(ErrorKind::Config, "batch_size must be >= 1");
  if (folds < 2) throw Error(ErrorKind::Config, "folds must be >= 2");
  if (epochs < 1) throw Error(ErrorKind::Config, "epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::Config, "learning rate must be positive");
  if (channels < 1) throw Error(ErrorKind::Config, "channels must be >= 1");
}

AdamOptimizer::AdamOptimizer(std::size_t n, const TrainConfig& cfg)
    : lr_(cfg.learning_rate), b1_(cfg.beta1), b2_(cfg.beta2), eps_(cfg.adam_eps), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double train_epoch(ResidualConvNet& net, AdamOptimizer& opt, std::span<const WindowTensor> data,
                   std::vector<std::size_t>& train_idx, std::size_t batch_size, std::uint64_t shuffle_seed) {
  Rng rng(shuffle_seed);
  rng.shuffle(train_idx.begin(), train_idx.end());
  std::vector<double> grad(net.param_count());
  double loss_sum = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < train_idx.size(); begin += batch_size) {
    const std::size_t end = std::min(train_idx.size(), begin + batch_size);
    std::fill(grad.begin(), grad.end(), 0.0);
    loss_sum += loss_and_gradient(net, data, std::span(train_idx).subspan(begin, end - begin), grad);
    opt.step(net.params(), grad);
    ++batches;
  }
  if (batches == 0) return 0.0;
  const double mean = loss_sum / static_cast<double>(batches);
  if (!std::isfinite(mean)) throw Error(ErrorKind::Numerical, "training loss is not finite");
  return mean;
}

std::vector<std::size_t> stratified_folds(std::span<const WindowTensor> data, std::size_t folds,
                                          std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < data.size(); ++i) (data[i].label ? pos : neg).push_back(i);
  if (pos.size() < folds || neg.size() < folds) {
    throw Error(ErrorKind::Data, fmt::format("insufficient samples for {}-fold stratification: {} positives, "
                                             "{} negatives",
                                             folds, pos.size(), neg.size()));
  }
  Rng rng(seed);
  rng.shuffle(pos.begin(), pos.end());
  rng.shuffle(neg.begin(), neg.end());
  std::vector<std::size_t> fold_of(data.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % folds;
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = i % folds;
  return fold_of;
}

TrainResult train(std::span<const WindowTensor> data, const TrainConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data[i].values) {
      if (!std::isfinite(v)) throw Error(ErrorKind::Numerical, fmt::format("training window {} is not finite", i));
    }
  }
  const auto fold_of = stratified_folds(data, cfg.folds, derive_seed(cfg.seed, {"folds"}));
  TrainResult result;
  result.ensemble.members.resize(cfg.folds);
  result.fold_val_auc.resize(cfg.folds);
  result.epoch_val_auc.assign(cfg.folds, {});
  result.epoch_train_loss.assign(cfg.folds, {});

  auto run_fold = [&](std::size_t f) {
    std::vector<std::size_t> train_idx;
    std::vector<WindowTensor> val;
    std::vector<int> val_labels;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == f) {
        val.push_back(data[i]);
        val_labels.push_back(data[i].label);
      } else {
        train_idx.push_back(i);
      }
    }
    auto net = init_model(derive_seed(cfg.seed, {"init"}, f), cfg.channels, data.front().values.size() / data.front().length);
    AdamOptimizer opt(net.param_count(), cfg);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
      const double loss =
          train_epoch(net, opt, data, train_idx, cfg.batch_size, derive_seed(cfg.seed, {"shuffle"}, f * 1000003 + e));
      result.epoch_train_loss[f].push_back(loss);
      result.epoch_val_auc[f].push_back(roc_auc(forward(net, val), val_labels));
    }
    result.fold_val_auc[f] = result.epoch_val_auc[f].back();
    result.ensemble.members[f] = std::move(net);
  };

  if (cfg.parallel_folds) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(cfg.folds);
    for (std::size_t f = 0; f < cfg.folds; ++f) {
      workers.emplace_back([&, f] {
        try {
          run_fold(f);
        } catch (...) {
          errors[f] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t f = 0; f < cfg.folds; ++f) run_fold(f);
  }
  return result;
}

std::vector<double> predict(const Ensemble& ensemble, std::span<const WindowTensor> windows) {
  if (ensemble.members.empty()) throw Error(ErrorKind::Config, "empty ensemble");
  std::vector<double> scores(windows.size(), 0.0);
  for (const auto& net : ensemble.members) {
    const auto s = forward(net, windows);
    for (std::size_t i = 0; i < s.size(); ++i) scores[i] += s[i];
  }
  const double inv = 1.0 / static_cast<double>(ensemble.members.size());
  for (auto& s : scores) s *= inv;
  return scores;
}

// Checkpoint layout (little endian):
//   "ITSNET\0\1" magic, u32 version, u32 in_channels, u32 channels, u32 block count,
//   u32 kernel[block count], u64 seed, u64 param count, f64 params[param count]
namespace {

constexpr char kMagic[8] = {'I', 'T', 'S', 'N', 'E', 'T', '\0', '\1'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::string_view in, std::size_t& pos, const std::string& source) {
  if (pos + sizeof(T) > in.size()) throw ParseError(source, 0, "truncated checkpoint");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

std::string serialize_checkpoint(const ResidualConvNet& net) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.in_channels()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.channels()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kBlocks));
  for (auto k : ResidualConvNet::kKernels) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(k));
  put_le<std::uint64_t>(out, net.seed());
  put_le<std::uint64_t>(out, net.param_count());
  for (double v : net.params()) put_le<double>(out, v);
  return out;
}

ResidualConvNet deserialize_checkpoint(std::string_view bytes, const std::string& source) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(source, 0, "not a checkpoint (bad magic)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = get_le<std::uint32_t>(bytes, pos, source);
  if (version != kCheckpointVersion) throw ParseError(source, 0, fmt::format("unsupported version {}", version));
  const auto in_ch = get_le<std::uint32_t>(bytes, pos, source);
  const auto ch = get_le<std::uint32_t>(bytes, pos, source);
  const auto nblocks = get_le<std::uint32_t>(bytes, pos, source);
  if (nblocks != kBlocks) throw ParseError(source, 0, "block count mismatch");
  for (std::size_t b = 0; b < kBlocks; ++b) {
    if (get_le<std::uint32_t>(bytes, pos, source) != ResidualConvNet::kKernels[b]) {
      throw ParseError(source, 0, "kernel size mismatch");
    }
  }
  const auto seed = get_le<std::uint64_t>(bytes, pos, source);
  const auto count = get_le<std::uint64_t>(bytes, pos, source);
  if (in_ch == 0 || ch == 0) throw ParseError(source, 0, "zero channel count");
  ResidualConvNet net(in_ch, ch, seed);
  if (count != net.param_count()) {
    throw ParseError(source, 0, fmt::format("parameter count {} does not match architecture ({})", count,
                                            net.param_count()));
  }
  auto p = net.params();
  for (std::size_t i = 0; i < count; ++i) p[i] = get_le<double>(bytes, pos, source);
  if (pos != bytes.size()) throw ParseError(source, 0, "trailing bytes after parameters");
  return net;
}

void save_checkpoint(const ResidualConvNet& net, const std::filesystem::path& path) {
  text::write_file(path, serialize_checkpoint(net));
}

ResidualConvNet load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(text::read_file(path), path.string());
}

}  // namespace intent
