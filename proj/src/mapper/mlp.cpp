#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mapper/net.hpp"

namespace vtpalm::mapper {

namespace fs = std::filesystem;

namespace detail {

void pack_batch(std::span<const tactile::GradientSample> samples, std::span<const std::size_t> index, Matrix& x,
                Matrix& t) {
  const auto n = static_cast<Eigen::Index>(index.size());
  x.resize(kInputs, n);
  t.resize(kOutputs, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& s = samples[index[static_cast<std::size_t>(j)]];
    x(0, j) = s.i_r;
    x(1, j) = s.i_g;
    x(2, j) = s.i_b;
    x(3, j) = s.u;
    x(4, j) = s.v;
    t(0, j) = s.g_u;
    t(1, j) = s.g_v;
  }
}

const Matrix& forward(const MlpWeights& w, const Matrix& x, Activations& act, double dropout_p, Rng* rng) {
  const std::size_t n_layers = w.layers.size();
  act.pre.resize(n_layers);
  act.post.resize(n_layers);
  act.post[0] = x;
  act.dropout.resize(0, 0);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = w.layers[l];
    const Eigen::Map<const Eigen::VectorXd> b(layer.bias.data(), static_cast<Eigen::Index>(layer.out));
    act.pre[l].noalias() = weight_of(layer) * act.post[l];
    act.pre[l].colwise() += b;
    if (l + 1 == n_layers) break;
    Matrix a = act.pre[l].cwiseMax(0.0);
    if (l + 2 == n_layers && rng && dropout_p > 0.0) {
      act.dropout.resize(a.rows(), a.cols());
      const double keep_scale = 1.0 / (1.0 - dropout_p);
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) act.dropout(i, j) = rng->uniform() < dropout_p ? 0.0 : keep_scale;
      }
      a.array() *= act.dropout.array();
    }
    act.post[l + 1] = std::move(a);
  }
  return act.pre.back();
}

double backward(const MlpWeights& w, const Activations& act, const Matrix& target, std::vector<Layer>& grads) {
  const std::size_t n_layers = w.layers.size();
  const Matrix& y = act.pre.back();
  const double denom = static_cast<double>(y.size());
  const Matrix diff = y - target;
  const double loss = diff.cwiseAbs().sum() / denom;

  grads.resize(n_layers);
  Matrix delta = diff.unaryExpr([](double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }) / denom;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = w.layers[l];
    Layer& g = grads[l];
    g.in = layer.in;
    g.out = layer.out;
    g.weight.resize(layer.weight.size());
    g.bias.resize(layer.bias.size());
    RowMajorMap gw(g.weight.data(), static_cast<Eigen::Index>(layer.out), static_cast<Eigen::Index>(layer.in));
    gw.noalias() = delta * act.post[l].transpose();
    Eigen::Map<Eigen::VectorXd>(g.bias.data(), static_cast<Eigen::Index>(layer.out)) = delta.rowwise().sum();
    if (l == 0) break;
    Matrix upstream = weight_of(layer).transpose() * delta;
    upstream.array() *= (act.pre[l - 1].array() > 0.0).cast<double>();
    if (l + 1 == n_layers && act.dropout.size() > 0) upstream.array() *= act.dropout.array();
    delta = std::move(upstream);
  }
  return loss;
}

}  // namespace detail

void MlpConfig::validate() const {
  require(!hidden_sizes.empty(), ErrorKind::InvalidArgument, "at least one hidden layer is required");
  for (auto h : hidden_sizes) require(h > 0, ErrorKind::InvalidArgument, "hidden layer sizes must be > 0");
  require(dropout_p >= 0.0 && dropout_p < 1.0, ErrorKind::InvalidArgument, "dropout must lie in [0, 1)");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorKind::InvalidArgument, "learning rate must be > 0");
  require(max_epochs > 0 && batch_size > 0, ErrorKind::InvalidArgument, "epochs and batch size must be > 0");
  require(validation_fraction > 0.0 && validation_fraction < 1.0, ErrorKind::InvalidArgument,
          "validation fraction must lie in (0, 1)");
}

MlpConfig MlpConfig::from_config(const KeyValueConfig& cfg) {
  MlpConfig c;
  if (cfg.contains("hidden_sizes")) {
    c.hidden_sizes.clear();
    std::string text = cfg.get_string("hidden_sizes", "");
    for (char& ch : text) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream in(text);
    long h = 0;
    while (in >> h) {
      require(h > 0, ErrorKind::InvalidArgument, "hidden_sizes entries must be > 0");
      c.hidden_sizes.push_back(static_cast<std::size_t>(h));
    }
    require(in.eof(), ErrorKind::InvalidArgument, "hidden_sizes must be a list of integers");
  }
  c.dropout_p = cfg.get_double("dropout_p", c.dropout_p);
  c.learning_rate = cfg.get_double("learning_rate", c.learning_rate);
  c.max_epochs = static_cast<std::size_t>(cfg.get_long("max_epochs", static_cast<long>(c.max_epochs)));
  c.patience = static_cast<std::size_t>(cfg.get_long("patience", static_cast<long>(c.patience)));
  c.batch_size = static_cast<std::size_t>(cfg.get_long("batch_size", static_cast<long>(c.batch_size)));
  c.validation_fraction = cfg.get_double("validation_fraction", c.validation_fraction);
  c.seed = static_cast<std::uint64_t>(cfg.get_long("seed", static_cast<long>(c.seed)));
  c.refit_output = cfg.get_long("refit_output", c.refit_output ? 1 : 0) != 0;
  c.validate();
  return c;
}

MlpWeights MlpWeights::initialize(std::span<const std::size_t> hidden_sizes, std::uint64_t seed) {
  Rng rng(seed);
  MlpWeights w;
  std::size_t in = kInputs;
  std::vector<std::size_t> sizes(hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(kOutputs);
  for (std::size_t out : sizes) {
    Layer l{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    // Kaiming-uniform with a = sqrt(5), the common framework default. The full
    // ReLU gain sqrt(6 / fan_in) leaves the 8-wide layer fragile under dropout.
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& x : l.weight) x = rng.uniform(-bound, bound);
    w.layers.push_back(std::move(l));
    in = out;
  }
  return w;
}

void MlpWeights::validate() const {
  require(layers.size() >= 2, ErrorKind::InvalidArgument, "network needs at least one hidden layer");
  require(layers.front().in == kInputs && layers.back().out == kOutputs, ErrorKind::DimensionMismatch,
          "network must map 5 inputs to 2 outputs");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    require(layer.weight.size() == layer.in * layer.out && layer.bias.size() == layer.out,
            ErrorKind::DimensionMismatch, "layer " + std::to_string(l) + " payload does not match its shape");
    require(l == 0 || layers[l - 1].out == layer.in, ErrorKind::DimensionMismatch,
            "layer " + std::to_string(l) + " input size does not match the previous layer");
    for (double x : layer.weight) require(std::isfinite(x), ErrorKind::CorruptData, "non-finite weight");
    for (double x : layer.bias) require(std::isfinite(x), ErrorKind::CorruptData, "non-finite bias");
  }
}

std::size_t MlpWeights::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

std::array<double, kOutputs> MlpWeights::predict(const std::array<double, kInputs>& x) const {
  std::vector<double> a(x.begin(), x.end()), next;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    next.assign(layer.out, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double s = layer.bias[o];
      for (std::size_t i = 0; i < layer.in; ++i) s += layer.weight[o * layer.in + i] * a[i];
      next[o] = l + 1 < layers.size() ? std::max(0.0, s) : s;
    }
    a.swap(next);
  }
  return {a[0], a[1]};
}

bool MlpWeights::operator==(const MlpWeights& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer &a = layers[l], &b = other.layers[l];
    if (a.in != b.in || a.out != b.out || a.weight != b.weight || a.bias != b.bias) return false;
  }
  return true;
}

LossGradient loss_and_gradient(const MlpWeights& weights, std::span<const tactile::GradientSample> batch) {
  weights.validate();
  require(!batch.empty(), ErrorKind::InvalidArgument, "empty batch");
  std::vector<std::size_t> index(batch.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  detail::Matrix x, t;
  detail::pack_batch(batch, index, x, t);
  detail::Activations act;
  detail::forward(weights, x, act, 0.0, nullptr);
  LossGradient out;
  out.loss = detail::backward(weights, act, t, out.grads);
  return out;
}

std::array<double, kInputs> pixel_features(const RasterImage& image, std::size_t u, std::size_t v) {
  return {image.at(u, v, 0), image.at(u, v, 1), image.at(u, v, 2),
          tactile::normalized_coordinate(u, image.width()), tactile::normalized_coordinate(v, image.height())};
}

GradientField infer_gradients(const MlpWeights& weights, const RasterImage& image, const SegMask* domain) {
  weights.validate();
  require(image.channels() == 3, ErrorKind::DimensionMismatch, "gradient inference needs an RGB image");
  if (domain) {
    require(domain->width() == image.width() && domain->height() == image.height(), ErrorKind::DimensionMismatch,
            "domain mask does not match the image");
  }
  const std::size_t w = image.width(), h = image.height();
  GradientField out(w, h);
  std::vector<std::size_t> pixels;
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      if (!domain || (*domain)(u, v)) pixels.push_back(v * w + u);
    }
  }
  constexpr std::size_t kChunk = 8192;
  detail::Activations act;
  detail::Matrix x;
  for (std::size_t start = 0; start < pixels.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, pixels.size() - start);
    x.resize(kInputs, static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t p = pixels[start + j];
      const auto f = pixel_features(image, p % w, p / w);
      for (std::size_t i = 0; i < kInputs; ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f[i];
    }
    const detail::Matrix& y = detail::forward(weights, x, act, 0.0, nullptr);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t p = pixels[start + j];
      out.gu[p] = y(0, static_cast<Eigen::Index>(j));
      out.gv[p] = y(1, static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

namespace {

constexpr std::array<char, 4> kMagic = {'V', 'T', 'P', 'W'};

void put_u32(std::ostream& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_f32(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(x));
  put_u32(out, bits);
}

std::uint32_t get_u32(std::istream& in, const fs::path& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, ErrorKind::CorruptData, path.string() + ": truncated weights file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_weights(const fs::path& path, const MlpWeights& weights) {
  weights.validate();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(weights.layers.size()));
  for (const auto& l : weights.layers) {
    put_u32(out, static_cast<std::uint32_t>(l.in));
    put_u32(out, static_cast<std::uint32_t>(l.out));
    for (double x : l.weight) put_f32(out, x);
    for (double x : l.bias) put_f32(out, x);
  }
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

MlpWeights read_weights(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) fail(fs::exists(path) ? ErrorKind::IoFailure : ErrorKind::MissingFile, path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  require(in.gcount() == 4 && magic == kMagic, ErrorKind::UnsupportedFormat, path.string() + ": not a VTPW weights file");
  const std::uint32_t n_layers = get_u32(in, path);
  require(n_layers >= 2 && n_layers <= 64, ErrorKind::CorruptData, path.string() + ": implausible layer count");
  MlpWeights w;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    Layer layer;
    layer.in = get_u32(in, path);
    layer.out = get_u32(in, path);
    require(layer.in > 0 && layer.out > 0 && layer.in <= 65536 && layer.out <= 65536, ErrorKind::CorruptData,
            path.string() + ": implausible layer shape");
    layer.weight.resize(layer.in * layer.out);
    layer.bias.resize(layer.out);
    for (double& x : layer.weight) x = std::bit_cast<float>(get_u32(in, path));
    for (double& x : layer.bias) x = std::bit_cast<float>(get_u32(in, path));
    w.layers.push_back(std::move(layer));
  }
  in.peek();
  require(in.eof(), ErrorKind::CorruptData, path.string() + ": trailing bytes after the last layer");
  w.validate();
  return w;
}

void write_log_csv(const fs::path& path, const TrainingLog& log) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.precision(10);
  out << "epoch,train_l1,val_l1,val_mse\n";
  for (const auto& e : log.epochs) out << e.epoch << ',' << e.train_l1 << ',' << e.val_l1 << ',' << e.val_mse << '\n';
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

}  // namespace vtpalm::mapper
