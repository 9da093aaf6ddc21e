#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mapper/net.hpp"

namespace vtpalm::mapper {

namespace {

struct Adam {
  double lr;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> m, v;

  Adam(const MlpWeights& w, double lr_) : lr(lr_) {
    for (const auto& l : w.layers) {
      m.emplace_back(l.weight.size() + l.bias.size(), 0.0);
      v.emplace_back(l.weight.size() + l.bias.size(), 0.0);
    }
  }

  void apply(MlpWeights& w, const std::vector<Layer>& grads) {
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
      Layer& layer = w.layers[l];
      const Layer& g = grads[l];
      const std::size_t nw = layer.weight.size();
      auto update = [&](double& param, double grad, std::size_t k) {
        m[l][k] = beta1 * m[l][k] + (1.0 - beta1) * grad;
        v[l][k] = beta2 * v[l][k] + (1.0 - beta2) * grad * grad;
        param -= lr * (m[l][k] / c1) / (std::sqrt(v[l][k] / c2) + eps);
      };
      for (std::size_t k = 0; k < nw; ++k) update(layer.weight[k], g.weight[k], k);
      for (std::size_t k = 0; k < layer.bias.size(); ++k) update(layer.bias[k], g.bias[k], nw + k);
    }
  }
};

struct Evaluation {
  double l1 = 0.0;
  double mse = 0.0;
};

Evaluation evaluate(const MlpWeights& w, std::span<const tactile::GradientSample> data,
                    std::span<const std::size_t> index) {
  constexpr std::size_t kChunk = 8192;
  detail::Matrix x, t;
  detail::Activations act;
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t start = 0; start < index.size(); start += kChunk) {
    const auto chunk = index.subspan(start, std::min(kChunk, index.size() - start));
    detail::pack_batch(data, chunk, x, t);
    const detail::Matrix diff = detail::forward(w, x, act, 0.0, nullptr) - t;
    abs_sum += diff.cwiseAbs().sum();
    sq_sum += diff.squaredNorm();
  }
  const double n = static_cast<double>(index.size() * kOutputs);
  return {abs_sum / n, sq_sum / n};
}

// IRLS for min sum |y - W h - b| per output, over last-hidden activations.
void refit_output_layer(MlpWeights& w, std::span<const tactile::GradientSample> data,
                        std::span<const std::size_t> index) {
  constexpr std::size_t kChunk = 8192;
  Layer& out = w.layers.back();
  const auto k = static_cast<Eigen::Index>(out.in + 1);
  const auto n = static_cast<Eigen::Index>(index.size());
  detail::Matrix h(k, n), y(static_cast<Eigen::Index>(kOutputs), n);
  detail::Matrix x, t;
  detail::Activations act;
  for (std::size_t start = 0; start < index.size(); start += kChunk) {
    const auto chunk = index.subspan(start, std::min(kChunk, index.size() - start));
    detail::pack_batch(data, chunk, x, t);
    detail::forward(w, x, act, 0.0, nullptr);
    const auto c0 = static_cast<Eigen::Index>(start), cn = static_cast<Eigen::Index>(chunk.size());
    h.block(0, c0, k - 1, cn) = act.post.back();
    h.block(k - 1, c0, 1, cn).setOnes();
    y.middleCols(c0, cn) = t;
  }
  for (std::size_t o = 0; o < kOutputs; ++o) {
    Eigen::VectorXd theta(k);
    for (std::size_t i = 0; i < out.in; ++i) theta(static_cast<Eigen::Index>(i)) = out.weight[o * out.in + i];
    theta(k - 1) = out.bias[o];
    const Eigen::VectorXd target = y.row(static_cast<Eigen::Index>(o)).transpose();
    for (int it = 0; it < 30; ++it) {
      const Eigen::VectorXd r = target - h.transpose() * theta;
      const Eigen::VectorXd wt = (1.0 / r.array().abs().max(1e-6)).matrix();
      Eigen::MatrixXd a = h * wt.asDiagonal() * h.transpose();
      // Dead ReLU units leave zero rows; a tiny ridge keeps the system solvable.
      a.diagonal().array() += 1e-9 * (a.trace() / static_cast<double>(k) + 1.0);
      const Eigen::VectorXd next = a.ldlt().solve(h * wt.asDiagonal() * target);
      if (!next.allFinite()) break;
      const double step = (next - theta).norm();
      theta = next;
      if (step < 1e-10 * (1.0 + theta.norm())) break;
    }
    for (std::size_t i = 0; i < out.in; ++i) out.weight[o * out.in + i] = theta(static_cast<Eigen::Index>(i));
    out.bias[o] = theta(k - 1);
  }
}

std::uint64_t derive_seed(Rng& rng) { return static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53); }

}  // namespace

TrainResult train(std::span<const tactile::GradientSample> dataset, const MlpConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  require(dataset.size() >= 2, ErrorKind::InsufficientSamples, "training needs at least two samples");

  Rng master(cfg.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  master.shuffle(order.begin(), order.end());
  std::size_t n_val = static_cast<std::size_t>(std::lround(cfg.validation_fraction * static_cast<double>(order.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, order.size() - 1);
  const std::span<const std::size_t> val(order.data(), n_val);
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  TrainResult result;
  result.weights = MlpWeights::initialize(cfg.hidden_sizes, derive_seed(master));
  Rng shuffle_rng(derive_seed(master));
  Rng dropout_rng(derive_seed(master));

  MlpWeights current = result.weights;
  Adam adam(current, cfg.learning_rate);
  TrainingLog& log = result.log;
  log.train_size = train_idx.size();
  log.val_size = n_val;
  log.best_val_l1 = std::numeric_limits<double>::infinity();

  detail::Matrix x, t;
  detail::Activations act;
  std::vector<Layer> grads;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(train_idx.begin(), train_idx.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const std::span<const std::size_t> batch(train_idx.data() + start,
                                               std::min(cfg.batch_size, train_idx.size() - start));
      detail::pack_batch(dataset, batch, x, t);
      detail::forward(current, x, act, cfg.dropout_p, &dropout_rng);
      const double loss = detail::backward(current, act, t, grads);
      require(std::isfinite(loss), ErrorKind::NonFiniteLoss,
              "non-finite training loss in epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(batch.size());
      adam.apply(current, grads);
    }
    const Evaluation ev = evaluate(current, dataset, val);
    require(std::isfinite(ev.l1) && std::isfinite(ev.mse), ErrorKind::NonFiniteLoss,
            "non-finite validation loss in epoch " + std::to_string(epoch));
    const EpochRecord rec{epoch, loss_sum / static_cast<double>(train_idx.size()), ev.l1, ev.mse};
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (ev.l1 < log.best_val_l1) {
      log.best_val_l1 = ev.l1;
      log.best_epoch = epoch;
      log.final_val_mse = ev.mse;
      result.weights = current;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      log.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  if (cfg.refit_output) {
    refit_output_layer(result.weights, dataset, train_idx);
    log.output_refit = true;
  }
  const Evaluation final_ev = evaluate(result.weights, dataset, val);
  log.final_val_l1 = final_ev.l1;
  log.final_val_mse = final_ev.mse;
  return result;
}

}  // namespace vtpalm::mapper
