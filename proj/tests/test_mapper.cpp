#include <cmath>
#include <numeric>

#include "fd_check.hpp"
#include "support.hpp"
#include "vtpalm/mapper.hpp"
#include "vtpalm/random.hpp"

using namespace vtpalm;
using namespace vtpalm::mapper;

namespace {

const tactile::LightingRig& rig() {
  static const auto r = tactile::LightingRig::standard(45, 0.6, 0.2, 0.01);
  return r;
}

tactile::SpherePress press(double depth, double cu, double cv, std::uint64_t seed) {
  const auto g = tactile::make_height_sphere_press(2.5, depth, cu, cv, 256, 192, 0.04);
  const auto flat = tactile::make_height_sphere_press(2.5, 0.0, cu, cv, 256, 192, 0.04);
  return {tactile::render(g.height, rig(), seed), tactile::render(flat.height, rig(), seed + 1), cu, cv, g.r_star, 2.5,
          0.04};
}

struct Trained {
  std::vector<tactile::GradientSample> dataset;
  TrainResult result;
};

// Trained once per process on a reduced press set.
const Trained& trained() {
  static const Trained t = [] {
    Rng rng(21);
    std::vector<tactile::SpherePress> presses;
    for (int k = 0; k < 12; ++k)
      presses.push_back(press(rng.uniform(0.4, 1.0), rng.uniform(63, 193), rng.uniform(63, 129), 100 + 2 * k));
    Trained out;
    out.dataset = tactile::build_dataset(presses);
    out.result = train(out.dataset, MlpConfig{});
    return out;
  }();
  return t;
}

std::vector<tactile::GradientSample> random_batch(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<tactile::GradientSample> b(n);
  for (auto& s : b) {
    s = {static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()),
         static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform(-1, 1)),
         static_cast<float>(rng.uniform(-1, 1))};
  }
  return b;
}

double loss_of(const MlpWeights& w, std::span<const tactile::GradientSample> batch) {
  return loss_and_gradient(w, batch).loss;
}

}  // namespace

TEST_CASE("configuration defaults and validation") {
  const MlpConfig c;
  CHECK(c.hidden_sizes == std::vector<std::size_t>{16, 64, 32, 8});
  CHECK(c.dropout_p == 0.3);
  CHECK(c.learning_rate == 3e-5);
  CHECK(c.max_epochs == 120);
  CHECK(c.patience == 10);
  MlpConfig bad;
  bad.dropout_p = 1.0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::InvalidArgument);
  const auto kv = KeyValueConfig::parse("hidden_sizes=4,3\nlearning_rate=1e-3");
  CHECK(MlpConfig::from_config(kv).hidden_sizes == std::vector<std::size_t>{4, 3});
}

TEST_CASE("weights shape and parameter count") {
  const std::vector<std::size_t> hidden{16, 64, 32, 8};
  const auto w = MlpWeights::initialize(hidden, 42);
  CHECK(w.layers.size() == 5);
  CHECK(w.parameter_count() == (5 * 16 + 16) + (16 * 64 + 64) + (64 * 32 + 32) + (32 * 8 + 8) + (8 * 2 + 2));
  CHECK(w == MlpWeights::initialize(hidden, 42));
  CHECK(!(w == MlpWeights::initialize(hidden, 43)));
}

TEST_CASE("backprop matches central finite differences") {
  const std::vector<std::size_t> hidden{16, 64, 32, 8};
  const auto w = MlpWeights::initialize(hidden, 5);
  const auto batch = random_batch(100, 9);
  const auto r = testing::finite_difference_check(w, batch, 1e-4, true);
  CHECK(r.rel_error < 1e-3);
  CHECK(r.scored + r.straddling == w.parameter_count());
  CHECK(r.straddling * 20 < w.parameter_count());
  // A step small enough to clear every kink scores all parameters.
  const auto all = testing::finite_difference_check(w, batch, 1e-6, false);
  CHECK(all.scored == w.parameter_count());
  CHECK(all.rel_error < 1e-3);
}

TEST_CASE("constant labels are learned") {
  auto data = random_batch(3000, 4);
  for (auto& s : data) s.g_u = s.g_v = 0.0f;
  const auto r = train(data, MlpConfig{});
  CHECK(r.log.epochs.size() <= 120);
  CHECK(r.log.final_val_l1 < 1e-3);
}

TEST_CASE("training is deterministic and early stopping keeps the best epoch") {
  auto data = random_batch(2000, 8);
  for (auto& s : data) {
    s.g_u = 0.5f * s.i_r - s.u;
    s.g_v = s.i_g * s.v;
  }
  MlpConfig cfg;
  cfg.max_epochs = 15;
  cfg.patience = 3;
  const auto a = train(data, cfg), b = train(data, cfg);
  CHECK(a.log == b.log);
  CHECK(a.weights == b.weights);

  const auto& log = a.log;
  double best = INFINITY;
  std::size_t best_epoch = 0;
  for (const auto& e : log.epochs)
    if (e.val_l1 < best) best = e.val_l1, best_epoch = e.epoch;
  CHECK(log.best_epoch == best_epoch);
  CHECK(log.best_val_l1 == best);
  CHECK(log.train_size + log.val_size == data.size());
  CHECK(log.val_size == 300);

  cfg.refit_output = false;
  const auto plain = train(data, cfg);
  CHECK(plain.log.final_val_l1 == doctest::Approx(plain.log.best_val_l1).epsilon(1e-12));
}

TEST_CASE("trained mapper on rendered presses") {
  const auto& t = trained();
  CHECK(t.result.log.final_val_mse <= 0.04);

  const double cu = 131.2, cv = 92.8;
  const auto held = press(0.75, cu, cv, 999);
  const auto dom = tactile::disc_mask(256, 192, cu, cv, 0.95 * held.r_star / 0.04);
  const auto g = infer_gradients(t.result.weights, held.image, &dom);
  const auto base = lookup_baseline(t.dataset, held.image, &dom);

  std::vector<double> pred, truth;
  double mlp_l1 = 0, base_l1 = 0;
  for (std::size_t v = 0; v < 192; ++v)
    for (std::size_t u = 0; u < 256; ++u) {
      if (!dom(u, v)) continue;
      const auto [a, b] = tactile::sphere_gradient((u - cu) * 0.04, (v - cv) * 0.04, 2.5);
      pred.push_back(g.gu(u, v));
      pred.push_back(g.gv(u, v));
      truth.push_back(a);
      truth.push_back(b);
      mlp_l1 += std::fabs(g.gu(u, v) - a) + std::fabs(g.gv(u, v) - b);
      base_l1 += std::fabs(base.gu(u, v) - a) + std::fabs(base.gv(u, v) - b);
    }
  const double n = static_cast<double>(pred.size());
  const double mp = std::accumulate(pred.begin(), pred.end(), 0.0) / n;
  const double mt = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sxy += (pred[i] - mp) * (truth[i] - mt);
    sxx += (pred[i] - mp) * (pred[i] - mp);
    syy += (truth[i] - mt) * (truth[i] - mt);
  }
  CHECK(sxy / std::sqrt(sxx * syy) >= 0.95);
  CHECK(base_l1 / n <= 0.1);
  CHECK(mlp_l1 / n <= base_l1 / n + 0.05);

  for (std::size_t v = 0; v < 192; ++v)
    for (std::size_t u = 0; u < 256; ++u)
      if (!dom(u, v)) CHECK(g.gu(u, v) == 0.0);
}

TEST_CASE("inference edge cases") {
  const std::vector<std::size_t> hidden{16, 64, 32, 8};
  const auto w = MlpWeights::initialize(hidden, 3);
  const RasterImage img(20, 10, 3, 0.5f);
  const auto none = infer_gradients(w, img, nullptr);
  // Equal intensities still differ by position; the field is a smooth function of (u, v) only.
  CHECK(none.gu(3, 4) == infer_gradients(w, img, nullptr).gu(3, 4));
  const SegMask empty(20, 10, false);
  const auto z = infer_gradients(w, img, &empty);
  for (double x : z.gu.values()) CHECK(x == 0.0);
  CHECK_ERROR_KIND(infer_gradients(w, RasterImage(20, 10, 1), nullptr), ErrorKind::DimensionMismatch);

  // Position inputs tied to constants: every pixel then sees identical features.
  MlpWeights flat = w;
  for (std::size_t o = 0; o < flat.layers[0].out; ++o) flat.layers[0].weight[o * 5 + 3] = flat.layers[0].weight[o * 5 + 4] = 0;
  const auto uni = infer_gradients(flat, img, nullptr);
  for (std::size_t i = 0; i < uni.gu.size(); ++i) {
    CHECK(uni.gu[i] == uni.gu[0]);
    CHECK(uni.gv[i] == uni.gv[0]);
  }
}

TEST_CASE("lookup returns the exact label of a matching sample") {
  RasterImage img(4, 3, 3, 0.0f);
  img.at(2, 1, 0) = 0.3f;
  img.at(2, 1, 1) = 0.5f;
  img.at(2, 1, 2) = 0.7f;
  const auto f = pixel_features(img, 2, 1);
  std::vector<tactile::GradientSample> ds = random_batch(50, 2);
  ds[17] = {static_cast<float>(f[0]), static_cast<float>(f[1]), static_cast<float>(f[2]), static_cast<float>(f[3]),
            static_cast<float>(f[4]), 0.125f, -0.375f};
  SegMask m(4, 3, false);
  m.set(2, 1, true);
  const auto g = lookup_baseline(ds, img, &m);
  CHECK(g.gu(2, 1) == 0.125);
  CHECK(g.gv(2, 1) == -0.375);
}

TEST_CASE("weights and log files") {
  const auto dir = testing::scratch_dir("mapper_io");
  const std::vector<std::size_t> hidden{4, 3};
  auto w = MlpWeights::initialize(hidden, 1);
  write_weights(dir / "w.vtpw", w);
  const auto back = read_weights(dir / "w.vtpw");
  REQUIRE(back.layers.size() == w.layers.size());
  for (std::size_t l = 0; l < w.layers.size(); ++l)
    for (std::size_t k = 0; k < w.layers[l].weight.size(); ++k)
      CHECK(back.layers[l].weight[k] == doctest::Approx(w.layers[l].weight[k]).epsilon(1e-6));
  // Re-writing float-exact weights is byte stable.
  write_weights(dir / "w2.vtpw", back);
  CHECK(read_weights(dir / "w2.vtpw") == back);
  CHECK_ERROR_KIND(read_weights(dir / "none.vtpw"), ErrorKind::MissingFile);

  TrainingLog log;
  log.epochs = {{1, 0.5, 0.4, 0.3}, {2, 0.25, 0.2, 0.1}};
  write_log_csv(dir / "log.csv", log);
  CHECK(std::filesystem::file_size(dir / "log.csv") > 0);
}
