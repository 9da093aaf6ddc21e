#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vtpalm/image_ops.hpp"
#include "vtpalm/tactile.hpp"
#include "vtpalm/texture.hpp"

using namespace vtpalm;
using namespace vtpalm::tactile;

TEST_CASE("normals of simple surfaces") {
  const auto flat = normals_from_height(HeightMap(ScalarField(5, 4, 0.3), 0.1));
  for (const auto& n : flat.normals) {
    CHECK(n[0] == 0.0);
    CHECK(n[1] == 0.0);
    CHECK(n[2] == -1.0);
  }
  ScalarField plane(6, 5);
  for (std::size_t v = 0; v < 5; ++v)
    for (std::size_t u = 0; u < 6; ++u) plane(u, v) = 0.1 * static_cast<double>(u) + 2.0;
  const auto n = normals_from_height(HeightMap(plane, 0.1));
  for (std::size_t v = 0; v < 5; ++v)
    for (std::size_t u = 1; u < 5; ++u) {
      CHECK(n(u, v)[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
      CHECK(n(u, v)[1] == doctest::Approx(0.0));
      CHECK(n(u, v)[2] == doctest::Approx(-1.0 / std::sqrt(2.0)));
    }
}

TEST_CASE("sphere cap normals match the analytic sphere") {
  const double r = 2.5, pitch = 0.05, cu = 64, cv = 64;
  const auto g = make_height_sphere_press(r, 1.0, cu, cv, 128, 128, pitch);
  const auto n = normals_from_height(g.height);
  double worst = 0.0;
  for (std::size_t v = 0; v < 128; ++v)
    for (std::size_t u = 0; u < 128; ++u) {
      const double x = (static_cast<double>(u) - cu) * pitch, y = (static_cast<double>(v) - cv) * pitch;
      if (std::hypot(x, y) > 0.8 * g.r_star) continue;
      const double s = std::sqrt(r * r - x * x - y * y);
      const double gu = x / s, gv = y / s, norm = std::sqrt(gu * gu + gv * gv + 1);
      worst = std::max({worst, std::fabs(n(u, v)[0] - gu / norm), std::fabs(n(u, v)[1] - gv / norm),
                        std::fabs(n(u, v)[2] + 1 / norm)});
    }
  CHECK(worst < 1e-3);
}

TEST_CASE("flat Lambert shading") {
  const auto rig = LightingRig::standard(45.0, 0.6, 0.2, 0.0, 0.0);
  const auto img = render(HeightMap(ScalarField(8, 6, 0.0), 0.04), rig, 1);
  for (float x : img.data()) CHECK(x == doctest::Approx(0.2 + 0.6 * std::cos(std::numbers::pi / 4)).epsilon(1e-6));
}

TEST_CASE("rendering is deterministic per seed") {
  const auto g = make_height_sphere_press(2.5, 0.8, 40, 30, 80, 60, 0.04);
  const auto noisy = LightingRig::standard(45, 0.6, 0.2, 0.02);
  CHECK(render(g.height, noisy, 5) == render(g.height, noisy, 5));
  CHECK(!(render(g.height, noisy, 5) == render(g.height, noisy, 6)));
  const auto clean = LightingRig::standard(45, 0.6, 0.2, 0.0);
  CHECK(render(g.height, clean, 5) == render(g.height, clean, 9));
}

TEST_CASE("each channel peaks towards its light") {
  const double cu = 100, cv = 80;
  const auto g = make_height_sphere_press(2.5, 1.0, cu, cv, 200, 160, 0.04);
  const auto rig = LightingRig::standard(45, 0.6, 0.2, 0.0, 0.0);
  const auto img = render(g.height, rig, 1);
  for (std::size_t c = 0; c < 3; ++c) {
    float best = -1;
    std::size_t bu = 0, bv = 0;
    for (std::size_t v = 0; v < 160; ++v)
      for (std::size_t u = 0; u < 200; ++u)
        if (img.at(u, v, c) > best) best = img.at(u, v, c), bu = u, bv = v;
    // Cap slopes point radially outwards; the facet tilted most towards the
    // light is displaced from the centre in the light's horizontal direction.
    const double du = static_cast<double>(bu) - cu, dv = static_cast<double>(bv) - cv;
    const double lx = rig.directions[c][0], ly = rig.directions[c][1];
    CHECK(std::hypot(du, dv) > 5.0);
    CHECK((du * lx + dv * ly) / (std::hypot(du, dv) * std::hypot(lx, ly)) > 0.95);
  }
}

TEST_CASE("shading is monotone in n.l") {
  const auto rig = LightingRig::standard(45, 0.6, 0.2, 0.0);
  NormalField nf{2, 1, {}};
  const double a = 0.3, b = 0.6;
  // Tilt towards light 0 increases n.l for channel 0.
  nf.normals = {Vec3{-std::sin(a), 0, -std::cos(a)}, Vec3{-std::sin(b), 0, -std::cos(b)}};
  const auto img = shade(nf, rig, 0);
  const double d0 = -std::sin(a) * rig.directions[0][0] - std::cos(a) * rig.directions[0][2];
  const double d1 = -std::sin(b) * rig.directions[0][0] - std::cos(b) * rig.directions[0][2];
  CHECK((d1 > d0) == (img.at(1, 0, 0) > img.at(0, 0, 0)));
}

TEST_CASE("rig validation") {
  CHECK_ERROR_KIND(LightingRig::standard(45, 0.9, 0.2), ErrorKind::InvalidArgument);
  CHECK_ERROR_KIND(LightingRig::standard(45, 0.6, 0.2, -0.1), ErrorKind::InvalidArgument);
  auto rig = LightingRig::standard();
  rig.directions[1] = {1, 1, 0};
  CHECK_ERROR_KIND(rig.validate(), ErrorKind::InvalidArgument);
}

TEST_CASE("sphere press geometry") {
  const auto g = make_height_sphere_press(5.0, 1.0, 50, 50, 101, 101, 0.05);
  CHECK(g.r_star == doctest::Approx(3.0));
  CHECK(g.height.z(50, 50) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(g.height.z(0, 0) == 0.0);
  const auto flat = make_height_sphere_press(5.0, 0.0, 50, 50, 20, 20, 0.05);
  for (double z : flat.height.z.values()) CHECK(z == 0.0);
  CHECK_ERROR_KIND(make_height_sphere_press(2.0, 2.0, 0, 0, 8, 8, 0.1), ErrorKind::InvalidArgument);
}

TEST_CASE("pressed minus reference is confined to the contact disc") {
  const double cu = 90, cv = 70;
  const auto rig = LightingRig::standard(45, 0.6, 0.2, 0.005);
  const auto g = make_height_sphere_press(2.5, 0.8, cu, cv, 180, 140, 0.04);
  const auto flat = make_height_sphere_press(2.5, 0.0, cu, cv, 180, 140, 0.04);
  const auto d = difference_image(render(g.height, rig, 1), render(flat.height, rig, 2));
  const double rpx = g.r_star / 0.04;
  for (std::size_t v = 0; v < 140; ++v)
    for (std::size_t u = 0; u < 180; ++u)
      if (std::hypot(static_cast<double>(u) - cu, static_cast<double>(v) - cv) > rpx + 1.5) CHECK(d.at(u, v) < 0.04);
}

TEST_CASE("rough surfaces") {
  const auto zero = make_height_rough(0.2, 0.0, 16, 16, 0.01, 1);
  for (double z : zero.z.values()) CHECK(z == 0.0);
  const auto h = make_height_rough(0.05, 0.003, 128, 96, 0.01, 7);
  double ss = 0, mean = 0;
  for (double z : h.z.values()) mean += z;
  mean /= static_cast<double>(h.z.size());
  for (double z : h.z.values()) ss += (z - mean) * (z - mean);
  CHECK(std::sqrt(ss / static_cast<double>(h.z.size())) == doctest::Approx(0.003).epsilon(0.05));

  const auto coarse = make_height_rough(0.5, 0.01, 128, 128, 0.01, 3);
  const auto fine = make_height_rough(0.1, 0.01, 128, 128, 0.01, 3);
  CHECK(texture::amplitude_spectrum(fine.z).high_freq_ratio > texture::amplitude_spectrum(coarse.z).high_freq_ratio);
}

TEST_CASE("normals ignore a constant height offset") {
  auto h = make_height_rough(0.1, 0.01, 32, 32, 0.01, 2);
  const auto a = normals_from_height(h);
  for (double& z : h.z.values()) z += 3.25;
  const auto b = normals_from_height(h);
  for (std::size_t i = 0; i < a.normals.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(a.normals[i][k] == doctest::Approx(b.normals[i][k]).epsilon(1e-9));
}
