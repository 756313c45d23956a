#include "doctest.h"
#include "fusion/guidance.hpp"
#include "fusion/rng.hpp"
#include "support.hpp"

using namespace fusion;

TEST_CASE("sigma_a squared") {
  std::vector<Mat> lam{Mat::Identity(1, 1), Mat::Identity(1, 1)};
  CHECK(sigma_a_sq({Vec::Constant(1, 3.0), Vec::Constant(1, 3.0)}, lam) == doctest::Approx(0.0));
  CHECK(sigma_a_sq({Vec::Constant(1, -0.25), Vec::Constant(1, 0.25)}, lam) == doctest::Approx(0.0625));
  std::vector<Mat> lam2{Mat::Identity(2, 2), 2 * Mat::Identity(2, 2), Mat::Identity(2, 2)};
  std::vector<Vec> a{Vec::Zero(2), Vec::Ones(2), Vec::Constant(2, -0.3)};
  double base = sigma_a_sq(a, lam2);
  for (auto& v : a) v += Vec::Constant(2, 5.0);
  CHECK(sigma_a_sq(a, lam2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("recommended T under homogeneous sub-posteriors") {
  GuidanceContext ctx = make_context(10, 2, 1000);
  ctx.zeta = 0.5;
  const double k1 = std::sqrt(2.0 / std::log(2.0));
  CHECK(k1 == doctest::Approx(1.70).epsilon(0.005));
  CHECK(recommend_T(ctx) == doctest::Approx(std::sqrt(10.0) * k1).epsilon(1e-12));
  CHECK(recommend_T(ctx) == doctest::Approx(5.372).epsilon(1e-3));
  ctx.zeta = std::exp(-1.0);
  CHECK(recommend_T(ctx) / std::sqrt(10.0) == doctest::Approx(std::sqrt(2.0)));
  // b = 1 gives the identity-preconditioner scaling C^{3/2} k1 / m
  ctx.zeta = 0.5;
  ctx.b = 1;
  CHECK(recommend_T(ctx) == doctest::Approx(std::pow(10.0, 1.5) * k1 / 1000));
}

TEST_CASE("recommended T under super-heterogeneity") {
  GuidanceContext ctx = make_context(2, 2, 500);
  ctx.regime = Regime::SSH;
  estimate_gamma(ctx, 0.0625);
  CHECK(ctx.gamma == doctest::Approx(0.0625 / 250));
  const double k1 = std::sqrt(-(ctx.gamma * 500 / 2 + 1) / std::log(0.5));
  const double k2 = 250 * 2 * k1 / 500;
  CHECK(recommend_T(ctx) == doctest::Approx(std::max(250 * std::pow(2.0, 1.5) * k1 / 500, std::sqrt(2.0) * k2)));
  // an explicit gamma is kept
  ctx.gamma = 3;
  estimate_gamma(ctx, 100);
  CHECK(ctx.gamma == 3);
}

TEST_CASE("zeta outside (0,1) is rejected") {
  GuidanceContext ctx = make_context(2, 1, 10);
  ctx.zeta = 1.0;
  CHECK_THROWS_AS(recommend_T(ctx), Error);
  ctx.zeta = 0.5;
  ctx.zeta_prime = 0;
  CHECK_THROWS_AS(regular_mesh(1.0, 0.0, ctx), Error);
}

TEST_CASE("nu estimates") {
  Mat one = Mat::Constant(1, 1, 3.0);
  CHECK(nu_hat({one}, Vec::Ones(1), {Vec::Constant(1, 1.0)}, {Mat::Identity(1, 1)}) == doctest::Approx(4.0));

  Rng rng(5);
  const int C = 3, d = 2, N = 25;
  std::vector<Mat> pos(C, Mat(d, N));
  std::vector<Vec> a(C, Vec(d));
  std::vector<Mat> inv(C);
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < d; ++i) {
      a[c](i) = std_normal(rng);
      for (int k = 0; k < N; ++k) pos[c](i, k) = std_normal(rng);
    }
    Mat b(d, d);
    b << 1 + c, 0.2, 0.2, 1;
    inv[c] = b.inverse();
  }
  Vec w(N);
  for (int k = 0; k < N; ++k) w(k) = unif01(rng);
  w /= w.sum();
  double loop = 0;
  for (int k = 0; k < N; ++k)
    for (int c = 0; c < C; ++c) {
      Vec r = pos[c].col(k) - a[c];
      loop += w(k) * r.dot(inv[c] * r) / C;
    }
  CHECK(nu_hat(pos, w, a, inv) == doctest::Approx(loop).epsilon(1e-12));
}

TEST_CASE("nu sup takes the larger of the centre and position averages") {
  // leaves spread symmetrically about a common mean: centres sit on it
  std::vector<Mat> pos{Mat::Constant(1, 2, 0.0), Mat::Constant(1, 2, 0.0)};
  pos[0] << -1, 1;
  pos[1] << 1, -1;
  std::vector<Vec> a{Vec::Zero(1), Vec::Zero(1)};
  std::vector<Mat> inv{Mat::Identity(1, 1), Mat::Identity(1, 1)};
  Vec w = Vec::Constant(2, 0.5);
  double psi2 = nu_hat(pos, w, a, inv);
  CHECK(psi2 == doctest::Approx(1.0));
  CHECK(nu_sup_hat(pos, w, a, inv, 0.5 * Mat::Identity(1, 1)) == doctest::Approx(psi2));

  // tight leaves away from their hints: the centre average dominates
  std::vector<Mat> pos2{Mat::Constant(1, 2, 0.0), Mat::Constant(1, 2, 0.0)};
  std::vector<Vec> a2{Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  pos2[0] << 1, 1;
  pos2[1] << -1, -1;
  double s = nu_sup_hat(pos2, w, a2, inv, 0.5 * Mat::Identity(1, 1));
  CHECK(s == doctest::Approx(1.0));
  CHECK(s >= nu_hat(pos2, w, a2, inv));
}

TEST_CASE("k4 is the smaller root of its quadratic") {
  GuidanceContext ctx = make_context(10, 2, 1000);
  CHECK(k4_choice(0.5, 0.0, ctx) == doctest::Approx(std::log(2.0)));
  for (double nu : {0.1, 1.0, 3.0, 20.0}) {
    const double l = std::log(0.5);
    const double q = nu * nu * ctx.m * ctx.m / (2 * ctx.b * ctx.b * ctx.C * ctx.d);
    double k = k4_choice(0.5, nu, ctx);
    CHECK(std::abs(k * k + (2 * l - q) * k + l * l) < 1e-10 * std::max(1.0, q * k));
    CHECK(k > 0);
    CHECK(k <= -l + 1e-15);
    double other = l * l / k;  // product of the roots
    CHECK(other >= k);
  }
}

TEST_CASE("regular mesh spacing and shape") {
  GuidanceContext ctx = make_context(10, 2, 1000);
  auto mesh = regular_mesh(5.0, 0.0, ctx);
  const double delta = std::sqrt(std::log(2.0) / 40);
  CHECK(delta == doctest::Approx(0.1316).epsilon(1e-3));
  CHECK(mesh[1] == doctest::Approx(delta));
  CHECK(mesh.size() == size_t(std::ceil(5.0 / delta)) + 1);
  CHECK(mesh.front() == 0);
  CHECK(mesh.back() == 5.0);
  for (size_t j = 1; j < mesh.size(); ++j) CHECK(mesh[j] > mesh[j - 1]);
  ctx.zeta_prime = std::sqrt(0.5);
  auto mesh2 = regular_mesh(5.0, 0.0, ctx);
  CHECK(mesh[1] / mesh2[1] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("adaptive step") {
  GuidanceContext ctx = make_context(10, 2, 1000);
  CHECK(adaptive_next_time(1.0, 0.95, 0.0, ctx) == 1.0);
  double prev = 1e9;
  for (double nu : {0.0, 0.5, 1.0, 2.0, 8.0}) {
    double t = adaptive_next_time(100.0, 1.0, nu, ctx);
    CHECK(t - 1.0 < prev);
    prev = t - 1.0;
  }
  CHECK(adaptive_next_time(100.0, 0.0, 0.0, ctx) == doctest::Approx(regular_mesh(100.0, 0.0, ctx)[1]));
}
