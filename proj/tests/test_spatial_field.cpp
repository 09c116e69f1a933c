#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "gevkrig/field_fit.hpp"
#include "gevkrig/matern.hpp"
#include "gevkrig/rng.hpp"
#include "gevkrig/spatial_field.hpp"

using namespace gevkrig;

TEST_CASE("matern fixed values", "[spatial]") {
  REQUIRE(matern(0.0, 0.5) == 1.0);
  REQUIRE(matern(0.0, 2.5) == 1.0);
  REQUIRE(matern(1.0, 0.5) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
  // closed-form oracle in extended precision: (1+sqrt5+5/3) exp(-sqrt5)
  long double s5 = sqrtl(5.0L);
  long double oracle = (1.0L + s5 + 5.0L / 3.0L) * expl(-s5);
  REQUIRE(matern(1.0, 2.5) == Catch::Approx(double(oracle)).epsilon(1e-14));
  REQUIRE(matern(1.0, 2.5) == Catch::Approx(0.5239941088318203).epsilon(1e-12));
  REQUIRE_THROWS_AS(matern(1.0, 1.5), ConfigError);
}

TEST_CASE("matern is nonincreasing from one", "[spatial]") {
  for (double kappa : {0.5, 2.5}) {
    double prev = matern(0.0, kappa);
    REQUIRE(prev == 1.0);
    for (double d = 0.01; d < 20; d *= 1.3) {
      double v = matern(d, kappa);
      REQUIRE(v <= prev);
      REQUIRE(v >= 0.0);
      prev = v;
    }
  }
}

TEST_CASE("kernel weights normalize, symmetrize, stay continuous", "[spatial]") {
  std::vector<LonLat> one{{-100, 40}};
  auto w1 = kernel_weights(LonLat{-98, 41}, one, 3.0);
  REQUIRE(w1.size() == 1);
  REQUIRE(w1[0] == 1.0);

  std::vector<LonLat> two{{-101, 40}, {-99, 40}};
  auto w2 = kernel_weights(LonLat{-100, 42.5}, two, 3.0);
  REQUIRE(w2[0] == Catch::Approx(0.5).epsilon(1e-14));
  REQUIRE(w2[1] == Catch::Approx(0.5).epsilon(1e-14));

  Rng rng(3);
  std::vector<LonLat> comps;
  for (int k = 0; k < 12; ++k)
    comps.push_back(LonLat{rng.uniform(-110, -90), rng.uniform(35, 45)});
  for (int rep = 0; rep < 50; ++rep) {
    LonLat s{rng.uniform(-110, -90), rng.uniform(35, 45)};
    auto w = kernel_weights(s, comps, 3.0);
    double sum = 0;
    for (double v : w) sum += v;
    REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-12));
    // invariant to component re-ordering
    auto reversed = comps;
    std::reverse(reversed.begin(), reversed.end());
    auto wr = kernel_weights(s, reversed, 3.0);
    for (size_t k = 0; k < comps.size(); ++k)
      REQUIRE(w[k] == Catch::Approx(wr[comps.size() - 1 - k]).epsilon(1e-13));
    // continuity in s
    auto w_eps = kernel_weights(LonLat{s.lon + 1e-7, s.lat}, comps, 3.0);
    for (size_t k = 0; k < comps.size(); ++k)
      REQUIRE(std::fabs(w[k] - w_eps[k]) < 1e-6);
  }
}

TEST_CASE("component-grid geometry reproduces the reference weights", "[spatial]") {
  // Even spacing chosen so neighboring components get weight ~0.0125 with
  // h = 3; the weight at a component's own location is then ~0.95.
  const double h = 3.0;
  const double spacing = std::sqrt(-2.0 * h * std::log(0.0125));
  auto comps = component_layout(-110, -110 + 6 * spacing, 30, 30 + 5 * spacing, spacing);
  REQUIRE(comps.size() == 42);
  double own_sum = 0;
  double neighbor_sum = 0;
  int neighbor_count = 0;
  for (size_t k = 0; k < comps.size(); ++k) {
    auto w = kernel_weights(comps[k], comps, h);
    own_sum += w[k];
    for (size_t j = 0; j < comps.size(); ++j) {
      if (j == k) continue;
      if (distance(comps[j], comps[k]) < spacing * 1.01) {
        neighbor_sum += w[j];
        ++neighbor_count;
      }
    }
  }
  double own_avg = own_sum / double(comps.size());
  REQUIRE(std::fabs(own_avg - 0.95) < 0.02);
  REQUIRE(std::fabs(neighbor_sum / neighbor_count - 0.0125) < 0.004);
}

namespace {
SmoothedFieldModel constant_model(double sigma2, double tau2, const Kernel2& kern,
                                  double kappa, int n_components = 5) {
  SmoothedFieldModel m;
  m.bandwidth = 3.0;
  m.matern_kappa = kappa;
  Rng rng(77);
  for (int k = 0; k < n_components; ++k) {
    MixtureComponentFit c;
    c.location = LonLat{rng.uniform(-105, -95), rng.uniform(36, 44)};
    c.beta0 = 1.0;
    c.beta1 = 0.5;
    c.log_sigma2 = std::log(sigma2);
    c.log_tau2 = std::log(tau2);
    c.kernel = kern;
    c.converged = true;
    m.components.push_back(c);
  }
  return m;
}
}  // namespace

TEST_CASE("smoothing of identical components is the identity", "[spatial]") {
  Kernel2 kern = Kernel2::from_principal(std::log(2.0), std::log(0.5), 0.4);
  auto m = constant_model(1.7, 0.2, kern, 0.5);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    LonLat s{rng.uniform(-105, -95), rng.uniform(36, 44)};
    auto p = m.params_at(s);
    REQUIRE(p.beta0 == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(p.beta1 == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(p.sigma2 == Catch::Approx(1.7).epsilon(1e-12));
    REQUIRE(p.tau2 == Catch::Approx(0.2).epsilon(1e-12));
    REQUIRE(p.kernel.a11 == Catch::Approx(kern.a11).epsilon(1e-12));
  }
}

TEST_CASE("smoothing at a component recovers its own value in the paper geometry",
          "[spatial]") {
  const double h = 3.0;
  const double spacing = std::sqrt(-2.0 * h * std::log(0.0125));
  auto layout = component_layout(-120, -120 + 5 * spacing, 30, 30 + 4 * spacing, spacing);
  SmoothedFieldModel m;
  m.bandwidth = h;
  m.matern_kappa = 0.5;
  Rng rng(13);
  for (size_t k = 0; k < layout.size(); ++k) {
    MixtureComponentFit c;
    c.location = layout[k];
    c.beta0 = 10.0 + rng.uniform(-0.5, 0.5);  // neighbors differ by O(1)
    c.beta1 = 0;
    c.log_sigma2 = 0;
    c.log_tau2 = -2;
    c.kernel = Kernel2{1, 0, 1};
    c.converged = true;
    m.components.push_back(c);
  }
  for (size_t k = 0; k < layout.size(); ++k) {
    auto p = m.params_at(layout[k]);
    REQUIRE(std::fabs(p.beta0 - m.components[k].beta0) <
            0.05 * std::fabs(m.components[k].beta0));
  }
}

TEST_CASE("unconverged components are excluded and renormalized", "[spatial]") {
  Kernel2 kern{1, 0, 1};
  auto m = constant_model(1.0, 0.1, kern, 0.5, 4);
  m.components[2].beta0 = 99.0;  // poison value, but unconverged
  m.components[2].converged = false;
  auto p = m.params_at(LonLat{-100, 40});
  REQUIRE(p.beta0 == Catch::Approx(1.0).epsilon(1e-12));
  for (auto& c : m.components) c.converged = false;
  REQUIRE_THROWS_AS(m.params_at(LonLat{-100, 40}), NumericalError);
}

TEST_CASE("elementwise-smoothed kernels stay SPD", "[spatial]") {
  Rng rng(19);
  for (int rep = 0; rep < 100; ++rep) {
    Kernel2 a = Kernel2::from_principal(rng.uniform(-2, 2), rng.uniform(-2, 2),
                                        rng.uniform(0, M_PI));
    Kernel2 b = Kernel2::from_principal(rng.uniform(-2, 2), rng.uniform(-2, 2),
                                        rng.uniform(0, M_PI));
    double w = rng.uniform();
    Kernel2 mix{w * a.a11 + (1 - w) * b.a11, w * a.a12 + (1 - w) * b.a12,
                w * a.a22 + (1 - w) * b.a22};
    REQUIRE(mix.det() > 0);
    REQUIRE(mix.a11 > 0);
  }
}

TEST_CASE("nonstationary covariance at coincident points is the local variance",
          "[spatial]") {
  auto m = constant_model(2.3, 0.1, Kernel2::from_principal(0.3, -0.2, 0.7), 2.5);
  m.components[1].log_sigma2 = std::log(3.0);  // make the field genuinely vary
  LonLat s{-101.3, 39.2};
  REQUIRE(nonstationary_cov(s, s, m) == Catch::Approx(m.params_at(s).sigma2).epsilon(1e-12));
}

TEST_CASE("nonstationary covariance reduces to stationary anisotropic matern",
          "[spatial]") {
  for (double kappa : {0.5, 2.5}) {
    Kernel2 kern = Kernel2::from_principal(std::log(3.0), std::log(0.8), 0.9);
    const double sigma2 = 1.9;
    auto m = constant_model(sigma2, 0.05, kern, kappa);
    Rng rng(23);
    for (int rep = 0; rep < 100; ++rep) {
      LonLat a{rng.uniform(-105, -95), rng.uniform(36, 44)};
      LonLat b{rng.uniform(-105, -95), rng.uniform(36, 44)};
      double got = nonstationary_cov(a, b, m);
      double q = kern.inv_quad(a.lon - b.lon, a.lat - b.lat);
      double expected = sigma2 * matern(std::sqrt(q), kappa);
      REQUIRE(got == Catch::Approx(expected).epsilon(1e-12).margin(1e-14));
    }
  }
}

TEST_CASE("scalar nonstationary check against the 1-d closed form", "[spatial]") {
  // sigma=1 at both points, kernels diag(1,c) and diag(4,c), separation
  // (1,0): the 2-d formula collapses to sqrt(2)/sqrt(2.5) * exp(-1/sqrt(2.5))
  LocalParams at_s, at_sp;
  at_s.sigma2 = 1.0;
  at_sp.sigma2 = 1.0;
  at_s.kernel = Kernel2{1.0, 0.0, 0.7};
  at_sp.kernel = Kernel2{4.0, 0.0, 0.7};
  double got = nonstationary_cov(LonLat{0, 0}, LonLat{1, 0}, at_s, at_sp, 0.5);
  long double oracle = sqrtl(2.0L) / sqrtl(2.5L) * expl(-1.0L / sqrtl(2.5L));
  REQUIRE(got == Catch::Approx(double(oracle)).epsilon(1e-13));
  REQUIRE(got == Catch::Approx(0.4751962949954797).epsilon(1e-12));
}

TEST_CASE("assembled covariance matrices factorize with bounded jitter", "[spatial]") {
  Rng rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    SmoothedFieldModel m;
    m.bandwidth = 3.0;
    m.matern_kappa = rep % 2 == 0 ? 0.5 : 2.5;
    for (int k = 0; k < 6; ++k) {
      MixtureComponentFit c;
      c.location = LonLat{rng.uniform(-105, -95), rng.uniform(36, 44)};
      c.beta0 = rng.uniform(-1, 1);
      c.beta1 = rng.uniform(-1, 1);
      c.log_sigma2 = rng.uniform(-1, 1);
      c.log_tau2 = rng.uniform(-4, -1);
      c.kernel = Kernel2::from_principal(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                                         rng.uniform(0, M_PI));
      c.converged = true;
      m.components.push_back(c);
    }
    const int n = 120;
    std::vector<LonLat> pts;
    std::vector<LocalParams> params;
    for (int i = 0; i < n; ++i) {
      pts.push_back(LonLat{rng.uniform(-105, -95), rng.uniform(36, 44)});
      params.push_back(m.params_at(pts.back()));
    }
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
      cov(i, i) = params[i].sigma2 + params[i].tau2;
      for (int j = i + 1; j < n; ++j)
        cov(i, j) = cov(j, i) =
            nonstationary_cov(pts[i], pts[j], params[i], params[j], m.matern_kappa);
    }
    REQUIRE(cov.isApprox(cov.transpose(), 1e-12));
    double jitter = 1e-8 * cov.trace() / n;
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    REQUIRE(llt.info() == Eigen::Success);
  }
}

TEST_CASE("field model json round-trips", "[spatial]") {
  auto m = constant_model(1.1, 0.3, Kernel2::from_principal(0.2, -0.5, 1.1), 2.5);
  m.season = "JJA";
  m.coefficient = "mu0";
  m.fit_radius = 6.0;
  m.isotropic = false;
  m.covariate = "log_elevation";
  auto j = field_model_to_json(m);
  auto back = field_model_from_json(j);
  REQUIRE(back.season == m.season);
  REQUIRE(back.coefficient == m.coefficient);
  REQUIRE(back.matern_kappa == m.matern_kappa);
  REQUIRE(back.fit_radius == m.fit_radius);
  REQUIRE(back.covariate == m.covariate);
  REQUIRE(back.components.size() == m.components.size());
  REQUIRE(back.components[2].kernel.a12 == m.components[2].kernel.a12);
  REQUIRE(back.components[2].log_tau2 == m.components[2].log_tau2);
}
