#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fpboot/error.hpp"
#include "fpboot/intervals.hpp"
#include "fpboot/normal.hpp"

using namespace fpboot;
using Catch::Approx;

namespace {

// scipy.stats.norm, frozen.
constexpr double kZ975 = 1.959963984540054;
constexpr double kZ60 = 0.2533471031357997;
constexpr double kZ025 = -1.9599639845400545;
constexpr double kPhi1 = 0.8413447460685429;

BootstrapReplicates reps_of(std::vector<double> est) {
  BootstrapReplicates r;
  r.estimates = std::move(est);
  return r;
}

std::vector<double> one_to(int B) {
  std::vector<double> v(B);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

}  // namespace

TEST_CASE("normal cdf and quantile", "[intervals]") {
  CHECK(normal_quantile(0.975) == Approx(kZ975).margin(1e-12));
  CHECK(normal_quantile(0.6) == Approx(kZ60).margin(1e-12));
  CHECK(normal_quantile(0.025) == Approx(kZ025).margin(1e-12));
  CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
  CHECK(normal_cdf(1.0) == Approx(kPhi1).margin(1e-15));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THROWS_AS(normal_quantile(0.0), InvalidArgument);
  CHECK_THROWS_AS(normal_quantile(1.0), InvalidArgument);
}

TEST_CASE("normal quantile inverts the cdf across the range", "[intervals][property]") {
  for (double p = 1e-10; p < 1.0; p = p < 0.01 ? p * 3 : p + 0.0137) {
    const double z = normal_quantile(p);
    REQUIRE(normal_cdf(z) == Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("empirical quantile", "[intervals]") {
  const auto v = one_to(1000);
  CHECK(empirical_quantile(v, 0.025) == 25);
  CHECK(empirical_quantile(v, 0.975) == 975);
  CHECK(empirical_quantile(v, 1 - 0.975) == 25);
  CHECK(empirical_quantile(v, 0.0) == 1);
  CHECK(empirical_quantile(v, 1.0) == 1000);
  CHECK(empirical_quantile(std::vector<double>{3.5}, 0.3) == 3.5);
  std::vector<double> shuffled = v;
  std::mt19937_64 g(1);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  CHECK(empirical_quantile(shuffled, 0.025) == 25);
  CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), InvalidArgument);
}

TEST_CASE("normal interval", "[intervals]") {
  auto ci = ci_normal(1.22, 0.04, 0.95);
  CHECK(ci.lower == Approx(0.828).margin(1e-3));
  CHECK(ci.upper == Approx(1.612).margin(1e-3));
  CHECK(ci.method == CiMethod::Normal);
  ci = ci_normal(0.0, 1.0, 0.95);
  CHECK(ci.lower == Approx(-1.95996).margin(1e-5));
  CHECK(ci.upper == Approx(1.95996).margin(1e-5));
  CHECK(ci.length() == Approx(2 * kZ975).margin(1e-12));
  ci = ci_normal(2.5, 0.0, 0.9);
  CHECK(ci.lower == 2.5);
  CHECK(ci.upper == 2.5);
  CHECK(ci.length() == 0.0);
  CHECK_THROWS_AS(ci_normal(0, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ci_normal(0, 1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ci_normal(0, -1, 0.95), InvalidArgument);
}

TEST_CASE("normal width is monotone in variance and level", "[intervals][property]") {
  double prev = -1;
  for (double v = 0; v < 5; v += 0.25) {
    const double w = ci_normal(0, v, 0.95).length();
    REQUIRE(w > prev);
    prev = w;
  }
  prev = -1;
  for (double lvl = 0.5; lvl < 0.999; lvl += 0.01) {
    const double w = ci_normal(0, 1, lvl).length();
    REQUIRE(w > prev);
    prev = w;
  }
}

TEST_CASE("percentile interval", "[intervals]") {
  auto ci = ci_percentile(reps_of(one_to(1000)), 0.95);
  CHECK(ci.lower == 25);
  CHECK(ci.upper == 975);
  ci = ci_percentile(reps_of(std::vector<double>(50, 3.25)), 0.95);
  CHECK(ci.lower == 3.25);
  CHECK(ci.upper == 3.25);
  CHECK_THROWS_AS(ci_percentile(reps_of({1.0}), 0.95), InvalidArgument);
}

TEST_CASE("intervals are location equivariant", "[intervals][property]") {
  std::mt19937_64 g(7);
  std::normal_distribution<double> z(0, 1);
  std::vector<double> est(999);
  for (auto& e : est) e = 1 + 0.1 * z(g);
  BootstrapReplicates reps = reps_of(est);
  reps.t_variances = std::vector<double>(est.size(), 0.01);
  for (double delta : {0.5, -3.0, 10.0}) {
    BootstrapReplicates shifted = reps;
    for (auto& e : shifted.estimates) e += delta;
    const auto p0 = ci_percentile(reps, 0.95), p1 = ci_percentile(shifted, 0.95);
    CHECK(p1.lower == Approx(p0.lower + delta).epsilon(1e-12));
    CHECK(p1.upper == Approx(p0.upper + delta).epsilon(1e-12));
    const auto b0 = ci_bca(reps, 1.0, 0.05, 0.95), b1 = ci_bca(shifted, 1.0 + delta, 0.05, 0.95);
    CHECK(b1.lower == Approx(b0.lower + delta).epsilon(1e-12));
    CHECK(b1.upper == Approx(b0.upper + delta).epsilon(1e-12));
    const auto t0 = ci_bootstrap_t(reps, 1.0, 0.02, 0.95);
    const auto t1 = ci_bootstrap_t(shifted, 1.0 + delta, 0.02, 0.95);
    CHECK(t1.lower == Approx(t0.lower + delta).epsilon(1e-12));
    CHECK(t1.upper == Approx(t0.upper + delta).epsilon(1e-12));
    const auto n0 = ci_normal(1.0, 0.02, 0.95), n1 = ci_normal(1.0 + delta, 0.02, 0.95);
    CHECK(n1.lower == Approx(n0.lower + delta).epsilon(1e-12));
  }
}

TEST_CASE("jackknife acceleration", "[intervals]") {
  CHECK(jackknife_acceleration(std::vector<double>{-1, 0, 1}) == Approx(0.0).margin(1e-15));
  CHECK(jackknife_acceleration(std::vector<double>{2, 2, 2, 2}) == 0.0);
  CHECK_THROWS_AS(jackknife_acceleration(std::vector<double>{1, 2}), InvalidArgument);

  // Brute force: enumerate the leave-one-out means and apply the formula.
  const std::vector<double> x{0, 0, 0, 4};
  std::vector<double> loo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i) s += x[j];
    loo.push_back(s / 3);
  }
  const double bar = std::accumulate(loo.begin(), loo.end(), 0.0) / 4;
  double s2 = 0, s3 = 0;
  for (double l : loo) {
    s2 += (bar - l) * (bar - l);
    s3 += (bar - l) * (bar - l) * (bar - l);
  }
  const double expected = s3 / (6 * std::pow(s2, 1.5));
  CHECK(jackknife_acceleration(x) == Approx(expected).epsilon(1e-12));
  CHECK(expected == Approx((8.0 / 9) / (6 * std::pow(4.0 / 3, 1.5))).epsilon(1e-12));
  CHECK(acceleration_from_jackknife(loo) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("BCa interval", "[intervals]") {
  SECTION("z0 = 0 and a = 0 reduces to the percentile interval") {
    // Odd B with theta_hat at the median: exactly half the replicates lie below.
    std::vector<double> est = one_to(1000);
    const double theta = 500.5;
    const auto reps = reps_of(est);
    CHECK(bca_bias_correction(est, theta) == 0.0);
    const auto bca = ci_bca(reps, theta, 0.0, 0.95);
    const auto pct = ci_percentile(reps, 0.95);
    CHECK(bca.lower == pct.lower);
    CHECK(bca.upper == pct.upper);
    CHECK(bca.method == CiMethod::Bca);
  }
  SECTION("600 of 1000 below theta_hat gives z0 = Phi^-1(0.6)") {
    const auto est = one_to(1000);
    CHECK(bca_bias_correction(est, 600.5) == Approx(kZ60).margin(1e-4));
    CHECK(bca_bias_correction(est, 600.5) == Approx(0.25335).margin(1e-4));
  }
  SECTION("ties") {
    const std::vector<double> est{1, 2, 2, 3};
    CHECK(bca_bias_correction(est, 2.0, BcaTies::Strict) == Approx(normal_quantile(0.25)));
    CHECK(bca_bias_correction(est, 2.0, BcaTies::Half) == Approx(0.0).margin(1e-15));
  }
  SECTION("degenerate distributions throw") {
    const auto est = one_to(100);
    CHECK_THROWS_AS(ci_bca(reps_of(est), 0.0, 0.0, 0.95), DegenerateDistribution);
    CHECK_THROWS_AS(ci_bca(reps_of(est), 1000.0, 0.0, 0.95), DegenerateDistribution);
    CHECK_THROWS_AS(bca_bias_correction(std::vector<double>(10, 1.0), 1.0), DegenerateDistribution);
  }
  SECTION("matches a direct evaluation of the adjusted ranks") {
    const auto est = one_to(1000);
    const double theta = 450.5, a = 0.03;
    const double z0 = normal_quantile(0.45);
    auto adj = [&](double z) { return normal_cdf(z0 + (z0 + z) / (1 - a * (z0 + z))); };
    const double a1 = adj(kZ025), a2 = adj(kZ975);
    const auto ci = ci_bca(reps_of(est), theta, a, 0.95);
    CHECK(ci.lower == std::ceil(a1 * 1000 - 1e-9));
    CHECK(ci.upper == std::ceil(a2 * 1000 - 1e-9));
  }
}

TEST_CASE("bootstrap-t interval", "[intervals]") {
  SECTION("substitution: t quantiles (-2, 2)") {
    // 1000 t-values: 25th smallest is -2 and 975th is 2.
    std::vector<double> t(1000, 0.0);
    for (int i = 0; i < 25; ++i) t[i] = -2 - i;
    for (int i = 974; i < 1000; ++i) t[i] = 2 + (i - 974);
    BootstrapReplicates reps;
    reps.t_variances = std::vector<double>(1000, 1.0);
    for (double x : t) reps.estimates.push_back(1.0 + x);  // t* = theta* - theta_hat
    const auto ci = ci_bootstrap_t(reps, 1.0, 0.04, 0.95);
    CHECK(ci.lower == Approx(0.6).epsilon(1e-12));
    CHECK(ci.upper == Approx(1.4).epsilon(1e-12));
  }
  SECTION("all t equal zero gives the point interval") {
    BootstrapReplicates reps = reps_of(std::vector<double>(100, 2.0));
    reps.t_variances = std::vector<double>(100, 0.5);
    const auto ci = ci_bootstrap_t(reps, 2.0, 0.3, 0.95);
    CHECK(ci.lower == 2.0);
    CHECK(ci.upper == 2.0);
  }
  SECTION("v_hat = 0 gives the point interval") {
    BootstrapReplicates reps = reps_of(one_to(100));
    reps.t_variances = std::vector<double>(100, 1.0);
    const auto ci = ci_bootstrap_t(reps, 50.0, 0.0, 0.95);
    CHECK(ci.length() == 0.0);
  }
  SECTION("symmetric t distribution yields a symmetric interval") {
    BootstrapReplicates reps;
    for (int i = -500; i <= 500; ++i) reps.estimates.push_back(3.0 + 0.01 * i);
    reps.t_variances = std::vector<double>(reps.estimates.size(), 0.0004);
    const auto ci = ci_bootstrap_t(reps, 3.0, 0.01, 0.9);
    // One order-statistic step of t is 0.5 here, times sqrt(v_hat) = 0.1.
    CHECK(std::abs((ci.upper - 3.0) - (3.0 - ci.lower)) <= 0.05 + 1e-12);
    CHECK(ci.lower < 3.0);
    CHECK(ci.upper > 3.0);
  }
  SECTION("errors") {
    BootstrapReplicates reps = reps_of(one_to(100));
    CHECK_THROWS_AS(ci_bootstrap_t(reps, 1.0, 1.0, 0.95), InvalidArgument);
    reps.t_variances = std::vector<double>(99, 1.0);
    CHECK_THROWS_AS(ci_bootstrap_t(reps, 1.0, 1.0, 0.95), InvalidArgument);
    reps.t_variances = std::vector<double>(100, 1.0);
    (*reps.t_variances)[0] = 0.0;
    CHECK_NOTHROW(ci_bootstrap_t(reps, 1.0, 1.0, 0.95));  // 1% dropped is tolerated
    (*reps.t_variances)[1] = 0.0;
    CHECK_THROWS_AS(ci_bootstrap_t(reps, 1.0, 1.0, 0.95), DegenerateDistribution);
  }
}

TEST_CASE("every constructor returns lower <= upper", "[intervals][property]") {
  std::mt19937_64 g(11);
  std::lognormal_distribution<double> d(0, 1.5);
  std::uniform_real_distribution<double> u(0.5, 0.995);
  for (int t = 0; t < 300; ++t) {
    const std::size_t B = 2 + g() % 400;
    BootstrapReplicates reps;
    reps.estimates.resize(B);
    reps.t_variances = std::vector<double>(B);
    for (std::size_t b = 0; b < B; ++b) {
      reps.estimates[b] = d(g);
      (*reps.t_variances)[b] = 0.01 + d(g);
    }
    const double lvl = u(g);
    const double theta = empirical_quantile(reps.estimates, 0.5);
    REQUIRE(ci_normal(theta, d(g), lvl).length() >= 0);
    REQUIRE(ci_percentile(reps, lvl).length() >= 0);
    REQUIRE(ci_bootstrap_t(reps, theta, d(g), lvl).length() >= 0);
    const double a = 0.1 * (u(g) - 0.75);
    bool degenerate = false;
    ConfidenceInterval bca;
    try {
      bca = ci_bca(reps, theta, a, lvl);
    } catch (const DegenerateDistribution&) {
      degenerate = true;
    }
    if (!degenerate) REQUIRE(bca.length() >= 0);
  }
}

TEST_CASE("interval names round-trip", "[intervals]") {
  for (auto m : {CiMethod::Normal, CiMethod::Percentile, CiMethod::Bca, CiMethod::BootstrapT})
    CHECK(parse_ci(to_string(m)) == m);
  CHECK_THROWS_AS(parse_ci("studentized-ish"), InvalidArgument);
  const ConfidenceInterval ci{CiMethod::Normal, 0.95, 1.0, 2.0};
  CHECK(ci.contains(1.0));
  CHECK(ci.contains(2.0));
  CHECK_FALSE(ci.contains(2.0000001));
}
