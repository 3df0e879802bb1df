#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fpboot/error.hpp"
#include "fpboot/estimators.hpp"
#include "fpboot/resampling.hpp"

using namespace fpboot;
using Catch::Approx;

namespace {

// Log-normal sample values; a skewed stand-in for citation scores.
std::vector<double> skewed_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::lognormal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

double var_of(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / (x.size() - 1);
}

// Brute-force oracles, written against std::mt19937_64 and the textbook
// definitions rather than the library's engines.
double oracle_standard(const std::vector<double>& s, std::size_t B, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  std::vector<double> est(B);
  for (auto& e : est) {
    double sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += s[pick(gen)];
    e = sum / s.size();
  }
  return var_of(est);
}

double oracle_ppb(const std::vector<double>& s, std::size_t N, std::size_t B, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::size_t n = s.size(), k = N / n, r = N - k * n;
  std::vector<double> est(B);
  for (auto& e : est) {
    std::vector<double> pseudo;
    for (std::size_t c = 0; c < k; ++c) pseudo.insert(pseudo.end(), s.begin(), s.end());
    std::vector<double> extra = s;
    std::shuffle(extra.begin(), extra.end(), gen);
    pseudo.insert(pseudo.end(), extra.begin(), extra.begin() + r);
    std::shuffle(pseudo.begin(), pseudo.end(), gen);
    e = std::accumulate(pseudo.begin(), pseudo.begin() + n, 0.0) / n;
  }
  return var_of(est);
}

double oracle_mirror(const std::vector<double>& s, std::size_t N, std::size_t B, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::size_t n = s.size();
  const double f = double(n) / N;
  const std::size_t np = std::clamp<std::size_t>(std::llround(f * n), 1, n);
  const double fp = double(np) / n;
  const double kt = std::max(1.0, n * (1 - fp) / (np * (1 - f)));
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> est(B);
  std::vector<double> pool = s;
  for (auto& e : est) {
    const std::size_t k = std::size_t(kt) + (u(gen) < kt - std::floor(kt) ? 1 : 0);
    double sum = 0;
    for (std::size_t c = 0; c < k; ++c) {
      std::shuffle(pool.begin(), pool.end(), gen);
      sum += std::accumulate(pool.begin(), pool.begin() + np, 0.0);
    }
    e = sum / double(k * np);
  }
  return var_of(est);
}

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

TEST_CASE("fpc factors", "[resampling]") {
  const auto a = fpc(100, 6224);
  CHECK(a.one_minus_f == Approx(0.983933).margin(1e-6));
  CHECK(a.bias_adjusted == Approx(0.984091).margin(1e-6));
  const auto census = fpc(6224, 6224);
  CHECK(census.one_minus_f == 0.0);
  CHECK(census.bias_adjusted == 0.0);
  CHECK_THROWS_AS(fpc(101, 100), InvalidArgument);
  CHECK_THROWS_AS(fpc(0, 100), InvalidArgument);
  CHECK_THROWS_AS(fpc(1, 1), InvalidArgument);
}

TEST_CASE("fpc ratio is N/(N-1) whenever n < N", "[resampling][property]") {
  for (std::size_t N : {2, 3, 10, 200, 6224, 1000000})
    for (std::size_t n = 1; n < N; n += std::max<std::size_t>(1, N / 13)) {
      const auto k = fpc(n, N);
      REQUIRE(k.bias_adjusted / k.one_minus_f == Approx(double(N) / double(N - 1)).epsilon(1e-12));
    }
}

TEST_CASE("corrected variance is (N-n)/(N-1) times V*", "[resampling][property]") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 10);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t N = 2 + gen() % 10000, n = 1 + gen() % N;
    const double v = u(gen);
    REQUIRE(corrected_variance(v, fpc(n, N)) == (double(N - n) / double(N - 1)) * v);
  }
}

TEST_CASE("bootstrap_variance", "[resampling]") {
  CHECK(bootstrap_variance(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
  CHECK(bootstrap_variance(std::vector<double>{0, 0, 0, 4}) == Approx(4.0));
  CHECK_THROWS_AS(bootstrap_variance(std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("pseudo-population size identities", "[resampling]") {
  RngStream rng(1, 1);
  const auto sample = make_sample({{1, false}, {2, true}, {3, false}, {4, false}}, 10);
  auto p = build_pseudo_population(sample, 10, rng);
  CHECK(p.k == 2);
  CHECK(p.remainder == 2);
  CHECK(p.units.size() == 10);
  CHECK(p.source.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) CHECK(p.units[j] == sample.values[p.source[j]]);
  // The remainder comes from distinct sample positions.
  CHECK(p.source[8] != p.source[9]);

  p = build_pseudo_population(sample, 8, rng);
  CHECK(p.k == 2);
  CHECK(p.remainder == 0);
  CHECK(p.units.size() == 8);

  p = build_pseudo_population(sample, 4, rng);
  CHECK(p.k == 1);
  CHECK(p.remainder == 0);
  CHECK(p.units == sample.values);

  CHECK_THROWS_AS(build_pseudo_population(sample, 3, rng), InvalidArgument);
}

TEST_CASE("mirror-match plan", "[resampling]") {
  auto p = mirror_match_plan(100, 200);
  CHECK(p.n_prime == 50);
  CHECK(p.f_prime == 0.5);
  CHECK(p.k_target == Approx(2.0).epsilon(1e-15));
  CHECK(p.k_low == 2);
  CHECK(p.p_high == 0.0);

  p = mirror_match_plan(100, 6224);
  CHECK(p.n_prime == 2);
  CHECK(p.k_target == Approx(100 * 0.98 / (2 * (1 - 100.0 / 6224))).epsilon(1e-12));
  CHECK(p.k_target == Approx(49.800).margin(1e-3));
  CHECK(p.k_low == 49);
  CHECK(p.k_high == 50);
  CHECK(p.p_high == Approx(p.k_target - 49).epsilon(1e-12));

  p = mirror_match_plan(50, 50);
  CHECK(p.n_prime == 50);
  CHECK(p.k_target == 1.0);
  CHECK(p.k_low == 1);
  CHECK(p.p_high == 0.0);

  CHECK_THROWS_AS(mirror_match_plan(51, 50), InvalidArgument);
  CHECK_THROWS_AS(mirror_match_plan(1, 50), InvalidArgument);
}

TEST_CASE("mirror-match plan invariants over a grid", "[resampling][property]") {
  for (std::size_t N : {10, 97, 200, 6224})
    for (std::size_t n = 2; n <= N; ++n) {
      const auto p = mirror_match_plan(n, N);
      REQUIRE(p.n_prime >= 1);
      REQUIRE(p.n_prime <= n);
      REQUIRE(p.k_target >= 1.0);
      REQUIRE(p.k_low >= 1);
      REQUIRE(p.k_high - p.k_low <= 1);
      REQUIRE(p.p_high >= 0.0);
      REQUIRE(p.p_high < 1.0);
      REQUIRE(double(p.k_low) + p.p_high == Approx(p.k_target).epsilon(1e-12));
    }
}

TEST_CASE("engines return B replicates and constant samples give constant estimates", "[resampling]") {
  const std::vector<double> flat(30, 1.7);
  RngStream rng(5, 5);
  for (auto m : {BootstrapMethod::Standard, BootstrapMethod::Ppb, BootstrapMethod::MirrorMatch}) {
    const auto reps = run_bootstrap(m, flat, 100, 257, rng);
    CHECK(reps.method == m);
    CHECK(reps.B() == 257);
    CHECK(all_equal(reps.estimates));
    CHECK(reps.estimates.front() == 1.7);
    CHECK_FALSE(reps.t_variances.has_value());
  }
}

TEST_CASE("census resampling has exactly zero variance for every seed", "[resampling][property]") {
  const auto s = skewed_values(250, 9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed, 1);
    const auto ppb = ppb_bootstrap(s, 250, 200, rng);
    const auto mm = mirror_match_bootstrap(s, 250, 200, rng);
    REQUIRE(all_equal(ppb.estimates));
    REQUIRE(all_equal(mm.estimates));
    REQUIRE(bootstrap_variance(ppb) == 0.0);
    REQUIRE(bootstrap_variance(mm) == 0.0);
    REQUIRE(ppb.estimates.front() == mean(s));
  }
}

TEST_CASE("Sample overloads use the estimator's per-record values", "[resampling]") {
  std::vector<PublicationRecord> r;
  for (int i = 0; i < 20; ++i) r.push_back({double(i), i % 4 == 0});
  const auto sample = make_sample(r, 20);
  RngStream rng(2, 2);
  const auto pp = ppb_bootstrap(sample, 20, 50, EstimatorKind::PpTop10, rng);
  CHECK(all_equal(pp.estimates));
  CHECK(pp.estimates.front() == 25.0);
  const auto st = standard_bootstrap(sample, 50, EstimatorKind::Mncs, rng);
  CHECK(st.B() == 50);
  CHECK_THROWS_AS(standard_bootstrap(make_sample({{1, false}}, 5), 10, EstimatorKind::Mncs, rng),
                  InvalidArgument);
}

TEST_CASE("bootstrap-t variances use the closed form per replicate", "[resampling]") {
  const auto s = skewed_values(40, 4);
  RngStream rng(8, 8);
  BootstrapOptions opts;
  opts.t_variances = true;
  const auto reps = ppb_bootstrap(s, 400, 20, rng, opts);
  REQUIRE(reps.t_variances);
  CHECK(reps.t_variances->size() == 20);
  for (double v : *reps.t_variances) CHECK(v > 0.0);
  CHECK(analytic_mean_variance(BootstrapMethod::Standard, 4.0, 100, 6224) == Approx(4.0 * 99 / 1e4));
  CHECK(analytic_mean_variance(BootstrapMethod::Ppb, 4.0, 100, 6224) ==
        Approx(4.0 * 99 / 1e4 * (1 - 100.0 / 6224)));
  CHECK(analytic_mean_variance(BootstrapMethod::MirrorMatch, 4.0, 6224, 6224) == 0.0);
}

TEST_CASE("variance contracts against closed forms and brute-force oracles", "[resampling][montecarlo]") {
  const std::size_t B = 10000;
  for (auto [n, N] : {std::pair<std::size_t, std::size_t>{100, 200}, {1000, 6224}}) {
    CAPTURE(n, N);
    const auto s = skewed_values(n, 100 + n);
    const double s2 = var_of(s);
    const double f = double(n) / N;
    const double v_std = s2 * (n - 1) / (double(n) * n);
    const double v_fpc = (1 - f) * s2 / n;

    RngStream rng(2024, n);
    const double std_v = bootstrap_variance(standard_bootstrap(s, B, rng));
    const double ppb_v = bootstrap_variance(ppb_bootstrap(s, N, B, rng));
    const double mm_v = bootstrap_variance(mirror_match_bootstrap(s, N, B, rng));
    CHECK(std::abs(std_v / v_std - 1) < 0.05);
    CHECK(std::abs(ppb_v / v_fpc - 1) < 0.10);
    CHECK(std::abs(mm_v / v_fpc - 1) < 0.10);

    // The oracles agree with the same closed forms, so the tolerances test the engines.
    CHECK(std::abs(oracle_standard(s, B, 1) / v_std - 1) < 0.05);
    CHECK(std::abs(oracle_ppb(s, N, n == 100 ? B : 2000, 2) / v_fpc - 1) < 0.10);
    CHECK(std::abs(oracle_mirror(s, N, n == 100 ? B : 2000, 3) / v_fpc - 1) < 0.10);

    // f >= 0.1: the with-replacement bootstrap overstates the variance.
    CHECK(std_v > ppb_v);
    CHECK(std_v > mm_v);
  }
}

TEST_CASE("fixed completion keeps one pseudo-population", "[resampling]") {
  const auto s = skewed_values(30, 12);
  BootstrapOptions fixed;
  fixed.completion = PpbCompletion::Fixed;
  RngStream a(3, 3), b(3, 3);
  const auto r1 = ppb_bootstrap(s, 100, 4000, a, fixed);
  const auto r2 = ppb_bootstrap(s, 100, 4000, b, fixed);
  CHECK(r1.estimates == r2.estimates);
  const double v = (1 - 0.3) * var_of(s) / 30;
  CHECK(std::abs(bootstrap_variance(r1) / v - 1) < 0.15);
  // Fixed completion with r = 0 behaves like the per-replicate mode.
  RngStream c(4, 4);
  CHECK(all_equal(ppb_bootstrap(s, 30, 100, c, fixed).estimates));
}

TEST_CASE("engines are deterministic in the stream", "[resampling]") {
  const auto s = skewed_values(60, 1);
  for (auto m : {BootstrapMethod::Standard, BootstrapMethod::Ppb, BootstrapMethod::MirrorMatch}) {
    RngStream a(10, 20), b(10, 20);
    CHECK(run_bootstrap(m, s, 300, 100, a).estimates == run_bootstrap(m, s, 300, 100, b).estimates);
  }
  CHECK(parse_method("ppb") == BootstrapMethod::Ppb);
  CHECK(parse_method(to_string(BootstrapMethod::MirrorMatch)) == BootstrapMethod::MirrorMatch);
  CHECK_THROWS_AS(parse_method("jackknife"), InvalidArgument);
}
