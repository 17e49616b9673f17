#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include "rsma/channel.hpp"
#include "rsma/model.hpp"
#include "rsma/problem.hpp"

using namespace rsma;

namespace {

BeamformingState make_bf(const MatrixXcd& beams) {
  BeamformingState bf;
  bf.beams = beams;
  bf.common_alloc = VectorXd::Zero(static_cast<int>(beams.cols()) - 1);
  bf.epigraph_t = 0.0;
  return bf;
}

BeamformingState random_bf(int n, int users, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXcd beams(n, users + 1);
  for (int j = 0; j <= users; ++j)
    for (int i = 0; i < n; ++i) beams(i, j) = Complex(normal(rng), normal(rng));
  return make_bf(beams);
}

// Plain scalar re-evaluation of the SINR, independent of the Eigen path.
double sinr_oracle(const ChannelSet& ch, const BeamformingState& bf,
                   const SystemConfig& cfg, int k, bool common) {
  const int n = ch.num_tx_antennas();
  const int users = ch.num_users();
  const auto inner = [&](int beam_col) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      acc += std::conj(ch.channels(i, k)) * bf.beams(i, beam_col);
    return acc;
  };
  const int signal_col = common ? 0 : k + 1;
  double denom = cfg.noise_powers[k];
  for (int j = 1; j <= users; ++j) {
    if (!common && j == k + 1) continue;
    denom += std::norm(inner(j));
  }
  return std::norm(inner(signal_col)) / denom;
}

}  // namespace

TEST_CASE("gen_channel is deterministic per seed") {
  const SystemConfig cfg = SystemConfig::uniform_noise(2, 2, 10.0);
  const ChannelSet a = gen_channel(cfg, 42);
  const ChannelSet b = gen_channel(cfg, 42);
  CHECK(a.channels == b.channels);
  const ChannelSet c = gen_channel(cfg, 43);
  CHECK(a.channels != c.channels);
}

TEST_CASE("gen_channel per-entry variance is close to one") {
  const SystemConfig cfg = SystemConfig::uniform_noise(4, 16, 10.0);
  double sum = 0.0;
  long count = 0;
  // ~100k complex samples across seeds.
  for (std::uint64_t seed = 0; seed < 1600; ++seed) {
    const ChannelSet ch = gen_channel(cfg, seed);
    sum += ch.channels.squaredNorm();
    count += ch.channels.size();
  }
  const double variance = sum / count;
  CHECK(variance == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gen_channel single-user single-antenna shape") {
  const SystemConfig cfg = SystemConfig::uniform_noise(1, 1, 1.0);
  const ChannelSet ch = gen_channel(cfg, 7);
  CHECK(ch.channels.rows() == 1);
  CHECK(ch.channels.cols() == 1);
}

TEST_CASE("sinr_common orthogonal interference") {
  const SystemConfig cfg = SystemConfig::uniform_noise(1, 2, 1.0);
  ChannelSet ch;
  ch.channels.resize(2, 1);
  ch.channels << Complex(1, 0), Complex(0, 0);
  MatrixXcd beams(2, 2);
  beams.col(0) << Complex(1, 0), Complex(0, 0);
  beams.col(1) << Complex(0, 0), Complex(1, 0);
  const BeamformingState bf = make_bf(beams);
  CHECK(sinr_common(ch, bf, cfg, 0) == doctest::Approx(1.0));

  BeamformingState zero_common = bf;
  zero_common.beams.col(0).setZero();
  CHECK(sinr_common(ch, zero_common, cfg, 0) == 0.0);
}

TEST_CASE("sinr_private trivial cases") {
  const SystemConfig cfg = SystemConfig::uniform_noise(2, 2, 1.0);
  ChannelSet ch;
  ch.channels.resize(2, 2);
  ch.channels << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0);
  MatrixXcd beams = MatrixXcd::Zero(2, 3);
  beams(0, 1) = Complex(1, 0);  // p_1 = [1, 0]
  beams(1, 2) = Complex(1, 0);  // p_2 = [0, 1]
  const BeamformingState bf = make_bf(beams);
  CHECK(sinr_private(ch, bf, cfg, 0) == doctest::Approx(1.0));

  // Single user with MRT at full power: P_t ||h||^2 / sigma^2.
  const double power = 10.0;
  const SystemConfig single = SystemConfig::uniform_noise(1, 2, power, 2.0);
  ChannelSet ch1;
  ch1.channels.resize(2, 1);
  ch1.channels << Complex(0.3, -0.4), Complex(1.0, 0.5);
  MatrixXcd b1 = MatrixXcd::Zero(2, 2);
  b1.col(1) = std::sqrt(power) * ch1.channels.col(0).normalized();
  const double expect = power * ch1.channels.col(0).squaredNorm() / 2.0;
  CHECK(sinr_private(ch1, make_bf(b1), single, 0) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("sinr matches scalar recomputation on random instances") {
  const SystemConfig cfg = SystemConfig::uniform_noise(3, 4, 10.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelSet ch = gen_channel(cfg, seed);
    const BeamformingState bf = random_bf(4, 3, seed + 100);
    for (int k = 0; k < 3; ++k) {
      const double gc = sinr_common(ch, bf, cfg, k);
      const double gp = sinr_private(ch, bf, cfg, k);
      CHECK(gc == doctest::Approx(sinr_oracle(ch, bf, cfg, k, true)).epsilon(1e-12));
      CHECK(gp == doctest::Approx(sinr_oracle(ch, bf, cfg, k, false)).epsilon(1e-12));
    }
  }
}

TEST_CASE("rates trivial identities") {
  const SystemConfig cfg = SystemConfig::uniform_noise(2, 2, 10.0);
  ChannelSet ch;
  ch.channels.resize(2, 2);
  ch.channels << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0);

  SUBCASE("all-zero beams give zero rates") {
    const BeamformingState bf = make_bf(MatrixXcd::Zero(2, 3));
    const RateVector rv = rates(ch, bf, cfg);
    CHECK(rv.common_rate == 0.0);
    CHECK(rv.private_rates.maxCoeff() == 0.0);
    CHECK(rv.mmf_rate == 0.0);
  }

  SUBCASE("gamma = e - 1 gives one nat") {
    // p_1 aligned with h_1, no interference from p_2, power e - 1.
    MatrixXcd beams = MatrixXcd::Zero(2, 3);
    beams(0, 1) = std::sqrt(std::exp(1.0) - 1.0);
    beams(1, 2) = Complex(0, 0);
    const RateVector rv = rates(ch, make_bf(beams), cfg);
    CHECK(rv.private_rates[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("common rate is the minimum across users") {
  // Construct gamma_c1 = 1, gamma_c2 = 3 via distinct noise powers.
  SystemConfig cfg;
  cfg.num_users = 2;
  cfg.num_tx_antennas = 1;
  cfg.tx_power_budget = 10.0;
  cfg.noise_powers = VectorXd(2);
  cfg.noise_powers << 1.0, 1.0 / 3.0;
  ChannelSet ch;
  ch.channels = MatrixXcd::Ones(1, 2);
  MatrixXcd beams = MatrixXcd::Zero(1, 3);
  beams(0, 0) = Complex(1, 0);
  const RateVector rv = rates(ch, make_bf(beams), cfg);
  CHECK(rv.common_rates[0] == doctest::Approx(std::log(2.0)));
  CHECK(rv.common_rates[1] == doctest::Approx(std::log(4.0)));
  CHECK(rv.common_rate == doctest::Approx(std::log(2.0)));
}

TEST_CASE("tx_power and normalize_power") {
  const SystemConfig cfg = SystemConfig::uniform_noise(1, 2, 1.0);

  SUBCASE("all-zero power is zero and cannot be normalized") {
    const BeamformingState bf = make_bf(MatrixXcd::Zero(2, 2));
    CHECK(tx_power(bf) == 0.0);
    CHECK_THROWS_AS(normalize_power(bf, 1.0), std::domain_error);
  }

  SUBCASE("hand-computed power") {
    MatrixXcd beams = MatrixXcd::Zero(2, 2);
    beams(0, 0) = Complex(1, 0);
    beams(1, 1) = Complex(2, 0);
    CHECK(tx_power(make_bf(beams)) == doctest::Approx(5.0));
  }

  SUBCASE("normalization fixed point and exactness") {
    MatrixXcd beams(2, 2);
    beams << Complex(1, 1), Complex(0, -1), Complex(0.5, 0), Complex(1, 2);
    const BeamformingState bf = make_bf(beams);
    const BeamformingState scaled = normalize_power(bf, 3.0);
    CHECK(tx_power(scaled) == doctest::Approx(3.0).epsilon(1e-12));
    const BeamformingState again = normalize_power(scaled, 3.0);
    CHECK((again.beams - scaled.beams).cwiseAbs().maxCoeff() < 1e-12);
    // Frobenius norm 2 with budget 1 halves every entry.
    MatrixXcd unit = beams / beams.norm() * 2.0;
    const BeamformingState halved = normalize_power(make_bf(unit), 1.0);
    CHECK((halved.beams - unit / 2.0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("clipped mmf rate respects the common-rate pool") {
  const SystemConfig cfg = SystemConfig::uniform_noise(2, 2, 10.0);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ChannelSet ch = gen_channel(cfg, seed);
    BeamformingState bf = random_bf(2, 2, seed + 50);
    bf.common_alloc = VectorXd::Constant(2, 5.0);  // deliberately infeasible
    const RateVector rv = rates(ch, bf, cfg);
    CHECK(rv.mmf_rate <= rv.private_rates.minCoeff() + rv.common_rate + 1e-12);
    CHECK(rv.mmf_rate >= rv.private_rates.minCoeff() - 1e-12);
  }
}

TEST_CASE("SINR is monotone under uniform beam scaling") {
  const SystemConfig cfg = SystemConfig::uniform_noise(3, 4, 10.0);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ChannelSet ch = gen_channel(cfg, seed);
    const BeamformingState full = random_bf(4, 3, seed + 10);
    BeamformingState half = full;
    half.beams *= 0.5;
    for (int k = 0; k < 3; ++k) {
      CHECK(sinr_common(ch, full, cfg, k) >= sinr_common(ch, half, cfg, k));
      CHECK(sinr_private(ch, full, cfg, k) >= sinr_private(ch, half, cfg, k));
    }
  }
}

TEST_CASE("single-user rate equals the Shannon formula") {
  const double power = 25.0;
  const SystemConfig cfg = SystemConfig::uniform_noise(1, 3, power, 0.7);
  const ChannelSet ch = gen_channel(cfg, 5);
  MatrixXcd beams = MatrixXcd::Zero(3, 2);
  beams.col(1) = std::sqrt(power) * ch.channels.col(0).normalized();
  const RateVector rv = rates(ch, make_bf(beams), cfg);
  const double expect = std::log1p(power * ch.channels.col(0).squaredNorm() / 0.7);
  CHECK(rv.private_rates[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("problem-space rates agree with the model surface") {
  const SystemConfig cfg = SystemConfig::uniform_noise(3, 4, 10.0);
  const ChannelSet ch = gen_channel(cfg, 11);
  const BeamformingState bf = random_bf(4, 3, 77);
  const ProblemData pd = build_problem(ch, cfg);
  const EffRates er = eval_rates(pd, bf.beams);
  const RateVector rv = rates(ch, bf, cfg);
  CHECK((er.priv - rv.private_rates).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((er.common - rv.common_rates).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(eval_tx_power(pd, bf.beams) == doctest::Approx(tx_power(bf)).epsilon(1e-14));
  CHECK(mmf_metric(pd, bf.beams, bf.common_alloc) ==
        doctest::Approx(rv.mmf_rate).epsilon(1e-14));
}

TEST_CASE("channel file round trip") {
  const SystemConfig cfg = SystemConfig::uniform_noise(3, 5, 10.0);
  const ChannelSet ch = gen_channel(cfg, 31337);
  const std::string path = "test_channels_roundtrip.txt";
  save_channels(ch, path);
  const ChannelSet back = load_channels(path);
  CHECK(back.channels == ch.channels);
  std::remove(path.c_str());
  CHECK_THROWS(load_channels("does_not_exist.txt"));
}
