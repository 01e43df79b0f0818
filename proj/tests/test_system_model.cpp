#include <catch2/catch_amalgamated.hpp>

#include "bdris/system_model.hpp"
#include "test_support.hpp"

using namespace bdris;
using Catch::Approx;

namespace {

// f_i^H Theta G w_k with explicit loops.
Complex chain(const CVector& f, const CMatrix& theta, const CMatrix& g, const CVector& w) {
  Complex acc = 0.0;
  for (Eigen::Index a = 0; a < theta.rows(); ++a)
    for (Eigen::Index b = 0; b < theta.cols(); ++b)
      for (Eigen::Index m = 0; m < g.cols(); ++m)
        acc += std::conj(f(a)) * theta(a, b) * g(b, m) * w(m);
  return acc;
}

}  // namespace

TEST_CASE("architecture names", "[system-model]") {
  CHECK(Architecture::fully_connected().short_name() == "fbd");
  CHECK(Architecture::group_connected(4).short_name() == "gbd");
  CHECK(Architecture::diagonal().short_name() == "dris");
  CHECK(Architecture::parse("gbd", 2) == Architecture::group_connected(2));
  CHECK(Architecture::parse("dris", 2) == Architecture::diagonal());
}

TEST_CASE("effective channels", "[system-model]") {
  SECTION("identity chain") {
    ChannelSet ch;
    ch.bs_ris = CMatrix::Identity(3, 3);
    for (int k = 0; k < 3; ++k) ch.users.push_back(CMatrix::Identity(3, 3).col(k));
    ch.target = CVector::Zero(3);
    CHECK((effective_channels(ch, CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() == 0.0);
  }
  SECTION("matches the explicit product") {
    Rng rng(1);
    const auto ch = testing::random_channels(2, 2, 1, rng);
    const CMatrix theta = cscg_matrix(2, 2, rng);
    const CMatrix h = effective_channels(ch, theta);
    for (int m = 0; m < 2; ++m) {
      Complex acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) acc += std::conj(ch.users[0](a)) * theta(a, b) * ch.bs_ris(b, m);
      CHECK(std::abs(h(0, m) - acc) < 1e-14);
    }
  }
  SECTION("scaling f_k scales row k by the conjugate") {
    Rng rng(2);
    auto ch = testing::random_channels(4, 3, 2, rng);
    const CMatrix theta = testing::random_symmetric_unitary(4, rng);
    const CMatrix h0 = effective_channels(ch, theta);
    const Complex c(0.3, -1.2);
    ch.users[1] *= c;
    const CMatrix h1 = effective_channels(ch, theta);
    CHECK((h1.row(1) - std::conj(c) * h0.row(1)).norm() < 1e-13);
    CHECK((h1.row(0) - h0.row(0)).norm() == 0.0);
  }
  SECTION("rejects mismatched dimensions") {
    Rng rng(3);
    const auto ch = testing::random_channels(4, 3, 2, rng);
    try {
      effective_channels(ch, CMatrix::Identity(3, 3));
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
  }
}

TEST_CASE("beam gain matrix", "[system-model]") {
  CHECK((beam_gain_matrix(CMatrix::Identity(3, 3), CMatrix::Identity(3, 3)) -
         RMatrix::Identity(3, 3)).norm() == 0.0);
  Rng rng(4);
  const CMatrix h = cscg_matrix(3, 4, rng);
  CHECK(beam_gain_matrix(h, CMatrix::Zero(4, 3)).norm() == 0.0);
  const CMatrix w = cscg_matrix(4, 3, rng);
  const RMatrix f = beam_gain_matrix(h, w);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Complex acc = 0.0;
      for (int m = 0; m < 4; ++m) acc += h(i, m) * w(m, k);
      CHECK(f(i, k) == Approx(std::norm(acc)).epsilon(1e-13));
      CHECK(f(i, k) >= 0.0);
    }
}

TEST_CASE("sensing gain", "[system-model]") {
  Rng rng(5);
  const auto ch = testing::random_channels(4, 3, 2, rng);
  const CMatrix theta = testing::random_symmetric_unitary(4, rng);
  CHECK(sensing_gain(ch.target, theta, ch.bs_ris, CMatrix::Zero(3, 2)) == 0.0);

  const CMatrix w = cscg_matrix(3, 2, rng);
  const Complex total = chain(ch.target, theta, ch.bs_ris, w.col(0)) +
                        chain(ch.target, theta, ch.bs_ris, w.col(1));
  CHECK(sensing_gain(ch.target, theta, ch.bs_ris, w) == Approx(std::norm(total)).epsilon(1e-12));

  const CMatrix w1 = w.leftCols(1);
  CHECK(sensing_gain(ch.target, theta, ch.bs_ris, w1) ==
        Approx(std::norm(chain(ch.target, theta, ch.bs_ris, w1.col(0)))).epsilon(1e-12));
}

TEST_CASE("objective", "[system-model]") {
  Rng rng(6);
  const int n = 4, m = 3, k = 3;
  const auto ch = testing::random_channels(n, m, k, rng);
  const CMatrix theta = testing::random_symmetric_unitary(n, rng);
  const CMatrix w = cscg_matrix(m, k, rng);
  const AuxPhases aux = testing::random_aux(k, rng);
  const GainTargets targets{1.3, 0.7, 0.4};

  SECTION("matches a scalar accumulation") {
    double comm = 0.0, sense = 0.0;
    for (int kk = 0; kk < k; ++kk) {
      for (int i = 0; i < k; ++i) {
        const Complex x = chain(ch.users[i], theta, ch.bs_ris, w.col(kk));
        const double amp = i == kk ? targets.c : 0.0;
        comm += std::norm(x - std::polar(amp, aux.theta(i, kk)));
      }
      const Complex s = chain(ch.target, theta, ch.bs_ris, w.col(kk));
      sense += std::norm(s - std::polar(targets.p_t, aux.phi(kk)));
    }
    const double expected = 0.4 * comm + 0.6 * sense;
    CHECK(objective(w, theta, aux, targets, ch) == Approx(expected).epsilon(1e-12));
  }
  SECTION("off-diagonal aux phases do not matter") {
    AuxPhases other = aux;
    other.theta(0, 1) += 1.0;
    other.theta(2, 0) -= 2.0;
    CHECK(objective(w, theta, other, targets, ch) ==
          Approx(objective(w, theta, aux, targets, ch)).epsilon(1e-14));
  }
  SECTION("communication phases do not matter at eta = 1") {
    const GainTargets comm_only{1.3, 0.7, 1.0};
    AuxPhases other = aux;
    other.phi.setConstant(2.2);
    CHECK(objective(w, theta, other, comm_only, ch) ==
          Approx(objective(w, theta, aux, comm_only, ch)).epsilon(1e-14));
  }
  SECTION("exact match gives zero") {
    // K = 1, eta = 1: choose the target equal to the achieved amplitude.
    const auto ch1 = testing::random_channels(n, m, 1, rng);
    const CMatrix w1 = cscg_matrix(m, 1, rng);
    const Complex x = chain(ch1.users[0], theta, ch1.bs_ris, w1.col(0));
    AuxPhases a1{RMatrix::Constant(1, 1, wrapped_angle(x)), RVector::Zero(1)};
    const GainTargets t1{std::abs(x), 0.0, 1.0};
    CHECK(objective(w1, theta, a1, t1, ch1) < 1e-24);
  }
  SECTION("non-negative") {
    for (int t = 0; t < 50; ++t) {
      const double eta = testing::uniform(rng);
      CHECK(objective(cscg_matrix(m, k, rng), theta, testing::random_aux(k, rng),
                      GainTargets{1.0, 1.0, eta}, ch) >= 0.0);
    }
  }
}

TEST_CASE("SINR and sum rate", "[system-model]") {
  SECTION("diagonal F equal to the noise") {
    const RMatrix f = RVector::Constant(3, 2e-13).asDiagonal();
    const auto r = sinr_and_rate(f, {2e-13, 2e-13, 2e-13});
    for (double s : r.sinr) CHECK(s == Approx(1.0));
    CHECK(r.sum_rate == Approx(3.0));
  }
  SECTION("zero gain") {
    const auto r = sinr_and_rate(RMatrix::Zero(2, 2), {1.0, 1.0});
    CHECK(r.sum_rate == 0.0);
  }
  SECTION("hand computed two-user case") {
    RMatrix f(2, 2);
    f << 4, 1, 0, 9;
    const auto r = sinr_and_rate(f, {1.0, 1.0});
    CHECK(r.sinr[0] == Approx(2.0));
    CHECK(r.sinr[1] == Approx(9.0));
    CHECK(r.sum_rate == Approx(std::log2(3.0) + std::log2(10.0)));
  }
  SECTION("rate grows with the desired gain and falls with interference") {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
      RMatrix f = RMatrix::NullaryExpr(3, 3, [&] { return testing::uniform(rng); });
      const std::vector<double> noise{0.1, 0.1, 0.1};
      const double base = sinr_and_rate(f, noise).sum_rate;
      RMatrix up = f;
      up(1, 1) += 0.5;
      CHECK(sinr_and_rate(up, noise).sum_rate > base);
      RMatrix interf = f;
      interf(1, 0) += 0.5;
      CHECK(sinr_and_rate(interf, noise).sum_rate < base);
    }
  }
  SECTION("rejects wrong noise length") {
    CHECK_THROWS_AS(sinr_and_rate(RMatrix::Zero(2, 2), {1.0}), Error);
  }
}

TEST_CASE("beam pattern", "[system-model]") {
  Rng rng(9);
  const int n1 = 4, n2 = 2;
  const CMatrix g = cscg_matrix(n1 * n2, 3, rng);
  const CMatrix theta = testing::random_symmetric_unitary(n1 * n2, rng);
  const CMatrix w = cscg_matrix(3, 2, rng);
  std::vector<double> az;
  for (int i = 0; i <= 180; ++i) az.push_back(i * 0.5 * kPi / 180.0);

  const auto pattern = beampattern(theta, g, w, kPi / 2, az, n1, n2);
  REQUIRE(pattern.size() == 181);
  for (const auto& p : pattern) CHECK(p.gain >= 0.0);

  const CVector a = target_steering(kPi / 2, kPi / 4, n1, n2);
  CHECK(pattern[90].gain == Approx(sensing_gain(a, theta, g, w)).epsilon(1e-12));

  for (const auto& p : beampattern(theta, g, CMatrix::Zero(3, 2), kPi / 2, az, n1, n2))
    CHECK(p.gain == 0.0);
}

TEST_CASE("feasibility checks", "[system-model]") {
  Rng rng(10);
  const CMatrix s = testing::random_symmetric_unitary(4, rng);
  CHECK(is_feasible({s, Architecture::fully_connected()}));
  CHECK_FALSE(is_feasible({s, Architecture::group_connected(2)}));
  CHECK_FALSE(is_feasible({testing::haar_unitary(4, rng), Architecture::fully_connected()}));
  CHECK_FALSE(is_feasible({2.0 * CMatrix::Identity(4, 4), Architecture::fully_connected()}));

  CMatrix block = CMatrix::Zero(4, 4);
  block.topLeftCorner(2, 2) = testing::random_symmetric_unitary(2, rng);
  block.bottomRightCorner(2, 2) = testing::random_symmetric_unitary(2, rng);
  CHECK(is_feasible({block, Architecture::group_connected(2)}));
  CHECK_FALSE(is_feasible({block, Architecture::group_connected(3)}));

  CMatrix diag = CMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) diag(i, i) = std::polar(1.0, 0.7 * i);
  CHECK(is_feasible({diag, Architecture::diagonal()}));
  diag(0, 1) = 1e-20;
  CHECK_FALSE(is_feasible({diag, Architecture::diagonal()}));

  const auto res = feasibility_residuals({s, Architecture::fully_connected()});
  CHECK(res.unitarity < 1e-12);
  CHECK(res.symmetry < 1e-12);
}
