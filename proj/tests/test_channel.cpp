#include <catch2/catch_amalgamated.hpp>

#include "bdris/channel.hpp"
#include "test_support.hpp"

using namespace bdris;
using Catch::Approx;

TEST_CASE("element positions follow the half-wavelength grid", "[channel]") {
  const auto pos = element_positions(8, 4, 0.03);
  REQUIRE(pos.size() == 32);
  CHECK((pos[0] - Vec3(0, 0, 0)).norm() < 1e-15);
  CHECK((pos[1] - Vec3(0, 0.015, 0)).norm() < 1e-15);
  CHECK((pos[8] - Vec3(0, 0, 0.015)).norm() < 1e-15);
  CHECK((pos[9] - Vec3(0, 0.015, 0.015)).norm() < 1e-15);
  for (const auto& p : pos) CHECK(p.x() == 0.0);
}

TEST_CASE("sinc values", "[channel]") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(std::abs(sinc(1.0)) < 1e-15);
  CHECK(std::abs(sinc(2.0)) < 1e-15);
  CHECK(sinc(0.5) == Approx(2.0 / kPi).epsilon(1e-14));
  CHECK(sinc(-0.5) == Approx(sinc(0.5)).epsilon(1e-15));
}

TEST_CASE("spatial correlation structure", "[channel]") {
  const RMatrix r = spatial_correlation(8, 4, 0.03);
  REQUIRE(r.rows() == 32);
  CHECK((r - r.transpose()).norm() == 0.0);
  for (int i = 0; i < 32; ++i) CHECK(r(i, i) == Approx(1.0).epsilon(1e-15));
  // horizontally adjacent elements are half a wavelength apart
  CHECK(std::abs(r(0, 1)) < 1e-15);
  CHECK(std::abs(r(0, 8)) < 1e-15);
  CHECK(r(0, 9) == Approx(sinc(std::sqrt(2.0))).epsilon(1e-12));

  const RMatrix small = spatial_correlation(2, 2, 0.03);
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(small);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("PSD square root", "[channel]") {
  SECTION("identity") {
    CHECK((sqrt_psd(RMatrix::Identity(4, 4)) - RMatrix::Identity(4, 4)).norm() < 1e-14);
  }
  SECTION("diagonal") {
    RMatrix d = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    RMatrix expected = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    CHECK((sqrt_psd(d) - expected).norm() < 1e-14);
  }
  SECTION("reconstructs the correlation matrix") {
    const RMatrix r = spatial_correlation(8, 4, 0.03);
    const RMatrix s = sqrt_psd(r);
    CHECK((s - s.transpose()).norm() < 1e-12);
    CHECK((s * s - r).norm() / r.norm() <= 1e-10);
  }
  SECTION("random PSD") {
    Rng rng(3);
    RMatrix x = RMatrix::NullaryExpr(6, 3, [&] { return testing::uniform(rng, -1, 1); });
    const RMatrix r = x * x.transpose();  // rank 3, singular
    const RMatrix s = sqrt_psd(r);
    CHECK((s * s - r).norm() / r.norm() <= 1e-10);
  }
  SECTION("indefinite input is rejected") {
    RMatrix bad = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    try {
      sqrt_psd(bad);
      FAIL("expected NotPSD");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPSD);
    }
  }
}

TEST_CASE("user channel statistics", "[channel]") {
  const RMatrix r = spatial_correlation(2, 2, 0.03);
  const RMatrix root = sqrt_psd(r);
  SECTION("zero path loss gives a zero channel") {
    Rng rng(1);
    CHECK(rayleigh_user_channel(0.0, root, rng).norm() == 0.0);
  }
  SECTION("deterministic for a seed") {
    Rng a(42), b(42);
    CHECK(rayleigh_user_channel(1e-5, root, a) == rayleigh_user_channel(1e-5, root, b));
  }
  SECTION("sample covariance matches beta R") {
    const double beta = 2.5e-5;
    Rng rng(7);
    CMatrix cov = CMatrix::Zero(4, 4);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      const CVector f = rayleigh_user_channel(beta, root, rng);
      cov += f * f.adjoint();
    }
    cov /= static_cast<double>(draws);
    const CMatrix expected = beta * r.cast<Complex>();
    CHECK((cov - expected).norm() / expected.norm() < 0.05);
  }
}

TEST_CASE("target steering vector", "[channel]") {
  SECTION("broadside gives equal phases") {
    const CVector a = target_steering(kPi / 2, 0.0, 8, 4);
    for (int i = 0; i < 32; ++i) CHECK(std::abs(a(i) - Complex(1.0 / std::sqrt(32.0))) < 1e-14);
  }
  SECTION("single row at 90 and 45 degrees") {
    const CVector a = target_steering(kPi / 2, kPi / 4, 4, 1);
    for (int m = 0; m < 4; ++m) {
      const Complex expected = std::polar(0.5, -kPi * m * std::sqrt(2.0) / 2.0);
      CHECK(std::abs(a(m) - expected) < 1e-14);
    }
  }
  SECTION("Kronecker structure") {
    const double el = 1.1, az = 0.4;
    const CVector a = target_steering(el, az, 3, 2);
    const CVector a1 = target_steering(kPi / 2, std::asin(std::sin(el) * std::sin(az)), 3, 1);
    CMatrix a2(2, 1);
    for (int m = 0; m < 2; ++m) a2(m, 0) = std::polar(1.0 / std::sqrt(2.0), -kPi * m * std::cos(el));
    const CMatrix expected = testing::kron(a1, a2);
    CHECK((a - expected.col(0)).norm() < 1e-14);
  }
  SECTION("unit norm and constant modulus for random angles") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
      const double el = testing::uniform(rng, 0, kPi);
      const double az = testing::uniform(rng, -kPi, kPi);
      const CVector a = target_steering(el, az, 8, 4);
      CHECK(a.norm() == Approx(1.0).epsilon(1e-14));
      CHECK(a.cwiseAbs().maxCoeff() - a.cwiseAbs().minCoeff() < 1e-15);
    }
  }
}

TEST_CASE("path loss", "[channel]") {
  CHECK(pathloss_user(1.0) == Approx(1e-3).epsilon(1e-15));
  CHECK(pathloss_user(10.0) == Approx(1e-5).epsilon(1e-15));
  CHECK(pathloss_user(20.0) == Approx(pathloss_user(10.0) / 4).epsilon(1e-14));
  CHECK(pathloss_bs_ris_db(1.0) == Approx(37.3));
  CHECK(pathloss_bs_ris_db(10.0) == Approx(59.3));
  for (double d : {0.0, -1.0}) {
    try {
      pathloss_user(d);
      FAIL("expected ZeroDistance");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroDistance);
    }
    try {
      pathloss_bs_ris_db(d);
      FAIL("expected ZeroDistance");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroDistance);
    }
  }
}

TEST_CASE("BS-RIS channel", "[channel]") {
  Geometry geom;
  const auto steering = bs_ris_steering(geom, 8);
  CHECK(steering.ris.norm() == Approx(1.0));
  CHECK(steering.bs.norm() == Approx(1.0));

  SECTION("pure line of sight is rank one") {
    Rng rng(5);
    const CMatrix g = bs_ris_channel(20.0, 1e12, steering, rng);
    Eigen::JacobiSVD<CMatrix> svd(g);
    const auto s = svd.singularValues();
    CHECK(s(1) / s(0) <= 1e-5);
  }
  SECTION("average entry power matches the path loss") {
    SteeringPair small{target_steering(1.0, 0.3, 2, 2), ula_steering(2, 0.4)};
    Rng rng(9);
    double total = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) total += bs_ris_channel(20.0, 10.0, small, rng).squaredNorm();
    const double mean = total / (draws * 8.0);
    const double expected = std::pow(10.0, -pathloss_bs_ris_db(20.0) / 10.0);
    CHECK(std::abs(mean - expected) / expected < 0.05);
  }
  SECTION("rejects zero distance") {
    Rng rng(1);
    CHECK_THROWS_AS(bs_ris_channel(0.0, 10.0, steering, rng), Error);
  }
}

TEST_CASE("channel generation", "[channel]") {
  ScenarioParams params;
  Geometry g1, g2;
  Rng r1(123), r2(123);
  const ChannelSet a = generate_channels(g1, params, r1);
  const ChannelSet b = generate_channels(g2, params, r2);

  REQUIRE(a.num_elements() == 32);
  REQUIRE(a.num_antennas() == 8);
  REQUIRE(a.num_users() == 5);
  CHECK(a.bs_ris == b.bs_ris);
  CHECK(a.target == b.target);
  for (int k = 0; k < 5; ++k) {
    CHECK(a.users[k] == b.users[k]);
    CHECK(a.betas[k] > 0.0);
    const double d = (g1.user_positions[k] - g1.ris_position).norm();
    CHECK(d >= 5.0);
    CHECK(d <= 30.0);
    CHECK(g1.user_positions[k].z() == 0.0);
    CHECK(a.betas[k] == Approx(pathloss_user(d)));
  }
  CHECK(a.target.norm() == Approx(1.0));
  CHECK(a.user_matrix().cols() == 5);

  Geometry g3;
  Rng r3(124);
  CHECK(generate_channels(g3, params, r3).bs_ris != a.bs_ris);
}
