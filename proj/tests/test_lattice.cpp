#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qsix/lattice.hpp"

using qsix::cplx;
using qsix::Mat;
using qsix::ModelParams;
using qsix::Vec;

TEST_CASE("model parameters", "[lattice]") {
  auto p = ModelParams::roots_of_unity(3, 6);
  CHECK(p.Nprime == 3);
  CHECK(std::abs(p.q - std::polar(1.0, 2.0 * M_PI / 3)) < 1e-15);
  CHECK(std::abs(p.q_half * p.q_half - p.q) < 1e-15);
  CHECK(ModelParams::roots_of_unity(4, 4).Nprime == 2);
  CHECK(ModelParams::roots_of_unity(6, 4).Nprime == 3);
  CHECK(ModelParams::roots_of_unity(8, 4).Nprime == 4);
  auto c = p.conjugated();
  CHECK(std::abs(c.q - std::conj(p.q)) < 1e-15);
  CHECK(std::abs(c.q_half * c.q_half - c.q) < 1e-15);
  CHECK_THROWS_AS(ModelParams::roots_of_unity(2, 4), qsix::lattice_error);
}

TEST_CASE("sector enumeration", "[lattice]") {
  SECTION("dimensions") {
    auto p2 = ModelParams::roots_of_unity(3, 2);
    CHECK(qsix::enumerate_sector(p2, 0).dim() == 2);
    auto p6 = ModelParams::roots_of_unity(3, 6);
    CHECK(qsix::enumerate_sector(p6, 6).dim() == 1);
    CHECK(qsix::enumerate_sector(p6, 0).dim() == 20);
    auto p8 = ModelParams::roots_of_unity(3, 8);
    CHECK(qsix::enumerate_sector(p8, 0).dim() == 70);
  }
  SECTION("parity and range guard") {
    auto p5 = ModelParams::roots_of_unity(3, 5);
    CHECK_THROWS_AS(qsix::enumerate_sector(p5, 2), qsix::lattice_error);
    CHECK(qsix::enumerate_sector(p5, 3).dim() == 5);
    auto p4 = ModelParams::roots_of_unity(3, 4);
    CHECK_THROWS_AS(qsix::enumerate_sector(p4, 6), qsix::lattice_error);
  }
  SECTION("sector sizes sum to the full space") {
    auto p = ModelParams::roots_of_unity(3, 7);
    std::size_t total = 0;
    for (int tsz : qsix::all_two_sz(p)) total += qsix::enumerate_sector(p, tsz).dim();
    CHECK(total == p.dim());
  }
}

TEST_CASE("symmetry actions on basis states", "[lattice]") {
  SECTION("translation moves content from site m to site m+1") {
    // |up down up up> -> |up up down up>
    CHECK(qsix::shift_mask(0b0010u, 4) == 0b0100u);
    // wrap-around: site 4 content lands on site 1
    CHECK(qsix::shift_mask(0b1000u, 4) == 0b0001u);
  }
  SECTION("spin reversal flips every site") {
    // |up up down> -> |down down up>
    CHECK(qsix::reverse_mask(0b100u, 3) == 0b011u);
  }
  SECTION("parity operator eigenvalues") {
    auto p = ModelParams::roots_of_unity(3, 6);
    Vec v = Vec::Zero(p.dim());
    v(0b000011) = 1.0;  // two down spins
    CHECK(std::abs(qsix::apply_parity(v, p)(0b000011) - 1.0) < 1e-15);
    v.setZero();
    v(0b000111) = 1.0;  // three down spins
    CHECK(std::abs(qsix::apply_parity(v, p)(0b000111) + 1.0) < 1e-15);
  }
  SECTION("parity matches (-1)^(M/2 - |S^z|) for even M") {
    auto p = ModelParams::roots_of_unity(3, 6);
    for (std::uint32_t mask : {0b000000u, 0b000001u, 0b001011u, 0b111111u}) {
      int two_sz = qsix::two_sz_of(mask, p.M);
      double expect = std::pow(-1.0, p.M / 2 - std::abs(two_sz) / 2.0);
      Vec v = Vec::Zero(p.dim());
      v(mask) = 1.0;
      CHECK(std::abs(qsix::apply_parity(v, p)(mask) - expect) < 1e-15);
    }
  }
  SECTION("shift commutes with reversal and parity") {
    auto p = ModelParams::roots_of_unity(3, 5);
    qsix::Rng rng(7);
    Vec v(p.dim());
    for (int i = 0; i < v.size(); ++i) v(i) = rng.annulus(0.1, 1.0);
    Vec a = qsix::apply_shift(qsix::apply_reversal(v, p), p);
    Vec b = qsix::apply_reversal(qsix::apply_shift(v, p), p);
    CHECK((a - b).norm() < 1e-14);
    a = qsix::apply_shift(qsix::apply_parity(v, p), p);
    b = qsix::apply_parity(qsix::apply_shift(v, p), p);
    CHECK((a - b).norm() < 1e-14);
  }
}

TEST_CASE("momentum projection", "[lattice]") {
  SECTION("M=2 antisymmetric combination at k = pi") {
    auto p = ModelParams::roots_of_unity(3, 2);
    Vec v = qsix::momentum_project(0b10u, 1, p);  // |up down>, j=1 -> k=pi
    CHECK(std::abs(v(0b10u) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(v(0b01u) + 1.0 / std::sqrt(2.0)) < 1e-14);
  }
  SECTION("incompatible orbit projects to zero") {
    auto p = ModelParams::roots_of_unity(3, 4);
    Vec v = qsix::momentum_project(0b1010u, 1, p);  // orbit length 2, k=pi/2
    CHECK(v.norm() < 1e-14);
  }
  SECTION("k=0 projection is the uniform orbit sum") {
    auto p = ModelParams::roots_of_unity(3, 5);
    Vec v = qsix::momentum_project(0b00001u, 0, p);
    int hits = 0;
    for (int i = 0; i < v.size(); ++i)
      if (std::abs(v(i)) > 1e-12) {
        ++hits;
        CHECK(std::abs(v(i) - 1.0 / std::sqrt(5.0)) < 1e-14);
      }
    CHECK(hits == 5);
  }
  SECTION("projected states are shift eigenvectors with eigenvalue exp(-ik)") {
    auto p = ModelParams::roots_of_unity(3, 6);
    for (int j : {0, 1, 2, 3, 5}) {
      Vec v = qsix::momentum_project(0b000111u, j, p);
      if (v.norm() < 0.5) continue;
      Vec sv = qsix::apply_shift(v, p);
      cplx phase = std::polar(1.0, -2.0 * M_PI * j / p.M);
      CHECK((sv - phase * v).norm() < 1e-13);
    }
  }
}

TEST_CASE("momentum blocks tile each sector", "[lattice]") {
  auto p = ModelParams::roots_of_unity(3, 6);
  auto s = qsix::enumerate_sector(p, 0);
  SECTION("block dimensions for M=6, S^z=0") {
    std::vector<int> dims;
    int total = 0;
    for (int j = 0; j < p.M; ++j) {
      auto b = qsix::momentum_block(s, j, p);
      dims.push_back(int(b.P.cols()));
      total += int(b.P.cols());
      // columns orthonormal
      Mat gram = b.P.adjoint() * b.P;
      CHECK((gram - Mat::Identity(gram.rows(), gram.cols())).norm() < 1e-12);
    }
    CHECK(total == s.dim());
    CHECK(dims == std::vector<int>{4, 3, 3, 4, 3, 3});
  }
  SECTION("orbit lengths divide M") {
    for (const auto& orb : qsix::translation_orbits(s)) CHECK(p.M % orb.length == 0);
  }
}
