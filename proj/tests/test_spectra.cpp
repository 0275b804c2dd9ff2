#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <set>

#include "qsix/spectra.hpp"

using qsix::cplx;
using qsix::CPoly;
using qsix::Mat;
using qsix::ModelParams;
using qsix::ProbeData;
using qsix::SpectrumOptions;
using qsix::Vec;

namespace {

Vec basis_vector(const ModelParams& p, int index) {
  Vec v = Vec::Zero(p.dim());
  v(index) = 1.0;
  return v;
}

// Eigenvalue polynomial of the auxiliary matrix on the all-up state:
// every site contributes the (up,up) block of the local operator, so the
// trace is a plain sum over the auxiliary weights.
CPoly allup_poly(const ModelParams& p, cplx mu) {
  auto rep = qsix::build_rep(p, mu);
  std::vector<std::pair<cplx, cplx>> samples;
  for (int k = 0; k <= p.M; ++k) {
    cplx z = 0.83 * std::polar(1.0, 2.0 * M_PI * k / (p.M + 1));
    cplx acc = 0;
    for (int n = 0; n < p.Nprime; ++n) {
      cplx tau = rep.t(n, n);
      acc += std::pow((z / mu) * p.q * tau - 1.0 / tau, p.M);
    }
    samples.push_back({z, acc});
  }
  return qsix::interpolate(samples, p.M);
}

// Scaled transfer eigenvalue on the fully polarized states.
CPoly polarized_tpoly(const ModelParams& p) {
  std::vector<cplx> r1(p.M, 1.0 / p.q_pow(2));
  std::vector<cplx> r2(p.M, 1.0);
  CPoly a = CPoly::from_roots(r1, std::pow(-p.q_pow(2), p.M));
  CPoly b = CPoly::from_roots(r2, std::pow(-1.0, p.M) * p.q_pow(p.M));
  return a + b;
}

double rel(cplx a, cplx b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("eigenvalue polynomial extraction matches the polarized closed forms",
          "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 6);
  const cplx mu = 1.3;
  auto rep = qsix::build_rep(p, mu);

  Vec up = basis_vector(p, 0);
  CPoly lam = qsix::q_eigen_poly(up, rep);
  CHECK(qsix::poly_rel_dist(lam, allup_poly(p, mu)) < 1e-10);

  // the sum collapses to 3 mu^-9 (z^3 - a+ mu^6)(z^3 - a- mu^6) with
  // a+ + a- = 20 and a+ a- = 1: both string centres drift with mu
  CPoly closed;
  closed.c = {3.0 * std::pow(mu, 3), 0, 0, -60.0 / std::pow(mu, 3), 0, 0,
              3.0 / std::pow(mu, 9)};
  CHECK(qsix::poly_rel_dist(lam, closed) < 1e-10);

  // fully polarized transfer eigenvalue: weights a^M + b^M
  CPoly tp = qsix::transfer_eigen_poly(up, p);
  CHECK(qsix::poly_rel_dist(tp, polarized_tpoly(p)) < 1e-10);

  // odd chain: only two binomial terms survive the trace over the cyclic
  // weights, leaving 15 q^{5/2} (z mu^{1/2} - z^4 mu^{-11/2})
  auto p5 = ModelParams::roots_of_unity(3, 5);
  CPoly lam5 = qsix::q_eigen_poly(basis_vector(p5, 0), qsix::build_rep(p5, mu));
  CHECK(qsix::poly_rel_dist(lam5, allup_poly(p5, mu)) < 1e-10);
  const cplx pref = 15.0 * p5.q_half_pow(5);
  CPoly closed5;
  closed5.c = {0, pref * std::sqrt(mu), 0, 0, -pref / std::pow(std::sqrt(mu), 11)};
  CHECK(qsix::poly_rel_dist(lam5, closed5) < 1e-10);
}

TEST_CASE("classification of the M=4 polarized state finds a double zero at the origin",
          "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 4);
  SpectrumOptions opt;
  Vec up = basis_vector(p, 0);

  std::vector<ProbeData> probes;
  for (cplx mu : {opt.mu1, opt.mu2})
    probes.push_back({mu, qsix::q_eigen_poly(up, qsix::build_rep(p, mu))});
  auto cls = qsix::classify_zeroes(probes, p, opt);

  CHECK(cls.n_inf == 2);
  CHECK(cls.degree == 2);
  CHECK(cls.n_bethe() == 0);
  CHECK(cls.n_strings() == 0);
  CHECK(cls.deficit_consistent);
  // whole polynomial is 18 q^2 z^2 / mu^2
  CHECK(rel(cls.norms[0], 18.0 * p.q_pow(2) / (opt.mu1 * opt.mu1)) < 1e-9);
  CHECK(rel(cls.norms[1], 18.0 * p.q_pow(2) / (opt.mu2 * opt.mu2)) < 1e-9);

  // norm exponent -M/2 - n_B - N' n_S' = -2 from real probes
  std::vector<std::pair<double, cplx>> samples;
  for (double mu : {0.85, 1.1, 1.3}) {
    CPoly lam = qsix::q_eigen_poly(up, qsix::build_rep(p, mu));
    lam.trim(1e-9);
    samples.push_back({mu, lam.lead()});
  }
  CHECK(std::abs(qsix::fit_norm_exponent(samples) - (-2.0)) < 1e-6);
}

TEST_CASE("synthetic zero patterns are classified with multiplicities", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 13);
  SpectrumOptions opt;
  const cplx d{0.55, 0.20};   // constant orbit carrying two strings plus a Bethe root
  const cplx s{-0.9, 0.7};    // drifting string centre

  auto lambda_at = [&](cplx mu) {
    std::vector<cplx> roots;
    for (int l = 0; l < 3; ++l) {
      roots.push_back(d * p.q_pow(2 * l));
      roots.push_back(d * p.q_pow(2 * l));
    }
    roots.push_back(d);            // Bethe root, the excess on the orbit
    roots.push_back(d * mu * mu);  // its partner
    for (int l = 0; l < 3; ++l) roots.push_back(s * mu * mu * p.q_pow(2 * l));
    CPoly body = CPoly::from_roots(roots, 2.7 / std::pow(mu, 4));
    CPoly zz;
    zz.c = {0, 0, 1.0};
    return zz * body;
  };

  std::vector<ProbeData> probes = {{opt.mu1, lambda_at(opt.mu1)},
                                   {opt.mu2, lambda_at(opt.mu2)}};
  auto cls = qsix::classify_zeroes(probes, p, opt);

  CHECK(cls.n_inf == 2);
  CHECK(cls.degree == 13);
  REQUIRE(cls.n_bethe() == 1);
  // d is a triple zero of each probe, so the root finder only resolves it
  // to eps^(1/3); the simple drifting partner below stays sharp
  CHECK(rel(cls.bethe_roots[0], d) < 1e-4);
  REQUIRE(cls.mu_partner_roots.size() == 1);
  CHECK(rel(cls.mu_partner_roots[0], d * opt.mu1 * opt.mu1) < 1e-8);
  REQUIRE(cls.n_strings() == 3);
  CHECK(cls.n_strings_scaling() == 1);
  int nconst = 0, nscal = 0;
  for (const auto& sc : cls.strings) {
    if (sc.mu_scaling) {
      ++nscal;
      CHECK(rel(sc.power, std::pow(s, 3)) < 1e-7);
    } else {
      ++nconst;
      CHECK(rel(sc.power, std::pow(d, 3)) < 1e-7);
    }
  }
  CHECK(nconst == 2);
  CHECK(nscal == 1);
  CHECK_FALSE(cls.deficit_consistent);  // deg 13 leaves no room for n_inf = 2
}

TEST_CASE("ambiguous trajectories are resolved by a third probe", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 4);
  SpectrumOptions opt;
  const cplx b1{0.7, 0.3};
  const cplx b2 = b1 * (opt.mu2 * opt.mu2) / (opt.mu1 * opt.mu1);

  auto lambda_at = [&](cplx mu) {
    return CPoly::from_roots({b1, b2, b1 * mu * mu, b2 * mu * mu}, 1.4);
  };

  std::vector<ProbeData> two = {{opt.mu1, lambda_at(opt.mu1)},
                                {opt.mu2, lambda_at(opt.mu2)}};
  CHECK_THROWS_WITH(qsix::classify_zeroes(two, p, opt),
                    Catch::Matchers::ContainsSubstring("third probe"));

  std::vector<ProbeData> three = two;
  three.push_back({opt.mu3, lambda_at(opt.mu3)});
  auto cls = qsix::classify_zeroes(three, p, opt);
  CHECK(cls.n_bethe() == 2);
  CHECK(cls.n_strings() == 0);
  CHECK(cls.n_inf == 0);
  CHECK(cls.degree == 4);
  CHECK(cls.deficit_consistent);
}

TEST_CASE("trajectories violating both laws are rejected", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 1);
  SpectrumOptions opt;
  std::vector<ProbeData> probes = {
      {opt.mu1, CPoly::from_roots({cplx(0.8, 0.0)}, 1.0)},
      {opt.mu2, CPoly::from_roots({cplx(0.8, 0.0) * 1.37}, 1.0)}};
  CHECK_THROWS_WITH(qsix::classify_zeroes(probes, p, opt),
                    Catch::Matchers::ContainsSubstring("unclassifiable"));
}

TEST_CASE("common eigenbasis spans every momentum block", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 6);
  SpectrumOptions opt;
  auto sec = qsix::enumerate_sector(p, 0);
  Mat S = qsix::shift_matrix(p);
  Mat T = qsix::transfer_block_scaled(cplx(0.77, 0.13), p);

  int total = 0;
  for (int j = 0; j < p.M; ++j) {
    auto blk = qsix::momentum_block(sec, j, p);
    if (blk.P.cols() == 0) continue;
    std::vector<Vec> vecs;
    for (cplx mu0 : {cplx(1.22, 0.10), cplx(1.31, -0.21), cplx(0.84, 0.33)}) {
      try {
        vecs = qsix::common_eigenbasis(sec, blk, p, mu0, cplx(0.63, 0.18), opt);
        break;
      } catch (const qsix::spectra_error&) {}
    }
    REQUIRE(static_cast<int>(vecs.size()) == blk.P.cols());
    total += static_cast<int>(vecs.size());

    const cplx phase = std::polar(1.0, -2.0 * M_PI * blk.j / p.M);
    for (const Vec& v : vecs) {
      CHECK((S * v - phase * v).norm() < 1e-9 * v.norm());
      Vec w = T * v;
      int imax = 0;
      double best = 0;
      for (int r = 0; r < v.size(); ++r)
        if (std::abs(v(r)) > best) { best = std::abs(v(r)); imax = r; }
      cplx lam = w(imax) / v(imax);
      CHECK((w - lam * v).norm() < 1e-7 * T.norm() * v.norm());
    }
  }
  CHECK(total == sec.dim());
}

TEST_CASE("full spectrum at M=6 reproduces the polarized quartet", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 6);
  SpectrumOptions opt;
  auto spec = qsix::full_spectrum(p, opt);

  CHECK(static_cast<int>(spec.eigs.size()) == static_cast<int>(p.dim()));
  int msum = 0;
  for (const auto& m : spec.multiplets) msum += static_cast<int>(m.members.size());
  CHECK(msum == static_cast<int>(p.dim()));

  // locate the multiplet containing the all-up state
  int iup = -1;
  for (int i = 0; i < static_cast<int>(spec.eigs.size()); ++i)
    if (spec.eigs[i].two_sz == p.M) iup = i;
  REQUIRE(iup >= 0);
  const qsix::Multiplet* quartet = nullptr;
  for (const auto& m : spec.multiplets)
    if (std::find(m.members.begin(), m.members.end(), iup) != m.members.end())
      quartet = &m;
  REQUIRE(quartet != nullptr);

  CHECK(quartet->members.size() == 4);
  CHECK(quartet->n_S == 2);
  CHECK(quartet->dim_matches);
  CHECK(qsix::poly_rel_dist(quartet->tpoly, polarized_tpoly(p)) < 1e-8);

  const double ap = 10.0 + 3.0 * std::sqrt(11.0);
  const double am = 10.0 - 3.0 * std::sqrt(11.0);

  std::multiset<int> sectors;
  for (int i : quartet->members) {
    const auto& e = spec.eigs[i];
    sectors.insert(e.two_sz);
    CHECK(e.j == 0);
    CHECK(rel(e.momentum_phase, 1.0) < 1e-8);
    CHECK(e.cls.n_inf == 0);
    CHECK(e.cls.n_bethe() == 0);
    REQUIRE(e.cls.n_strings() == 2);
    CHECK(e.cls.degree == 6);
    CHECK(e.cls.deficit_consistent);
    CHECK(p.M == 2 * e.cls.n_inf + 2 * e.cls.n_bethe() + p.Nprime * e.cls.n_strings());

    // exact law for the normalization shift mu -> mu q
    auto nr = qsix::norm_shift_ratio(e, p, opt);
    CHECK(nr.rel_err < 1e-6);

    std::vector<std::pair<double, cplx>> powers;  // (power value tagged by flag)
    double pscaled = -1, pconst = -1;
    int nscal = e.cls.n_strings_scaling();
    if (e.two_sz == p.M) {
      // polarized up: both strings drift, norm 3 mu^-9
      CHECK(nscal == 2);
      CHECK(rel(e.cls.norms[0], 3.0 / std::pow(opt.mu1, 9)) < 1e-8);
    } else if (e.two_sz == -p.M) {
      // polarized down: both strings constant, norm 3 mu^-3
      CHECK(nscal == 0);
      CHECK(rel(e.cls.norms[0], 3.0 / std::pow(opt.mu1, 3)) < 1e-8);
    } else {
      CHECK(e.two_sz == 0);
      CHECK(nscal == 1);
    }
    for (const auto& sc : e.cls.strings) {
      double pw = sc.power.real();
      CHECK(std::abs(sc.power.imag()) < 1e-7);
      bool matches_pair = std::abs(pw - ap) < 1e-6 * ap || std::abs(pw - am) < 1e-6;
      CHECK(matches_pair);
      if (sc.mu_scaling) pscaled = pw; else pconst = pw;
    }
    if (e.two_sz == 0) {
      // mixed members pair one drifting with one constant centre, a+/a- swapped
      CHECK(pscaled > 0);
      CHECK(pconst > 0);
      CHECK(std::abs(pscaled * pconst - 1.0) < 1e-6);  // a+ a- = 1
    }
  }
  CHECK(sectors == std::multiset<int>({-p.M, 0, 0, p.M}));

  // the two mixed members carry opposite assignments
  std::set<int> scaled_is_plus;
  for (int i : quartet->members) {
    const auto& e = spec.eigs[i];
    if (e.two_sz != 0) continue;
    for (const auto& sc : e.cls.strings)
      if (sc.mu_scaling) scaled_is_plus.insert(sc.power.real() > 1.0 ? 1 : 0);
  }
  CHECK(scaled_is_plus == std::set<int>({0, 1}));
}

TEST_CASE("norm exponents on the M=6 quartet members", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 6);
  SpectrumOptions opt;

  auto exponent_of = [&](const Vec& v) {
    std::vector<std::pair<double, cplx>> samples;
    for (double mu : {0.85, 1.1, 1.3}) {
      CPoly lam = qsix::q_eigen_poly(v, qsix::build_rep(p, mu));
      lam.trim(1e-9);
      samples.push_back({mu, lam.lead()});
    }
    return qsix::fit_norm_exponent(samples);
  };

  CHECK(std::abs(exponent_of(basis_vector(p, 0)) - (-9.0)) < 1e-6);
  CHECK(std::abs(exponent_of(basis_vector(p, p.dim() - 1)) - (-3.0)) < 1e-6);

  // a mixed member: -M/2 - n_B - N' n_S' = -3 - 0 - 3
  auto spec = qsix::full_spectrum(p, opt);
  for (const auto& e : spec.eigs) {
    if (e.two_sz != 0 || e.cls.n_strings() != 2 || e.cls.n_strings_scaling() != 1)
      continue;
    if (e.cls.n_bethe() != 0) continue;
    CHECK(std::abs(exponent_of(e.v) - (-6.0)) < 1e-6);
    break;
  }
}

TEST_CASE("full spectrum at M=5 yields five Bethe doublets", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 5);
  SpectrumOptions opt;
  auto spec = qsix::full_spectrum(p, opt);
  CHECK(static_cast<int>(spec.eigs.size()) == static_cast<int>(p.dim()));
  CHECK(spec.multiplets.size() == 15);
  int msum = 0;
  for (const auto& m : spec.multiplets) msum += static_cast<int>(m.members.size());
  CHECK(msum == static_cast<int>(p.dim()));

  std::vector<const qsix::Multiplet*> doublets;
  for (const auto& m : spec.multiplets) {
    bool touches = false;
    for (int i : m.members) touches = touches || spec.eigs[i].two_sz == 3;
    if (touches) doublets.push_back(&m);
  }
  REQUIRE(doublets.size() == 5);

  std::vector<cplx> phases;
  for (const auto* m : doublets) {
    REQUIRE(m->members.size() == 2);
    CHECK(m->n_S == 1);
    CHECK(m->dim_matches);
    std::multiset<int> sect;
    for (int i : m->members) {
      const auto& e = spec.eigs[i];
      sect.insert(e.two_sz);
      CHECK(e.cls.n_inf == 0);
      REQUIRE(e.cls.n_bethe() == 1);
      CHECK(e.cls.degree == 5);
      CHECK(e.cls.deficit_consistent);

      // effective Bethe equation (1 - z q^2)^5 = q^2 (1 - z)^5
      cplx zb = e.cls.bethe_roots[0];
      cplx lhs = std::pow(1.0 - zb * p.q_pow(2), 5);
      cplx rhs = p.q_pow(2) * std::pow(1.0 - zb, 5);
      CHECK(rel(lhs, rhs) < 1e-8);

      // normalization shift law up to sign: (ratio q^{n_inf + 2 n_B})^2 = 1
      auto nr = qsix::norm_shift_ratio(e, p, opt);
      cplx signed_ratio = nr.measured * p.q_pow(e.cls.n_inf + 2 * e.cls.n_bethe());
      CHECK(std::abs(signed_ratio * signed_ratio - 1.0) < 1e-6);
    }
    CHECK(sect == std::multiset<int>({-3, 3}));
    phases.push_back(spec.eigs[m->members.front()].momentum_phase);

    // both members share the Bethe root
    cplx z0 = spec.eigs[m->members[0]].cls.bethe_roots[0];
    cplx z1 = spec.eigs[m->members[1]].cls.bethe_roots[0];
    CHECK(rel(z0, z1) < 1e-8);
  }

  // the five doublet momenta exhaust the fifth roots of unity
  for (cplx ph : phases) CHECK(std::abs(std::abs(ph) - 1.0) < 1e-8);
  std::set<int> labels;
  for (cplx ph : phases) {
    double ang = std::arg(ph) / (2.0 * M_PI / 5.0);
    int lab = static_cast<int>(std::lround(ang));
    CHECK(std::abs(ang - lab) < 1e-6);
    labels.insert(((lab % 5) + 5) % 5);
  }
  CHECK(labels.size() == 5);

  // the exact shift law on the zero-momentum doublet (a real eigenvector)
  for (const auto* m : doublets)
    for (int i : m->members) {
      const auto& e = spec.eigs[i];
      if (e.j != 0) continue;
      auto nr = qsix::norm_shift_ratio(e, p, opt);
      CHECK(nr.rel_err < 1e-6);
    }

  // the odd chain carries a common kernel of the auxiliary family: one
  // zero-momentum state in each |2Sz| = 1 sector with vanishing eigenvalue
  std::vector<int> nulls;
  for (int i = 0; i < static_cast<int>(spec.eigs.size()); ++i)
    if (spec.eigs[i].null_q) nulls.push_back(i);
  REQUIRE(nulls.size() == 2);
  std::multiset<int> nsect;
  for (int i : nulls) {
    const auto& e = spec.eigs[i];
    nsect.insert(e.two_sz);
    CHECK(e.j == 0);
    CHECK(rel(e.momentum_phase, 1.0) < 1e-8);
    CHECK(e.tpoly.max_abs_coeff() > 0.1);  // honest transfer eigenvalue
  }
  CHECK(nsect == std::multiset<int>({-1, 1}));
  const qsix::Multiplet* nullpair = nullptr;
  for (const auto& m : spec.multiplets)
    if (std::find(m.members.begin(), m.members.end(), nulls[0]) != m.members.end())
      nullpair = &m;
  REQUIRE(nullpair != nullptr);
  CHECK(nullpair->members.size() == 2);
  CHECK(nullpair->n_null == 2);
  CHECK(nullpair->n_S == -1);
  CHECK(nullpair->dim_matches);

  // the polarized transfer eigenvalue is fourfold degenerate: the all-up
  // state pairs with a |2Sz| = 1 partner and spin reversal doubles that.
  // The string count stays at one, so the dimension check flags 4 != 2.
  int iup = -1;
  for (int i = 0; i < static_cast<int>(spec.eigs.size()); ++i)
    if (spec.eigs[i].two_sz == p.M) iup = i;
  REQUIRE(iup >= 0);
  const qsix::Multiplet* pol = nullptr;
  for (const auto& m : spec.multiplets)
    if (std::find(m.members.begin(), m.members.end(), iup) != m.members.end())
      pol = &m;
  REQUIRE(pol != nullptr);
  CHECK(pol->members.size() == 4);
  CHECK(pol->n_S == 1);
  CHECK(pol->n_null == 0);
  CHECK_FALSE(pol->dim_matches);
  CHECK(qsix::poly_rel_dist(pol->tpoly, polarized_tpoly(p)) < 1e-8);

  const cplx pref = 15.0 * p.q_half_pow(5);
  const cplx root_mu = std::sqrt(opt.mu1);
  std::multiset<int> psect;
  for (int i : pol->members) {
    const auto& e = spec.eigs[i];
    psect.insert(e.two_sz);
    CHECK(e.j == 0);
    CHECK(e.cls.n_inf == 1);
    CHECK(e.cls.n_bethe() == 0);
    REQUIRE(e.cls.n_strings() == 1);
    CHECK(e.cls.degree == 4);
    CHECK(e.cls.deficit_consistent);
    CHECK(rel(e.cls.strings[0].power, 1.0) < 1e-7);
    if (e.two_sz > 0) {
      // drifting string z^3 - mu^6, norm -15 q^{5/2} mu^{-11/2}
      CHECK(e.cls.n_strings_scaling() == 1);
      CHECK(rel(e.cls.norms[0], -pref / std::pow(root_mu, 11)) < 1e-8);
    } else {
      // constant string z^3 - 1, norm -15 q^{5/2} mu^{-5/2}
      CHECK(e.cls.n_strings_scaling() == 0);
      CHECK(rel(e.cls.norms[0], -pref / std::pow(root_mu, 5)) < 1e-8);
    }
  }
  CHECK(psect == std::multiset<int>({-p.M, -1, 1, p.M}));
}

TEST_CASE("auxiliary kernel appears exactly on odd chains", "[spectra]") {
  // common kernel of the Q family: present iff M and N are both odd with
  // M >= N, confined to |2Sz| <= N - 2
  for (int M = 2; M <= 7; ++M) {
    auto p = ModelParams::roots_of_unity(3, M);
    auto rep = qsix::build_rep(p, cplx(1.3, 0.0));
    for (int tsz : qsix::all_two_sz(p)) {
      auto sec = qsix::enumerate_sector(p, tsz);
      int expect = (M % 2 == 1 && std::abs(tsz) == 1) ? 1 : 0;
      CHECK(qsix::q_kernel_dimension(rep, sec, cplx(0.37, 0.21)) == expect);
    }
  }
  {
    auto p = ModelParams::roots_of_unity(5, 5);
    auto rep = qsix::build_rep(p, cplx(1.3, 0.0));
    for (int tsz : qsix::all_two_sz(p)) {
      auto sec = qsix::enumerate_sector(p, tsz);
      int expect = std::abs(tsz) == 1 ? 8 : (std::abs(tsz) == 3 ? 3 : 0);
      CHECK(qsix::q_kernel_dimension(rep, sec, cplx(0.37, 0.21)) == expect);
    }
  }

  // the shortest odd chain resolves around its kernel states
  auto p = ModelParams::roots_of_unity(3, 3);
  SpectrumOptions opt;
  auto spec = qsix::full_spectrum(p, opt);
  CHECK(static_cast<int>(spec.eigs.size()) == 8);
  CHECK(spec.multiplets.size() == 4);

  int nnull = 0;
  for (const auto& e : spec.eigs) {
    if (!e.null_q) continue;
    ++nnull;
    CHECK(std::abs(e.two_sz) == 1);
    CHECK(e.j == 0);
    CHECK_THROWS_WITH(qsix::norm_shift_ratio(e, p, opt),
                      Catch::Matchers::ContainsSubstring("vanishing"));
  }
  CHECK(nnull == 2);

  // polarized doublet: no room for partners here, the dimension law holds
  int iup = -1;
  for (int i = 0; i < static_cast<int>(spec.eigs.size()); ++i)
    if (spec.eigs[i].two_sz == p.M) iup = i;
  REQUIRE(iup >= 0);
  for (const auto& m : spec.multiplets) {
    if (std::find(m.members.begin(), m.members.end(), iup) == m.members.end())
      continue;
    CHECK(m.members.size() == 2);
    CHECK(m.n_S == 1);
    CHECK(m.dim_matches);
    for (int i : m.members) {
      const auto& e = spec.eigs[i];
      CHECK(e.cls.degree == 3);
      CHECK(e.cls.n_inf == 0);
      CHECK(e.cls.n_bethe() == 0);
      REQUIRE(e.cls.n_strings() == 1);
      // all-up: -3 q^{3/2} mu^{-9/2} (z^3 - mu^6); reversal freezes the string
      const cplx root_mu = std::sqrt(opt.mu1);
      if (e.two_sz > 0) {
        CHECK(e.cls.n_strings_scaling() == 1);
        CHECK(rel(e.cls.norms[0], -3.0 / std::pow(root_mu, 9)) < 1e-8);
      } else {
        CHECK(e.cls.n_strings_scaling() == 0);
        CHECK(rel(e.cls.norms[0], -3.0 / std::pow(root_mu, 3)) < 1e-8);
      }
    }
  }
}

TEST_CASE("full spectrum audit at M=4", "[spectra]") {
  auto p = ModelParams::roots_of_unity(3, 4);
  SpectrumOptions opt;
  auto spec = qsix::full_spectrum(p, opt);
  CHECK(static_cast<int>(spec.eigs.size()) == static_cast<int>(p.dim()));

  for (const auto& e : spec.eigs) {
    CHECK(e.cls.degree ==
          e.cls.n_inf + 2 * e.cls.n_bethe() + p.Nprime * e.cls.n_strings());
    // shift law up to sign for every eigenvalue
    auto nr = qsix::norm_shift_ratio(e, p, opt);
    cplx signed_ratio = nr.measured * p.q_pow(e.cls.n_inf + 2 * e.cls.n_bethe());
    CHECK(std::abs(signed_ratio * signed_ratio - 1.0) < 1e-6);
  }
  for (const auto& m : spec.multiplets) CHECK(m.n_S >= 0);
}
