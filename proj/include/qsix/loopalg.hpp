#pragma once
// Loop-algebra action on the spin chain when q is a primitive root of unity
// of odd order N.  The N-th divided powers of the quantum-group raising and
// lowering operators stay finite at the root of unity and generate an sl2
// loop algebra on the sectors with 2S^z = 0 mod N.  From a highest weight
// vector the eigenvalues of the Cartan modes assemble into a polynomial
// whose roots label the irreducible decomposition of the degenerate
// eigenspace; its degree and root multiplicities fix the multiplet size.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsix/lattice.hpp"
#include "qsix/numerics.hpp"

namespace qsix {

struct loopalg_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// unit^k for a unimodular unit, drift free for large |k|.
inline cplx unit_pow(cplx unit, long k) {
  return std::polar(1.0, std::arg(unit) * static_cast<double>(k));
}

}  // namespace detail

// Divided power of the total raising operator: sum over all N-subsets of
// down sites m_1 < ... < m_N, each term flips the subset up and dresses the
// sites strictly between m_i and m_{i+1} with qval^{(N-i) sigma^z}.  Sites
// outside [m_1, m_N] are untouched.
inline Mat divided_power_raise(const ModelParams& p, cplx qval) {
  const int M = p.M;
  const int N = p.N;
  const std::uint32_t dim = p.dim();
  Mat out = Mat::Zero(dim, dim);
  std::vector<int> down;
  std::vector<int> pick(N);
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    down.clear();
    for (int site = 1; site <= M; ++site)
      if (mask & (1u << (site - 1))) down.push_back(site);
    const int nd = static_cast<int>(down.size());
    if (nd < N) continue;
    // lexicographic combinations of N indices into `down`
    for (int i = 0; i < N; ++i) pick[i] = i;
    while (true) {
      std::uint32_t flipped = mask;
      long expo = 0;
      for (int i = 0; i < N; ++i) flipped &= ~(1u << (down[pick[i]] - 1));
      for (int i = 0; i + 1 < N; ++i) {
        const int weight = N - 1 - i;  // q^{(N-i) sigma^z} with i one-based
        for (int s = down[pick[i]] + 1; s < down[pick[i + 1]]; ++s) {
          const int sz = (mask & (1u << (s - 1))) ? -1 : 1;
          expo += static_cast<long>(weight) * sz;
        }
      }
      out(flipped, mask) += detail::unit_pow(qval, expo);
      int j = N - 1;
      while (j >= 0 && pick[j] == nd - N + j) --j;
      if (j < 0) break;
      ++pick[j];
      for (int i = j + 1; i < N; ++i) pick[i] = pick[i - 1] + 1;
    }
  }
  return out;
}

// Conjugate by the spin reversal permutation.
inline Mat reversal_conjugate(const Mat& a, const ModelParams& p) {
  const std::uint32_t dim = p.dim();
  Mat out(dim, dim);
  for (std::uint32_t col = 0; col < dim; ++col) {
    const std::uint32_t rc = reverse_mask(col, p.M);
    for (std::uint32_t row = 0; row < dim; ++row)
      out(reverse_mask(row, p.M), rc) = a(row, col);
  }
  return out;
}

// The four surviving divided powers.  e1 raises 2S^z by 2N, f1 lowers it.
struct DividedPowers {
  Mat e1, f1, e0, f0;
};

inline DividedPowers build_divided_powers(const ModelParams& p) {
  if (p.N % 2 == 0)
    throw loopalg_error(
        "build_divided_powers: only odd N is supported, the even order "
        "divided powers need the twisted reversal");
  if (p.M < p.N)
    throw loopalg_error(
        "build_divided_powers: chain shorter than N, every divided power "
        "vanishes identically");
  DividedPowers dp;
  dp.e1 = divided_power_raise(p, p.q);
  dp.f0 = divided_power_raise(p, std::conj(p.q));
  dp.e0 = reversal_conjugate(dp.e1, p);
  dp.f1 = reversal_conjugate(dp.f0, p);
  return dp;
}

// Mode generators of the loop algebra: x_n^{+-} with [x_m^+, x_n^-] = h_{m+n},
// [h_m, x_n^{+-}] = +-2 x_{m+n}^{+-}.  Only x_0^+, x_0^-, x_1^-, x_{-1}^+ come
// directly from divided powers; higher minus modes follow from the h_1
// recursion and are cached on demand.
struct LoopGenerators {
  Mat x0p, x0m, x1m, xm1p;
  Mat h0, h1;
  std::vector<Mat> minus_modes;  // minus_modes[n] = x_n^-
};

inline LoopGenerators mode_generators(const ModelParams& p) {
  const DividedPowers dp = build_divided_powers(p);
  LoopGenerators g;
  g.x0p = dp.e1;
  g.x0m = dp.f1;
  g.x1m = dp.e0;
  g.xm1p = dp.f0;
  const std::uint32_t dim = p.dim();
  g.h0 = Mat::Zero(dim, dim);
  for (std::uint32_t m = 0; m < dim; ++m)
    g.h0(m, m) = static_cast<double>(two_sz_of(m, p.M)) / p.N;
  g.h1 = g.x0p * g.x1m - g.x1m * g.x0p;
  g.minus_modes = {g.x0m, g.x1m};
  return g;
}

// x_{n+1}^- = -[h_1, x_n^-] / 2
inline const Mat& x_minus(LoopGenerators& g, int n) {
  if (n < 0) throw loopalg_error("x_minus: negative mode index");
  while (static_cast<int>(g.minus_modes.size()) <= n) {
    const Mat& last = g.minus_modes.back();
    g.minus_modes.push_back(-0.5 * (g.h1 * last - last * g.h1));
  }
  return g.minus_modes[n];
}

// Indicator of the commensurate sectors 2S^z = 0 mod N where the loop
// algebra closes.
inline Vec commensurate_mask(const ModelParams& p) {
  Vec mask = Vec::Zero(p.dim());
  for (std::uint32_t m = 0; m < p.dim(); ++m)
    if (((two_sz_of(m, p.M) % p.N) + p.N) % p.N == 0) mask(m) = 1.0;
  return mask;
}

// Highest weight data of a candidate vector: lambda[n] is the eigenvalue of
// x_0^+ x_n^- (and of h_n on the span), lambda[0] the h_0 eigenvalue.
struct HighestWeight {
  bool pass = false;
  double residual = 0;             // worst eigen-residual over all checks
  std::vector<cplx> lambda;        // lambda[0..n_max]
};

// A highest weight vector is annihilated by x_0^+ and x_{-1}^+; that kills
// every positive mode.  The lambda_n come out as Rayleigh quotients and each
// must be an honest eigenvalue of x_0^+ x_n^- on the vector.
inline HighestWeight highest_weight_check(const Vec& omega, LoopGenerators& g,
                                          int n_max, double tol = 1e-7) {
  HighestWeight hw;
  const double nrm = omega.norm();
  if (nrm == 0) throw loopalg_error("highest_weight_check: zero vector");
  const double denom = omega.squaredNorm();
  auto rayleigh = [&](const Vec& w, cplx& val) {
    val = omega.dot(w) / denom;  // Eigen's dot conjugates the left factor
    return (w - val * omega).norm() / nrm;
  };
  hw.residual = (g.x0p * omega).norm() / nrm;
  hw.residual = std::max(hw.residual, (g.xm1p * omega).norm() / nrm);
  cplx l0;
  hw.residual = std::max(hw.residual, rayleigh(g.h0 * omega, l0));
  hw.lambda.push_back(l0);
  for (int n = 1; n <= n_max; ++n) {
    cplx ln;
    const Vec w = g.x0p * (x_minus(g, n) * omega);
    hw.residual = std::max(hw.residual, rayleigh(w, ln));
    hw.lambda.push_back(ln);
  }
  hw.pass = hw.residual <= tol;
  return hw;
}

// Evaluation parameters of the highest weight module: P(u) has degree
// lambda_0, its roots 1/a_j with multiplicities 2 s_j reproduce the higher
// lambda_n as power sums  lambda_n = sum_j 2 s_j a_j^n.
struct DrinfeldData {
  Vec omega;                 // the highest weight vector the data came from
  std::vector<cplx> lambda;  // the input eigenvalue sequence
  CPoly poly;                // P(u), constant term one
  std::vector<cplx> a;       // distinct evaluation parameters
  std::vector<int> two_s;    // multiplicities: spin s_j representations
  double consistency = 0;    // worst power-sum deviation beyond degree
  int dim() const {
    int d = 1;
    for (int m : two_s) d *= m + 1;
    return d;
  }
};

inline DrinfeldData drinfeld_polynomial(const std::vector<cplx>& lambda,
                                        double tol = 1e-8) {
  if (lambda.empty()) throw loopalg_error("drinfeld_polynomial: no data");
  const double l0 = lambda[0].real();
  const int deg = static_cast<int>(std::lround(l0));
  if (deg < 0 || std::abs(lambda[0] - cplx(deg, 0.0)) > 1e-8)
    throw loopalg_error(
        "drinfeld_polynomial: lambda_0 = " + std::to_string(l0) +
        " is not a nonnegative integer, the vector is not a highest weight "
        "of an evaluation module");
  if (static_cast<int>(lambda.size()) < deg + 1)
    throw loopalg_error("drinfeld_polynomial: need lambda_1..lambda_" +
                        std::to_string(deg) + " to rebuild the polynomial");
  // Newton's identities: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} lambda_i
  std::vector<cplx> e(deg + 1);
  e[0] = 1.0;
  for (int k = 1; k <= deg; ++k) {
    cplx s = 0.0;
    double sign = 1.0;
    for (int i = 1; i <= k; ++i, sign = -sign) s += sign * e[k - i] * lambda[i];
    e[k] = s / static_cast<double>(k);
  }
  std::vector<cplx> coeff(deg + 1);
  for (int k = 0; k <= deg; ++k) coeff[k] = (k % 2 ? -e[k] : e[k]);
  DrinfeldData dd;
  dd.lambda = lambda;
  dd.poly = CPoly(coeff);
  const RootSet rs = poly_roots(dd.poly);
  for (const auto& [root, mult] : rs.roots) {
    if (std::abs(root) < 1e-12)
      throw loopalg_error("drinfeld_polynomial: vanishing root, P(0) != 1");
    dd.a.push_back(1.0 / root);
    dd.two_s.push_back(mult);
  }
  // lambda_n beyond the degree are determined; record the worst deviation.
  for (int n = 1; n < static_cast<int>(lambda.size()); ++n) {
    cplx ps = 0.0;
    for (std::size_t j = 0; j < dd.a.size(); ++j)
      ps += static_cast<double>(dd.two_s[j]) * std::pow(dd.a[j], n);
    const double dev = std::abs(ps - lambda[n]) /
                       std::max(1.0, std::abs(lambda[n]));
    if (n <= deg) {
      if (dev > 1e-6)
        throw loopalg_error(
            "drinfeld_polynomial: power sum " + std::to_string(n) +
            " fails to reproduce its own input, root extraction lost " +
            std::to_string(dev));
    } else {
      dd.consistency = std::max(dd.consistency, dev);
    }
  }
  (void)tol;
  return dd;
}

// Full pipeline from a candidate highest weight vector.
inline DrinfeldData drinfeld_from_vector(const Vec& omega, LoopGenerators& g,
                                         double tol = 1e-7) {
  // First pass with one mode beyond lambda_0 as a consistency probe.
  HighestWeight probe = highest_weight_check(omega, g, 1, tol);
  const int deg =
      static_cast<int>(std::lround(probe.lambda[0].real()));
  HighestWeight hw = highest_weight_check(omega, g, std::max(deg + 1, 1), tol);
  if (!hw.pass)
    throw loopalg_error(
        "drinfeld_from_vector: not a highest weight vector, residual " +
        std::to_string(hw.residual));
  DrinfeldData dd = drinfeld_polynomial(hw.lambda);
  dd.omega = omega;
  return dd;
}

}  // namespace qsix
