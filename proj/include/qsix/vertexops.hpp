#pragma once
// Vertex-model operators at q^N = 1: Boltzmann weights, the N'-dimensional
// nilpotent auxiliary representation, its L-operator, and the transfer
// matrix T(z) / auxiliary matrix Q_mu(z) realized as auxiliary-space traces
// of ordered products of local operators along the chain.

#include <array>
#include <vector>

#include "qsix/lattice.hpp"
#include "qsix/numerics.hpp"

namespace qsix {

struct vertex_error : std::runtime_error {
  explicit vertex_error(const std::string& what) : std::runtime_error(what) {}
};

// -------------------------------------------------------------------- weights

struct Weights {
  cplx a, b, c, cp;
};

// Normalization rho = 1:  a = 1, b = (1-z) q / (1-z q^2), c = (1-q^2)/(1-z q^2),
// c' = c z.  Singular on the line z q^2 = 1.
inline Weights boltzmann_weights(cplx z, const ModelParams& p) {
  cplx q2 = p.q * p.q;
  cplx den = 1.0 - z * q2;
  if (std::abs(den) < 1e-12)
    throw vertex_error("boltzmann_weights: z q^2 = 1 is singular");
  Weights w;
  w.a = 1.0;
  w.b = (1.0 - z) * p.q / den;
  w.c = (1.0 - q2) / den;
  w.cp = w.c * z;
  return w;
}

// Weights multiplied by (1 - z q^2): entire in z, used for the polynomial
// transfer matrix Ttilde(z) = (1 - z q^2)^M T(z).
inline Weights scaled_weights(cplx z, const ModelParams& p) {
  cplx q2 = p.q * p.q;
  Weights w;
  w.a = 1.0 - z * q2;
  w.b = (1.0 - z) * p.q;
  w.c = 1.0 - q2;
  w.cp = w.c * z;
  return w;
}

// ------------------------------------------------- nilpotent representation

// N'-dimensional representation with parameter mu:
//   t v_n   = tau_n v_n,            tau_n = mu_root * q^{-n-1/2},
//   f v_n   = v_{n+1},              f v_{N'-1} = 0,
//   e v_n   = eps_n v_{n-1},        eps_n = (mu + 1/mu - mu q^{2n} - q^{-2n}/mu)
//                                           / (q - 1/q)^2 .
// mu_root is the chosen square root of 1/mu; relations involving only t^2
// do not depend on it, but the L-operator does, and the functional
// equations require coherent choices across shifted parameters (see
// functional.hpp).  The default is the principal branch.
struct NilpotentRep {
  ModelParams p;
  cplx mu{};
  cplx mu_root{};  // value of mu^{-1/2}
  Mat t, tinv, e, f;

  int dim() const { return p.Nprime; }
};

inline cplx principal_inv_sqrt(cplx mu) {
  if (mu == cplx(0)) throw vertex_error("mu = 0 is not a representation parameter");
  return std::exp(-0.5 * std::log(mu));
}

inline NilpotentRep build_rep(const ModelParams& p, cplx mu, cplx mu_root) {
  if (std::abs(mu_root * mu_root * mu - 1.0) > 1e-9)
    throw vertex_error("build_rep: mu_root is not a square root of 1/mu");
  const int d = p.Nprime;
  NilpotentRep r;
  r.p = p;
  r.mu = mu;
  r.mu_root = mu_root;
  r.t = Mat::Zero(d, d);
  r.tinv = Mat::Zero(d, d);
  r.e = Mat::Zero(d, d);
  r.f = Mat::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    cplx tau = mu_root * p.q_half_pow(-(2 * n + 1));
    r.t(n, n) = tau;
    r.tinv(n, n) = 1.0 / tau;
  }
  for (int n = 0; n + 1 < d; ++n) r.f(n + 1, n) = 1.0;
  cplx qmq = p.q - 1.0 / p.q;
  for (int n = 1; n < d; ++n) {
    cplx eps = (mu + 1.0 / mu - mu * p.q_pow(2 * n) - p.q_pow(-2 * n) / mu) /
               (qmq * qmq);
    r.e(n - 1, n) = eps;
  }
  return r;
}

inline NilpotentRep build_rep(const ModelParams& p, cplx mu) {
  return build_rep(p, mu, principal_inv_sqrt(mu));
}

// Residuals of the defining relations, the center, and the Casimir.  All
// relative Frobenius norms; used by tests and the acceptance suite.
struct RepResiduals {
  double tet = 0, tft = 0, ef = 0;          // t e t^-1 = q e, t f t^-1 = f/q, [e,f]
  double e_nilp = 0, f_nilp = 0, centre_t = 0;
  double casimir = 0;
};

inline RepResiduals rep_residuals(const NilpotentRep& r) {
  const ModelParams& p = r.p;
  const int d = r.dim();
  RepResiduals out;
  auto rel = [](const Mat& diff, const Mat& a, const Mat& b) {
    return diff.norm() / std::max({a.norm(), b.norm(), kTinyDenom});
  };
  Mat lhs = r.t * r.e * r.tinv, rhs = p.q * r.e;
  out.tet = rel(lhs - rhs, lhs, rhs);
  lhs = r.t * r.f * r.tinv;
  rhs = r.f / p.q;
  out.tft = rel(lhs - rhs, lhs, rhs);
  cplx qmq = p.q - 1.0 / p.q;
  lhs = r.e * r.f - r.f * r.e;
  rhs = (r.t * r.t - r.tinv * r.tinv) / qmq;
  out.ef = rel(lhs - rhs, lhs, rhs);

  Mat en = Mat::Identity(d, d), fn = en;
  for (int k = 0; k < d; ++k) { en = en * r.e; fn = fn * r.f; }
  out.e_nilp = en.norm() / std::max(std::pow(r.e.norm(), d), kTinyDenom);
  out.f_nilp = fn.norm() / std::max(std::pow(r.f.norm(), d), kTinyDenom);

  // t^{2N'} is central with entries (1/mu)^{N'} q^{-(2n+1) N'}; the phase
  // q^{-(2n+1)N'} is +1 for odd N and -1 for even N, uniformly in n.
  Mat t2n = Mat::Identity(d, d);
  for (int k = 0; k < 2 * d; ++k) t2n = t2n * r.t;
  double sign = (p.N % 2 == 0) ? -1.0 : 1.0;
  cplx want = sign * std::pow(1.0 / r.mu, d);
  out.centre_t = (t2n - want * Mat::Identity(d, d)).norm() /
                 std::max(std::abs(want) * std::sqrt(double(d)), kTinyDenom);

  lhs = p.q * r.t * r.t + (r.tinv * r.tinv) / p.q + (qmq * qmq) * r.f * r.e;
  rhs = (r.mu + 1.0 / r.mu) * Mat::Identity(d, d);
  out.casimir = rel(lhs - rhs, lhs, rhs);
  return out;
}

// ------------------------------------------------------------------ L-operator

// Quantum-space blocks of L(w) over the auxiliary representation:
//   <up|L|up> = A = w q t - 1/t        <up|L|down> = B = w q (q - 1/q) t f
//   <down|L|up> = C = (q - 1/q) e / t  <down|L|down> = D = w q / t - t
struct LOperator {
  Mat A, B, C, D;
};

inline LOperator build_L(const NilpotentRep& r, cplx w) {
  cplx qmq = r.p.q - 1.0 / r.p.q;
  LOperator L;
  L.A = w * r.p.q * r.t - r.tinv;
  L.B = w * r.p.q * qmq * r.t * r.f;
  L.C = qmq * r.e * r.tinv;
  L.D = w * r.p.q * r.tinv - r.t;
  return L;
}

// --------------------------------------------------- auxiliary-space traces

// A local operator on (auxiliary) x (one site): adim x adim grid of 2x2
// quantum blocks, entry [i][j] = <i_aux| . |j_aux> as a 2x2 site matrix
// in the (up, down) basis.
struct LocalGrid {
  int adim = 0;
  std::vector<Eigen::Matrix2cd> blocks;  // row-major, blocks[i * adim + j]

  Eigen::Matrix2cd& at(int i, int j) { return blocks[i * adim + j]; }
  const Eigen::Matrix2cd& at(int i, int j) const { return blocks[i * adim + j]; }
};

namespace detail {

inline Mat kron_site(const Eigen::Matrix2cd& s, const Mat& rest) {
  const auto n = rest.rows();
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = s(0, 0) * rest;
  out.topRightCorner(n, n) = s(0, 1) * rest;
  out.bottomLeftCorner(n, n) = s(1, 0) * rest;
  out.bottomRightCorner(n, n) = s(1, 1) * rest;
  return out;
}

}  // namespace detail

// tr_aux( Loc_M ... Loc_1 ) on the 2^M-dimensional chain space.  Site m is
// bit m-1; the later factors act on higher bits, matching the ordered
// product with site M leftmost.
inline Mat aux_trace_chain(const LocalGrid& loc, int M) {
  const int a = loc.adim;
  // cur[i * a + j] = partial product block over the processed sites.
  std::vector<Mat> cur(a * a);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      cur[i * a + j] = (i == j) ? Mat(Mat::Identity(1, 1)) : Mat(Mat::Zero(1, 1));
  for (int site = 0; site < M; ++site) {
    std::vector<Mat> next(a * a);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) {
        Mat acc = Mat::Zero(cur[j].rows() * 2, cur[j].cols() * 2);
        for (int l = 0; l < a; ++l)
          acc += detail::kron_site(loc.at(i, l), cur[l * a + j]);
        next[i * a + j] = std::move(acc);
      }
    cur = std::move(next);
  }
  Mat out = cur[0];
  for (int i = 1; i < a; ++i) out += cur[i * a + i];
  return out;
}

// ------------------------------------------------------------ transfer matrix

inline LocalGrid r_grid(const Weights& w) {
  LocalGrid g;
  g.adim = 2;
  g.blocks.assign(4, Eigen::Matrix2cd::Zero());
  g.at(0, 0) << w.a, 0, 0, w.b;
  g.at(0, 1) << 0, 0, w.c, 0;
  g.at(1, 0) << 0, w.cp, 0, 0;
  g.at(1, 1) << w.b, 0, 0, w.a;
  return g;
}

// T(z): trace over the two-dimensional auxiliary space of the R-matrix
// product.  Singular where the weights are.
inline Mat transfer_block(cplx z, const ModelParams& p) {
  return aux_trace_chain(r_grid(boltzmann_weights(z, p)), p.M);
}

// Ttilde(z) = (1 - z q^2)^M T(z): polynomial in z of degree <= M.
inline Mat transfer_block_scaled(cplx z, const ModelParams& p) {
  return aux_trace_chain(r_grid(scaled_weights(z, p)), p.M);
}

// ------------------------------------------------------------------- Q matrix

inline LocalGrid l_grid(const LOperator& L) {
  const int a = static_cast<int>(L.A.rows());
  LocalGrid g;
  g.adim = a;
  g.blocks.assign(std::size_t(a) * a, Eigen::Matrix2cd::Zero());
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      Eigen::Matrix2cd s;
      s << L.A(i, j), L.B(i, j), L.C(i, j), L.D(i, j);
      g.at(i, j) = s;
    }
  return g;
}

// Q_mu(z): trace over the N'-dimensional auxiliary representation of the
// L-operator product, every site at argument w = z / mu.  Entire in z.
inline Mat q_block(const NilpotentRep& rep, cplx z) {
  return aux_trace_chain(l_grid(build_L(rep, z / rep.mu)), rep.p.M);
}

// For odd N the matrix Q_mu(z) vanishes identically when M is odd and
// M < N: every closed auxiliary path carries an odd total power of q per
// site factor, so the trace multiplies each monomial by a geometric sum
// sum_n q^{j n} with j odd and |j| < N, which is zero.  Even N never
// degenerates this way (q^{N'} = -1 breaks the cancellation).
inline bool q_vanishes_identically(const ModelParams& p) {
  return p.N % 2 == 1 && p.M % 2 == 1 && p.M < p.N;
}

// ----------------------------------------------------- polynomial coefficients

// Matrix coefficients Q^(0) .. Q^(M) of z -> Q_mu(z), recovered exactly by
// a scaled inverse DFT over the node ring r * exp(2 pi i k/(M+1)) (the
// entries are polynomials of degree <= M).  A held-out evaluation point
// guards against any degree or node mistake.
inline std::vector<Mat> q_poly_coeffs(const NilpotentRep& rep, double r = 0.83) {
  const int M = rep.p.M;
  const int n = M + 1;
  std::vector<Mat> samples(n);
  for (int k = 0; k < n; ++k)
    samples[k] = q_block(rep, r * std::polar(1.0, 2.0 * M_PI * k / n));
  std::vector<Mat> coeff(n);
  for (int m = 0; m < n; ++m) {
    Mat acc = Mat::Zero(samples[0].rows(), samples[0].cols());
    for (int k = 0; k < n; ++k)
      acc += samples[k] * std::polar(1.0, -2.0 * M_PI * k * m / n);
    coeff[m] = acc / (double(n) * std::pow(r, m));
  }
  const cplx z0 = 0.59 * std::polar(1.0, 0.9);
  Mat direct = q_block(rep, z0);
  Mat recon = Mat::Zero(direct.rows(), direct.cols());
  cplx pw = 1.0;
  for (int m = 0; m < n; ++m) { recon += pw * coeff[m]; pw *= z0; }
  // An identically zero Q (odd M < N at odd N) reconstructs trivially; the
  // relative check is only meaningful against a nonzero scale.
  double scale = std::max(direct.norm(), recon.norm());
  if (scale > 1e-10 && (recon - direct).norm() > 1e-9 * scale)
    throw vertex_error("q_poly_coeffs: held-out reconstruction failed");
  return coeff;
}

// ---------------------------------------------------------------- Hamiltonian

// XXZ chain with Delta = (q + 1/q)/2 and periodic boundary:
//   H = sum_m  sigma^x_m sigma^x_{m+1} + sigma^y_m sigma^y_{m+1}
//            + Delta (sigma^z_m sigma^z_{m+1} - 1).
inline Mat hamiltonian(const ModelParams& p) {
  const double delta = std::cos(2.0 * M_PI / p.N);
  const std::size_t dim = p.dim();
  Mat H = Mat::Zero(dim, dim);
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    for (int m = 0; m < p.M; ++m) {
      int mn = (m + 1) % p.M;
      bool bm = (mask >> m) & 1u, bn = (mask >> mn) & 1u;
      if (bm == bn) continue;             // zz term vanishes against the shift
      H(mask, mask) += -2.0 * delta;
      std::uint32_t flipped = mask ^ ((1u << m) | (1u << mn));
      H(flipped, mask) += 2.0;            // sigma+sigma- + sigma-sigma+
    }
  }
  return H;
}

}  // namespace qsix
