#pragma once
// Functional equations tying T(z) to the auxiliary matrices Q_mu(z):
// the TQ relation, Q-Q commutation, spin reversal, mu- and q-inversion
// transposition laws, the degenerate product relation at N = 3, and the
// transfer-matrix parameter laws.  Everything is verified on the cleared
// (polynomial) side, using Ttilde(z) = (1 - z q^2)^M T(z), so no test point
// can land on the singular line of the rational weights.
//
// The equations relate representations at shifted parameters mu q, mu / q,
// mu nu q, 1/mu, each of which needs a square root of the new parameter.
// The shifts below thread one coherent branch through all of them:
//   root(mu q)    = root(mu) / q_half
//   root(mu / q)  = root(mu) * q_half
//   root(mu nu q) = root(mu) root(nu) / q_half
//   root(1 / mu)  = 1 / root(mu)
// and q -> 1/q conjugates q_half.  With these choices every relation holds
// with unit prefactor signs; calibrate_tq_signs() measures the signs from
// scratch on small chains (M = 2 is blind to them, M = 3 is not).

#include "qsix/vertexops.hpp"

namespace qsix {

// ------------------------------------------------ branch-coherent shifts

inline NilpotentRep rep_mu_times_q(const NilpotentRep& r) {
  return build_rep(r.p, r.mu * r.p.q, r.mu_root / r.p.q_half);
}

inline NilpotentRep rep_mu_over_q(const NilpotentRep& r) {
  return build_rep(r.p, r.mu / r.p.q, r.mu_root * r.p.q_half);
}

inline NilpotentRep rep_mu_product_q(const NilpotentRep& a, const NilpotentRep& b) {
  if (std::abs(a.p.q - b.p.q) > 1e-14)
    throw vertex_error("rep_mu_product_q: mismatched deformation parameters");
  return build_rep(a.p, a.mu * b.mu * a.p.q, a.mu_root * b.mu_root / a.p.q_half);
}

inline NilpotentRep rep_mu_inverse(const NilpotentRep& r) {
  return build_rep(r.p, 1.0 / r.mu, 1.0 / r.mu_root);
}

// Same mu, deformation parameter q -> 1/q (conjugate point of the unit circle).
inline NilpotentRep rep_q_conjugated(const NilpotentRep& r) {
  return build_rep(r.p.conjugated(), r.mu, r.mu_root);
}

// Entrywise complex conjugate partner: mu -> conj(mu), q -> 1/q.
inline NilpotentRep rep_conjugate(const NilpotentRep& r) {
  return build_rep(r.p.conjugated(), std::conj(r.mu), std::conj(r.mu_root));
}

// mu -> conj(mu) at the same q (used by the Hermiticity law).
inline NilpotentRep rep_mu_conjugate(const NilpotentRep& r) {
  return build_rep(r.p, std::conj(r.mu), std::conj(r.mu_root));
}

// The inversion-type laws (spin reversal, both transpositions, and their
// Hermiticity chain) rely on the auxiliary similarity matching tau_{N'-1-n}
// to 1/tau_n.  The match is exact for odd N but off by q^{N'} = -1 per site
// for even N, so those laws carry a factor (-1)^M there.
inline double inversion_sign(const ModelParams& p) {
  return (p.N % 2 == 0 && p.M % 2 == 1) ? -1.0 : 1.0;
}

// -------------------------------------------------------- TQ coefficients

// Rational form of the TQ relation:
//   T(z) Q_mu(z) = phi1(z)^M Q_{mu q}(z q^2) + phi2(z)^M Q_{mu/q}(z q^-2)
// with phi1 = b(z) / q^{1/2} and phi2 = q^{1/2}.
struct FunctionalCoeffs {
  cplx phi1, phi2;
};

inline FunctionalCoeffs tq_coefficients(cplx z, const ModelParams& p) {
  return {boltzmann_weights(z, p).b / p.q_half, p.q_half};
}

// ------------------------------------------------------------ TQ relation

// Cleared TQ residual:
//   Q_mu(z) Ttilde(z) = s1 q^{M/2} (1-z)^M     Q_{mu q}(z q^2)
//                     + s2 q^{M/2} (1-z q^2)^M Q_{mu/q}(z q^-2).
inline double verify_tq(const NilpotentRep& r, cplx z, double s1 = 1.0,
                        double s2 = 1.0) {
  const ModelParams& p = r.p;
  cplx q2 = p.q * p.q;
  Mat lhs = q_block(r, z) * transfer_block_scaled(z, p);
  cplx qM2 = std::pow(p.q_half, p.M);
  Mat rhs = s1 * qM2 * std::pow(1.0 - z, p.M) * q_block(rep_mu_times_q(r), z * q2) +
            s2 * qM2 * std::pow(1.0 - z * q2, p.M) * q_block(rep_mu_over_q(r), z / q2);
  return rel_residual(lhs - rhs, lhs, rhs);
}

// Measure the TQ prefactor signs from scratch on an even and an odd chain.
// The even length fixes the relation up to branch-insensitive signs; the
// odd length is sensitive to the square-root branch threading as well.  The
// odd probe must avoid the identically-zero regime (odd M < N at odd N), so
// it is M = 3 for N <= 4 and M = N for larger odd N.
struct TqSigns {
  double s1 = 0, s2 = 0;
  double residual = 0;  // worst residual of the winning pair
};

inline TqSigns calibrate_tq_signs(int N, cplx mu, cplx z) {
  const int modd = (N % 2 == 1 && N > 3) ? N : 3;
  TqSigns best;
  double best_res = 1e300;
  for (double s1 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0}) {
      double worst = 0;
      for (int M : {2, modd}) {
        auto p = ModelParams::roots_of_unity(N, M);
        worst = std::max(worst, verify_tq(build_rep(p, mu), z, s1, s2));
      }
      if (worst < best_res) {
        best_res = worst;
        best = {s1, s2, worst};
      }
    }
  if (best_res > 1e-6)
    throw vertex_error("calibrate_tq_signs: no sign pair satisfies the relation");
  return best;
}

// ----------------------------------------------------------- commutation

// [Q_mu(z), Q_nu(w)] = 0 for independent parameters and arguments.
inline double verify_qq_commutation(const NilpotentRep& rmu,
                                    const NilpotentRep& rnu, cplx z, cplx w) {
  Mat A = q_block(rmu, z), B = q_block(rnu, w);
  Mat AB = A * B, BA = B * A;
  return rel_residual(AB - BA, AB, BA);
}

// ---------------------------------------------------------- spin reversal

// R Q_mu(z) R = (+-) Q_{1/mu}(z / mu^2) with R the full spin flip and the
// sign of inversion_sign().
inline double verify_spin_reversal(const NilpotentRep& r, cplx z) {
  const ModelParams& p = r.p;
  Mat Q = q_block(r, z);
  Mat lhs(Q.rows(), Q.cols());
  const std::uint32_t full = p.full_mask();
  for (std::uint32_t x = 0; x <= full; ++x)
    for (std::uint32_t y = 0; y <= full; ++y)
      lhs(x, y) = Q(~x & full, ~y & full);
  Mat rhs = inversion_sign(p) * q_block(rep_mu_inverse(r), z / (r.mu * r.mu));
  return rel_residual(lhs - rhs, lhs, rhs);
}

// ------------------------------------------------- transposition relations

// Q_mu(z, q) = (+-) Q_mu(z q^2, 1/q)^t, sign of inversion_sign().
inline double verify_q_transposition(const NilpotentRep& r, cplx z) {
  Mat lhs = q_block(r, z);
  Mat rhs = inversion_sign(r.p) *
            q_block(rep_q_conjugated(r), z * r.p.q * r.p.q).transpose();
  return rel_residual(lhs - rhs, lhs, rhs);
}

// Q_mu(z, q) = (+-) (-z q / mu)^M Q_{1/mu}(1/(z q^2), q)^t.
inline double verify_mu_transposition(const NilpotentRep& r, cplx z) {
  const ModelParams& p = r.p;
  Mat lhs = q_block(r, z);
  cplx pref = inversion_sign(p) * std::pow(-z * p.q / r.mu, p.M);
  Mat rhs = pref * q_block(rep_mu_inverse(r), 1.0 / (z * p.q * p.q)).transpose();
  return rel_residual(lhs - rhs, lhs, rhs);
}

// conj(Q_mu(z, q)) = Q_{conj mu}(conj z, 1/q) entrywise: every entry is a
// real-coefficient polynomial in {z, mu, mu_root, q, q_half}, so conjugating
// all inputs conjugates the output.
inline double verify_conjugation(const NilpotentRep& r, cplx z) {
  Mat lhs = q_block(r, z).conjugate();
  Mat rhs = q_block(rep_conjugate(r), std::conj(z));
  return rel_residual(lhs - rhs, lhs, rhs);
}

// Chaining conjugation with the q-transposition law at (conj mu, 1/q) gives
// Q_mu(z, q)^dagger = (+-) Q_{conj mu}(conj(z) q^-2, q), no transpose left.
inline double verify_hermiticity(const NilpotentRep& r, cplx z) {
  Mat lhs = q_block(r, z).adjoint();
  cplx q2 = r.p.q * r.p.q;
  Mat rhs = inversion_sign(r.p) *
            q_block(rep_mu_conjugate(r), std::conj(z) / q2);
  return rel_residual(lhs - rhs, lhs, rhs);
}

// ----------------------------------------------- product relation at N = 3

// For N = 3 the product of two Q's at matched arguments degenerates into a
// single Q times a polynomial in the transfer matrix (cleared form):
//   Q_mu(z) Q_nu(z nu^2 q^2) =
//     Q_{mu nu q}(z nu^2 q^2) [ (-q)^M Ttilde(z q) + (z q^2 - 1)^M ].
inline double verify_tq2(const NilpotentRep& rmu, const NilpotentRep& rnu,
                         cplx z) {
  const ModelParams& p = rmu.p;
  if (p.N != 3) throw vertex_error("verify_tq2: the product relation needs N = 3");
  cplx q2 = p.q * p.q;
  cplx znu = z * rnu.mu * rnu.mu * q2;
  Mat lhs = q_block(rmu, z) * q_block(rnu, znu);
  Mat poly = std::pow(-p.q, p.M) * transfer_block_scaled(z * p.q, p) +
             std::pow(z * q2 - 1.0, p.M) * Mat::Identity(p.dim(), p.dim());
  Mat rhs = q_block(rep_mu_product_q(rmu, rnu), znu) * poly;
  return rel_residual(lhs - rhs, lhs, rhs);
}

// --------------------------------------------- transfer-matrix parameter laws

// Even chains.  Three exact parameter laws of T(z):
//   q -> 1/q matches z -> 1/z,
//   q -> -q is the sector parity times the staggered-string conjugation,
//   z -> z q^-2 matches transposition at 1/z up to b(1/z)^{-M}.
struct TransferLaws {
  double q_inversion = 0, negation = 0, transposition = 0;
};

inline TransferLaws verify_transfer_laws(cplx z, const ModelParams& p) {
  if (p.M % 2) throw vertex_error("verify_transfer_laws: even M only");
  TransferLaws out;
  Mat T = transfer_block(z, p);

  Mat lhs = transfer_block(z, p.conjugated());
  Mat rhs = transfer_block(1.0 / z, p);
  out.q_inversion = rel_residual(lhs - rhs, lhs, rhs);

  lhs = transfer_block(z, p.negated());
  Vec ones = Vec::Ones(p.dim());
  Mat U = Mat(apply_staggered(ones, p).asDiagonal());
  Mat S = Mat(apply_parity(ones, p).asDiagonal());
  rhs = S * U * T * U;
  out.negation = rel_residual(lhs - rhs, lhs, rhs);

  lhs = transfer_block(z / (p.q * p.q), p);
  cplx pref = std::pow(boltzmann_weights(1.0 / z, p).b, -p.M);
  rhs = pref * transfer_block(1.0 / z, p).transpose();
  out.transposition = rel_residual(lhs - rhs, lhs, rhs);
  return out;
}

}  // namespace qsix
