#pragma once
// Root-level identities for the transfer spectrum. The two-sided functional
// relation restricted to a single joint eigenvector turns the classified
// zero content of the auxiliary eigenvalue into difference equations on the
// mu-independent roots, a reconstruction formula for the transfer
// eigenvalue, counting rules on the zero multiplicities, and a pairing of
// the spectra at q and 1/q.

#include <algorithm>
#include <optional>
#include <vector>

#include "qsix/spectra.hpp"

namespace qsix {

struct bethe_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The probe-independent zero data of one auxiliary eigenvalue: the
// multiplicity of the zero at the origin and the stationary roots.
struct BetheData {
  int n_inf = 0;
  std::vector<cplx> roots;

  int n_bethe() const { return static_cast<int>(roots.size()); }
};

inline BetheData bethe_from_classification(const Classification& cls) {
  BetheData bd;
  bd.n_inf = cls.n_inf;
  bd.roots = cls.bethe_roots;
  return bd;
}

// Additive parametrization z_j = exp(u_j) / q, principal branch. Reporting
// convenience only; nothing downstream consumes it.
inline std::vector<cplx> additive_roots(const BetheData& bd, const ModelParams& p) {
  std::vector<cplx> u;
  u.reserve(bd.roots.size());
  for (cplx z : bd.roots) u.push_back(std::log(z * p.q));
  return u;
}

// One difference equation per root, in the cleared polynomial form
//   (1 - z_j q^2)^M prod_{k != j} (z_j - q^2 z_k)
//     = q^{2 n_inf + 2 n_B} (1 - z_j)^M prod_{k != j} (z_j q^2 - z_k).
// Both sides can vanish identically when the root set contains an exact
// q^2-shifted pair (the same state can carry z = 1 and z = q^{-2}
// simultaneously); the residual is therefore measured against the product
// of factor magnitudes rather than against the sides themselves, which
// keeps such 0 = 0 equations finite and passing.
struct RootEquation {
  double residual = 0;   // |lhs - rhs| relative to the factor magnitudes
  cplx phase{1.0, 0.0};  // measured lhs / rhs; 1 when the equation is 0 = 0
  bool degenerate = false;
};

inline std::vector<RootEquation> bethe_equations(const BetheData& bd,
                                                 const ModelParams& p) {
  const cplx q2 = p.q_pow(2);
  const cplx coef = p.q_pow(2 * bd.n_inf + 2 * bd.n_bethe());
  const int nb = bd.n_bethe();
  std::vector<RootEquation> out(nb);
  for (int j = 0; j < nb; ++j) {
    const cplx zj = bd.roots[j];
    cplx lhs = std::pow(1.0 - zj * q2, p.M);
    cplx rhs = coef * std::pow(1.0 - zj, p.M);
    double scale = std::pow(std::max(std::abs(1.0 - zj * q2), std::abs(1.0 - zj)),
                            double(p.M));
    for (int k = 0; k < nb; ++k) {
      if (k == j) continue;
      const cplx fl = zj - q2 * bd.roots[k];
      const cplx fr = zj * q2 - bd.roots[k];
      lhs *= fl;
      rhs *= fr;
      scale *= std::max(std::abs(fl), std::abs(fr));
    }
    RootEquation& eq = out[j];
    eq.residual = std::abs(lhs - rhs) / std::max(scale, 1e-300);
    eq.degenerate = std::min(std::abs(lhs), std::abs(rhs)) <= 1e-6 * scale;
    eq.phase = eq.degenerate ? cplx(1.0) : lhs / rhs;
  }
  return out;
}

inline std::vector<double> bethe_residual(const BetheData& bd, const ModelParams& p) {
  std::vector<double> res;
  for (const RootEquation& eq : bethe_equations(bd, p)) res.push_back(eq.residual);
  return res;
}

// Global sign of the two-sided eigenvalue reconstruction below. Following
// the normalization constant around the mu -> mu q orbit multiplies it by
// (-1)^M after N steps (the half-unit root of the representation changes
// branch), so sign^N = (-1)^M; the sign itself is real, which for odd N
// forces sign = (-1)^M for every eigenvector. For even N the sign depends
// on the momentum sector and must be fitted, see fit_rebuild_sign.
inline cplx rebuild_sign(const ModelParams& p) {
  if (p.N % 2 == 0)
    throw bethe_error(
        "rebuild_sign: the sign is momentum dependent for even N; fit it "
        "against a measured eigenvalue instead");
  return (p.M % 2) ? cplx(-1.0) : cplx(1.0);
}

// Reconstruction of the scaled transfer eigenvalue from the root data:
//   tpoly = sign * q^{M/2} [ q^{n_inf} (1-z)^M P_B(z q^2)
//                          + q^{-n_inf} (1-z q^2)^M P_B(z q^{-2}) ] / P_B(z)
// with P_B monic. The division must be exact: a nonzero remainder means a
// pole at a Bethe root fails to cancel, i.e. the root data does not satisfy
// the difference equations.
struct TransferRebuild {
  CPoly tpoly;
  double remainder = 0;  // relative size of the uncancelled part
};

inline TransferRebuild transfer_from_bethe(const BetheData& bd, cplx sign,
                                           const ModelParams& p,
                                           double pole_tol = 1e-6) {
  const cplx q2 = p.q_pow(2);
  const CPoly pb = CPoly::from_roots(bd.roots, 1.0);
  const double par = (p.M % 2) ? -1.0 : 1.0;
  const CPoly one_minus_z = CPoly::from_roots(std::vector<cplx>(p.M, 1.0), par);
  const CPoly one_minus_zq2 =
      CPoly::from_roots(std::vector<cplx>(p.M, 1.0 / q2), par * std::pow(q2, p.M));
  CPoly num = p.q_half_pow(p.M) *
              (p.q_pow(bd.n_inf) * (one_minus_z * pb.scale_arg(q2)) +
               p.q_pow(-bd.n_inf) * (one_minus_zq2 * pb.scale_arg(1.0 / q2)));
  auto [quot, rem] = poly_divmod(num, pb);
  TransferRebuild out;
  out.remainder = rem.max_abs_coeff() / std::max(num.max_abs_coeff(), 1e-300);
  if (out.remainder > pole_tol)
    throw bethe_error("transfer_from_bethe: a pole at a Bethe root fails to "
                      "cancel, relative remainder " + std::to_string(out.remainder));
  out.tpoly = sign * quot;
  return out;
}

// Least-squares fit of the reconstruction phase against a measured transfer
// eigenvalue polynomial, normalized to unit modulus. The remainder check is
// phase independent, so the fit reuses the unsigned reconstruction.
inline cplx fit_rebuild_sign(const BetheData& bd, const CPoly& tpoly,
                             const ModelParams& p, double pole_tol = 1e-6) {
  CPoly quot = transfer_from_bethe(bd, 1.0, p, pole_tol).tpoly;
  cplx num = 0, den = 0;
  const std::size_t n = std::max(quot.c.size(), tpoly.c.size());
  for (std::size_t i = 0; i < n; ++i) {
    const cplx qi = i < quot.c.size() ? quot.c[i] : cplx(0);
    const cplx ti = i < tpoly.c.size() ? tpoly.c[i] : cplx(0);
    num += std::conj(qi) * ti;
    den += std::conj(qi) * qi;
  }
  if (std::abs(num) == 0 || std::abs(den) == 0)
    throw bethe_error("fit_rebuild_sign: degenerate fit");
  cplx s = num / den;
  return s / std::abs(s);
}

// Translation eigenvalue from the root data, via the z -> 1 limit of the
// reconstructed eigenvalue. Evaluating the quotient polynomial stays finite
// even when 1 is itself a Bethe root, where the textbook product
// (-q)^{-n_B} prod 1/z_j over the roots becomes indeterminate.
inline cplx momentum_from_bethe(const BetheData& bd, cplx sign,
                                const ModelParams& p) {
  const TransferRebuild rb = transfer_from_bethe(bd, sign, p);
  return rb.tpoly.eval(1.0) / std::pow(1.0 - p.q_pow(2), p.M);
}

inline cplx momentum_from_tpoly(const EigPoly& e, const ModelParams& p) {
  return e.tpoly.eval(1.0) / std::pow(1.0 - p.q_pow(2), p.M);
}

// Counting rules on the zero multiplicities. The congruence
//   M - 2 n_inf - 2 n_B = 0 (mod N)
// holds whenever n_B > 0; the exact identity
//   M = 2 n_inf + 2 n_B + N' n_S
// additionally holds for eigenvalues with a real joint eigenvector.
struct SumRule {
  int deficit = 0;
  bool mod_rule = false;
  bool exact = false;
};

inline SumRule sum_rule(const BetheData& bd, int n_strings, const ModelParams& p) {
  SumRule s;
  const int k = p.M - 2 * bd.n_inf - 2 * bd.n_bethe();
  s.deficit = k - p.Nprime * n_strings;
  s.mod_rule = ((k % p.N) + p.N) % p.N == 0;
  s.exact = (s.deficit == 0);
  return s;
}

namespace detail {

// Greedy one-to-one matching of eigenvectors by an overlap score that must
// reach 1 up to tol; conj_left decides whether the left vector enters the
// scalar product conjugated (proportionality test) or plainly (the vector
// pairs with the conjugate of the other).
inline std::vector<int> match_eigvecs(const Spectrum& a, const Spectrum& b,
                                      bool conj_left, double tol,
                                      const char* who) {
  const int n = static_cast<int>(a.eigs.size());
  if (static_cast<int>(b.eigs.size()) != n)
    throw bethe_error(std::string(who) + ": spectra have different sizes");
  std::vector<int> map(n, -1);
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    const Vec& vi = a.eigs[i].v;
    int best = -1;
    double best_score = -1;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (a.eigs[i].two_sz != b.eigs[j].two_sz) continue;
      const Vec& vj = b.eigs[j].v;
      const cplx ov = conj_left ? vi.dot(vj) : vi.conjugate().dot(vj);
      const double score = std::abs(ov) / (vi.norm() * vj.norm());
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0 || best_score < 1.0 - tol)
      throw bethe_error(std::string(who) + ": eigenvector " + std::to_string(i) +
                        " (2Sz=" + std::to_string(a.eigs[i].two_sz) +
                        ", j=" + std::to_string(a.eigs[i].j) +
                        ") has no partner, best overlap " +
                        std::to_string(best_score));
    map[i] = best;
    used[best] = true;
  }
  return map;
}

}  // namespace detail

// Pairing of the spectra at q and at 1/q. The two auxiliary families are
// scalar multiples of each other at reciprocal spectral parameters and
// inverted mu, so they share eigenvectors; each line of the spectrum at q
// is matched to the same line in the spectrum at 1/q. Under this pairing
// the zero data inverts:
//   n_inf -> M - n_inf - 2 n_B - N' n_S,  z^B -> 1/z^B,  z^S -> 1/z^S.
// Throws when some eigenvector finds no partner.
inline std::vector<int> pair_spectra(const Spectrum& at_q, const Spectrum& at_q_inv,
                                     double tol = 1e-8) {
  return detail::match_eigvecs(at_q, at_q_inv, true, tol, "pair_spectra");
}

// Within-spectrum involution composing the q <-> 1/q pairing with complex
// conjugation of the family: each eigenvector is matched to the one
// spanning the conjugate line. Real eigenvectors are fixed points; for the
// others the zero data inverts as above with an extra conjugation,
//   z^B -> 1/conj(z^B),  z^S -> 1/conj(z^S),  momentum -> conj(momentum).
inline std::vector<int> conjugation_pairing(const Spectrum& spec, double tol = 1e-8) {
  std::vector<int> map = detail::match_eigvecs(spec, spec, false, tol,
                                               "conjugation_pairing");
  for (int i = 0; i < static_cast<int>(map.size()); ++i)
    if (map[map[i]] != i)
      throw bethe_error("conjugation_pairing: pairing is not an involution");
  return map;
}

}  // namespace qsix
