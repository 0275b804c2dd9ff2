#pragma once
// Spin-chain bookkeeping for the six-vertex model at a root of unity:
// deformation parameters, S^z sectors, translation orbits with momentum
// projections, and the global symmetry operations.
//
// Basis convention: a state of the M-site chain is a bitmask; bit (m-1)
// holds site m and a set bit means spin down.  The translation operator
// moves the content of site m to site m+1 (cyclically), which matches the
// z -> 1 limit of the transfer matrix.

#include <cstdint>
#include <optional>
#include <vector>

#include "qsix/numerics.hpp"

namespace qsix {

struct lattice_error : std::runtime_error {
  explicit lattice_error(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------------------------------------------ parameters

// q = exp(2 pi i / N).  Nprime is the order of q^2 (N for odd N, N/2 for
// even N) and is the dimension of the auxiliary representation.  q_half
// fixes the square-root branch exp(i pi / N) used by normalization
// factors; conjugated() switches coherently to the q -> 1/q model.
struct ModelParams {
  int N = 3;
  int M = 2;
  int Nprime = 3;
  cplx q{};
  cplx q_half{};

  static ModelParams roots_of_unity(int N, int M) {
    if (N < 3) throw lattice_error("ModelParams: need N >= 3");
    if (M < 1 || M > 30) throw lattice_error("ModelParams: need 1 <= M <= 30");
    ModelParams p;
    p.N = N;
    p.M = M;
    p.Nprime = (N % 2 == 0) ? N / 2 : N;
    p.q = std::polar(1.0, 2.0 * M_PI / N);
    p.q_half = std::polar(1.0, M_PI / N);
    return p;
  }

  ModelParams conjugated() const {
    ModelParams p = *this;
    p.q = std::conj(q);
    p.q_half = std::conj(q_half);
    return p;
  }

  // q -> -q (a root of unity of different order; only the weights care).
  ModelParams negated() const {
    ModelParams p = *this;
    p.q = -q;
    p.q_half = cplx(0, 1) * q_half;
    return p;
  }

  // q^k evaluated on the unit circle (no power-accumulation drift).
  cplx q_pow(long k) const {
    double ang = std::arg(q);
    return std::polar(1.0, ang * double(k));
  }

  // q^{k/2} via the chosen half-unit root, same drift-free evaluation.
  cplx q_half_pow(long k) const {
    double ang = std::arg(q_half);
    return std::polar(1.0, ang * double(k));
  }

  std::size_t dim() const { return std::size_t(1) << M; }
  std::uint32_t full_mask() const { return (std::uint32_t(1) << M) - 1; }
};

// ------------------------------------------------------------- mask operations

inline int popcount32(std::uint32_t x) { return __builtin_popcount(x); }

// Translation: site m -> m+1, cyclic.
inline std::uint32_t shift_mask(std::uint32_t mask, int M) {
  std::uint32_t full = (std::uint32_t(1) << M) - 1;
  return ((mask << 1) | (mask >> (M - 1))) & full;
}

// Spin reversal R = prod_m sigma^x_m.
inline std::uint32_t reverse_mask(std::uint32_t mask, int M) {
  return ~mask & ((std::uint32_t(1) << M) - 1);
}

// Twice the total S^z of a basis state (up = +1/2, down = -1/2).
inline int two_sz_of(std::uint32_t mask, int M) { return M - 2 * popcount32(mask); }

// ---------------------------------------------------------------------- sector

struct Sector {
  int two_sz = 0;
  int M = 0;
  std::vector<std::uint32_t> basis;  // ascending masks

  int dim() const { return static_cast<int>(basis.size()); }
  int index_of(std::uint32_t mask) const {
    auto it = std::lower_bound(basis.begin(), basis.end(), mask);
    if (it == basis.end() || *it != mask)
      throw lattice_error("Sector: mask not in sector");
    return static_cast<int>(it - basis.begin());
  }
};

inline Sector enumerate_sector(const ModelParams& p, int two_sz) {
  if ((p.M - two_sz) % 2 != 0)
    throw lattice_error("enumerate_sector: 2*S^z has wrong parity for this M");
  int ndown = (p.M - two_sz) / 2;
  if (ndown < 0 || ndown > p.M)
    throw lattice_error("enumerate_sector: S^z out of range");
  Sector s;
  s.two_sz = two_sz;
  s.M = p.M;
  for (std::uint32_t mask = 0; mask <= p.full_mask(); ++mask)
    if (popcount32(mask) == ndown) s.basis.push_back(mask);
  return s;
}

inline std::vector<int> all_two_sz(const ModelParams& p) {
  std::vector<int> out;
  for (int ndown = 0; ndown <= p.M; ++ndown) out.push_back(p.M - 2 * ndown);
  return out;
}

// ------------------------------------------------------------- symmetry action

// Full-space operators as explicit basis permutations / diagonals; the
// state space is tiny (M <= 10), so dense vectors are fine.

inline Vec apply_shift(const Vec& v, const ModelParams& p) {
  Vec out = Vec::Zero(v.size());
  for (std::uint32_t m = 0; m < v.size(); ++m)
    out(shift_mask(m, p.M)) += v(m);
  return out;
}

inline Vec apply_reversal(const Vec& v, const ModelParams& p) {
  Vec out = Vec::Zero(v.size());
  for (std::uint32_t m = 0; m < v.size(); ++m)
    out(reverse_mask(m, p.M)) += v(m);
  return out;
}

// S = prod_m sigma^z_m, diagonal signs (-1)^(number of down spins).
inline Vec apply_parity(const Vec& v, const ModelParams&) {
  Vec out = v;
  for (std::uint32_t m = 0; m < v.size(); ++m)
    if (popcount32(m) % 2) out(m) = -out(m);
  return out;
}

// Staggered string prod_{m odd} sigma^z_m (even M only, where the two
// sublattices are well defined).  Sites are 1-based, so odd sites sit on
// even bit positions.
inline Vec apply_staggered(const Vec& v, const ModelParams& p) {
  if (p.M % 2 != 0)
    throw lattice_error("apply_staggered: sublattice string needs even M");
  Vec out = v;
  for (std::uint32_t m = 0; m < v.size(); ++m)
    if (popcount32(m & 0x55555555u) % 2) out(m) = -out(m);
  return out;
}

inline Mat shift_matrix(const ModelParams& p) {
  Mat S = Mat::Zero(p.dim(), p.dim());
  for (std::uint32_t m = 0; m < p.dim(); ++m) S(shift_mask(m, p.M), m) = 1.0;
  return S;
}

// ------------------------------------------------------------ momentum blocks

struct Orbit {
  std::uint32_t rep = 0;  // smallest mask in the translation orbit
  int length = 1;
};

inline std::vector<Orbit> translation_orbits(const Sector& s) {
  std::vector<Orbit> orbits;
  std::vector<bool> seen(s.basis.size(), false);
  for (std::size_t i = 0; i < s.basis.size(); ++i) {
    if (seen[i]) continue;
    std::uint32_t rep = s.basis[i];
    std::uint32_t cur = rep;
    int len = 0;
    do {
      seen[s.index_of(cur)] = true;
      cur = shift_mask(cur, s.M);
      ++len;
    } while (cur != rep);
    orbits.push_back({rep, len});
  }
  return orbits;
}

// Momentum projection of a single basis state onto k = 2 pi j / M.  The
// result lives in the full 2^M space and is zero when the orbit length is
// incompatible with k; otherwise it is normalized and satisfies
// shift(v) = exp(-i k) v.
inline Vec momentum_project(std::uint32_t mask, int j, const ModelParams& p) {
  Vec v = Vec::Zero(p.dim());
  double k = 2.0 * M_PI * j / p.M;
  std::uint32_t cur = mask;
  for (int n = 0; n < p.M; ++n) {
    v(cur) += std::polar(1.0, k * n);
    cur = shift_mask(cur, p.M);
  }
  double nrm = v.norm();
  if (nrm < 1e-9) return Vec::Zero(p.dim());
  return v / nrm;
}

// All momentum-k basis vectors of one S^z sector, as columns over the
// sector basis (not the full space).  Columns are orthonormal.
struct MomentumBlock {
  int two_sz = 0;
  int j = 0;                       // k = 2 pi j / M
  int M = 0;
  std::vector<std::uint32_t> reps;  // contributing orbit representatives
  Mat P;                            // sector_dim x block_dim
};

inline MomentumBlock momentum_block(const Sector& s, int j, const ModelParams& p) {
  MomentumBlock b;
  b.two_sz = s.two_sz;
  b.j = j;
  b.M = s.M;
  auto orbits = translation_orbits(s);
  std::vector<Vec> cols;
  for (const Orbit& orb : orbits) {
    // Compatible iff k * length is a multiple of 2 pi.
    if ((std::int64_t(j) * orb.length) % p.M != 0) continue;
    Vec full = momentum_project(orb.rep, j, p);
    Vec col = Vec::Zero(s.dim());
    for (int i = 0; i < s.dim(); ++i) col(i) = full(s.basis[i]);
    cols.push_back(col);
    b.reps.push_back(orb.rep);
  }
  b.P = Mat::Zero(s.dim(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) b.P.col(c) = cols[c];
  return b;
}

// ------------------------------------------------------------------ restriction

inline Mat restrict_to_sector(const Mat& full, const Sector& s) {
  Mat out(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j)
      out(i, j) = full(s.basis[i], s.basis[j]);
  return out;
}

inline Vec sector_to_full(const Vec& v, const Sector& s, const ModelParams& p) {
  Vec out = Vec::Zero(p.dim());
  for (int i = 0; i < s.dim(); ++i) out(s.basis[i]) = v(i);
  return out;
}

inline Mat block_compress(const Mat& sector_op, const MomentumBlock& b) {
  return b.P.adjoint() * sector_op * b.P;
}

}  // namespace qsix
