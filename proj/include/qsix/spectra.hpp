#pragma once
// Spectral pipeline for the commuting transfer/auxiliary family.  The
// auxiliary matrix at a generic probe point is diagonalized inside each
// (S^z, momentum) block; because the family commutes and the auxiliary
// matrix is generically non-degenerate, its eigenvectors are common to
// every member.  Each eigenvector then yields eigenvalue polynomials by
// sampling on a node ring and interpolating, and the zero pattern of the
// auxiliary eigenvalue is classified by comparing two (or three) probes
// mu: zeroes are either mu-independent, or follow the exact mu^2 drift.
// Constant zeroes split into full q^2-orbits (complete strings) and
// partial orbits (Bethe roots); drifting zeroes are either the mu^2
// partners paired one-to-one with Bethe roots or full orbits of drifting
// string centres.  Eigenvectors sharing the transfer eigenvalue
// polynomial are grouped into degenerate multiplets.
//
// On chains with both M and N odd (M >= N) the auxiliary matrix retains
// a null space concentrated on the low |2Sz| sectors, the remnant of its
// identical vanishing on shorter odd chains.  Vectors in that kernel are
// perfectly good common eigenvectors whose auxiliary eigenvalue is the
// zero polynomial; they are detected against the sector scale, flagged
// null_q, and exempted from zero classification, which presumes a
// nonvanishing normalization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qsix/functional.hpp"

namespace qsix {

struct spectra_error : std::runtime_error {
  explicit spectra_error(const std::string& what) : std::runtime_error(what) {}
};

// --------------------------------------------------------------------- options

struct SpectrumOptions {
  cplx mu1{1.3, 0.0};                    // first classification probe
  cplx mu2 = 0.8 * std::polar(1.0, 0.4); // second classification probe
  cplx mu3 = 1.17 * std::polar(1.0, -0.25); // tie-breaker probe
  double node_radius = 0.83;   // ring for polynomial interpolation
  std::uint64_t seed = 42;     // drives the eigenbasis probe draws
  int max_redraws = 5;
  double tol_node = 1e-8;      // per-node eigen-residual, relative
  double tol_tcheck = 1e-7;    // transfer cross-check residual
  double tol_match = 1e-4;     // probe-to-probe root trajectory matching;
                               // a root of multiplicity m splits into a
                               // cluster of width eps^(1/m), so this must
                               // stay above ~1e-5 to survive triple roots
  double tol_coeff = 1e-9;     // coefficient threshold for degree / z^n
  double tol_multiplet = 1e-7; // transfer-polynomial grouping
  double tol_gap = 1e-8;       // eigenvalue separation within a block
  double tol_null = 1e-10;     // |lambda| below this x sector scale => null
};

// ------------------------------------------------------------- eigenbasis core

// Eigenvectors of one (S^z, momentum) block, given in sector coordinates.
// q0 is the block-compressed auxiliary matrix at the probe point and
// tsec1 the sector-restricted scaled transfer matrix at an independent
// point, used only as a cross-check.
namespace detail {

inline std::vector<Vec> block_common_eigenbasis(const MomentumBlock& blk,
                                                const Mat& q_sector,
                                                const Mat& tsec1,
                                                const SpectrumOptions& opt,
                                                std::string* fail_reason) {
  const Mat q0 = block_compress(q_sector, blk);
  const int d = static_cast<int>(q0.rows());
  std::vector<Vec> out;
  if (d == 0) return out;

  EigResult eg = eig_dense(q0);
  const double qnorm = std::max(q_sector.norm(), kTinyDenom);
  std::vector<bool> is_null(d);
  for (int i = 0; i < d; ++i)
    is_null[i] = std::abs(eg.values(i)) < opt.tol_null * qnorm;

  double scale = kTinyDenom;
  for (int i = 0; i < d; ++i) scale = std::max(scale, std::abs(eg.values(i)));
  for (int i = 0; i < d; ++i)
    for (int k = i + 1; k < d; ++k)
      if (!(is_null[i] && is_null[k]) &&
          std::abs(eg.values(i) - eg.values(k)) < opt.tol_gap * scale) {
        if (fail_reason)
          *fail_reason = "degenerate auxiliary eigenvalues in block (2Sz=" +
                         std::to_string(blk.two_sz) + ", j=" + std::to_string(blk.j) +
                         "): lambda_" + std::to_string(i) + " ~ lambda_" +
                         std::to_string(k);
        return {};
      }

  // The probe cannot separate vectors inside the common null space of the
  // auxiliary family; diagonalize the transfer matrix there instead.
  Mat cols = eg.vectors;
  {
    std::vector<int> nulls;
    for (int i = 0; i < d; ++i)
      if (is_null[i]) nulls.push_back(i);
    if (nulls.size() >= 2) {
      const int k = static_cast<int>(nulls.size());
      Mat span(d, k);
      for (int a = 0; a < k; ++a) span.col(a) = eg.vectors.col(nulls[a]);
      Eigen::HouseholderQR<Mat> qr(span);
      Mat basis = qr.householderQ() * Mat::Identity(d, k);
      Mat tk = basis.adjoint() * block_compress(tsec1, blk) * basis;
      EigResult tg = eig_dense(tk);
      double tscale = kTinyDenom;
      for (int i = 0; i < k; ++i) tscale = std::max(tscale, std::abs(tg.values(i)));
      for (int i = 0; i < k; ++i)
        for (int r = i + 1; r < k; ++r)
          if (std::abs(tg.values(i) - tg.values(r)) < opt.tol_gap * tscale) {
            if (fail_reason)
              *fail_reason = "degenerate transfer eigenvalues inside the null "
                             "space of block (2Sz=" + std::to_string(blk.two_sz) +
                             ", j=" + std::to_string(blk.j) + ")";
            return {};
          }
      for (int a = 0; a < k; ++a) cols.col(nulls[a]) = basis * tg.vectors.col(a);
    }
  }

  const double tnorm = tsec1.norm();
  for (int i = 0; i < d; ++i) {
    Vec v = blk.P * cols.col(i);  // sector coordinates
    Vec w = tsec1 * v;
    int imax = 0;
    double best = 0;
    for (int r = 0; r < v.size(); ++r)
      if (std::abs(v(r)) > best) { best = std::abs(v(r)); imax = r; }
    cplx lam = w(imax) / v(imax);
    double resid = (w - lam * v).norm() / std::max(tnorm * v.norm(), kTinyDenom);
    if (resid > opt.tol_tcheck) {
      if (fail_reason)
        *fail_reason = "transfer cross-check failed in block (2Sz=" +
                       std::to_string(blk.two_sz) + ", j=" + std::to_string(blk.j) +
                       "): residual " + std::to_string(resid);
      return {};
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace detail

// Common eigenbasis of the commuting family inside one (S^z, momentum)
// block at a caller-chosen probe (mu0, z0).  Vectors come back in full
// 2^M coordinates.  Throws when the block stays degenerate or fails the
// transfer cross-check; the caller is expected to redraw the probe.
inline std::vector<Vec> common_eigenbasis(const Sector& sec, const MomentumBlock& blk,
                                          const ModelParams& p, cplx mu0, cplx z0,
                                          const SpectrumOptions& opt = {}) {
  NilpotentRep rep0 = build_rep(p, mu0);
  Mat qsec = restrict_to_sector(q_block(rep0, z0), sec);
  Mat tsec = restrict_to_sector(transfer_block_scaled(z0 * 0.7 + 0.11, p), sec);
  std::string why;
  auto vecs = detail::block_common_eigenbasis(blk, qsec, tsec, opt, &why);
  if (vecs.empty() && blk.P.cols() > 0) throw spectra_error("common_eigenbasis: " + why);
  std::vector<Vec> out;
  for (const Vec& v : vecs) out.push_back(sector_to_full(v, sec, p));
  return out;
}

// Null-space dimension of the auxiliary matrix inside one spin sector.
// Nonzero exactly on chains with M and N both odd, M >= N, where the
// kernel occupies the sectors |2Sz| <= N - 2; for N = 3 it is
// one-dimensional in each of 2Sz = +/-1 and sits in the zero-momentum
// block.
inline int q_kernel_dimension(const NilpotentRep& rep, const Sector& sec,
                              cplx z, double tol = 1e-10) {
  Mat qs = restrict_to_sector(q_block(rep, z), sec);
  Eigen::JacobiSVD<Mat> svd(qs);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double top = std::max(sv(0), kTinyDenom);
  int n = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < tol * top) ++n;
  return n;
}

// -------------------------------------------------------- polynomial extraction

// Eigenvalue polynomial of one family member on a fixed eigenvector.  The
// member is supplied as its matrices at the n ring nodes
// z_k = radius * exp(2 pi i k / n); the polynomial degree is at most n-1.
// Every node must satisfy the eigen-residual bound or the vector is
// rejected as a non-eigenvector.
inline CPoly eigen_poly_from_nodes(const Vec& v, const std::vector<Mat>& at_nodes,
                                   double radius, double rel_tol = 1e-8) {
  const int n = static_cast<int>(at_nodes.size());
  if (n == 0) throw spectra_error("eigen_poly_from_nodes: no nodes");
  int imax = 0;
  double best = 0;
  for (int r = 0; r < v.size(); ++r)
    if (std::abs(v(r)) > best) { best = std::abs(v(r)); imax = r; }
  if (best == 0) throw spectra_error("eigen_poly_from_nodes: zero vector");

  std::vector<std::pair<cplx, cplx>> samples(n);
  for (int k = 0; k < n; ++k) {
    cplx z = radius * std::polar(1.0, 2.0 * M_PI * k / n);
    Vec w = at_nodes[k] * v;
    cplx lam = w(imax) / v(imax);
    double resid = (w - lam * v).norm();
    double bound = rel_tol * std::max(at_nodes[k].norm() * v.norm(), kTinyDenom);
    if (resid > bound)
      throw spectra_error("eigen_poly_from_nodes: node " + std::to_string(k) +
                          " residual " + std::to_string(resid) +
                          " exceeds bound; not a common eigenvector");
    samples[k] = {z, lam};
  }
  return interpolate(samples, n - 1);
}

// One-shot helpers working in the full 2^M space.
inline CPoly q_eigen_poly(const Vec& v_full, const NilpotentRep& rep,
                          double radius = 0.83, double rel_tol = 1e-8) {
  const int n = rep.p.M + 1;
  std::vector<Mat> nodes(n);
  for (int k = 0; k < n; ++k)
    nodes[k] = q_block(rep, radius * std::polar(1.0, 2.0 * M_PI * k / n));
  return eigen_poly_from_nodes(v_full, nodes, radius, rel_tol);
}

inline CPoly transfer_eigen_poly(const Vec& v_full, const ModelParams& p,
                                 double radius = 0.83, double rel_tol = 1e-8) {
  const int n = p.M + 1;
  std::vector<Mat> nodes(n);
  for (int k = 0; k < n; ++k)
    nodes[k] = transfer_block_scaled(radius * std::polar(1.0, 2.0 * M_PI * k / n), p);
  return eigen_poly_from_nodes(v_full, nodes, radius, rel_tol);
}

// ----------------------------------------------------------- zero classification

struct StringCentre {
  cplx centre{};      // representative centre in the mu -> 1 limit
  cplx power{};       // centre^{N'}, independent of the orbit representative
  bool mu_scaling = false;  // centre drifts as mu^2 when true
};

struct Classification {
  int n_inf = 0;      // multiplicity of the zero at the origin
  int degree = 0;     // degree of the trimmed eigenvalue polynomial
  std::vector<cplx> bethe_roots;        // multiplicity-expanded, mu-independent
  std::vector<cplx> mu_partner_roots;   // measured partners z^B mu^2 at probe 1
  std::vector<StringCentre> strings;    // one entry per complete string
  std::vector<cplx> norms;              // leading coefficient at each probe
  bool deficit_consistent = true;       // M - degree == n_inf (exact pairing law)

  int n_bethe() const { return static_cast<int>(bethe_roots.size()); }
  int n_strings() const { return static_cast<int>(strings.size()); }
  int n_strings_scaling() const {
    int n = 0;
    for (const auto& s : strings) n += s.mu_scaling ? 1 : 0;
    return n;
  }
};

struct ProbeData {
  cplx mu{};
  CPoly lambda;
};

namespace detail {

inline double reldist(cplx a, cplx b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

// Strip the z^n factor and negligible leading coefficients; returns the
// number of zero roots and overwrites poly with the stripped middle part.
inline int strip_origin_zeroes(CPoly& poly, double tol_coeff) {
  poly.trim(tol_coeff);
  if (poly.is_zero())
    throw spectra_error("classify_zeroes: identically vanishing eigenvalue");
  const double mc = poly.max_abs_coeff();
  int nz = 0;
  while (nz < poly.degree() && std::abs(poly.c[nz]) <= tol_coeff * mc) ++nz;
  poly.c.erase(poly.c.begin(), poly.c.begin() + nz);
  return nz;
}

// Decompose a multiset of points into q^2-orbit classes.  Each class
// reports its distinct positions (clustered at tol) with multiplicities.
struct OrbitClass {
  std::vector<cplx> positions;
  std::vector<int> counts;
  bool complete = false;  // positions fill all N' slots
};

inline std::vector<OrbitClass> decompose_orbits(const std::vector<cplx>& pts,
                                                const ModelParams& p, double tol) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      for (int l = 0; l < p.Nprime; ++l)
        if (reldist(pts[i] * p.q_pow(2 * l), pts[k]) <= tol) {
          parent[find(i)] = find(k);
          break;
        }
  std::vector<OrbitClass> classes;
  std::vector<int> label(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (label[r] < 0) { label[r] = static_cast<int>(classes.size()); classes.push_back({}); }
    OrbitClass& oc = classes[label[r]];
    bool placed = false;
    for (std::size_t s = 0; s < oc.positions.size(); ++s)
      if (reldist(oc.positions[s], pts[i]) <= tol) { oc.counts[s] += 1; placed = true; break; }
    if (!placed) { oc.positions.push_back(pts[i]); oc.counts.push_back(1); }
  }
  for (auto& oc : classes) {
    oc.complete = (static_cast<int>(oc.positions.size()) == p.Nprime);
    // canonical ordering: ascending principal argument
    std::vector<std::size_t> idx(oc.positions.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      double da = std::arg(oc.positions[a]), db = std::arg(oc.positions[b]);
      if (std::abs(da - db) > 1e-12) return da < db;
      return std::abs(oc.positions[a]) < std::abs(oc.positions[b]);
    });
    std::vector<cplx> ps;
    std::vector<int> cs;
    for (std::size_t a : idx) { ps.push_back(oc.positions[a]); cs.push_back(oc.counts[a]); }
    oc.positions = std::move(ps);
    oc.counts = std::move(cs);
  }
  return classes;
}

inline std::string trajectory_dump(const std::vector<std::vector<cplx>>& roots) {
  std::ostringstream os;
  for (std::size_t a = 0; a < roots.size(); ++a) {
    os << " probe" << a << ":";
    for (cplx r : roots[a]) os << " " << r.real() << (r.imag() < 0 ? "-" : "+")
                               << std::abs(r.imag()) << "i";
  }
  return os.str();
}

}  // namespace detail

// Classify the nonzero roots of the auxiliary eigenvalue polynomial by
// their trajectory across mu probes.  Two probes suffice generically; a
// third resolves roots whose trajectory is consistent with both laws.
inline Classification classify_zeroes(const std::vector<ProbeData>& probes,
                                      const ModelParams& p,
                                      const SpectrumOptions& opt = {}) {
  if (probes.size() < 2) throw spectra_error("classify_zeroes: need at least two probes");
  Classification out;

  std::vector<std::vector<cplx>> roots(probes.size());
  for (std::size_t a = 0; a < probes.size(); ++a) {
    CPoly lam = probes[a].lambda;
    int nz = detail::strip_origin_zeroes(lam, opt.tol_coeff);
    int deg = lam.degree() + nz;
    if (a == 0) {
      out.n_inf = nz;
      out.degree = deg;
      out.norms.push_back(lam.lead());
    } else {
      if (nz != out.n_inf)
        throw spectra_error("classify_zeroes: probes disagree on the zero at the origin");
      if (deg != out.degree)
        throw spectra_error("classify_zeroes: probes disagree on the degree");
      out.norms.push_back(lam.lead());
    }
    if (lam.degree() > 0)
      roots[a] = poly_roots(lam).expanded();
    // Spurious near-origin roots missed by the coefficient strip.
    double scale = 0;
    for (cplx r : roots[a]) scale = std::max(scale, std::abs(r));
    for (cplx r : roots[a])
      if (std::abs(r) < 1e-7 * scale)
        throw spectra_error("classify_zeroes: root collapse at the origin, "
                            "origin multiplicity is ambiguous");
  }
  out.deficit_consistent = (p.M - out.degree == out.n_inf);

  const int nr = static_cast<int>(roots[0].size());
  if (nr == 0) return out;

  // Kind per root of probe 0: 0 = constant, 1 = mu^2 drift.  A kind is
  // feasible when every other probe holds a root at the predicted spot.
  std::vector<int> kind(nr, -1);
  bool want_probe3 = false;
  for (int i = 0; i < nr; ++i) {
    double score[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k) {
      for (std::size_t a = 1; a < probes.size(); ++a) {
        cplx target = roots[0][i];
        if (k == 1) target *= (probes[a].mu * probes[a].mu) /
                              (probes[0].mu * probes[0].mu);
        double bestd = 1e300;
        for (cplx r : roots[a]) bestd = std::min(bestd, detail::reldist(target, r));
        score[k] = std::max(score[k], bestd);
      }
    }
    const bool okc = score[0] <= opt.tol_match, oks = score[1] <= opt.tol_match;
    if (okc && oks) {
      if (probes.size() < 3) { want_probe3 = true; continue; }
      throw spectra_error("classify_zeroes: root trajectory matches both laws "
                          "even with three probes" + detail::trajectory_dump(roots));
    }
    if (!okc && !oks)
      throw spectra_error("classify_zeroes: unclassifiable root trajectory, "
                          "neither constant nor mu^2" + detail::trajectory_dump(roots));
    kind[i] = oks ? 1 : 0;
  }
  if (want_probe3)
    throw spectra_error("classify_zeroes: ambiguous trajectory, needs a third probe");

  // Consumption check: the assignment must exhaust every other probe's
  // root multiset exactly (catches multiplicity mismatches).
  for (std::size_t a = 1; a < probes.size(); ++a) {
    std::vector<bool> used(roots[a].size(), false);
    for (int i = 0; i < nr; ++i) {
      cplx target = roots[0][i];
      if (kind[i] == 1) target *= (probes[a].mu * probes[a].mu) /
                                  (probes[0].mu * probes[0].mu);
      int jbest = -1;
      double dbest = 1e300;
      for (std::size_t j = 0; j < roots[a].size(); ++j) {
        if (used[j]) continue;
        double d = detail::reldist(target, roots[a][j]);
        if (d < dbest) { dbest = d; jbest = static_cast<int>(j); }
      }
      if (jbest < 0 || dbest > opt.tol_match)
        throw spectra_error("classify_zeroes: multiplicity mismatch between probes" +
                            detail::trajectory_dump(roots));
      used[jbest] = true;
    }
  }

  std::vector<cplx> constv, scaled_limit;
  const cplx mu0sq = probes[0].mu * probes[0].mu;
  for (int i = 0; i < nr; ++i) {
    if (kind[i] == 0) constv.push_back(roots[0][i]);
    else scaled_limit.push_back(roots[0][i] / mu0sq);
  }

  // Constant zeroes: full q^2-orbits are complete strings, the excess and
  // all partial orbits are Bethe roots.
  for (const auto& oc : detail::decompose_orbits(constv, p, opt.tol_match)) {
    int nstr = 0;
    if (oc.complete) {
      nstr = *std::min_element(oc.counts.begin(), oc.counts.end());
      for (int s = 0; s < nstr; ++s) {
        StringCentre sc;
        sc.centre = oc.positions.front();
        sc.power = std::pow(sc.centre, p.Nprime);
        sc.mu_scaling = false;
        out.strings.push_back(sc);
      }
    }
    for (std::size_t s = 0; s < oc.positions.size(); ++s)
      for (int rep = nstr; rep < oc.counts[s]; ++rep)
        out.bethe_roots.push_back(oc.positions[s]);
  }

  // Drifting zeroes: one mu^2 partner per Bethe root, the rest must form
  // complete orbits of drifting string centres.
  std::vector<cplx> rem = scaled_limit;
  for (cplx b : out.bethe_roots) {
    int jbest = -1;
    double dbest = 1e300;
    for (std::size_t j = 0; j < rem.size(); ++j) {
      double d = detail::reldist(b, rem[j]);
      if (d < dbest) { dbest = d; jbest = static_cast<int>(j); }
    }
    if (jbest < 0 || dbest > opt.tol_match)
      throw spectra_error("classify_zeroes: Bethe root without a mu^2 partner" +
                          detail::trajectory_dump(roots));
    out.mu_partner_roots.push_back(rem[jbest] * mu0sq);
    rem.erase(rem.begin() + jbest);
  }
  for (const auto& oc : detail::decompose_orbits(rem, p, opt.tol_match)) {
    bool uniform = true;
    for (int c : oc.counts) uniform = uniform && (c == oc.counts.front());
    if (!oc.complete || !uniform)
      throw spectra_error("classify_zeroes: drifting zeroes do not close into "
                          "complete orbits" + detail::trajectory_dump(roots));
    for (int s = 0; s < oc.counts.front(); ++s) {
      StringCentre sc;
      sc.centre = oc.positions.front();
      sc.power = std::pow(sc.centre, p.Nprime);
      sc.mu_scaling = true;
      out.strings.push_back(sc);
    }
  }

  if (out.degree != out.n_inf + 2 * out.n_bethe() + out.n_strings() * p.Nprime)
    throw spectra_error("classify_zeroes: classified counts do not add up: deg=" +
                        std::to_string(out.degree) + " n_inf=" + std::to_string(out.n_inf) +
                        " n_B=" + std::to_string(out.n_bethe()) +
                        " n_S=" + std::to_string(out.n_strings()));
  return out;
}

// ----------------------------------------------------------------- full spectrum

struct EigPoly {
  int two_sz = 0;
  int j = 0;            // momentum label, k = 2 pi j / M
  Vec v;                // eigenvector in the full 2^M basis
  std::vector<ProbeData> probes;  // auxiliary eigenvalue polynomial per probe
  CPoly tpoly;          // scaled transfer eigenvalue polynomial
  cplx momentum_phase{};  // eigenvalue of the translation operator
  bool null_q = false;  // auxiliary eigenvalue vanishes for all (z, mu)
  Classification cls;   // empty when null_q
};

struct Multiplet {
  CPoly tpoly;
  std::vector<int> members;  // indices into Spectrum::eigs
  int n_S = -1;              // common string count over classified members
  int n_null = 0;            // members with vanishing auxiliary eigenvalue
  bool dim_matches = false;  // |members| == 2^{n_S} where n_S is defined
};

struct Spectrum {
  ModelParams p;
  std::vector<EigPoly> eigs;
  std::vector<Multiplet> multiplets;
};

inline std::vector<Multiplet> group_multiplets(const std::vector<EigPoly>& eigs,
                                               double tol = 1e-7) {
  std::vector<Multiplet> out;
  for (int i = 0; i < static_cast<int>(eigs.size()); ++i) {
    bool placed = false;
    for (auto& m : out)
      if (poly_rel_dist(m.tpoly, eigs[i].tpoly) <= tol) {
        m.members.push_back(i);
        placed = true;
        break;
      }
    if (!placed) {
      Multiplet m;
      m.tpoly = eigs[i].tpoly;
      m.members.push_back(i);
      out.push_back(std::move(m));
    }
  }
  for (auto& m : out) {
    m.n_S = -1;
    m.n_null = 0;
    bool consistent = true;
    for (int i : m.members) {
      if (eigs[i].null_q) { ++m.n_null; continue; }
      const int ns = eigs[i].cls.n_strings();
      if (m.n_S < 0) m.n_S = ns;
      else if (ns != m.n_S) consistent = false;
    }
    if (!consistent) {
      m.n_S = -1;
      m.dim_matches = false;
    } else if (m.n_S >= 0) {
      m.dim_matches = static_cast<int>(m.members.size()) == (1 << m.n_S);
    } else {
      // Entirely null: the string count makes no claim about the dimension.
      m.dim_matches = m.n_null == static_cast<int>(m.members.size());
    }
  }
  return out;
}

// Complete pipeline: common eigenbases block by block, eigenvalue
// polynomials at the classification probes, zero classification, and
// multiplet grouping.  Deterministic for a fixed seed.
inline Spectrum full_spectrum(const ModelParams& p, const SpectrumOptions& opt = {}) {
  if (q_vanishes_identically(p))
    throw spectra_error("full_spectrum: the auxiliary matrix vanishes identically "
                        "for this (N, M); no auxiliary spectrum exists");
  Spectrum spec;
  spec.p = p;
  Rng rng(opt.seed);
  const int nodes = p.M + 1;

  NilpotentRep rep1 = build_rep(p, opt.mu1);
  NilpotentRep rep2 = build_rep(p, opt.mu2);

  for (int two_sz : all_two_sz(p)) {
    Sector sec = enumerate_sector(p, two_sz);

    // Node matrices restricted to this sector, shared by all its blocks.
    std::vector<Mat> q1n(nodes), q2n(nodes), tn(nodes);
    for (int k = 0; k < nodes; ++k) {
      cplx z = opt.node_radius * std::polar(1.0, 2.0 * M_PI * k / nodes);
      q1n[k] = restrict_to_sector(q_block(rep1, z), sec);
      q2n[k] = restrict_to_sector(q_block(rep2, z), sec);
      tn[k] = restrict_to_sector(transfer_block_scaled(z, p), sec);
    }
    double qscale = kTinyDenom;
    for (const Mat& a : q1n) qscale = std::max(qscale, a.norm());

    for (int j = 0; j < p.M; ++j) {
      MomentumBlock blk = momentum_block(sec, j, p);
      if (blk.P.cols() == 0) continue;

      std::vector<Vec> basis;
      std::string why = "no draw attempted";
      for (int attempt = 0; attempt < opt.max_redraws; ++attempt) {
        cplx mu0 = rng.annulus(1.05, 1.45);
        cplx z0 = rng.annulus(0.35, 0.95);
        cplx z1 = rng.annulus(0.40, 1.10);
        try {
          Mat qsec = restrict_to_sector(q_block(build_rep(p, mu0), z0), sec);
          Mat tsec = restrict_to_sector(transfer_block_scaled(z1, p), sec);
          basis = detail::block_common_eigenbasis(blk, qsec, tsec, opt, &why);
        } catch (const numeric_error& err) {
          why = err.what();
          basis.clear();
        }
        if (!basis.empty()) break;
      }
      if (basis.empty())
        throw spectra_error("full_spectrum: block (2Sz=" + std::to_string(two_sz) +
                            ", j=" + std::to_string(j) + ") failed after " +
                            std::to_string(opt.max_redraws) + " probe draws: " + why);

      for (Vec& v : basis) {
        EigPoly e;
        e.two_sz = two_sz;
        e.j = j;
        e.probes.push_back({opt.mu1,
            eigen_poly_from_nodes(v, q1n, opt.node_radius, opt.tol_node)});
        e.tpoly = eigen_poly_from_nodes(v, tn, opt.node_radius, opt.tol_node);
        e.momentum_phase = e.tpoly.eval(1.0) /
                           std::pow(1.0 - p.q_pow(2), p.M);
        if (e.probes.front().lambda.max_abs_coeff() < opt.tol_null * qscale) {
          e.null_q = true;
          e.v = sector_to_full(v, sec, p);
          spec.eigs.push_back(std::move(e));
          continue;
        }
        e.probes.push_back({opt.mu2,
            eigen_poly_from_nodes(v, q2n, opt.node_radius, opt.tol_node)});
        try {
          e.cls = classify_zeroes(e.probes, p, opt);
        } catch (const spectra_error&) {
          // third probe breaks trajectory ties
          NilpotentRep rep3 = build_rep(p, opt.mu3);
          std::vector<Mat> q3n(nodes);
          for (int k = 0; k < nodes; ++k) {
            cplx z = opt.node_radius * std::polar(1.0, 2.0 * M_PI * k / nodes);
            q3n[k] = restrict_to_sector(q_block(rep3, z), sec);
          }
          e.probes.push_back({opt.mu3,
              eigen_poly_from_nodes(v, q3n, opt.node_radius, opt.tol_node)});
          e.cls = classify_zeroes(e.probes, p, opt);
        }
        e.v = sector_to_full(v, sec, p);
        spec.eigs.push_back(std::move(e));
      }
    }
  }
  spec.multiplets = group_multiplets(spec.eigs, opt.tol_multiplet);
  return spec;
}

// --------------------------------------------------------- normalization checks

// Least-squares exponent of |norm| ~ C * mu^e from samples at real mu.
inline double fit_norm_exponent(const std::vector<std::pair<double, cplx>>& samples) {
  if (samples.size() < 2) throw spectra_error("fit_norm_exponent: need >= 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(samples.size());
  for (const auto& [mu, norm] : samples) {
    if (!(mu > 0)) throw spectra_error("fit_norm_exponent: probes must be real positive");
    double x = std::log(mu), y = std::log(std::abs(norm));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-14) throw spectra_error("fit_norm_exponent: degenerate probes");
  return (n * sxy - sx * sy) / denom;
}

// Ratio of normalization constants between mu*q and mu against the exact
// law q^{-M/2 - n_B - N' n_S'} (n_S' counts the drifting string centres).
struct NormRatio {
  cplx measured{};
  cplx predicted{};
  double rel_err = 0;
};

inline NormRatio norm_shift_ratio(const EigPoly& e, const ModelParams& p,
                                  const SpectrumOptions& opt = {}) {
  if (e.null_q)
    throw spectra_error("norm_shift_ratio: a vanishing eigenvalue carries no "
                        "normalization constant");
  NilpotentRep rep = build_rep(p, e.probes.front().mu);
  CPoly upshift = q_eigen_poly(e.v, rep_mu_times_q(rep), opt.node_radius, opt.tol_node);
  CPoly base = e.probes.front().lambda;
  upshift.trim(opt.tol_coeff);
  base.trim(opt.tol_coeff);
  NormRatio out;
  out.measured = upshift.lead() / base.lead();
  out.predicted = p.q_half_pow(-p.M) *
                  p.q_pow(-(e.cls.n_bethe() + p.Nprime * e.cls.n_strings_scaling()));
  out.rel_err = std::abs(out.measured - out.predicted) / std::abs(out.predicted);
  return out;
}

}  // namespace qsix
