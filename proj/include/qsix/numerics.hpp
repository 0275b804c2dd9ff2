#pragma once
// Dense complex polynomial and matrix utilities: Horner evaluation,
// root finding (Aberth-Ehrlich with companion-matrix fallback), Lagrange
// data interpolation, eigen decomposition and polynomial division.
// Everything here works on machine doubles; tolerances are relative
// unless stated otherwise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qsix {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kTinyDenom = 1e-30;

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- polynomials

// Polynomial with ascending complex coefficients: c[0] + c[1] z + ...
// The zero polynomial is represented by an empty coefficient list.
struct CPoly {
  std::vector<cplx> c;

  CPoly() = default;
  explicit CPoly(std::vector<cplx> coeffs) : c(std::move(coeffs)) { trim(); }
  static CPoly constant(cplx a) { return CPoly(std::vector<cplx>{a}); }

  static CPoly from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
    CPoly p = constant(lead);
    for (cplx r : roots) {
      // multiply by (z - r)
      std::vector<cplx> next(p.c.size() + 1, 0.0);
      for (std::size_t k = 0; k < p.c.size(); ++k) {
        next[k] -= r * p.c[k];
        next[k + 1] += p.c[k];
      }
      p.c = std::move(next);
    }
    return p;
  }

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  cplx lead() const { return c.empty() ? cplx(0) : c.back(); }

  double max_abs_coeff() const {
    double m = 0;
    for (cplx a : c) m = std::max(m, std::abs(a));
    return m;
  }

  // Drop leading coefficients that are negligible against the largest one.
  void trim(double rel_tol = 1e-12) {
    double m = max_abs_coeff();
    if (m == 0) { c.clear(); return; }
    while (!c.empty() && std::abs(c.back()) <= rel_tol * m) c.pop_back();
  }

  cplx eval(cplx z) const {
    cplx acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  CPoly derivative() const {
    if (c.size() <= 1) return CPoly{};
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = double(k) * c[k];
    return CPoly(std::move(d));
  }

  CPoly monic() const {
    if (is_zero()) throw numeric_error("monic(): zero polynomial");
    CPoly p = *this;
    cplx l = p.c.back();
    for (auto& a : p.c) a /= l;
    return p;
  }

  // p(s*z): rescale the argument.
  CPoly scale_arg(cplx s) const {
    CPoly p = *this;
    cplx pw = 1.0;
    for (auto& a : p.c) { a *= pw; pw *= s; }
    return p;
  }

  friend CPoly operator+(const CPoly& a, const CPoly& b) {
    std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t k = 0; k < a.c.size(); ++k) r[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) r[k] += b.c[k];
    return CPoly(std::move(r));
  }
  friend CPoly operator-(const CPoly& a, const CPoly& b) {
    std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t k = 0; k < a.c.size(); ++k) r[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) r[k] -= b.c[k];
    return CPoly(std::move(r));
  }
  friend CPoly operator*(const CPoly& a, const CPoly& b) {
    if (a.is_zero() || b.is_zero()) return CPoly{};
    std::vector<cplx> r(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return CPoly(std::move(r));
  }
  friend CPoly operator*(cplx s, const CPoly& a) {
    CPoly p = a;
    for (auto& x : p.c) x *= s;
    p.trim();
    return p;
  }

  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k) os << ", ";
      os << c[k].real() << (c[k].imag() < 0 ? "-" : "+")
         << std::abs(c[k].imag()) << "i";
    }
    os << "]";
    return os.str();
  }
};

// Relative distance between two polynomials, coefficientwise l-inf.
inline double poly_rel_dist(const CPoly& a, const CPoly& b) {
  CPoly d = a - b;
  double scale = std::max({a.max_abs_coeff(), b.max_abs_coeff(), kTinyDenom});
  return d.max_abs_coeff() / scale;
}

// ------------------------------------------------------------------ root sets

struct RootSet {
  // (root value, multiplicity), sorted by modulus then phase.
  std::vector<std::pair<cplx, int>> roots;

  int total_multiplicity() const {
    int n = 0;
    for (auto& [r, m] : roots) n += m;
    return n;
  }
  std::vector<cplx> expanded() const {
    std::vector<cplx> out;
    for (auto& [r, m] : roots) out.insert(out.end(), std::size_t(m), r);
    return out;
  }
  void sort_canonical() {
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
      double ma = std::abs(a.first), mb = std::abs(b.first);
      if (std::abs(ma - mb) > 1e-12 * std::max({ma, mb, 1.0})) return ma < mb;
      return std::arg(a.first) < std::arg(b.first);
    });
  }
};

struct RootOptions {
  double cluster_tol = 1e-7;   // base relative merge distance
  int max_iter = 400;
  double residual_tol = 1e-8;  // |p(r)| <= residual_tol * max|c| * max(1,|r|)^deg
};

namespace detail {

inline std::vector<cplx> aberth_iterate(const CPoly& p, std::vector<cplx> x,
                                        int max_iter, bool& converged) {
  const CPoly dp = p.derivative();
  const int d = static_cast<int>(x.size());
  converged = false;
  for (int it = 0; it < max_iter; ++it) {
    double worst = 0;
    for (int k = 0; k < d; ++k) {
      cplx pk = p.eval(x[k]);
      cplx dpk = dp.eval(x[k]);
      if (std::abs(dpk) < 1e-300) { x[k] += cplx(1e-8, 2e-8); continue; }
      cplx w = pk / dpk;
      cplx s = 0;
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        cplx diff = x[k] - x[j];
        if (std::abs(diff) < 1e-300) diff = cplx(1e-14, 1e-14);
        s += 1.0 / diff;
      }
      cplx corr = w / (1.0 - w * s);
      x[k] -= corr;
      worst = std::max(worst, std::abs(corr) / std::max(1.0, std::abs(x[k])));
    }
    if (worst < 1e-14) { converged = true; break; }
  }
  return x;
}

inline std::vector<cplx> companion_roots(const CPoly& p) {
  CPoly m = p.monic();
  const int d = m.degree();
  Mat comp = Mat::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -m.c[i];
  Eigen::ComplexEigenSolver<Mat> es(comp, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw numeric_error("companion_roots: eigen solver failed");
  std::vector<cplx> out(d);
  for (int i = 0; i < d; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

}  // namespace detail

// Roots of p with multiplicities.  Aberth-Ehrlich simultaneous iteration,
// falling back to companion-matrix eigenvalues if it stalls.  Nearby
// approximations are merged into one multiple root: first by the base
// cluster tolerance, then by a multiplicity-aware floor (a k-fold root is
// only resolvable to O(eps^(1/k)), so the merge radius must grow with the
// candidate multiplicity; the merged centroid must still pass the residual
// bound to be accepted).
inline RootSet poly_roots(const CPoly& poly, RootOptions opt = {}) {
  CPoly p = poly;
  p.trim();
  if (p.is_zero()) throw numeric_error("poly_roots: zero polynomial");
  RootSet rs;
  if (p.degree() == 0) return rs;

  // Exact zero roots show up as negligible low-order coefficients.
  const double mc = p.max_abs_coeff();
  int n_zero = 0;
  while (n_zero < p.degree() && std::abs(p.c[n_zero]) <= 5e-12 * mc) ++n_zero;
  if (n_zero > 0) {
    rs.roots.push_back({cplx(0.0), n_zero});
    p.c.erase(p.c.begin(), p.c.begin() + n_zero);
  }

  const int d = p.degree();
  if (d > 0) {
    // Starting circle: geometric-mean radius with deterministic stagger.
    double r0 = std::pow(std::abs(p.c.front() / p.c.back()), 1.0 / d);
    if (!(r0 > 0) || !std::isfinite(r0)) r0 = 1.0;
    std::vector<cplx> x(d);
    for (int k = 0; k < d; ++k) {
      double th = 2.0 * M_PI * k / d + 0.4;
      x[k] = r0 * (1.0 + 0.06 * std::sin(2.7 * k + 0.5)) * std::polar(1.0, th);
    }
    bool ok = false;
    x = detail::aberth_iterate(p, std::move(x), opt.max_iter, ok);
    if (!ok) {
      x = detail::companion_roots(p);
      bool polish_ok = false;
      x = detail::aberth_iterate(p, std::move(x), 60, polish_ok);
    }

    // Single-linkage clusters at the base tolerance.
    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    auto reldist = [](cplx a, cplx b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
    };
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (reldist(x[i], x[j]) <= opt.cluster_tol) parent[find(i)] = find(j);

    struct Cluster { cplx centroid; int size; };
    auto collect = [&] {
      std::vector<Cluster> cl;
      std::vector<int> label(d, -1);
      for (int i = 0; i < d; ++i) {
        int r = find(i);
        if (label[r] < 0) { label[r] = int(cl.size()); cl.push_back({0.0, 0}); }
        cl[label[r]].centroid += x[i];
        cl[label[r]].size += 1;
      }
      for (auto& c : cl) c.centroid /= double(c.size);
      return cl;
    };
    std::vector<Cluster> clusters = collect();

    // Multiplicity-aware merging: a k-fold numerical root scatters like
    // eps^(1/k), well beyond the base tolerance for k >= 2.
    const double eps_k = 1e3 * std::numeric_limits<double>::epsilon();
    auto accept_centroid = [&](cplx c0) {
      double bound = opt.residual_tol * mc *
                     std::pow(std::max(1.0, std::abs(c0)), poly.degree());
      return std::abs(poly.eval(c0)) <= bound;
    };
    bool merged = true;
    while (merged && clusters.size() > 1) {
      merged = false;
      for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
        for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
          int k = clusters[i].size + clusters[j].size;
          double floor_k = 5.0 * std::pow(eps_k, 1.0 / k);
          if (reldist(clusters[i].centroid, clusters[j].centroid) > floor_k)
            continue;
          cplx c0 = (clusters[i].centroid * double(clusters[i].size) +
                     clusters[j].centroid * double(clusters[j].size)) /
                    double(k);
          if (!accept_centroid(c0)) continue;
          clusters[i] = {c0, k};
          clusters.erase(clusters.begin() + j);
          merged = true;
        }
      }
    }

    for (auto& cl : clusters) {
      cplx r = cl.centroid;
      if (cl.size == 1) {
        // Newton polish, then enforce the residual postcondition.
        const CPoly dp = p.derivative();
        for (int it = 0; it < 6; ++it) {
          cplx dpv = dp.eval(r);
          if (std::abs(dpv) < 1e-300) break;
          r -= p.eval(r) / dpv;
        }
        if (!accept_centroid(r)) {
          throw numeric_error("poly_roots: residual bound violated at root, poly=" +
                              poly.str());
        }
      }
      rs.roots.push_back({r, cl.size});
    }
  }

  rs.sort_canonical();
  if (rs.total_multiplicity() != poly.degree())
    throw numeric_error("poly_roots: multiplicities do not sum to degree");
  return rs;
}

// -------------------------------------------------------------- interpolation

// Least-squares fit of a polynomial of degree <= degree_bound through the
// given (node, value) samples.  Throws on duplicate nodes and when the data
// are inconsistent with any such polynomial.
inline CPoly interpolate(const std::vector<std::pair<cplx, cplx>>& samples,
                         int degree_bound) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) throw numeric_error("interpolate: no samples");
  if (degree_bound < 0) throw numeric_error("interpolate: negative degree bound");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double sc = std::max({std::abs(samples[i].first),
                            std::abs(samples[j].first), 1.0});
      if (std::abs(samples[i].first - samples[j].first) <= 1e-14 * sc)
        throw numeric_error("interpolate: duplicate nodes");
    }

  Mat V(n, degree_bound + 1);
  Vec f(n);
  double fmax = 0;
  for (int i = 0; i < n; ++i) {
    cplx pw = 1.0;
    for (int k = 0; k <= degree_bound; ++k) { V(i, k) = pw; pw *= samples[i].first; }
    f(i) = samples[i].second;
    fmax = std::max(fmax, std::abs(samples[i].second));
  }
  Vec coef = V.colPivHouseholderQr().solve(f);
  double resid = (V * coef - f).template lpNorm<Eigen::Infinity>();
  if (resid > 1e-10 * std::max(1.0, fmax))
    throw numeric_error("interpolate: samples inconsistent with degree bound, residual=" +
                        std::to_string(resid));
  std::vector<cplx> c(coef.data(), coef.data() + coef.size());
  return CPoly(std::move(c));
}

// ----------------------------------------------------------- eigensolver shim

struct EigResult {
  Vec values;
  Mat vectors;  // columns, each scaled so its largest entry is exactly 1
};

// Dense non-Hermitian eigensolve with a residual guarantee.  Backed by
// Eigen's complex Schur-based solver; columns are rescaled so the entry of
// largest magnitude equals 1, which pins an overall phase.
inline EigResult eig_dense(const Mat& A, double residual_tol = 1e-9) {
  if (A.rows() != A.cols()) throw numeric_error("eig_dense: matrix not square");
  const int n = static_cast<int>(A.rows());
  Eigen::ComplexEigenSolver<Mat> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw numeric_error("eig_dense: solver did not converge");
  EigResult out;
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  const double anorm = A.norm();
  for (int j = 0; j < n; ++j) {
    int imax = 0;
    double best = 0;
    for (int i = 0; i < n; ++i) {
      double m = std::abs(out.vectors(i, j));
      if (m > best) { best = m; imax = i; }
    }
    if (best == 0) throw numeric_error("eig_dense: zero eigenvector column");
    out.vectors.col(j) /= out.vectors(imax, j);
    double resid = (A * out.vectors.col(j) - out.values(j) * out.vectors.col(j)).norm();
    double bound = residual_tol * std::max(anorm, kTinyDenom) * out.vectors.col(j).norm();
    if (resid > bound) {
      Eigen::JacobiSVD<Mat> svd(A);
      double cond = svd.singularValues()(0) /
                    std::max(svd.singularValues()(n - 1), kTinyDenom);
      throw numeric_error("eig_dense: residual " + std::to_string(resid) +
                          " exceeds bound (cond ~ " + std::to_string(cond) + ")");
    }
  }
  return out;
}

// ------------------------------------------------------------------- division

// num = den * quotient + remainder with deg(remainder) < deg(den).
inline std::pair<CPoly, CPoly> poly_divmod(const CPoly& num, const CPoly& den_in) {
  CPoly den = den_in;
  den.trim();
  if (den.is_zero()) throw numeric_error("poly_divmod: zero denominator");
  CPoly rem = num;
  rem.trim();
  if (rem.degree() < den.degree()) return {CPoly{}, rem};
  std::vector<cplx> q(rem.degree() - den.degree() + 1, 0.0);
  std::vector<cplx> r = rem.c;
  const cplx dl = den.c.back();
  for (int k = int(r.size()) - 1; k >= den.degree(); --k) {
    cplx f = r[k] / dl;
    q[k - den.degree()] = f;
    for (int j = 0; j <= den.degree(); ++j)
      r[k - den.degree() + j] -= f * den.c[j];
  }
  r.resize(den.degree() > 0 ? den.degree() : 0);
  return {CPoly(std::move(q)), CPoly(std::move(r))};
}

// ------------------------------------------------------------- matrix helpers

inline double rel_residual(const Mat& diff, const Mat& lhs, const Mat& rhs) {
  return diff.norm() / std::max({lhs.norm(), rhs.norm(), kTinyDenom});
}

// Orthonormal basis of the (numerical) null space of A.
inline Mat nullspace(const Mat& A, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * std::max(smax, kTinyDenom)) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

inline int numerical_rank(const Mat& A, double rel_tol = 1e-10) {
  return static_cast<int>(A.cols() - nullspace(A, rel_tol).cols());
}

// Largest principal angle (radians) between the column spans of two
// matrices with orthonormal-ish columns.
inline double max_principal_angle(const Mat& U, const Mat& W) {
  Eigen::HouseholderQR<Mat> qu(U), qw(W);
  Mat Qu = qu.householderQ() * Mat::Identity(U.rows(), U.cols());
  Mat Qw = qw.householderQ() * Mat::Identity(W.rows(), W.cols());
  Eigen::JacobiSVD<Mat> svd(Qu.adjoint() * Qw);
  double smin = svd.singularValues().minCoeff();
  smin = std::clamp(smin, -1.0, 1.0);
  return std::acos(smin);
}

// ------------------------------------------------------- deterministic random

// Seeded generator with platform-independent draws (raw 53-bit mantissas,
// no distribution objects).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  double u01() {
    return double(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  cplx annulus(double rmin, double rmax) {
    double r = uniform(rmin, rmax);
    double th = uniform(0.0, 2.0 * M_PI);
    return std::polar(r, th);
  }

 private:
  // xorshift64*: deterministic across platforms, good enough for probes.
  std::uint64_t next() {
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }
  std::uint64_t state_;
};

}  // namespace qsix
