#include "alab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "alab/error.hpp"
#include "alab/free_operator.hpp"
#include "alab/parallel.hpp"
#include "alab/simd/kernels.hpp"

namespace alab {
namespace {

bool real_hoppings(const Symbol& sym) {
  return std::none_of(sym.axes().begin(), sym.axes().end(), [](const AxisSymbol& a) { return a.has_sine_terms(); });
}

bool nearest_neighbour_chain(const Symbol& sym, const Geometry& geo) {
  if (geo.kind() != GeometryKind::full || geo.nu() != 1 || geo.boundary() != Boundary::dirichlet) return false;
  const AxisSymbol& a = sym.axis(0);
  return a.degree() <= 1 && !a.has_sine_terms();
}

void finish(SpectralDiagnostics& out, const Geometry& geo) {
  out.ipr.resize(out.vectors.size());
  out.xi.resize(out.vectors.size());
  parallel_for(out.vectors.size(), [&](std::size_t i) {
    const IprDecay d = ipr_and_decay(out.vectors[i], geo);
    out.ipr[i] = d.ipr;
    out.xi[i] = d.xi;
  });
}

template <class Vec>
std::vector<std::complex<double>> to_cvec(const Vec& v) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

SpectralDiagnostics dense_spectrum(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                                   bool vectors) {
  SpectralDiagnostics out;
  out.dense = true;
  const auto n = static_cast<Eigen::Index>(geo.size());
  const int opts = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;

  if (nearest_neighbour_chain(sym, geo)) {
    const AxisSymbol& a = sym.axis(0);
    const double t = a.degree() >= 1 ? 0.5 * a.cos_coeffs()[1] : 0.0;
    Eigen::VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = a.constant() + potential[static_cast<std::size_t>(i)];
    sub.setConstant(t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, opts);
    if (es.info() != Eigen::Success) throw Error("no convergence", "tridiagonal eigensolver");
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (vectors)
      for (Eigen::Index k = 0; k < n; ++k) out.vectors.push_back(to_cvec(es.eigenvectors().col(k)));
    return out;
  }

  if (real_hoppings(sym)) {
    const Eigen::MatrixXd H = Eigen::MatrixXd(assemble_sparse_real(sym, geo, potential));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, opts);
    if (es.info() != Eigen::Success) throw Error("no convergence", "dense eigensolver");
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (vectors)
      for (Eigen::Index k = 0; k < n; ++k) out.vectors.push_back(to_cvec(es.eigenvectors().col(k)));
    return out;
  }

  const Eigen::MatrixXcd H = Eigen::MatrixXcd(assemble_sparse(sym, geo, potential));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, opts);
  if (es.info() != Eigen::Success) throw Error("no convergence", "dense eigensolver");
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  if (vectors)
    for (Eigen::Index k = 0; k < n; ++k) out.vectors.push_back(to_cvec(es.eigenvectors().col(k)));
  return out;
}

// Block inverse iteration with Rayleigh-Ritz around the window centre.
SpectralDiagnostics windowed_spectrum(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                                      const SpectrumOptions& options) {
  using MatC = Eigen::MatrixXcd;
  const SparseC H = assemble_sparse(sym, geo, potential);
  const auto n = H.rows();
  const auto k = static_cast<Eigen::Index>(std::clamp(options.window_count, 1, static_cast<int>(n)));
  const Eigen::Index b = std::min<Eigen::Index>(n, k + std::max<Eigen::Index>(8, k / 2));

  // a shift exactly on an eigenvalue would make the factorization singular
  const double scale = 1.0 + std::abs(options.window_center);
  const std::complex<double> sigma(options.window_center + 1e-9 * scale, 0.0);
  SparseC A = H;
  for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= sigma;
  A.makeCompressed();
  Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error("no convergence", "shift-invert factorization failed");

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;
  MatC X(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = {gauss(rng), gauss(rng)};

  Eigen::VectorXd theta;
  MatC ritz;
  std::vector<Eigen::Index> order;
  bool converged = false;
  for (int it = 0; it < 500 && !converged; ++it) {
    const MatC Y = lu.solve(X);
    Eigen::HouseholderQR<MatC> qr(Y);
    const MatC Q = qr.householderQ() * MatC::Identity(n, b);
    const MatC HQ = H * Q;
    const MatC T = Q.adjoint() * HQ;
    Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (T + T.adjoint()));
    theta = es.eigenvalues();
    ritz = Q * es.eigenvectors();
    const MatC Hr = HQ * es.eigenvectors();
    order.resize(static_cast<std::size_t>(b));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
      return std::abs(theta(p) - options.window_center) < std::abs(theta(q) - options.window_center);
    });
    converged = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index c = order[static_cast<std::size_t>(j)];
      const double res = (Hr.col(c) - theta(c) * ritz.col(c)).norm();
      if (res > 1e-9 * (1.0 + std::abs(theta(c)))) {
        converged = false;
        break;
      }
    }
    X = ritz;
  }
  if (!converged) throw Error("no convergence", "windowed eigensolver");

  std::vector<Eigen::Index> chosen(order.begin(), order.begin() + k);
  std::sort(chosen.begin(), chosen.end(), [&](Eigen::Index p, Eigen::Index q) { return theta(p) < theta(q); });
  SpectralDiagnostics out;
  out.dense = false;
  for (Eigen::Index c : chosen) {
    out.eigenvalues.push_back(theta(c));
    if (options.vectors) out.vectors.push_back(to_cvec(ritz.col(c).normalized()));
  }
  return out;
}

}  // namespace

SpectralDiagnostics truncated_spectrum(const Symbol& sym, const Geometry& geo, std::span<const double> potential,
                                       const SpectrumOptions& options) {
  if (potential.size() != geo.size()) throw Error("dimension mismatch", "potential size differs from the box");
  SpectralDiagnostics out = geo.size() <= options.dense_limit ? dense_spectrum(sym, geo, potential, options.vectors)
                                                              : windowed_spectrum(sym, geo, potential, options);
  if (options.vectors) finish(out, geo);
  return out;
}

IprDecay ipr_and_decay(std::span<const std::complex<double>> psi, const Geometry& geo) {
  if (psi.size() != geo.size()) throw Error("dimension mismatch", "vector size differs from the box");
  const double n2 = simd::norm_sq(psi);
  if (!(n2 > 0.0)) throw Error("domain", "zero vector");
  IprDecay out;
  out.ipr = simd::sum_abs4(psi) / (n2 * n2);

  std::size_t peak = 0;
  double peak_abs = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (std::abs(psi[i]) > peak_abs) {
      peak_abs = std::abs(psi[i]);
      peak = i;
    }

  const int axes = geo.axes();
  const std::vector<int> c0 = geo.coords(peak);
  std::vector<int> c(static_cast<std::size_t>(axes));
  std::vector<double> envelope;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    geo.coords(i, c);
    double r2 = 0.0;
    for (int g = 0; g < axes; ++g) {
      int d = std::abs(c[static_cast<std::size_t>(g)] - c0[static_cast<std::size_t>(g)]);
      if (geo.boundary() == Boundary::periodic && !geo.is_half_axis(g)) d = std::min(d, geo.extent(g) - d);
      r2 += static_cast<double>(d) * d;
    }
    const auto bin = static_cast<std::size_t>(std::lround(std::sqrt(r2)));
    if (bin >= envelope.size()) envelope.resize(bin + 1, 0.0);
    envelope[bin] = std::max(envelope[bin], std::abs(psi[i]));
  }

  // bins below this sit in roundoff and would flatten the fit
  const double floor = 1e-12 * peak_abs;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t r = 0; r < envelope.size(); ++r) {
    if (envelope[r] <= floor) continue;
    const double x = static_cast<double>(r);
    const double y = std::log(envelope[r]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) {
    out.xi = 0.0;
    return out;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  out.xi = slope < -1e-12 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  return out;
}

SpacingRatio spacing_ratio(std::span<const double> eigenvalues, double lo, double hi) {
  std::vector<double> e;
  for (double x : eigenvalues)
    if (x >= lo && x <= hi) e.push_back(x);
  if (e.size() < 50) throw Error("too few levels", std::to_string(e.size()) + " levels in window");
  std::sort(e.begin(), e.end());
  std::vector<double> r;
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    const double a = e[i] - e[i - 1];
    const double b = e[i + 1] - e[i];
    const double m = std::max(a, b);
    if (m > 0.0) r.push_back(std::min(a, b) / m);
  }
  SpacingRatio out;
  out.levels = e.size();
  const double n = static_cast<double>(r.size());
  out.mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
  double var = 0.0;
  for (double x : r) var += (x - out.mean) * (x - out.mean);
  var /= std::max(1.0, n - 1.0);
  out.ci_half_width = 1.96 * std::sqrt(var / n);
  return out;
}

namespace {

// Orthonormal basis of span{H^k delta_s : k < dim}, twice-orthogonalized Arnoldi.
Eigen::MatrixXcd krylov_basis(const SparseC& H, std::size_t s, int dim) {
  const auto N = H.rows();
  Eigen::MatrixXcd Q(N, dim);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N);
  v(static_cast<Eigen::Index>(s)) = 1.0;
  int k = 0;
  for (; k < dim; ++k) {
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) v -= Q.col(j) * Q.col(j).dot(v);
    const double norm = v.norm();
    if (k > 0 && norm < 1e-10) break;  // invariant subspace
    Q.col(k) = v / norm;
    v = H * Q.col(k);
  }
  return Q.leftCols(k);
}

}  // namespace

KrylovOverlap krylov_overlap(const SparseC& H, std::size_t n, std::size_t m, int dim) {
  const auto N = static_cast<std::size_t>(H.rows());
  if (n >= N || m >= N) throw Error("dimension mismatch", "site outside the operator");
  if (dim < 1) throw Error("domain", "dimension must be positive");
  const Eigen::MatrixXcd Qn = krylov_basis(H, n, dim);
  const Eigen::MatrixXcd Qm = krylov_basis(H, m, dim);
  KrylovOverlap out;
  out.dim_n = static_cast<int>(Qn.cols());
  out.dim_m = static_cast<int>(Qm.cols());
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Qn.adjoint() * Qm);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.cosines.push_back(std::min(1.0, svd.singularValues()(i)));
  return out;
}

}  // namespace alab
