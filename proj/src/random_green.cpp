#include <algorithm>
#include <cmath>

#include "alab/error.hpp"
#include "alab/greens.hpp"
#include "alab/potential.hpp"

namespace alab {

GreenSolver::GreenSolver(const SparseC& H, cplx z) : z_(z) {
  if (H.rows() != H.cols()) throw Error("dimension mismatch", "operator must be square");
  SparseC shift(H.rows(), H.cols());
  shift.setIdentity();
  A_ = H - z * shift;
  A_.makeCompressed();
  lu_.analyzePattern(A_);
  lu_.factorize(A_);
  if (lu_.info() != Eigen::Success) throw Error("singular solve", "sparse LU failed for H - z");
}

std::vector<cplx> GreenSolver::column(std::size_t m) const {
  const auto n = A_.rows();
  if (static_cast<Eigen::Index>(m) >= n) throw Error("dimension mismatch", "site outside box");
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(static_cast<Eigen::Index>(m)) = 1.0;
  const Eigen::VectorXcd x = lu_.solve(b);
  return {x.data(), x.data() + x.size()};
}

double GreenSolver::residual(std::size_t m) const {
  const auto col = column(m);
  const Eigen::Map<const Eigen::VectorXcd> x(col.data(), static_cast<Eigen::Index>(col.size()));
  Eigen::VectorXcd r = A_ * x;
  r(static_cast<Eigen::Index>(m)) -= 1.0;
  return r.norm();
}

cplx random_green(const SparseC& H, cplx z, std::size_t n, std::size_t m) {
  const GreenSolver solver(H, z);
  if (static_cast<Eigen::Index>(n) >= H.rows()) throw Error("dimension mismatch", "site outside box");
  return solver.element(n, m);
}

RankOneCheck rank_one_check(const SparseC& H, std::span<const double> potential, std::size_t l, cplx z,
                            std::size_t n) {
  if (static_cast<Eigen::Index>(potential.size()) != H.rows()) throw Error("dimension mismatch", "potential length");
  if (l >= potential.size() || n >= potential.size()) throw Error("dimension mismatch", "site outside box");
  const double v = potential[l];
  SparseC Hl = H;
  Hl.coeffRef(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) -= v;
  const GreenSolver full(H, z);
  const GreenSolver reduced(Hl, z);
  const auto gl = reduced.column(l);
  RankOneCheck out;
  out.direct = full.element(n, l);
  const cplx gll = gl[l];
  out.ill_conditioned = std::abs(gll) < 1e-14;
  out.reconstructed = (gl[n] / gll) / (v + 1.0 / gll);
  const double scale = std::abs(out.direct);
  out.relative_error = scale > 0 ? std::abs(out.reconstructed - out.direct) / scale
                                 : std::abs(out.reconstructed - out.direct);
  return out;
}

SimonWolffResult simon_wolff_sum(const SparseC& H, std::size_t n, double E, const std::vector<double>& etas) {
  if (etas.size() < 3) throw Error("invalid schedule", "need at least three eta values");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0)) throw Error("invalid schedule", "eta must be positive");
    if (i > 0 && !(etas[i] < etas[i - 1])) throw Error("invalid schedule", "eta must decrease");
  }
  SimonWolffResult out;
  out.eta = etas;
  for (double eta : etas) {
    const GreenSolver solver(H, cplx(E, eta));
    const auto col = solver.column(n);
    double s = 0.0;
    for (const auto& g : col) s += std::norm(g);
    out.sum.push_back(s);
  }
  // slope over the last three points
  const std::size_t k = etas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = k - 3; i < k; ++i) {
    const double x = std::log(etas[i]);
    const double y = std::log(out.sum[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  out.slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  const double ratio = out.sum[k - 1] / out.sum[k - 2];
  if (out.slope <= -0.8)
    out.verdict = "divergent-like";
  else if (ratio < 2.0)
    out.verdict = "bounded";
  else
    out.verdict = "undetermined";
  return out;
}

SimonWolffResult simon_wolff_sum(const Symbol& sym, const Envelope& env, const Disorder& dis, const Geometry& geo,
                                 std::uint64_t seed, std::span<const int> n, double E, const std::vector<double>& etas) {
  const PotentialField V = sample_potential(env, dis, geo, seed);
  const SparseC H = assemble_sparse(sym, geo, V);
  return simon_wolff_sum(H, geo.index(n), E, etas);
}

}  // namespace alab
