#include "ncdist/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "ncdist/parallel.hpp"

namespace ncdist {

const char* to_string(QMethod method) {
  switch (method) {
    case QMethod::analytic:
      return "analytic";
    case QMethod::root_find:
      return "root_find";
    case QMethod::multistart:
      return "multistart";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------------------------
// HusimiFunction

HusimiFunction::HusimiFunction(const DensityMatrix& rho) : modes_(rho.trunc().modes()) {
  const TruncationSpec& trunc = rho.trunc();
  const SparseMatrix& mat = rho.matrix();
  std::vector<Eigen::Index> local(trunc.dimension(), -1);
  std::vector<std::size_t> support;
  for (Eigen::Index k = 0; k < mat.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat, k); it; ++it) {
      for (Eigen::Index idx : {it.row(), it.col()}) {
        if (local[static_cast<std::size_t>(idx)] < 0) {
          local[static_cast<std::size_t>(idx)] = static_cast<Eigen::Index>(support.size());
          support.push_back(static_cast<std::size_t>(idx));
        }
      }
    }
  }
  max_occupation_.assign(static_cast<std::size_t>(modes_), 0);
  occupations_.resize(support.size() * static_cast<std::size_t>(modes_));
  for (std::size_t s = 0; s < support.size(); ++s) {
    std::span<int> occ(occupations_.data() + s * static_cast<std::size_t>(modes_), static_cast<std::size_t>(modes_));
    trunc.decode(support[s], occ);
    for (int m = 0; m < modes_; ++m) max_occupation_[static_cast<std::size_t>(m)] = std::max(max_occupation_[static_cast<std::size_t>(m)], occ[static_cast<std::size_t>(m)]);
  }
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (Eigen::Index k = 0; k < mat.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mat, k); it; ++it) {
      triplets.emplace_back(local[static_cast<std::size_t>(it.row())], local[static_cast<std::size_t>(it.col())], it.value());
    }
  }
  const auto s = static_cast<Eigen::Index>(support.size());
  restricted_ = SparseMatrix(s, s);
  restricted_.setFromTriplets(triplets.begin(), triplets.end());
  restricted_.makeCompressed();
  // Rank-one detection: a pure state is evaluated as |<psi|alpha>|^2 in O(support).
  if (s > 0 && s <= 4096 && restricted_.nonZeros() == s * s) {
    const ComplexMatrix dense = ComplexMatrix(restricted_);
    Eigen::Index j = 0;
    dense.diagonal().real().maxCoeff(&j);
    const double pivot = dense(j, j).real();
    if (pivot > 0.0) {
      const ComplexVector psi = dense.col(j) / std::sqrt(pivot);
      const double scale = dense.cwiseAbs().maxCoeff();
      if ((dense - psi * psi.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) factor_ = psi;
    }
  }
}

double HusimiFunction::value(const CoherentPoint& alpha) const {
  if (alpha.modes() != modes_) throw InvalidArgument("q_tilde: mode count mismatch");
  std::vector<double> x(2 * static_cast<std::size_t>(modes_));
  for (int m = 0; m < modes_; ++m) {
    x[2 * static_cast<std::size_t>(m)] = alpha.alpha[static_cast<std::size_t>(m)].real();
    x[2 * static_cast<std::size_t>(m) + 1] = alpha.alpha[static_cast<std::size_t>(m)].imag();
  }
  return evaluate(x, {});
}

double HusimiFunction::evaluate(std::span<const double> x, std::span<double> grad) const {
  const auto M = static_cast<std::size_t>(modes_);
  const Eigen::Index s = restricted_.rows();
  std::vector<std::vector<Complex>> tables(M);
  std::vector<std::vector<Complex>> dx(M);
  std::vector<std::vector<Complex>> dy(M);
  const bool want_grad = !grad.empty();
  for (std::size_t m = 0; m < M; ++m) {
    const Complex a(x[2 * m], x[2 * m + 1]);
    tables[m] = coherent_table(a, std::max(max_occupation_[m], 1));
    if (want_grad) {
      const auto n_max = tables[m].size();
      dx[m].resize(n_max);
      dy[m].resize(n_max);
      for (std::size_t n = 0; n < n_max; ++n) {
        const Complex prev = n ? tables[m][n - 1] * std::sqrt(static_cast<double>(n)) : Complex(0.0, 0.0);
        dx[m][n] = -a.real() * tables[m][n] + prev;
        dy[m][n] = -a.imag() * tables[m][n] + Complex(0.0, 1.0) * prev;
      }
    }
  }
  ComplexVector v(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const int* occ = occupations_.data() + static_cast<std::size_t>(i) * M;
    Complex prod(1.0, 0.0);
    for (std::size_t m = 0; m < M; ++m) prod *= tables[m][static_cast<std::size_t>(occ[m])];
    v[i] = prod;
  }
  ComplexVector w;
  if (factor_.size() > 0) {
    const Complex c = factor_.dot(v);
    w = factor_ * c;
  } else {
    w = restricted_ * v;
  }
  const double q = v.dot(w).real();
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (Eigen::Index i = 0; i < s; ++i) {
      const int* occ = occupations_.data() + static_cast<std::size_t>(i) * M;
      for (std::size_t m = 0; m < M; ++m) {
        Complex rest(1.0, 0.0);
        for (std::size_t k = 0; k < M; ++k) {
          if (k != m) rest *= tables[k][static_cast<std::size_t>(occ[k])];
        }
        const auto n = static_cast<std::size_t>(occ[m]);
        grad[2 * m] += 2.0 * (std::conj(dx[m][n] * rest) * w[i]).real();
        grad[2 * m + 1] += 2.0 * (std::conj(dy[m][n] * rest) * w[i]).real();
      }
    }
  }
  return q;
}

double q_tilde(const DensityMatrix& rho, const CoherentPoint& alpha) { return HusimiFunction(rho).value(alpha); }

double gamma_n(int n) {
  if (n < 0) throw InvalidArgument("gamma_n: n must be non-negative");
  if (n == 0) return 1.0;
  const double x = static_cast<double>(n);
  return std::exp(x * std::log(x) - x - std::lgamma(x + 1.0));
}

// ---------------------------------------------------------------------------------------------
// Multistart search

namespace {

using Point = std::vector<double>;

struct LocalResult {
  double value = -std::numeric_limits<double>::infinity();
  Point x;
  double gradient_norm = std::numeric_limits<double>::infinity();
};

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

/// Maximize f by Nelder-Mead; returns best vertex and value.
LocalResult nelder_mead(const std::function<double(const Point&)>& f, const Point& start, double step, int budget) {
  const std::size_t n = start.size();
  std::vector<Point> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  int evals = 0;
  // Minimize g = -f.
  auto g = [&](const Point& p) {
    ++evals;
    return -f(p);
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = g(simplex[i]);
  std::vector<std::size_t> order(n + 1);
  while (evals < budget) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
    }
    if (size < 1e-10 && values[worst] - values[best] <= 1e-15 * (1.0 + std::abs(values[best]))) break;
    Point centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      Point p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      return p;
    };
    Point reflected = along(-1.0);
    const double fr = g(reflected);
    if (fr < values[best]) {
      Point expanded = along(-2.0);
      const double fe = g(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      Point contracted = along(outside ? -0.5 : 0.5);
      const double fc = g(contracted);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = std::move(contracted);
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          values[i] = g(simplex[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {-values[best], simplex[best], std::numeric_limits<double>::infinity()};
}

double norm2(const Point& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Newton ascent on the exact gradient with a finite-difference Hessian; curvature-free directions
/// (phase rings) take no step.
void newton_polish(const HusimiFunction& q, LocalResult& r) {
  const std::size_t n = r.x.size();
  Point grad(n);
  Point gp(n);
  Point gm(n);
  const double entry_value = r.value;
  double value = q.evaluate(r.x, grad);
  // Near the top the true gain of a step drops below rounding noise in Q, so steps that keep the value
  // within that noise are accepted when they shrink the gradient.
  const double noise = 1e-13 * std::max(1.0, std::abs(value));
  for (int iter = 0; iter < 60; ++iter) {
    if (norm2(grad) < 1e-14) break;
    Eigen::MatrixXd H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double h = 1e-6;
    for (std::size_t j = 0; j < n; ++j) {
      Point xp = r.x;
      Point xm = r.x;
      xp[j] += h;
      xm[j] -= h;
      q.evaluate(xp, gp);
      q.evaluate(xm, gm);
      for (std::size_t i = 0; i < n; ++i) H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const double scale = std::max(1e-300, eig.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(grad.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd step = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
      const double lambda = eig.eigenvalues()[k];
      const double proj = eig.eigenvectors().col(k).dot(g);
      const double curvature = std::max(std::abs(lambda), 1e-6 * scale);
      step += eig.eigenvectors().col(k) * (proj / curvature);
    }
    double t = 1.0;
    bool moved = false;
    for (int back = 0; back < 40; ++back, t *= 0.5) {
      Point trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = r.x[i] + t * step[static_cast<Eigen::Index>(i)];
      Point trial_grad(n);
      const double tv = q.evaluate(trial, trial_grad);
      if (tv > value || (tv >= value - noise && norm2(trial_grad) < norm2(grad))) {
        r.x = std::move(trial);
        value = tv;
        grad = std::move(trial_grad);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  r.value = std::max(value, entry_value);
  r.gradient_norm = norm2(grad);
}

Point to_coordinates(const CoherentPoint& p) {
  Point x;
  for (const auto& a : p.alpha) {
    x.push_back(a.real());
    x.push_back(a.imag());
  }
  return x;
}

CoherentPoint to_point(const Point& x) {
  CoherentPoint p;
  for (std::size_t m = 0; m + 1 < x.size(); m += 2) p.alpha.emplace_back(x[m], x[m + 1]);
  return p;
}

}  // namespace

QSupremum q_sup(const DensityMatrix& rho, const std::vector<CoherentPoint>& hints, const QSupOptions& options) {
  const HusimiFunction q(rho);
  const int modes = q.modes();
  const std::size_t dims = 2 * static_cast<std::size_t>(modes);

  std::vector<Point> starts;
  starts.push_back(Point(dims, 0.0));
  starts.push_back(to_coordinates(CoherentPoint{rho.mean_amplitudes()}));
  const int budget = options.starts > 0 ? options.starts : 8 * modes + 4;
  const double radius = std::sqrt(std::max(0.0, rho.mean_photons())) + 2.0;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point shift(dims);
  for (double& s : shift) s = unit(rng);
  for (int k = 0; static_cast<int>(starts.size()) < budget; ++k) {
    Point x(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const double u = std::fmod(radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[d % std::size(kPrimes)]) + shift[d], 1.0);
      x[d] = radius * (2.0 * u - 1.0);
    }
    starts.push_back(std::move(x));
  }
  for (const auto& h : hints) {
    if (h.modes() != modes) throw InvalidArgument("q_sup: hint has the wrong number of modes");
    starts.push_back(to_coordinates(h));
  }

  std::vector<LocalResult> results(starts.size());
  const std::function<double(const Point&)> objective = [&q](const Point& x) { return q.evaluate(x, {}); };
  const double step = std::max(0.25, 0.1 * radius);
  parallel_for(starts.size(), [&](std::size_t i) {
    const double start_value = objective(starts[i]);
    LocalResult r = nelder_mead(objective, starts[i], step, options.max_evaluations);
    if (r.value < start_value) r = {start_value, starts[i], std::numeric_limits<double>::infinity()};
    newton_polish(q, r);
    results[i] = std::move(r);
  });

  std::sort(results.begin(), results.end(), [](const LocalResult& a, const LocalResult& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.x < b.x;
  });
  const double best = results.front().value;
  const double floor = best - options.tie_tol * std::max(1.0, std::abs(best));
  std::vector<LocalResult> kept;
  for (const auto& r : results) {
    if (r.value < floor) break;
    bool distinct = true;
    for (const auto& k : kept) {
      Point d(dims);
      for (std::size_t i = 0; i < dims; ++i) d[i] = r.x[i] - k.x[i];
      if (norm2(d) <= options.distinct_radius) {
        distinct = false;
        break;
      }
    }
    if (distinct) kept.push_back(r);
  }
  QSupremum out;
  out.value = best;
  out.method = QMethod::multistart;
  out.certificate = 0.0;
  for (const auto& k : kept) {
    out.argmax.push_back(to_point(k.x));
    out.certificate = std::max(out.certificate, k.gradient_norm);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Closed forms

QSupremum noon_qmax_analytic(int n, const std::vector<Complex>& c) {
  if (n < 1) throw InvalidArgument("noon_qmax_analytic: n must be >= 1");
  if (c.empty()) throw InvalidArgument("noon_qmax_analytic: empty coefficient vector");
  double norm = 0.0;
  double largest = 0.0;
  for (const auto& v : c) {
    norm += std::norm(v);
    largest = std::max(largest, std::abs(v));
  }
  if (std::abs(norm - 1.0) > 1e-12) throw InvalidArgument("noon_qmax_analytic: coefficients must be normalized");
  QSupremum out;
  out.method = QMethod::analytic;
  if (n == 1) {
    // Q = e^{-|a|^2} |sum conj(a_m) c_m|^2 peaks at a = c with value e^{-1} for every normalized c.
    out.value = gamma_n(1);
    out.argmax.push_back(CoherentPoint{c});
    return out;
  }
  out.value = gamma_n(n) * largest * largest;
  const double radius = std::sqrt(static_cast<double>(n));
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (std::abs(c[m]) < largest - 1e-12) continue;
    CoherentPoint p = CoherentPoint::vacuum(static_cast<int>(c.size()));
    p.alpha[m] = std::polar(radius, -std::arg(c[m]) / n);
    out.argmax.push_back(std::move(p));
  }
  return out;
}

namespace {

double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

double log_sinh(double x) {
  // x > 0
  if (x < 20.0) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0);
}

double cat_log_q(const CatParams& p, double a) {
  const double b2 = p.beta * p.beta;
  if (p.parity == Parity::even) return -log_cosh(b2) - a * a + 2.0 * log_cosh(p.beta * a);
  return -log_sinh(b2) - a * a + 2.0 * log_sinh(p.beta * a);
}

}  // namespace

double cat_q_tilde(const CatParams& p, Complex alpha) {
  const double b = p.beta;
  const double x = alpha.real();
  const double y = alpha.imag();
  const double b2 = b * b;
  const double prefactor = p.parity == Parity::even ? 1.0 / std::cosh(b2) : 1.0 / std::sinh(b2);
  const double sign = p.parity == Parity::even ? 1.0 : -1.0;
  // |cosh(b alpha)|^2 = (cosh 2bx + cos 2by)/2, |sinh(b alpha)|^2 = (cosh 2bx - cos 2by)/2.
  return prefactor * std::exp(-(x * x + y * y)) * 0.5 * (std::cosh(2.0 * b * x) + sign * std::cos(2.0 * b * y));
}

QSupremum cat_qmax(const CatParams& p) {
  const double b = p.beta;
  QSupremum out;
  if (p.parity == Parity::even && b <= 1.0) {
    out.method = QMethod::analytic;
    out.value = 1.0 / std::cosh(b * b);
    out.argmax.push_back(CoherentPoint{{Complex(0.0, 0.0)}});
    return out;
  }
  // Stationarity condition f(a) = 0, f decreasing across the bracket.
  const bool even = p.parity == Parity::even;
  auto f = [&](double a) { return even ? b * std::tanh(b * a) - a : b / std::tanh(b * a) - a; };
  auto df = [&](double a) {
    if (even) {
      const double s = 1.0 / std::cosh(b * a);
      return b * b * s * s - 1.0;
    }
    const double s = 1.0 / std::sinh(b * a);
    return -b * b * s * s - 1.0;
  };
  double lo = even ? 1e-12 : b * (1.0 + 1e-12);
  double hi = even ? b : b / std::tanh(b * b) + 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double a = 0.5 * (lo + hi);
  for (int k = 0; k < 2; ++k) a -= f(a) / df(a);
  out.method = QMethod::root_find;
  out.value = std::exp(cat_log_q(p, a));
  out.argmax.push_back(CoherentPoint{{Complex(a, 0.0)}});
  out.argmax.push_back(CoherentPoint{{Complex(-a, 0.0)}});
  // dQ/da = 2 Q f(a) on the real axis.
  out.certificate = std::abs(2.0 * out.value * f(a));
  return out;
}

}  // namespace ncdist
