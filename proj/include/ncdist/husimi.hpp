#pragma once

// Husimi function Q~(alpha) = <alpha|rho|alpha> and its supremum m(rho) over phase space.

#include <cstdint>
#include <span>
#include <vector>

#include "ncdist/cat_params.hpp"
#include "ncdist/fock.hpp"

namespace ncdist {

inline constexpr std::uint64_t kDefaultSeed = 20160322;

enum class QMethod { analytic, root_find, multistart };

const char* to_string(QMethod method);

struct QSupremum {
  double value = 0.0;
  /// Every maximizer found (pairwise more than the distinctness radius apart), best first.
  std::vector<CoherentPoint> argmax;
  QMethod method = QMethod::multistart;
  /// Gradient norm at the reported maximizers (0 for closed forms).
  double certificate = 0.0;
};

/// Evaluates Q~ and its exact gradient for a fixed state. Only the support of rho enters, so the value
/// is exact for the truncated operator wherever alpha is.
class HusimiFunction {
 public:
  explicit HusimiFunction(const DensityMatrix& rho);

  int modes() const noexcept { return modes_; }
  double value(const CoherentPoint& alpha) const;
  /// Coordinates are (Re alpha_1, Im alpha_1, Re alpha_2, ...). Returns the value; fills `grad` if non-empty.
  double evaluate(std::span<const double> x, std::span<double> grad) const;

 private:
  int modes_;
  std::vector<int> max_occupation_;
  std::vector<int> occupations_;  // support size x modes, row-major
  SparseMatrix restricted_;       // rho on its support
  ComplexVector factor_;          // psi with rho = psi psi^dagger on the support, empty if rho is not rank one
};

double q_tilde(const DensityMatrix& rho, const CoherentPoint& alpha);

/// e^{-n} n^n / n!, the peak coherent-state overlap of |n>.
double gamma_n(int n);

struct QSupOptions {
  /// Non-hint starts (origin, mean amplitude, quasi-random); <= 0 means 8M + 4.
  int starts = 0;
  int max_evaluations = 2000;
  std::uint64_t seed = kDefaultSeed;
  double tie_tol = 1e-9;
  double distinct_radius = 1e-4;
  double certificate_threshold = 1e-8;
};

/// Multistart local maximization over the 2M real coordinates: Nelder-Mead from each start followed
/// by a Newton polish on the exact gradient. Reports every local maximum within tie_tol (relative) of
/// the best one.
QSupremum q_sup(const DensityMatrix& rho, const std::vector<CoherentPoint>& hints = {}, const QSupOptions& options = {});

/// Closed form for sum_m c_m |0..n_m..0>: gamma_n (max_m |c_m|)^2 for n >= 2 and e^{-1} for n = 1.
QSupremum noon_qmax_analytic(int n, const std::vector<Complex>& c);

/// Maximizer +-alpha* of the even/odd cat Husimi function from the transcendental stationarity
/// condition (beta tanh(beta a) = a for even beta > 1, beta coth(beta a) = a for odd).
QSupremum cat_qmax(const CatParams& p);

/// Closed-form Husimi function of the cat state at a complex point.
double cat_q_tilde(const CatParams& p, Complex alpha);

}  // namespace ncdist
