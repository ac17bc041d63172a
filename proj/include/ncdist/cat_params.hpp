#pragma once

#include <cmath>
#include <string>

#include "ncdist/errors.hpp"

namespace ncdist {

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

/// Even/odd superposition (|beta> +- |-beta>) / sqrt(2 N) of single-mode coherent states, beta real and positive.
struct CatParams {
  Parity parity = Parity::even;
  double beta = 1.0;

  CatParams() = default;
  CatParams(Parity p, double b) : parity(p), beta(b) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("CatParams: beta must be real and positive");
  }

  /// N = 1 +- exp(-2 beta^2).
  double norm() const {
    const double x = 2.0 * beta * beta;
    return parity == Parity::even ? 1.0 + std::exp(-x) : -std::expm1(-x);
  }
};

}  // namespace ncdist
