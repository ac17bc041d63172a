#pragma once

// Parameter sweeps for the three figures: even cat bounds (fig1), odd cat bounds
// (fig2) and the vacuum/number-state mixture (fig3).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncdist/husimi.hpp"

namespace ncdist {

enum class FigureKind { fig1, fig2, fig3 };

FigureKind parse_figure_kind(const std::string& name);
const char* to_string(FigureKind kind);

struct SweepSpec {
  std::string parameter;  // "beta" or "eta"
  double from = 0.0;
  double to = 1.0;
  int steps = 2;

  /// Throws InvalidArgument unless from < to and steps >= 2.
  void validate() const;
  std::vector<double> points() const;
};

/// beta in [0.05, 3] with 60 points for fig1/fig2, eta in [0, 1] with 101 points for fig3.
SweepSpec default_sweep(FigureKind kind);

struct FigureOptions {
  std::optional<double> from;
  std::optional<double> to;
  std::optional<int> steps;
  double tail_tol = kDefaultTailTol;
  int cutoff = 0;  // 0 = automatic
  std::uint64_t seed = kDefaultSeed;
  /// fig3 only: append the number-diagonal LP value and its dual bound for each n.
  bool lp_columns = true;
};

struct FigureTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

SweepSpec sweep_for(FigureKind kind, const FigureOptions& options);

/// Evaluates every sweep point (in parallel) and assembles the rows in parameter order.
FigureTable figure_table(FigureKind kind, const FigureOptions& options = {});

/// Header plus rows, comma-separated, 17 significant digits, LF line endings.
std::string to_csv(const FigureTable& table);

/// A standalone matplotlib script that plots the CSV at `csv_name` (relative to the script).
std::string plot_script(FigureKind kind, const std::string& csv_name);

}  // namespace ncdist
