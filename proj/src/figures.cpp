#include "ncdist/figures.hpp"

#include <charconv>
#include <cmath>

#include "ncdist/bounds.hpp"
#include "ncdist/parallel.hpp"

namespace ncdist {

FigureKind parse_figure_kind(const std::string& name) {
  if (name == "fig1") return FigureKind::fig1;
  if (name == "fig2") return FigureKind::fig2;
  if (name == "fig3") return FigureKind::fig3;
  throw InvalidArgument("unknown figure '" + name + "' (expected fig1, fig2 or fig3)");
}

const char* to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::fig1:
      return "fig1";
    case FigureKind::fig2:
      return "fig2";
    case FigureKind::fig3:
      return "fig3";
  }
  return "unknown";
}

void SweepSpec::validate() const {
  if (!(from < to)) throw InvalidArgument("sweep: need from < to");
  if (steps < 2) throw InvalidArgument("sweep: need at least 2 steps");
}

std::vector<double> SweepSpec::points() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = i + 1 == steps ? to : from + (to - from) * i / (steps - 1);
  return out;
}

SweepSpec default_sweep(FigureKind kind) {
  if (kind == FigureKind::fig3) return {"eta", 0.0, 1.0, 101};
  return {"beta", 0.05, 3.0, 60};
}

SweepSpec sweep_for(FigureKind kind, const FigureOptions& options) {
  SweepSpec s = default_sweep(kind);
  if (options.from) s.from = *options.from;
  if (options.to) s.to = *options.to;
  if (options.steps) s.steps = *options.steps;
  s.validate();
  if (kind == FigureKind::fig3 && (s.from < 0.0 || s.to > 1.0)) throw InvalidArgument("sweep: eta must lie in [0, 1]");
  if (kind != FigureKind::fig3 && s.from <= 0.0) throw InvalidArgument("sweep: beta must be positive");
  return s;
}

std::size_t FigureTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidArgument("figure table has no column '" + name + "'");
}

namespace {

constexpr int kMaxN = 4;

ReportConfig report_config(const FigureOptions& o) {
  ReportConfig cfg;
  cfg.tail_tol = o.tail_tol;
  cfg.cutoff = o.cutoff;
  cfg.qsup.seed = o.seed;
  return cfg;
}

double value_or(const BoundReport& r, const std::string& name, double fallback) {
  const Bound* b = r.find(name);
  return b ? b->value : fallback;
}

std::vector<double> cat_row(FigureKind kind, double beta, const FigureOptions& o) {
  StateDescription d;
  d.kind = StateKind::cat;
  d.cat = CatParams(kind == FigureKind::fig1 ? Parity::even : Parity::odd, beta);
  const BoundReport r = report(d, report_config(o));
  const QSupremum q = cat_qmax(d.cat);
  const double astar = std::abs(q.argmax.front().alpha.front().real());
  auto need = [&](const char* name) {
    const Bound* b = r.find(name);
    if (!b) throw NumericalError(std::string("figure: report lacks bound ") + name);
    return b->value;
  };
  std::vector<double> row = {beta, astar, need("q_lower"), need("q_upper"), need("sigma_beta"), need("sigma_alphastar")};
  if (kind == FigureKind::fig2) row.push_back(need("phase_randomized_alphastar_sq"));
  return row;
}

std::vector<double> mixture_row(double eta, const FigureOptions& o) {
  std::vector<double> row = {eta};
  std::vector<double> extra;
  for (int n = 1; n <= kMaxN; ++n) {
    StateDescription d;
    d.kind = StateKind::vacuum_number_mixture;
    d.n = n;
    d.eta = eta;
    ReportConfig cfg = report_config(o);
    if (!o.lp_columns) cfg.diag_rounds = -1;
    const BoundReport r = report(d, cfg);
    // Endpoints are pure states; their reports carry the exact value instead of the mixture bounds.
    row.push_back(value_or(r, "triangle_lower[term1]", r.best_lower));
    row.push_back(value_or(r, "convexity", r.best_upper));
    if (o.lp_columns) {
      double lp = r.best_upper;
      double dual = r.best_lower;
      for (const auto& b : r.uppers) {
        if (b.provenance == provenance::kDiagLp) lp = b.value;
      }
      for (const auto& b : r.lowers) {
        if (b.provenance == provenance::kDiagDual) dual = b.value;
      }
      extra.push_back(lp);
      extra.push_back(dual);
    }
  }
  row.insert(row.end(), extra.begin(), extra.end());
  return row;
}

std::vector<std::string> header_for(FigureKind kind, const FigureOptions& o) {
  if (kind == FigureKind::fig3) {
    std::vector<std::string> h = {"eta"};
    for (int n = 1; n <= kMaxN; ++n) {
      h.push_back("lb_" + std::to_string(n));
      h.push_back("ub_" + std::to_string(n));
    }
    if (o.lp_columns) {
      for (int n = 1; n <= kMaxN; ++n) {
        h.push_back("lp_" + std::to_string(n));
        h.push_back("dual_" + std::to_string(n));
      }
    }
    return h;
  }
  std::vector<std::string> h = {"beta", "alpha_star", "lb_q", "ub_q", "d_sigma_beta", "d_sigma_alphastar"};
  if (kind == FigureKind::fig2) h.push_back("d_phase_randomized");
  return h;
}

}  // namespace

FigureTable figure_table(FigureKind kind, const FigureOptions& options) {
  const std::vector<double> xs = sweep_for(kind, options).points();
  FigureTable t;
  t.header = header_for(kind, options);
  t.rows.resize(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    t.rows[i] = kind == FigureKind::fig3 ? mixture_row(xs[i], options) : cat_row(kind, xs[i], options);
  });
  return t;
}

std::string to_csv(const FigureTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, row[i], std::chars_format::general, 17);
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

std::string plot_script(FigureKind kind, const std::string& csv_name) {
  std::string body;
  switch (kind) {
    case FigureKind::fig1:
    case FigureKind::fig2: {
      const bool odd = kind == FigureKind::fig2;
      body = R"py(x = cols["beta"]
fig, ax = plt.subplots()
ax.plot(x, cols["lb_q"], "-", label="Q lower bound")
)py";
      if (!odd) body += "ax.plot(x, cols[\"ub_q\"], \":\", label=\"Q upper bound\")\n";
      body += R"py(ax.plot(x, cols["d_sigma_beta"], "--", label="D(psi, sigma_beta)")
ax.plot(x, cols["d_sigma_alphastar"], "-.", label="D(psi, sigma_alpha*)")
)py";
      if (odd) body += "ax.plot(x, cols[\"d_phase_randomized\"], \":\", label=\"D(psi, phase-randomized alpha*^2)\")\n";
      body += std::string(R"py(ax.set_xlabel("beta")
ax.set_ylabel("nonclassical distance bounds")
ax.set_title(")py") + (odd ? "odd" : "even") + R"py( coherent state")
ax.legend()
inset = ax.inset_axes([0.6, 0.15, 0.35, 0.3])
inset.plot(x, cols["alpha_star"])
inset.set_xlabel("beta")
inset.set_ylabel("alpha*")
)py";
      break;
    }
    case FigureKind::fig3:
      body = R"py(x = cols["eta"]
fig, ax = plt.subplots()
for n in range(1, 5):
    shade = str(0.2 * (n - 1))
    ax.plot(x, cols[f"lb_{n}"], "-", color=shade, label=f"lower n={n}")
    ax.plot(x, cols[f"ub_{n}"], "--", color=shade, label=f"upper n={n}")
ax.set_xlabel("eta")
ax.set_ylabel("nonclassical distance bounds")
ax.set_title("vacuum / number-state mixture")
ax.legend(ncol=2, fontsize="small")
)py";
      break;
  }
  return std::string(R"py(#!/usr/bin/env python3
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
csv_path = here / ")py") + csv_name + R"py("
with open(csv_path, newline="") as f:
    rows = list(csv.DictReader(f))
cols = {k: [float(r[k]) for r in rows] for k in rows[0]}

)py" + body + R"py(fig.savefig(csv_path.with_suffix(".png"), dpi=150)
)py";
}

}  // namespace ncdist
