// ncdist: bound reports, figure sweeps, the acceptance suite and Husimi suprema from the command line.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input (schema, JSON or arguments),
// 3 truncation too small, 4 numerical failure, 5 file I/O.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "ncdist/acceptance.hpp"
#include "ncdist/bounds.hpp"
#include "ncdist/figures.hpp"
#include "ncdist/state_io.hpp"

namespace {

using namespace ncdist;

enum ExitCode { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kTruncation = 3, kNumerical = 4, kFileIo = 5 };

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  int trunc = 0;
  double tail_tol = kDefaultTailTol;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--trunc", f.trunc, "Uniform per-mode photon cutoff (default: automatic)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tail-tol", f.tail_tol, "Neglected probability mass per state")->check(CLI::Range(0.0, 0.5));
  cmd->add_option("--seed", f.seed, "Multistart seed");
  cmd->add_option("--out", f.out, "Output path (default: standard output)");
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path);
  out << text;
  out.close();
  if (!out) throw FileError("write failed for " + path);
}

ReportConfig report_config(const CommonFlags& f) {
  ReportConfig cfg;
  cfg.cutoff = f.trunc;
  cfg.tail_tol = f.tail_tol;
  cfg.qsup.seed = f.seed;
  return cfg;
}

int cmd_report(const std::string& path, const CommonFlags& f) {
  const StateDescription d = parse_state_description(read_input(path));
  write_output(f.out, report(d, report_config(f)).to_json().dump(2) + "\n");
  return kOk;
}

int cmd_qsup(const std::string& path, const CommonFlags& f) {
  const StateDescription d = parse_state_description(read_input(path));
  const TruncationSpec trunc = f.trunc > 0 ? TruncationSpec::uniform(d.modes(), f.trunc, f.tail_tol) : truncation_for(d, f.tail_tol);
  QSupOptions opts;
  opts.seed = f.seed;
  nlohmann::json j = qsup_json(q_sup(density(d, trunc), {}, opts));
  if (const auto analytic = analytic_qsup(d)) j["analytic"] = qsup_json(*analytic);
  write_output(f.out, j.dump(2) + "\n");
  return kOk;
}

struct FigureFlags {
  std::optional<double> from;
  std::optional<double> to;
  std::optional<int> steps;
  bool no_lp = false;
  bool no_script = false;
};

int cmd_figure(const std::string& which, const CommonFlags& f, const FigureFlags& ff) {
  const FigureKind kind = parse_figure_kind(which);
  FigureOptions o;
  o.from = ff.from;
  o.to = ff.to;
  o.steps = ff.steps;
  o.tail_tol = f.tail_tol;
  o.cutoff = f.trunc;
  o.seed = f.seed;
  o.lp_columns = !ff.no_lp;
  const std::string out = f.out.empty() ? std::string(to_string(kind)) + ".csv" : f.out;
  write_output(out, to_csv(figure_table(kind, o)));
  if (out != "-" && !ff.no_script) {
    const std::filesystem::path csv(out);
    std::filesystem::path script = csv;
    script.replace_extension(".py");
    write_output(script.string(), plot_script(kind, csv.filename().string()));
    std::fprintf(stderr, "wrote %s and %s\n", out.c_str(), script.string().c_str());
  }
  return kOk;
}

int cmd_verify(const std::vector<std::string>& only, std::uint64_t seed, bool verbose) {
  AcceptanceOptions o;
  o.only = {only.begin(), only.end()};
  o.seed = seed;
  o.on_group = [verbose](const std::string&, const std::vector<CheckResult>& results) {
    for (const auto& r : results) {
      if (verbose || !r.passed) std::printf("%s\n", check_line(r).c_str());
    }
    std::fflush(stdout);
  };
  const auto summaries = summarize(run_acceptance(o));
  std::printf("\n");
  bool ok = true;
  for (const auto& s : summaries) {
    std::printf("%s\n", summary_line(s).c_str());
    ok = ok && s.ok();
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on the nonclassical distance of quantum-optical states"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string state_path;
  auto* report_cmd = app.add_subcommand("report", "Print the bound report of a JSON state description");
  report_cmd->add_option("state", state_path, "State description file ('-' for standard input)")->required();
  add_common(report_cmd, common);

  auto* qsup_cmd = app.add_subcommand("qsup", "Print the Husimi supremum of a JSON state description");
  qsup_cmd->add_option("state", state_path, "State description file ('-' for standard input)")->required();
  add_common(qsup_cmd, common);

  std::string which;
  FigureFlags ff;
  auto* figure_cmd = app.add_subcommand("figure", "Write a figure sweep as CSV plus a plotting script");
  figure_cmd->add_option("which", which, "fig1, fig2 or fig3")->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  add_common(figure_cmd, common);
  figure_cmd->add_option("--from", ff.from, "Sweep start");
  figure_cmd->add_option("--to", ff.to, "Sweep end");
  figure_cmd->add_option("--steps", ff.steps, "Number of sweep points")->check(CLI::Range(2, 100000));
  figure_cmd->add_flag("--no-lp", ff.no_lp, "fig3: omit the number-diagonal LP columns");
  figure_cmd->add_flag("--no-script", ff.no_script, "Do not write the plotting script");

  std::vector<std::string> only;
  bool verbose = false;
  std::uint64_t verify_seed = kDefaultSeed;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--only", only, "Restrict to these groups")->check(CLI::IsMember(acceptance_groups()));
  verify_cmd->add_option("--seed", verify_seed, "Seed for random corpora and multistart");
  verify_cmd->add_flag("-v,--verbose", verbose, "Print passing checks too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*report_cmd) return cmd_report(state_path, common);
    if (*qsup_cmd) return cmd_qsup(state_path, common);
    if (*figure_cmd) return cmd_figure(which, common, ff);
    if (*verify_cmd) return cmd_verify(only, verify_seed, verbose);
  } catch (const FileError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFileIo;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "schema error at %s\n", e.what());
    return kBadInput;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kBadInput;
  } catch (const TruncationTooSmall& e) {
    std::string hint;
    for (int c : e.sufficient_cutoffs()) hint += (hint.empty() ? "" : ",") + std::to_string(c);
    std::fprintf(stderr, "truncation too small: %s%s%s\n", e.what(), hint.empty() ? "" : "; sufficient cutoffs: ", hint.c_str());
    return kTruncation;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "invalid JSON: %s\n", e.what());
    return kBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFileIo;
  }
  return kBadInput;
}
