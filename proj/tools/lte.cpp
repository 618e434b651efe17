// lte -- decision engine for ground satisfiability modulo local (and
// Psi-local) theory extensions.
//
//   lte solve FILE [--mode M] [--stage-psi] [--eq-split SPEC]
//             [--special-case] [--backend CMD] [--export-epr PATH]
//             [--timeout MS]
//   lte bench DIR --modes LIST --out CSV [...]
//   lte gen DIR

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lte/engine.hpp"
#include "lte/frontend.hpp"
#include "lte/harness.hpp"
#include "lte/preprocess.hpp"

namespace {

int run_solve(const std::string& file, const std::string& mode, bool stage_psi,
              bool special_case, const std::string& eq_split,
              const std::string& backend, const std::string& export_epr,
              bool force, long timeout_ms) {
  lte::SolveOptions opts = lte::options_for_mode(mode);
  if (stage_psi) opts.staged_psi = true;
  if (special_case) opts.special_case = true;
  if (!eq_split.empty()) {
    if (eq_split == "auto") {
      opts.eq_split_auto = true;
    } else {
      std::stringstream ss(eq_split);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto sep = item.find('=');
        if (sep == std::string::npos || sep == 0 || sep + 1 == item.size())
          throw lte::Error("bad --eq-split entry '" + item +
                           "' (expected a=b or auto)");
        opts.eq_split_pairs.emplace_back(item.substr(0, sep),
                                         item.substr(sep + 1));
      }
    }
  }
  opts.backend_cmd = backend;
  if (timeout_ms > 0) opts.timeout = std::chrono::milliseconds(timeout_ms);

  lte::Problem problem = lte::parse_file(file);
  lte::PreparedProblem prep = lte::prepare(std::move(problem));

  if (!export_epr.empty()) {
    lte::EprExport exp = lte::epr_export(prep, force);
    if (!exp.ok) {
      std::cerr << "EPR export refused:\n";
      for (const std::string& line : exp.report)
        std::cerr << "  " << line << "\n";
      std::cerr << "(use --force to export anyway)\n";
      return 1;
    }
    std::ofstream out(export_epr, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << export_epr << "'\n";
      return 1;
    }
    out << exp.text;
  }

  lte::Solver solver(prep, opts);
  lte::Verdict v = solver.decide();
  std::cout << lte::to_string(v.status) << ", instances=" << v.stats.instances
            << ", eager_bound=" << v.stats.eager_bound
            << ", rounds=" << v.stats.rounds
            << ", ground_checks=" << v.stats.ground_checks
            << ", wall_ms=" << static_cast<std::uint64_t>(v.stats.wall_ms)
            << "\n";
  if (v.status == lte::Status::unknown) {
    std::cerr << "unknown: " << v.reason << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision engine for local theory extensions"};
  app.require_subcommand(1);

  // solve
  std::string file, mode = "ematch", eq_split, backend, export_epr;
  bool stage_psi = false, special_case = false, force = false;
  long timeout_ms = 0;
  CLI::App* solve = app.add_subcommand("solve", "solve a single problem file");
  solve->add_option("file", file, "input problem (.lte.smt2)")->required();
  solve->add_option("--mode", mode, "eager | ematch | ematch-opt");
  solve->add_flag("--stage-psi", stage_psi, "stage Psi-term instantiation");
  solve->add_flag("--special-case", special_case,
                  "variable-identified instances first");
  solve->add_option("--eq-split", eq_split,
                    "equality splits: 'auto' or 'a=b,c=d'");
  solve->add_option("--backend", backend,
                    "external ground solver command ({file} placeholder)");
  solve->add_option("--export-epr", export_epr,
                    "write the EPR partial instantiation to PATH");
  solve->add_flag("--force", force, "export even if not EPR-reducible");
  solve->add_option("--timeout", timeout_ms, "per-run timeout in ms");

  // bench
  std::string dir, modes_list = "eager,ematch", out_csv;
  long bench_timeout_ms = 0;
  int jobs = 1;
  bool no_agreement = false;
  std::string bench_backend;
  CLI::App* bench = app.add_subcommand("bench", "run a corpus across modes");
  bench->add_option("dir", dir, "directory of .lte.smt2 files")->required();
  bench->add_option("--modes", modes_list, "comma-separated mode list")
      ->required();
  bench->add_option("--out", out_csv, "output CSV path")->required();
  bench->add_option("--backend", bench_backend, "external solver command");
  bench->add_option("--timeout", bench_timeout_ms, "per-run timeout in ms");
  bench->add_option("--jobs", jobs, "parallel workers");
  bench->add_flag("--no-agreement-check", no_agreement,
                  "disable cross-mode verdict assertion");

  // gen
  std::string gen_dir;
  CLI::App* gen = app.add_subcommand("gen", "write the bundled corpus");
  gen->add_option("dir", gen_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(file, mode, stage_psi, special_case, eq_split, backend,
                       export_epr, force, timeout_ms);
    if (bench->parsed()) {
      lte::BenchOptions opts;
      std::stringstream ss(modes_list);
      std::string m;
      while (std::getline(ss, m, ','))
        if (!m.empty()) opts.modes.push_back(m);
      if (opts.modes.empty()) throw lte::Error("--modes is empty");
      opts.backend_cmd = bench_backend;
      if (bench_timeout_ms > 0)
        opts.timeout = std::chrono::milliseconds(bench_timeout_ms);
      opts.jobs = jobs;
      opts.check_agreement = !no_agreement;
      std::vector<lte::BenchRecord> records = lte::bench_dir(dir, opts);
      std::string csv = lte::to_csv(records);
      std::ofstream out(out_csv, std::ios::binary);
      if (!out) throw lte::Error("cannot write '" + out_csv + "'");
      out << csv;
      std::cout << records.size() << " rows -> " << out_csv << "\n";
      return 0;
    }
    if (gen->parsed()) {
      lte::write_corpus(gen_dir);
      std::cout << "corpus written to " << gen_dir << "\n";
      return 0;
    }
  } catch (const lte::ParseError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
