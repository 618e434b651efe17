// harness.hpp -- benchmark runner: solve single files, run corpora across
// strategies, emit per-benchmark CSV statistics.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lte/engine.hpp"

namespace lte {

struct BenchRecord {
  std::string file;      // base name, sanitized for CSV
  std::string strategy;  // eager | ematch | ematch-opt
  std::string verdict;   // sat | unsat | unknown | error
  std::uint64_t instances = 0;
  std::uint64_t eager_bound = 0;
  std::uint64_t rounds = 0;
  std::uint64_t ground_checks = 0;
  double wall_ms = 0.0;
};

// Mode presets: "eager", "ematch" (baseline incremental), "ematch-opt"
// (incremental + staged Psi + special-case-first + automatic equality
// splits). Throws Error for unknown names.
SolveOptions options_for_mode(const std::string& mode);

// parse + prepare + decide.
Verdict solve_file(const std::string& path, const SolveOptions& opts);

struct BenchOptions {
  std::vector<std::string> modes;
  std::string backend_cmd;
  std::optional<std::chrono::milliseconds> timeout;
  bool check_agreement = true;  // cross-mode verdict agreement per file
  int jobs = 1;                 // parallel workers, one file at a time each
};

// One record per (file, mode); files in lexicographic name order, modes in
// the given order. Unreadable or malformed files yield `error` records and
// the run continues.
std::vector<BenchRecord> bench_dir(const std::string& dir,
                                   const BenchOptions& opts);

// Header: file,strategy,verdict,instances,eager_bound,rounds,ground_checks,wall_ms
std::string to_csv(std::span<const BenchRecord> records);

// Writes the bundled corpus (paper examples and synthetic families) into
// `dir`. Deterministic content.
void write_corpus(const std::string& dir);

}  // namespace lte
