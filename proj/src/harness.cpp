#include "lte/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lte/frontend.hpp"
#include "lte/preprocess.hpp"

namespace lte {

namespace fs = std::filesystem;

SolveOptions options_for_mode(const std::string& mode) {
  SolveOptions opts;
  if (mode == "eager") {
    opts.mode = SolveOptions::Mode::eager;
  } else if (mode == "ematch") {
    opts.mode = SolveOptions::Mode::ematch;
  } else if (mode == "ematch-opt") {
    opts.mode = SolveOptions::Mode::ematch;
    opts.staged_psi = true;
    opts.special_case = true;
    opts.eq_split_auto = true;
  } else {
    throw Error("unknown mode '" + mode +
                "' (expected eager, ematch or ematch-opt)");
  }
  return opts;
}

Verdict solve_file(const std::string& path, const SolveOptions& opts) {
  Problem problem = parse_file(path);
  PreparedProblem prep = prepare(std::move(problem));
  Solver solver(prep, opts);
  return solver.decide();
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '"' || c == '\n') c = '_';
  return s;
}

BenchRecord record_of(const std::string& name, const std::string& mode,
                      const Verdict& v) {
  BenchRecord r;
  r.file = sanitize(name);
  r.strategy = mode;
  r.verdict = to_string(v.status);
  r.instances = v.stats.instances;
  r.eager_bound = v.stats.eager_bound;
  r.rounds = v.stats.rounds;
  r.ground_checks = v.stats.ground_checks;
  r.wall_ms = v.stats.wall_ms;
  return r;
}

}  // namespace

std::vector<BenchRecord> bench_dir(const std::string& dir,
                                   const BenchOptions& opts) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.size() > 9 && name.ends_with(".lte.smt2")) files.push_back(name);
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<BenchRecord>> per_file(files.size());
  std::atomic<std::size_t> next{0};

  auto run_file = [&](std::size_t fi) {
    const std::string& name = files[fi];
    std::string path = (fs::path(dir) / name).string();
    std::vector<BenchRecord>& rows = per_file[fi];
    for (const std::string& mode : opts.modes) {
      BenchRecord r;
      try {
        SolveOptions so = options_for_mode(mode);
        so.backend_cmd = opts.backend_cmd;
        so.timeout = opts.timeout;
        Verdict v = solve_file(path, so);
        r = record_of(name, mode, v);
        if (v.stats.instances > v.stats.eager_bound)
          throw InternalError("instances exceed eager bound on " + name);
      } catch (const Error& e) {
        r.file = sanitize(name);
        r.strategy = mode;
        r.verdict = "error";
        (void)e;
      }
      rows.push_back(std::move(r));
    }
    if (opts.check_agreement) {
      std::string agreed;
      for (const BenchRecord& r : rows) {
        if (r.verdict != "sat" && r.verdict != "unsat") continue;
        if (agreed.empty()) agreed = r.verdict;
        if (r.verdict != agreed)
          throw Error("cross-mode verdict disagreement on " + name);
      }
    }
  };

  int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < files.size(); ++i) run_file(i);
  } else {
    std::vector<std::thread> workers;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&]() {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= files.size()) return;
          try {
            run_file(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<BenchRecord> out;
  for (auto& rows : per_file)
    for (BenchRecord& r : rows) out.push_back(std::move(r));
  return out;
}

std::string to_csv(std::span<const BenchRecord> records) {
  std::ostringstream os;
  os << "file,strategy,verdict,instances,eager_bound,rounds,ground_checks,"
        "wall_ms\n";
  for (const BenchRecord& r : records) {
    os << r.file << "," << r.strategy << "," << r.verdict << "," << r.instances
       << "," << r.eager_bound << "," << r.rounds << "," << r.ground_checks
       << "," << static_cast<std::uint64_t>(r.wall_ms) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Bundled corpus

namespace {

std::string mono_chain(int n) {
  std::ostringstream os;
  os << "(set-logic UF)\n(declare-sort S 0)\n"
     << "(declare-fun le (S S) Bool)\n"
     << "(declare-fun f (S) S :extension)\n";
  for (int i = 1; i <= n; ++i) os << "(declare-fun c" << i << " () S)\n";
  for (int i = 1; i < n; ++i)
    os << "(assert (le c" << i << " c" << i + 1 << "))\n";
  for (int i = 1; i < n; ++i)
    os << "(assert (le (f c" << i << ") (f c" << i + 1 << ")))\n";
  if (n == 1) os << "(assert (le (f c1) (f c1)))\n";
  os << "(assert (forall ((x S) (y S)) (=> (le x y) (le (f x) (f y)))))\n"
     << "(check-sat)\n";
  return os.str();
}

std::string inj_chain(int n, bool unsat) {
  std::ostringstream os;
  os << "(set-logic UF)\n(declare-sort S 0)\n"
     << "(declare-fun f (S) S :extension)\n"
     << "(declare-fun g (S) S :extension)\n";
  for (int i = 1; i <= n; ++i) os << "(declare-fun a" << i << " () S)\n";
  for (int i = 1; i < n; ++i)
    os << "(assert (= (f a" << i << ") (f a" << i + 1 << ")))\n";
  if (unsat) os << "(assert (not (= a1 a" << n << ")))\n";
  os << "(assert (forall ((x S) (y S)) (=> (= (f x) y) (= (g y) x))))\n"
     << "(declare-psi-rule ((t S)) (g (f t)))\n"
     << "(check-sat)\n";
  return os.str();
}

std::string epr_order(int n, bool unsat) {
  std::ostringstream os;
  os << "(set-logic UF)\n(declare-sort S 0)\n"
     << "(declare-fun le (S S) Bool)\n";
  for (int i = 1; i <= n; ++i) os << "(declare-fun c" << i << " () S)\n";
  for (int i = 1; i < n; ++i)
    os << "(assert (le c" << i << " c" << i + 1 << "))\n";
  if (unsat)
    os << "(assert (le c2 c1))\n(assert (not (= c1 c2)))\n";
  else
    os << "(assert (not (= c1 c" << n << ")))\n";
  os << "(assert (forall ((x S) (y S)) (or (le x y) (le y x))))\n"
     << "(assert (forall ((x S) (y S)) (or (not (le x y)) (not (le y x)) "
        "(= x y))))\n"
     << "(check-sat)\n";
  return os.str();
}

std::string paper_monotone() {
  return "(set-logic UFLIA)\n"
         "(declare-fun a () Int)\n"
         "(declare-fun b () Int)\n"
         "(declare-fun f (Int) Int :extension)\n"
         "(assert (= (+ a b) 1))\n"
         "(assert (= (+ (f a) (f b)) 0))\n"
         "(assert (forall ((x Int) (y Int)) (=> (<= x y) (<= (f x) (f y)))))\n"
         "(check-sat)\n";
}

std::string paper_injective(bool with_rule) {
  std::string s =
      "(set-logic UF)\n"
      "(declare-sort S 0)\n"
      "(declare-fun f (S) S :extension)\n"
      "(declare-fun g (S) S :extension)\n"
      "(declare-fun a () S)\n"
      "(declare-fun b () S)\n"
      "(assert (= (f a) (f b)))\n"
      "(assert (not (= a b)))\n"
      "(assert (forall ((x S) (y S)) (=> (= (f x) y) (= (g y) x))))\n";
  if (with_rule) s += "(declare-psi-rule ((t S)) (g (f t)))\n";
  s += "(check-sat)\n";
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void write_corpus(const std::string& dir) {
  fs::create_directories(dir);
  fs::path base(dir);
  write_text(base / "paper_monotone.lte.smt2", paper_monotone());
  write_text(base / "paper_injective.lte.smt2", paper_injective(true));
  write_text(base / "paper_injective_norule.lte.smt2", paper_injective(false));
  for (int n : {2, 4, 8, 16, 32}) {
    std::ostringstream name;
    name << "mono_chain_" << (n < 10 ? "0" : "") << n << ".lte.smt2";
    write_text(base / name.str(), mono_chain(n));
  }
  write_text(base / "inj_chain_03_unsat.lte.smt2", inj_chain(3, true));
  write_text(base / "inj_chain_03_sat.lte.smt2", inj_chain(3, false));
  write_text(base / "inj_chain_05_unsat.lte.smt2", inj_chain(5, true));
  write_text(base / "epr_order_04_sat.lte.smt2", epr_order(4, false));
  write_text(base / "epr_order_04_unsat.lte.smt2", epr_order(4, true));
}

}  // namespace lte
