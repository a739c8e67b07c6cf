// Copyright 2026 The tajpar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// tajpar command-line driver.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tajpar/annotate.h"
#include "tajpar/cfg.h"
#include "tajpar/exec.h"

namespace {

using namespace tajpar;

constexpr int kOk = 0;
constexpr int kIoFailure = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Program Load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseProgram(ss.str());
}

const FunctionDef& Entry(const Program& p) {
  if (!p.entry) throw UsageError("program has no entry function");
  return *p.FindFunction(*p.entry);
}

std::string Hex(uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void PrintReport(const LoopReport& r) {
  std::cout << r.function << "\t@" << r.header << "\t"
            << (r.parallel ? "parallel" : "rejected") << "\t"
            << StageName(r.stage) << "\t" << r.detail << "\n";
}

SolverConfig MakeSolverConfig(int64_t enum_bound, int64_t timeout) {
  SolverConfig cfg;
  cfg.enum_bound = enum_bound;
  cfg.timeout_millis = timeout;
  return cfg;
}

int Analyze(const std::string& file, const std::string& out,
            const SolverConfig& cfg, bool purity) {
  Program p = Load(file);
  ProgramResult r = AnalyzeAll(p, cfg);
  for (const LoopReport& rep : r.reports) PrintReport(rep);
  if (purity) {
    WholeProgram w = AnalyzeProgram(p);
    for (const auto& [sig, s] : w.purity) {
      std::cout << sig << " " << PurityLabel(s) << "\n";
    }
  }
  if (out.empty()) {
    std::cout << SerializeAnnotationMap(r.map) << "\n";
  } else {
    WriteAnnotationMap(r.map, out);
  }
  return kOk;
}

int Run(const std::string& file, const std::string& map_path,
        const std::string& args_path, int workers, int64_t step_limit,
        int loop, uint64_t seed) {
  Program p = Load(file);
  Inputs args = ReadInputs(args_path, Entry(p));
  ExecConfig cfg;
  cfg.step_limit = step_limit;
  RunResult r;
  if (loop >= 0) {
    if (!map_path.empty()) throw UsageError("--loop and --map are exclusive");
    r = RunShuffled(p, *p.entry, args, LoopTarget{*p.entry, loop}, seed, cfg);
  } else if (map_path.empty()) {
    r = Interpret(p, *p.entry, args, cfg);
  } else {
    r = RunParallel(p, *p.entry, args, ReadAnnotationMap(map_path), workers, cfg);
  }
  if (r.return_value) std::cout << "return " << *r.return_value << "\n";
  std::cout << "heapDigest " << Hex(r.heap_digest) << "\n";
  std::cout << "stepCount " << r.step_count << "\n";
  return kOk;
}

int Oracle(const std::string& file, const std::string& args_path,
           int64_t step_limit) {
  Program p = Load(file);
  Inputs args = ReadInputs(args_path, Entry(p));
  ExecConfig cfg;
  cfg.step_limit = step_limit;
  for (const auto& [sig, f] : p.functions) {
    Cfg g = BuildCfg(f);
    for (const NaturalLoop& l : FindNaturalLoops(g)) {
      if (!IsCanonical(l, f, g).info) continue;
      OracleResult o = ConflictOracle(p, *p.entry, args, {sig, l.header}, cfg);
      std::cout << sig << "\t@" << l.header << "\t";
      if (o.witness) {
        std::cout << "conflict\t" << o.witness->location << " written at "
                  << o.witness->iter_a << ", accessed at " << o.witness->iter_b;
      } else {
        std::cout << "none\t" << o.instances << " instance(s)";
      }
      std::cout << "\n";
    }
  }
  return kOk;
}

std::string FileName(const std::string& fn, int header) {
  std::string s;
  for (char c : fn) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s + "_loop" + std::to_string(header) + ".smt2";
}

int EmitSmt(const std::string& file, const std::string& dir,
            const SolverConfig& cfg) {
  Program p = Load(file);
  ProgramResult r = AnalyzeAll(p, cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir);
  for (const LoopReport& rep : r.reports) {
    if (!rep.formula) continue;
    const FunctionDef* f = p.FindFunction(rep.function);
    auto path = std::filesystem::path(dir) / FileName(f->name, rep.header);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << EmitSmtLib(*rep.formula);
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
    std::cout << path.string() << "\n";
  }
  return kOk;
}

int Report(const std::vector<std::string>& files, const SolverConfig& cfg) {
  std::cout << "name\tloops\tid\tanalysis_ms\tmap_bytes\n";
  for (const std::string& file : files) {
    Program p = Load(file);
    auto t0 = std::chrono::steady_clock::now();
    ProgramResult r = AnalyzeAll(p, cfg);
    auto t1 = std::chrono::steady_clock::now();
    size_t id = 0;
    for (const auto& [sig, list] : r.map) id += list.size();
    std::cout << std::filesystem::path(file).stem().string() << "\t"
              << r.reports.size() << "\t" << id << "\t"
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
              << "\t" << SerializeAnnotationMap(r.map).size() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop parallelism detector for TAJ programs"};
  app.require_subcommand(1);

  int64_t enum_bound = SolverConfig{}.enum_bound;
  int64_t timeout = SolverConfig{}.timeout_millis;
  int64_t step_limit = ExecConfig{}.step_limit;
  std::string file, out, map_path, args_path;
  std::vector<std::string> files;
  int workers = 1;
  int loop = -1;
  uint64_t seed = 1;
  bool purity = false;

  auto solver_flags = [&](CLI::App* c) {
    c->add_option("--enum-bound", enum_bound, "Nonlinear enumeration bound")
        ->check(CLI::PositiveNumber);
    c->add_option("--timeout-ms", timeout, "Per-formula solver timeout")
        ->check(CLI::PositiveNumber);
  };

  auto* analyze = app.add_subcommand("analyze", "Write the AnnotationMap");
  analyze->add_option("file", file)->required()->check(CLI::ExistingFile);
  analyze->add_option("-o", out, "AnnotationMap output path");
  analyze->add_flag("--purity", purity, "Also print one purity line per function");
  solver_flags(analyze);

  auto* run = app.add_subcommand("run", "Execute the entry function");
  run->add_option("file", file)->required()->check(CLI::ExistingFile);
  run->add_option("--map", map_path, "AnnotationMap; sequential if absent")
      ->check(CLI::ExistingFile);
  run->add_option("--args", args_path, "JSON argument vector")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers)->check(CLI::Range(1, 256));
  run->add_option("--step-limit", step_limit)->check(CLI::PositiveNumber);
  run->add_option("--loop", loop, "Run this entry loop in shuffled order")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "Shuffle seed for --loop");

  auto* oracle = app.add_subcommand("oracle", "Dynamic conflict check per loop");
  oracle->add_option("file", file)->required()->check(CLI::ExistingFile);
  oracle->add_option("--args", args_path, "JSON argument vector")->required()->check(CLI::ExistingFile);
  oracle->add_option("--step-limit", step_limit)->check(CLI::PositiveNumber);

  auto* emit = app.add_subcommand("emit-smt", "Write per-loop SMT-LIB2 formulas");
  emit->add_option("file", file)->required()->check(CLI::ExistingFile);
  emit->add_option("-o", out, "Output directory")->required();
  solver_flags(emit);

  auto* report = app.add_subcommand("report", "Per-file summary table");
  report->add_option("files", files)->required()->check(CLI::ExistingFile);
  solver_flags(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const SolverConfig cfg = MakeSolverConfig(enum_bound, timeout);
  try {
    if (*analyze) return Analyze(file, out, cfg, purity);
    if (*run) return Run(file, map_path, args_path, workers, step_limit, loop, seed);
    if (*oracle) return Oracle(file, args_path, step_limit);
    if (*emit) return EmitSmt(file, out, cfg);
    if (*report) return Report(files, cfg);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const RuntimeError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
