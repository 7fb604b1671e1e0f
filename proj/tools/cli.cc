// Copyright 2026 The Pickleward Authors
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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pickleward/container.h"
#include "pickleward/dump.h"
#include "pickleward/error.h"
#include "pickleward/opcodes.h"
#include "pickleward/policy.h"
#include "pickleward/policy_gen.h"
#include "pickleward/source_index.h"
#include "pickleward/tracer.h"
#include "pickleward/vm.h"

namespace pickleward::cli {
namespace {

inline constexpr char kLoadSchema[] = "pickleward-load/1";

struct Options {
  std::vector<std::string> files;
  std::optional<std::string> member;
  std::string format = "text";
  std::string denylist;
  std::string library;
  std::string package;
  std::string root_class;
  std::vector<std::string> cache_dirs;
  std::vector<std::string> user_cache_dirs;
  std::string output;
  std::string policy;
  bool strict = false;
  std::string dump;
  std::string name;
  int iterations = 5;
};

// Output of one file in a multi-file command.
struct FileResult {
  std::string out;
  std::string err;
  int status = kOk;
};

OpcodeStream ReadStream(const std::string& file, const std::optional<std::string>& member) {
  return Parse(ReadPickleFile(file, member).bytes);
}

std::string Describe(const Error& e) {
  std::string s = std::string(ErrorCodeName(e.code()));
  if (!e.subject().empty()) s += " " + e.subject();
  if (e.offset()) s += " at offset " + std::to_string(*e.offset());
  return s + ": " + e.what();
}

// Runs `job` over every file on a small thread pool; results keep input order.
std::vector<FileResult> ForEachFile(const std::vector<std::string>& files,
                                    const std::function<FileResult(const std::string&)>& job) {
  std::vector<FileResult> results(files.size());
  std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(files.size(), std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        results[i] = job(files[i]);
      } catch (const Error& e) {
        results[i] = FileResult{"", files[i] + ": " + Describe(e) + "\n", kUsage};
      } catch (const std::exception& e) {
        results[i] = FileResult{"", files[i] + ": " + e.what() + "\n", kUsage};
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return results;
}

int Disassemble(const Options& o, std::ostream& out) {
  out << pickleward::Disassemble(ReadStream(o.files.at(0), o.member));
  return kOk;
}

int TraceFiles(const Options& o, std::ostream& out, std::ostream& err) {
  bool many = o.files.size() > 1;
  bool json = o.format == "structured";
  auto results = ForEachFile(o.files, [&](const std::string& file) {
    TraceReport report = Trace(ReadStream(file, o.member));
    FileResult r;
    if (json) {
      r.out = FormatTraceJson(report, file);
    } else {
      r.out = (many ? "== " + file + "\n" : "") + FormatTraceText(report);
    }
    return r;
  });
  int status = kOk;
  std::vector<std::string> docs;
  for (const auto& r : results) {
    err << r.err;
    status = std::max(status, r.status);
    if (r.status != kOk) continue;
    if (json) {
      docs.push_back(r.out);
    } else {
      out << r.out;
    }
  }
  if (json) {
    if (!many) {
      for (const auto& d : docs) out << d;
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& d : docs) arr.push_back(nlohmann::json::parse(d));
      out << arr.dump(2) << "\n";
    }
  }
  return status;
}

int ScanFiles(const Options& o, std::ostream& out, std::ostream& err) {
  Denylist denylist = o.denylist.empty() ? Denylist::Default() : ReadDenylist(o.denylist);
  auto results = ForEachFile(o.files, [&](const std::string& file) {
    ScanVerdict v = Scan(ReadStream(file, o.member), denylist);
    FileResult r;
    if (v.flagged) {
      r.status = kFlagged;
      r.out = file + ": flagged:";
      for (const auto& n : v.names) r.out += " " + n;
      r.out += "\n";
    } else {
      r.out = file + ": clean\n";
    }
    return r;
  });
  bool flagged = false;
  bool failed = false;
  for (const auto& r : results) {
    out << r.out;
    err << r.err;
    flagged |= r.status == kFlagged;
    failed |= r.status == kUsage;
  }
  return flagged ? kFlagged : failed ? kUsage : kOk;
}

ClassCache BuildCache(const Options& o) {
  ClassCache cache = ClassCache::WithBuiltins();
  std::vector<std::string> vendored = o.cache_dirs;
  if (vendored.empty()) {
    if (const char* env = std::getenv("PICKLEWARD_CACHE"); env && *env) vendored.emplace_back(env);
  }
  for (const auto& dir : vendored) cache.LoadDirectory(dir, CacheOrigin::kVendored);
  for (const auto& dir : o.user_cache_dirs) cache.LoadDirectory(dir, CacheOrigin::kUserSupplied);
  return cache;
}

int GenPolicy(const Options& o, std::ostream& out, std::ostream& err) {
  ModuleIndex index = ModuleIndex::Build(o.library, o.package);
  Policy policy = Generate(index, BuildCache(o), o.root_class);
  for (const auto& w : policy.data().warnings) err << "warning: " << w << "\n";
  if (o.output == "-") {
    out << ToJson(policy);
  } else {
    WritePolicy(policy, o.output);
    out << "wrote " << o.output << ": " << policy.allowed_imports().size() << " imports, "
        << policy.allowed_invocations().size() << " invocations, " << policy.data().warnings.size()
        << " warnings\n";
  }
  return kOk;
}

nlohmann::json TraceJson(const ExecutionTrace& trace) {
  auto events = [](const std::vector<TraceEvent>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : list) arr.push_back({{"name", e.name}, {"offset", e.offset}});
    return arr;
  };
  nlohmann::json tainted = nlohmann::json::array();
  for (const auto& t : trace.tainted_builds) {
    tainted.push_back({{"callable", t.callable}, {"attribute", t.attribute}, {"offset", t.offset}});
  }
  return {{"imports", events(trace.imports)},   {"invocations", events(trace.invocations)},
          {"allocations", events(trace.allocations)}, {"stubs", events(trace.stubs)},
          {"tainted_builds", tainted}};
}

int Load(const Options& o, std::ostream& out, std::ostream& err) {
  Policy policy = ReadPolicy(o.policy);
  const std::string& file = o.files.at(0);
  OpcodeStream stream = ReadStream(file, o.member);
  bool json = o.format == "structured";
  nlohmann::json doc = {{"schema", kLoadSchema}, {"source", file}};
  Vm vm(VmConfig::Restricted(std::move(policy)));
  auto report = [&](int status, const std::string& text) {
    if (json) {
      doc["exit_code"] = status;
      doc["trace"] = TraceJson(vm.trace());
      out << doc.dump(2) << "\n";
    } else {
      (status == kOk ? out : err) << text;
    }
    return status;
  };
  VmOutcome outcome;
  try {
    outcome = vm.Run(stream);
  } catch (const Error& e) {
    bool security = IsSecurityViolation(e.code());
    doc["status"] = security ? "blocked" : "error";
    doc["error"] = {{"code", ErrorCodeName(e.code())}, {"subject", e.subject()}, {"message", e.what()}};
    if (e.offset()) doc["error"]["offset"] = *e.offset();
    int status = security ? kSecurityViolation : kUsage;
    return report(status, std::string(security ? "blocked: " : "error: ") + Describe(e) + "\n");
  }
  std::vector<StubEntry> stubs = ListStubs(outcome.graph, outcome.root);
  nlohmann::json stub_list = nlohmann::json::array();
  for (const auto& s : stubs) stub_list.push_back({{"name", s.name}, {"path", s.path}});
  doc["stubs"] = stub_list;
  std::string stub_text;
  for (const auto& s : stubs) stub_text += "  stub " + s.name + " at " + (s.path.empty() ? "<root>" : s.path) + "\n";
  if (o.strict && !stubs.empty()) {
    doc["status"] = "stubs-present";
    return report(kStubsPresent, "rejected: " + std::to_string(stubs.size()) + " stub(s) reachable in strict mode\n" + stub_text);
  }
  if (!o.dump.empty()) {
    std::ofstream f(o.dump, std::ios::binary | std::ios::trunc);
    f << CanonicalDump(outcome.graph, outcome.root);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + o.dump);
  }
  doc["status"] = "loaded";
  doc["opcodes"] = outcome.stats.opcodes;
  return report(kOk, "loaded: " + std::to_string(outcome.stats.opcodes) + " opcodes, " +
                         std::to_string(stubs.size()) + " stub(s)\n" + stub_text);
}

int ExplainName(const Options& o, std::ostream& out) {
  out << FormatChain(Explain(ReadPolicy(o.policy), o.name));
  return kOk;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

int Bench(const Options& o, std::ostream& out, std::ostream& err) {
  auto policy = std::make_shared<const Policy>(ReadPolicy(o.policy));
  OpcodeStream stream = ReadStream(o.files.at(0), o.member);
  VmConfig restricted = VmConfig::Restricted(policy);
  VmConfig unrestricted = VmConfig::Unrestricted();
  auto time = [&](const VmConfig& config) {
    auto start = std::chrono::steady_clock::now();
    VmOutcome result = Execute(stream, config);
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
  };
  try {
    time(restricted);  // warm-up, and surfaces violations
    time(unrestricted);
  } catch (const Error& e) {
    err << "blocked: " << Describe(e) << "\n";
    return IsSecurityViolation(e.code()) ? kSecurityViolation : kUsage;
  }
  std::vector<double> r;
  std::vector<double> u;
  for (int i = 0; i < o.iterations; ++i) {
    if (i % 2 == 0) {
      u.push_back(time(unrestricted));
      r.push_back(time(restricted));
    } else {
      r.push_back(time(restricted));
      u.push_back(time(unrestricted));
    }
  }
  double mu = Median(u);
  double mr = Median(r);
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << "file: " << o.files.at(0) << "\n"
    << "opcodes: " << stream.opcodes.size() << "\n"
    << "iterations: " << o.iterations << "\n"
    << "unrestricted_median_ms: " << mu << "\n"
    << "restricted_median_ms: " << mr << "\n"
    << "overhead_percent: " << (mu > 0 ? (mr - mu) / mu * 100.0 : 0.0) << "\n";
  out << s.str();
  return kOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"pickleward: pickle analysis and policy-enforcing loading"};
  app.name("pickleward");
  app.require_subcommand(1, 1);

  auto* dis = app.add_subcommand("disassemble", "Print the opcode listing of a pickle");
  dis->add_option("file", o.files, "Pickle or ZIP checkpoint")->required()->expected(1)->check(CLI::ExistingFile);

  auto* trace = app.add_subcommand("trace", "Statically list imports and invocations");
  trace->add_option("files", o.files, "Pickles or ZIP checkpoints")->required()->check(CLI::ExistingFile);
  trace->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}));

  auto* scan = app.add_subcommand("scan", "Denylist scan; exit 3 when flagged");
  scan->add_option("files", o.files, "Pickles or ZIP checkpoints")->required()->check(CLI::ExistingFile);
  scan->add_option("--denylist", o.denylist, "Denylist JSON (default: built-in list)")->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("gen-policy", "Generate a loading policy from library source");
  gen->add_option("--library", o.library, "Library source directory")->required();
  gen->add_option("--package", o.package, "Top-level package name")->required();
  gen->add_option("--class", o.root_class, "Qualified name of the model class")->required();
  gen->add_option("--cache", o.cache_dirs, "Vendored class cache directory (default: $PICKLEWARD_CACHE)");
  gen->add_option("--user-cache", o.user_cache_dirs, "User class cache directory, preferred over vendored");
  gen->add_option("-o,--output", o.output, "Policy file to write, or - for stdout")->required();

  auto* load = app.add_subcommand("load", "Load a pickle in the restricted VM");
  load->add_option("file", o.files, "Pickle or ZIP checkpoint")->required()->expected(1)->check(CLI::ExistingFile);
  load->add_option("--policy", o.policy, "Policy JSON")->required()->check(CLI::ExistingFile);
  load->add_flag("--strict", o.strict, "Fail when stubs are reachable (exit 5)");
  load->add_option("--dump", o.dump, "Write the canonical dump here");
  load->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}));

  auto* explain = app.add_subcommand("explain", "Show how a name entered a generated policy");
  explain->add_option("--policy", o.policy, "Policy JSON")->required()->check(CLI::ExistingFile);
  explain->add_option("--name", o.name, "Qualified name")->required();

  auto* bench = app.add_subcommand("bench", "Compare restricted and unrestricted VM time");
  bench->add_option("file", o.files, "Pickle or ZIP checkpoint")->required()->expected(1)->check(CLI::ExistingFile);
  bench->add_option("--policy", o.policy, "Policy JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--iterations", o.iterations, "Timed runs per mode")->check(CLI::PositiveNumber);

  for (auto* sub : {dis, trace, scan, load, bench}) {
    sub->add_option("--member", o.member, "ZIP member holding the pickle");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (dis->parsed()) return Disassemble(o, out);
    if (trace->parsed()) return TraceFiles(o, out, err);
    if (scan->parsed()) return ScanFiles(o, out, err);
    if (gen->parsed()) return GenPolicy(o, out, err);
    if (load->parsed()) return Load(o, out, err);
    if (explain->parsed()) return ExplainName(o, out);
    if (bench->parsed()) return Bench(o, out, err);
  } catch (const Error& e) {
    err << "error: " << Describe(e) << "\n";
    return IsSecurityViolation(e.code()) ? kSecurityViolation : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pickleward::cli
