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

// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cli.h"
#include "pickleward/dump.h"
#include "pickleward/error.h"
#include "pickleward/opcodes.h"
#include "pickleward/policy.h"
#include "pickleward/policy_gen.h"
#include "pickleward/tracer.h"
#include "pickleward/vm.h"
#include "support/corpus.h"
#include "support/oracles.h"

namespace pickleward {
namespace {

namespace fs = std::filesystem;
using testing::CorpusEntry;
using testing::EntryBytes;
using testing::EntryStream;
using testing::LoadCorpus;
using testing::ReadText;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

// Collects failures; the first few are reported on the criterion line.
class Check {
 public:
  void Fail(const std::string& what) {
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void Expect(bool ok, const std::string& what) {
    if (!ok) Fail(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string Summary() const {
    return std::to_string(failures_) + " failure(s): " + notes_ + (failures_ > 3 ? "; ..." : "");
  }

 private:
  int failures_ = 0;
  std::string notes_;
};

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failed = 0;

void Report(const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("unexpected exception: ") + e.what()};
  }
  if (!o.pass) ++g_failed;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
}

const std::map<std::string, Policy>& GeneratedPolicies() {
  static const std::map<std::string, Policy> policies = [] {
    std::map<std::string, Policy> out;
    ClassCache cache = testing::VendoredCache();
    for (const auto& lib : LoadCorpus().libraries) {
      out.emplace(lib.name, Generate(testing::LibraryIndex(lib.name), cache, lib.root_class));
    }
    return out;
  }();
  return policies;
}

int Cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "pickleward");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  int code = cli::Run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

bool IsBlockingCode(ErrorCode c) {
  return c == ErrorCode::kInvocationDenied || c == ErrorCode::kStubInvocation || c == ErrorCode::kForbiddenOpcode;
}

// ---- malicious blocking ----

Outcome MaliciousBlocking() {
  std::vector<std::pair<std::string, Policy>> policies(GeneratedPolicies().begin(), GeneratedPolicies().end());
  policies.emplace_back("empty", Policy::Empty());
  Denylist denylist = Denylist::Default();
  Check check;
  int runs = 0;
  int hostile = 0;
  auto start = Clock::now();
  for (const auto& e : LoadCorpus().entries) {
    if (!e.hostile()) continue;
    ++hostile;
    OpcodeStream stream = EntryStream(e);
    for (const auto& [label, policy] : policies) {
      ++runs;
      std::string where = e.id + " under " + label;
      Vm vm(VmConfig::Restricted(policy));
      try {
        vm.Run(stream);
        check.Fail(where + " loaded");
        continue;
      } catch (const Error& err) {
        check.Expect(IsBlockingCode(err.code()), where + " ended with " + std::string(ErrorCodeName(err.code())));
      }
      for (const auto& call : vm.trace().invocations) {
        check.Expect(policy.AllowsInvocation(call.name) && !denylist.Matches(call.name),
                     where + " invoked " + call.name);
      }
      for (const auto& alloc : vm.trace().allocations) {
        check.Expect(policy.AllowsImport(alloc.name), where + " allocated " + alloc.name);
      }
    }
  }
  double elapsed = Seconds(start);
  check.Expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  check.Expect(hostile > 0, "no hostile entries");
  std::ostringstream d;
  d << hostile << " hostile entries x " << policies.size() << " policies, " << runs << " runs blocked in " << elapsed
    << " s";
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

// ---- benign loading ----

Outcome BenignLoading() {
  Check check;
  int loaded = 0;
  int with_oracle = 0;
  int failing = 0;
  for (const auto& e : LoadCorpus().entries) {
    if (e.kind != "benign" && e.kind != "known-failing") continue;
    if (!e.library) {
      check.Fail(e.id + " has no library");
      continue;
    }
    const Policy& policy = GeneratedPolicies().at(*e.library);
    OpcodeStream stream = EntryStream(e);
    if (e.kind == "known-failing") {
      ++failing;
      try {
        Execute(stream, VmConfig::Restricted(policy));
        check.Fail(e.id + " loaded");
      } catch (const Error& err) {
        std::string name(ErrorCodeName(err.code()));
        bool documented = std::find(e.expected_errors.begin(), e.expected_errors.end(), name) != e.expected_errors.end();
        check.Expect(documented, e.id + " failed with " + name);
      }
      continue;
    }
    VmOutcome out;
    try {
      out = Execute(stream, VmConfig::Restricted(policy));
    } catch (const Error& err) {
      check.Fail(e.id + " failed: " + err.what());
      continue;
    }
    ++loaded;
    const auto& oracle = e.oracle_restricted_dump ? e.oracle_restricted_dump : e.oracle_dump;
    std::string expected;
    if (oracle) {
      expected = ReadText(*oracle);
      ++with_oracle;
    } else {
      VmOutcome open = Execute(stream, VmConfig::Unrestricted());
      expected = CanonicalDump(open.graph, open.root);
    }
    check.Expect(CanonicalDump(out.graph, out.root) == expected, e.id + " dump differs from oracle");
    std::vector<std::string> stubs;
    for (const auto& s : ListStubs(out.graph, out.root)) stubs.push_back(s.name);
    check.Expect(stubs == e.expected_stubs, e.id + " has " + std::to_string(stubs.size()) + " stub(s)");
    bool strict_rejects = false;
    try {
      AssertNoStubs(out);
    } catch (const StubsPresentError&) {
      strict_rejects = true;
    }
    check.Expect(strict_rejects == !e.expected_stubs.empty(), e.id + " strict mode disagrees with stub count");
  }
  const auto& flair = LoadCorpus().Get("benign_flair_tagger");
  check.Expect(flair.expected_stubs.size() == 1, "flair fixture does not expect exactly one stub");
  std::ostringstream d;
  d << loaded << " benign fixtures load (" << with_oracle << " match vendored oracle dumps, "
    << loaded - with_oracle << " without one match the unrestricted dump); flair loads with 1 stub (" << flair.expected_stubs.at(0)
    << ") and strict mode rejects it; " << failing << " known-failing fixtures fail with the documented error";
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

// ---- baseline comparison ----

Outcome BaselineComparison() {
  Check check;
  Policy baseline = ReadPolicy(testing::SourceDir() / "policies" / "baseline_weights_only.json");
  std::vector<std::string> baseline_misses;
  for (const auto& e : LoadCorpus().entries) {
    if (e.kind != "benign" || !e.library) continue;
    OpcodeStream stream = EntryStream(e);
    bool generated_ok = true;
    try {
      Execute(stream, VmConfig::Restricted(GeneratedPolicies().at(*e.library)));
    } catch (const Error&) {
      generated_ok = false;
    }
    if (!generated_ok) continue;
    try {
      AssertNoStubs(Execute(stream, VmConfig::Restricted(baseline)));
    } catch (const Error&) {
      baseline_misses.push_back(e.id);
    }
  }
  check.Expect(!baseline_misses.empty(), "baseline loads every benign fixture the generated policies load");
  check.Expect(std::find(baseline_misses.begin(), baseline_misses.end(), "benign_tinynet_container") !=
                   baseline_misses.end(),
               "baseline loads benign_tinynet_container");

  Denylist denylist = Denylist::Default();
  int hostile = 0;
  int scanner_misses = 0;
  int vm_misses = 0;
  for (const auto& e : LoadCorpus().entries) {
    if (!e.hostile()) continue;
    ++hostile;
    OpcodeStream stream = EntryStream(e);
    if (!Scan(stream, denylist).flagged) ++scanner_misses;
    for (const auto& [label, policy] : GeneratedPolicies()) {
      try {
        Execute(stream, VmConfig::Restricted(policy));
        ++vm_misses;
      } catch (const Error&) {
      }
    }
  }
  for (const char* id : {"bypass_pathlib", "bypass_dotted_smuggle"}) {
    check.Expect(!Scan(EntryStream(LoadCorpus().Get(id)), denylist).flagged, std::string(id) + " is flagged");
  }
  check.Expect(scanner_misses > 0, "scanner FNR is 0");
  check.Expect(vm_misses == 0, "VM loaded a hostile entry");
  std::ostringstream d;
  d << "baseline allowlist fails " << baseline_misses.size() << " benign fixture(s) the generated policies load (";
  for (std::size_t i = 0; i < baseline_misses.size(); ++i) d << (i ? ", " : "") << baseline_misses[i];
  d << "); denylist scanner FNR " << scanner_misses << "/" << hostile << ", VM FNR " << vm_misses << "/" << hostile;
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

// ---- property suites ----

bool SubsetHolds(const Policy& p) {
  for (const auto& n : p.allowed_invocations()) {
    if (!p.AllowsImport(n)) return false;
  }
  return true;
}

Outcome PropertySubset() {
  Check check;
  std::mt19937_64 rng(0x5eed);
  ClassCache vendored = testing::VendoredCache();
  std::vector<std::string> external = vendored.Names();
  std::vector<Policy> built{Policy::Empty()};
  int generated = 0;
  for (const auto& lib : LoadCorpus().libraries) {
    ModuleIndex index = testing::LibraryIndex(lib.name);
    for (int round = 0; round < 8; ++round) {
      ClassCache cache = ClassCache::WithBuiltins();
      for (const auto& n : external) {
        if (rng() % 2) {
          ClassCacheEntry entry = *vendored.Lookup(n);
          cache.Add(entry);
        }
      }
      for (const auto& cls : index.ClassNames()) {
        if (rng() % 3) continue;
        Policy p = Generate(index, cache, cls, GenerateOptions{"", rng()});
        ++generated;
        check.Expect(SubsetHolds(p), "generated " + cls);
        built.push_back(std::move(p));
      }
    }
  }
  int merged = 0;
  for (int i = 0; i < 300; ++i) {
    Policy m = Merge(built[rng() % built.size()], built[rng() % built.size()]);
    ++merged;
    check.Expect(SubsetHolds(m), "merge");
    built.push_back(std::move(m));
  }
  std::vector<std::string> pool;
  for (const char* m : {"a", "b.c", "torch.nn"}) {
    for (const char* n : {"X", "f", "Y.z"}) pool.push_back(std::string(m) + "." + n);
  }
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    PolicyData d;
    for (const auto& n : pool) {
      if (rng() % 2) d.allowed_imports.insert(n);
      if (rng() % 4 == 0) d.allowed_invocations.insert(n);
    }
    if (!d.allowed_imports.empty()) d.root_class = *d.allowed_imports.begin();
    bool valid = std::includes(d.allowed_imports.begin(), d.allowed_imports.end(), d.allowed_invocations.begin(),
                               d.allowed_invocations.end());
    try {
      Policy p = Policy::From(d);
      check.Expect(valid && SubsetHolds(p), "From accepted a violation");
    } catch (const Error&) {
      check.Expect(!valid, "From rejected a valid document");
      ++rejected;
    }
  }
  int parsed = 0;
  for (const auto& p : built) {
    Policy q = PolicyFromJson(ToJson(p));
    ++parsed;
    check.Expect(SubsetHolds(q) && ToJson(q) == ToJson(p), "deserialization");
  }
  std::ostringstream d;
  d << generated << " generated, " << merged << " merged, " << parsed << " deserialized policies hold; " << rejected
    << "/1000 random documents rejected, each one violating";
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

std::set<std::string> Names(const std::vector<TraceEvent>& events) {
  std::set<std::string> out;
  for (const auto& e : events) out.insert(e.name);
  return out;
}

Outcome PropertyTraceAgreement() {
  Check check;
  int compared = 0;
  int skipped_dynamic = 0;
  int forbidden = 0;
  for (const auto& e : LoadCorpus().entries) {
    OpcodeStream stream = EntryStream(e);
    TraceReport r = Trace(stream);
    if (!r.dynamic.empty()) {
      ++skipped_dynamic;
      continue;
    }
    Vm vm(VmConfig::Unrestricted());
    try {
      vm.Run(stream);
    } catch (const Error& err) {
      check.Expect(err.code() == ErrorCode::kForbiddenOpcode && !r.forbidden_opcodes.empty(),
                   e.id + " unrestricted run failed: " + err.what());
      ++forbidden;
      continue;
    }
    ++compared;
    check.Expect(r.imports == Names(vm.trace().imports), e.id + " imports");
    check.Expect(r.invocations == Names(vm.trace().invocations), e.id + " invocations");
    check.Expect(r.allocations == Names(vm.trace().allocations), e.id + " allocations");
  }
  std::ostringstream d;
  d << compared << " pickles agree; " << skipped_dynamic << " with dynamic callees and " << forbidden
    << " with forbidden opcodes excluded";
  return {check.ok() && compared > 0, check.ok() ? d.str() : check.Summary()};
}

Outcome PropertyTransparency() {
  Check check;
  int compared = 0;
  for (const auto& e : LoadCorpus().entries) {
    if (e.kind != "benign") continue;
    OpcodeStream stream = EntryStream(e);
    VmOutcome open = Execute(stream, VmConfig::Unrestricted());
    std::vector<Policy> policies{testing::AllowAll(stream)};
    if (e.library) policies.push_back(GeneratedPolicies().at(*e.library));
    for (const auto& p : policies) {
      VmOutcome closed = Execute(stream, VmConfig::Restricted(p));
      if (!closed.trace.stubs.empty() || !closed.trace.tainted_builds.empty()) continue;
      ++compared;
      check.Expect(CanonicalDump(open.graph, open.root) == CanonicalDump(closed.graph, closed.root), e.id);
    }
  }
  std::ostringstream d;
  d << compared << " stub-free restricted runs reproduce the unrestricted dump";
  return {check.ok() && compared > 0, check.ok() ? d.str() : check.Summary()};
}

Outcome PropertyOracle() {
  Check check;
  ClassCache cache = testing::VendoredCache();
  int roots = 0;
  for (const auto& lib : LoadCorpus().libraries) {
    ModuleIndex index = testing::LibraryIndex(lib.name);
    std::vector<std::string> classes = index.ClassNames();
    classes.insert(classes.begin(), lib.root_class);
    for (const auto& cls : classes) {
      ++roots;
      Policy p = Generate(index, cache, cls);
      testing::ClosureSets oracle = testing::BruteForceClosure(index, cache, cls);
      check.Expect(p.allowed_imports() == oracle.imports && p.allowed_invocations() == oracle.invocations,
                   lib.name + " root " + cls);
    }
  }
  std::ostringstream d;
  d << "generator equals the brute-force closure on " << LoadCorpus().libraries.size() << " libraries, " << roots
    << " roots";
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

Outcome PropertyRoundTrip() {
  Check check;
  std::vector<std::string> seeds;
  for (const auto& e : LoadCorpus().entries) {
    std::string bytes = EntryBytes(e);
    check.Expect(Serialize(Parse(bytes)) == bytes, e.id);
    if (bytes.size() < 64 * 1024) seeds.push_back(std::move(bytes));
  }
  std::mt19937_64 rng(20240611);
  int accepted = 0;
  int attempts = 0;
  while (accepted < 1000 && attempts < 200000) {
    ++attempts;
    std::string m = testing::MutatePickle(seeds[rng() % seeds.size()], rng);
    OpcodeStream s;
    try {
      s = Parse(m);
    } catch (const Error&) {
      continue;
    }
    ++accepted;
    check.Expect(Serialize(s) == m, "mutation " + std::to_string(accepted));
  }
  check.Expect(accepted == 1000, "only " + std::to_string(accepted) + " mutations parsed");
  std::ostringstream d;
  d << LoadCorpus().entries.size() << " corpus pickles and " << accepted << " parsing mutations (of " << attempts
    << " attempts) round-trip byte-identically";
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

// ---- overhead and generation latency ----

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("pickleward_acceptance_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

Outcome Overhead(const TempDir& tmp) {
  const auto& entry = LoadCorpus().Get("benign_bench_10mb");
  fs::path policy = tmp.path / "bench_policy.json";
  WritePolicy(GeneratedPolicies().at(*entry.library), policy);
  std::string out;
  int code = Cli({"bench", entry.pickle_path.string(), "--policy", policy.string(), "--iterations", "21"}, &out);
  if (code != cli::kOk) return {false, "bench exited " + std::to_string(code)};
  std::map<std::string, std::string> fields;
  std::istringstream lines(out);
  for (std::string line; std::getline(lines, line);) {
    auto colon = line.find(": ");
    if (colon != std::string::npos) fields[line.substr(0, colon)] = line.substr(colon + 2);
  }
  double overhead = std::stod(fields.at("overhead_percent"));
  std::ostringstream d;
  d << "overhead_percent " << fields.at("overhead_percent") << " (restricted " << fields.at("restricted_median_ms")
    << " ms vs unrestricted " << fields.at("unrestricted_median_ms") << " ms, median of 21, "
    << fs::file_size(entry.pickle_path) << " bytes)";
  return {overhead <= 10.0, d.str()};
}

Outcome GenerationLatency(const TempDir& tmp) {
  Check check;
  double slowest = 0;
  std::string cache = (testing::SourceDir() / "cache").string();
  for (const auto& lib : LoadCorpus().libraries) {
    std::string bytes[2];
    for (int run = 0; run < 2; ++run) {
      fs::path out = tmp.path / (lib.name + std::to_string(run) + ".json");
      auto start = Clock::now();
      int code = Cli({"gen-policy", "--library", (testing::CorpusDir() / lib.path).string(), "--package",
                      lib.package, "--class", lib.root_class, "--cache", cache, "-o", out.string()});
      double s = Seconds(start);
      slowest = std::max(slowest, s);
      check.Expect(code == cli::kOk, lib.name + " exited " + std::to_string(code));
      check.Expect(s < 2.0, lib.name + " took " + std::to_string(s) + " s");
      bytes[run] = ReadText(out);
    }
    check.Expect(!bytes[0].empty() && bytes[0] == bytes[1], lib.name + " output differs between runs");
  }
  std::ostringstream d;
  d << LoadCorpus().libraries.size() << " libraries, slowest " << slowest * 1000
    << " ms; two runs byte-identical for each";
  return {check.ok(), check.ok() ? d.str() : check.Summary()};
}

}  // namespace
}  // namespace pickleward

int main() {
  using namespace pickleward;
  TempDir tmp;
  Report("malicious-blocking", MaliciousBlocking);
  Report("benign-loading", BenignLoading);
  Report("baseline-comparison", BaselineComparison);
  Report("property-a-subset-invariant", PropertySubset);
  Report("property-b-trace-execution-agreement", PropertyTraceAgreement);
  Report("property-c-transparency", PropertyTransparency);
  Report("property-d-generator-oracle", PropertyOracle);
  Report("property-e-round-trip", PropertyRoundTrip);
  Report("overhead", [&] { return Overhead(tmp); });
  Report("policy-generation-latency", [&] { return GenerationLatency(tmp); });
  return g_failed == 0 ? 0 : 1;
}
