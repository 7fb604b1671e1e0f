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

#include "pickleward/source_index.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pickleward/error.h"
#include "python_ast.h"
#include "support/corpus.h"

namespace pickleward {
namespace {

namespace fs = std::filesystem;
using Kind = TypeExpr::Kind;

fs::path PySrc() { return testing::SourceDir() / "tests" / "data" / "pysrc"; }

const ModuleIndex& Pkg() {
  static const ModuleIndex index = ModuleIndex::Build(PySrc(), "pkg");
  return index;
}

ModuleIndex Library(const std::string& name) {
  const auto& lib = testing::LoadCorpus().Library(name);
  return ModuleIndex::Build(testing::CorpusDir() / lib.path, lib.package);
}

std::map<std::string, std::string> Table(const ClassRecord& r) {
  std::map<std::string, std::string> out;
  for (const auto& [attr, type] : r.attributes) out[attr] = type.ToString();
  return out;
}

// ---- parser ----

TEST(PythonParser, StatementsAndExpressions) {
  const char* src =
      "import a.b as c, d\n"
      "from ..x import (y as z,\n   w,)\n"
      "@decorator(1)\n"
      "class K(Base, metaclass=M):\n"
      "    '''doc'''\n"
      "    f: int = 3; g = 4\n"
      "    async def m(self, a, /, b: 'T' = 1, *args, c, **kw) -> None:\n"
      "        if (n := len(a)) > 1 and not b:\n"
      "            return {**kw, 'k': [x for x in a if x]}, lambda q=1: q\n"
      "        elif a is not None: pass\n"
      "        else:\n"
      "            raise ValueError(f\"bad {a!r}\") from None\n"
      "        match a:\n"
      "            case [1, *rest]:\n"
      "                self.x = rest\n"
      "            case _:\n"
      "                pass\n"
      "        with open(p) as fh, ctx() as (u, v):\n"
      "            self.y = u[1:2, ::3]\n"
      "        try:\n"
      "            yield from gen()\n"
      "        except* (A, B) as e:\n"
      "            del e\n"
      "        finally:\n"
      "            await thing\n"
      "x = \\\n    1 if y else 2j\n";
  auto tree = py::ParseModule(src);
  ASSERT_EQ(tree.size(), 4u);
  EXPECT_EQ(tree[0]->kind, py::StmtKind::kImport);
  ASSERT_EQ(tree[0]->names.size(), 2u);
  EXPECT_EQ(tree[0]->names[0].name, "a.b");
  EXPECT_EQ(tree[0]->names[0].asname, "c");
  EXPECT_EQ(tree[1]->kind, py::StmtKind::kImportFrom);
  EXPECT_EQ(tree[1]->level, 2);
  EXPECT_EQ(tree[1]->name, "x");
  ASSERT_EQ(tree[1]->names.size(), 2u);
  const py::Stmt& cls = *tree[2];
  EXPECT_EQ(cls.kind, py::StmtKind::kClassDef);
  EXPECT_EQ(cls.name, "K");
  EXPECT_EQ(cls.line, 5);
  EXPECT_EQ(cls.decorators.size(), 1u);
  EXPECT_EQ(cls.keywords, (std::vector<std::string>{"", "metaclass"}));
  ASSERT_EQ(cls.body.size(), 4u);
  EXPECT_EQ(cls.body[1]->kind, py::StmtKind::kAnnAssign);
  EXPECT_EQ(cls.body[2]->kind, py::StmtKind::kAssign);
  const py::Stmt& m = *cls.body[3];
  EXPECT_EQ(m.kind, py::StmtKind::kFunctionDef);
  ASSERT_EQ(m.params.size(), 6u);
  EXPECT_EQ(m.params[3].name, "*args");
  EXPECT_EQ(m.params[5].name, "**kw");
  ASSERT_TRUE(m.params[2].annotation);
  EXPECT_EQ(m.params[2].annotation->text, "T");
  EXPECT_EQ(tree[3]->kind, py::StmtKind::kAssign);
  EXPECT_EQ(tree[3]->exprs[1]->kind, py::ExprKind::kIfExp);
}

TEST(PythonParser, StringsAndNumbers) {
  auto e = py::ParseExpression("'a\\x41' \"b\\n\" r'\\d'");
  EXPECT_EQ(e->kind, py::ExprKind::kConstant);
  EXPECT_EQ(e->text, "aAb\n\\d");
  EXPECT_EQ(py::ParseExpression("b'x'")->const_kind, py::ConstKind::kBytes);
  EXPECT_EQ(py::ParseExpression("0x1F")->const_kind, py::ConstKind::kInt);
  EXPECT_EQ(py::ParseExpression("1_000.5e-3")->const_kind, py::ConstKind::kFloat);
  EXPECT_EQ(py::ParseExpression("f'{x}'")->kind, py::ExprKind::kJoinedStr);
  EXPECT_EQ(py::ParseExpression("Optional[Dict[str, 'Foo']]")->kind, py::ExprKind::kSubscript);
}

TEST(PythonParser, SyntaxErrorsCarryLines) {
  auto line_of = [](const char* src) {
    try {
      py::ParseModule(src);
    } catch (const py::SyntaxError& e) {
      return e.line;
    }
    return -1;
  };
  EXPECT_EQ(line_of("x = 1\ndef f(:\n  pass\n"), 2);
  EXPECT_EQ(line_of("x = (1,\n"), 1);
  EXPECT_EQ(line_of("if x:\n    a = 1\n  b = 2\n"), 3);
  EXPECT_EQ(line_of("a = 1\nb = 'open\n"), 2);
  EXPECT_EQ(line_of("x = 1 $ 2\n"), 1);
  EXPECT_EQ(line_of("class C:\npass\n"), 2);
  EXPECT_EQ(line_of("s = '''ok\nstill ok'''\n"), -1);
}

// ---- type expressions ----

TEST(TypeExpr, UnionNormalises) {
  auto u = TypeExpr::Union({TypeExpr::Named("b"), TypeExpr::Union({TypeExpr::Named("a"), TypeExpr::Named("b")})});
  EXPECT_EQ(u.kind, Kind::kUnion);
  EXPECT_EQ(u.ToString(), "Union[a, b]");
  EXPECT_EQ(TypeExpr::Union({TypeExpr::Named("a"), TypeExpr::Named("a")}), TypeExpr::Named("a"));
}

TEST(ExtractAttributeTypes, FlattenRules) {
  ClassRecord r;
  r.name = "pkg.C";
  r.attributes["w"] = TypeExpr::Named("toylib.Tensor");
  EXPECT_EQ(ExtractAttributeTypes(r).names, (NameSet{"toylib.Tensor"}));

  r.attributes.clear();
  r.attributes["m"] = TypeExpr::Optional(
      TypeExpr::Mapping(TypeExpr::Named("builtins.str"), TypeExpr::Named("pkg.Foo")));
  auto t = ExtractAttributeTypes(r);
  EXPECT_EQ(t.names, (NameSet{"builtins.str", "pkg.Foo"}));
  EXPECT_TRUE(t.warnings.empty());

  r.attributes.clear();
  r.attributes["u"] = TypeExpr::Unknown("no evidence");
  t = ExtractAttributeTypes(r);
  EXPECT_TRUE(t.names.empty());
  ASSERT_EQ(t.warnings.size(), 1u);
  EXPECT_EQ(t.warnings[0], "pkg.C.u: no evidence");

  r.attributes.clear();
  r.attributes["k"] = TypeExpr::Reference("pkg.K");
  r.attributes["q"] = TypeExpr::Sequence(TypeExpr::Tuple({TypeExpr::Named("a.A"), TypeExpr::Named("b.B")}),
                                         "collections.deque");
  t = ExtractAttributeTypes(r);
  EXPECT_EQ(t.names, (NameSet{"a.A", "b.B", "collections.deque"}));
  EXPECT_EQ(t.references, (NameSet{"pkg.K"}));
}

TEST(ExtractAttributeTypes, AnnotationInFixture) {
  const auto& base = Pkg().ResolveClass("pkg.base.Base");
  ClassRecord only_items = base;
  only_items.attributes = {{"items", base.attributes.at("items")}};
  EXPECT_EQ(ExtractAttributeTypes(only_items).names, (NameSet{"builtins.str", "pkg.base.Foo"}));
}

// ---- index construction ----

TEST(ModuleIndex, ToyLibraryModulesAndAliases) {
  auto index = Library("toylib");
  EXPECT_EQ(index.ModuleNames(), (std::vector<std::string>{"toylib", "toylib.layers", "toylib.utils"}));
  EXPECT_TRUE(index.errors().empty());
  const auto* layers = index.ImportTable("toylib.layers");
  ASSERT_NE(layers, nullptr);
  EXPECT_EQ(layers->at("T"), "toylib.Tensor");
  EXPECT_EQ(layers->at("weight_path"), "toylib.utils.weight_path");
  EXPECT_EQ(index.ImportTable("toylib.utils")->at("osp"), "os.path");
  EXPECT_EQ(index.ImportTable("toylib")->at("Linear"), "toylib.layers.Linear");
  EXPECT_EQ(index.ImportTable("toylib")->at("utils"), "toylib.utils");
}

TEST(ModuleIndex, EmptyOrMissingDirectoryHasNoSources) {
  fs::path dir = fs::temp_directory_path() / "pickleward_empty_index";
  fs::remove_all(dir);
  fs::create_directories(dir / "pkg" / "__pycache__");
  std::ofstream(dir / "pkg" / "notes.txt") << "not python";
  try {
    ModuleIndex::Build(dir, "pkg");
    FAIL() << "expected NoSources";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSources);
  }
  try {
    ModuleIndex::Build(dir / "missing", "pkg");
    FAIL() << "expected NoSources";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSources);
  }
  fs::remove_all(dir);
}

TEST(ModuleIndex, SyntaxErrorIsCollectedPerFile) {
  auto index = ModuleIndex::Build(PySrc() / "broken", "broken");
  ASSERT_EQ(index.errors().size(), 1u);
  EXPECT_EQ(index.errors()[0].file, "bad.py");
  EXPECT_EQ(index.errors()[0].line, 2);
  EXPECT_EQ(index.ModuleNames(), (std::vector<std::string>{"broken", "broken.good"}));
  EXPECT_EQ(Table(index.ResolveClass("broken.Good")), (std::map<std::string, std::string>{{"ok", "builtins.bool"}}));
}

TEST(ModuleIndex, PackageDirectoryMayBeTheRoot) {
  auto a = ModuleIndex::Build(PySrc(), "pkg");
  auto b = ModuleIndex::Build(PySrc() / "pkg", "pkg");
  EXPECT_EQ(a.DebugDump(), b.DebugDump());
}

TEST(ModuleIndex, RelativeAndReexportedNames) {
  const auto& ix = Pkg();
  EXPECT_EQ(ix.Canonicalize("pkg.PublicChild"), "pkg.child.Child");
  EXPECT_EQ(ix.Canonicalize("pkg.Widget"), "pkg.base.Foo");  // star import of pkg.sub
  EXPECT_EQ(ix.Canonicalize("pkg.sub.Deep"), "pkg.sub.deep.Deep");
  EXPECT_EQ(ix.Canonicalize("pkg.base.Foo"), "pkg.base.Foo");
  EXPECT_EQ(ix.Canonicalize("os.path.join"), "os.path.join");
  EXPECT_EQ(ix.ImportTable("pkg.sub.deep")->at("base"), "pkg.base");
  EXPECT_EQ(ix.ImportTable("pkg.sub.deep")->at("Child"), "pkg.child.Child");
  EXPECT_EQ(ix.ImportTable("pkg.child")->at("dq"), "collections.deque");
  EXPECT_EQ(&ix.ResolveClass("pkg.PublicChild"), &ix.ResolveClass("pkg.child.Child"));
}

TEST(ModuleIndex, ClassNotFound) {
  try {
    Pkg().ResolveClass("pkg.Nope");
    FAIL() << "expected ClassNotFound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassNotFound);
  }
  EXPECT_EQ(Pkg().FindClass("pkg.base.compute"), nullptr);
}

// ---- class records ----

TEST(ResolveClass, TensorReduceSummary) {
  auto index = Library("toylib");
  const auto& tensor = index.ResolveClass("toylib.Tensor");
  ASSERT_TRUE(tensor.reduce_summary);
  EXPECT_EQ(tensor.reduce_summary->callable, "toylib.read_weights_to_tensor");
  ASSERT_EQ(tensor.reduce_summary->arg_types.size(), 3u);
  EXPECT_EQ(tensor.reduce_summary->arg_types[0], TypeExpr::Reference("toylib.Tensor"));
  EXPECT_EQ(tensor.reduce_summary->arg_types[1], TypeExpr::Named("builtins.str"));
  EXPECT_TRUE(tensor.reduce_summary->state_types.empty());
  EXPECT_EQ(tensor.defined_at, (SourceLocation{"toylib", 16}));
  EXPECT_FALSE(index.ResolveClass("toylib.Model").reduce_summary);
}

TEST(ResolveClass, AnnotatedClassField) {
  EXPECT_EQ(Pkg().ResolveClass("pkg.base.Base").attributes.at("x"), TypeExpr::Named("builtins.int"));
  EXPECT_EQ(Pkg().ResolveClass("pkg.base.Foo").attributes.at("label"), TypeExpr::Named("builtins.str"));
}

TEST(ResolveClass, EvidenceLadder) {
  auto t = Table(Pkg().ResolveClass("pkg.base.Base"));
  EXPECT_EQ(t, (std::map<std::string, std::string>{
                   {"count", "Union[builtins.float, builtins.int]"},
                   {"flag", "Union[builtins.NoneType, builtins.bool]"},
                   {"items", "Optional[Mapping[builtins.str, pkg.base.Foo]]"},
                   {"mystery", "Unknown(result of pkg.base.compute())"},
                   {"registry", "builtins.int"},
                   {"x", "builtins.int"},
               }));
}

// Expected map written from tests/data/pysrc/pkg/child.py and base.py.
TEST(ResolveClass, SubclassMergesParentTable) {
  const auto& child = Pkg().ResolveClass("pkg.child.Child");
  EXPECT_EQ(child.bases, (std::vector<std::string>{"pkg.base.Base"}));
  EXPECT_EQ(Table(child), (std::map<std::string, std::string>{
                              {"a", "builtins.int"},
                              {"b", "builtins.bytes"},
                              {"count", "Union[builtins.float, builtins.int]"},
                              {"flag", "Union[builtins.NoneType, builtins.bool]"},
                              {"items", "Optional[Mapping[builtins.str, pkg.base.Foo]]"},
                              {"kind", "type[pkg.base.Foo]"},
                              {"maker", "Unknown(result of builtins.type())"},
                              {"mystery", "Unknown(result of pkg.base.compute())"},
                              {"name", "builtins.str"},
                              {"parts", "collections.OrderedDict[builtins.str, pkg.base.Foo]"},
                              {"queue", "collections.deque[builtins.int]"},
                              {"registry", "builtins.int"},
                              {"rest", "Unknown(unannotated parameter 'rest')"},
                              {"x", "builtins.str"},
                          }));
  EXPECT_TRUE(child.warnings.empty());
}

TEST(ResolveClass, BaseFailuresBecomeWarnings) {
  const auto& deep = Pkg().ResolveClass("pkg.sub.deep.Deep");
  EXPECT_EQ(deep.bases, (std::vector<std::string>{"pkg.child.Child", "pkg.base.Base", "builtins.Unknowable"}));
  EXPECT_EQ(deep.attributes.at("x"), TypeExpr::Named("builtins.str"));
  EXPECT_EQ(deep.attributes.at("other").ToString(), "Union[builtins.NoneType, pkg.child.Child]");
  EXPECT_EQ(deep.attributes.at("seq").ToString(), "Sequence[Union[builtins.float, builtins.int]]");
  EXPECT_EQ(deep.attributes.at("pair").ToString(), "Mapping[builtins.str, Tuple[builtins.int, builtins.str]]");
  EXPECT_EQ(deep.attributes.at("data").kind, Kind::kUnknown);
  EXPECT_EQ(deep.warnings,
            (std::vector<std::string>{
                "pkg.sub.deep.Deep: attribute 'x' differs between bases pkg.child.Child and pkg.base.Base; "
                "using pkg.child.Child",
                "pkg.sub.deep.Deep: base builtins.Unknowable is not in the index"}));
}

TEST(ResolveClass, DiamondClashIsFlagged) {
  const auto& d = Pkg().ResolveClass("pkg.diamond.D");
  EXPECT_EQ(d.attributes.at("tag"), TypeExpr::Named("builtins.int"));
  ASSERT_EQ(d.warnings.size(), 1u);
  EXPECT_NE(d.warnings[0].find("'tag' differs"), std::string::npos);
}

TEST(ResolveClass, ReduceVariants) {
  const auto& plain = Pkg().ResolveClass("pkg.reducers.Plain");
  ASSERT_TRUE(plain.reduce_summary);
  EXPECT_EQ(plain.reduce_summary->callable, "pkg.reducers.rebuild");
  EXPECT_EQ(plain.reduce_summary->arg_types,
            (std::vector<TypeExpr>{TypeExpr::Named("builtins.int"), TypeExpr::Reference("pkg.base.Foo"),
                                   TypeExpr::Named("builtins.str")}));
  ASSERT_EQ(plain.reduce_summary->state_types.size(), 2u);
  EXPECT_EQ(plain.reduce_summary->state_types[0], TypeExpr::Named("builtins.int"));
  EXPECT_EQ(plain.reduce_summary->state_types[1].kind, Kind::kMapping);
  EXPECT_EQ(plain.warnings.size(), 1u);

  const auto& from_class = Pkg().ResolveClass("pkg.reducers.FromClass");
  EXPECT_EQ(from_class.reduce_summary->callable, "pkg.reducers.FromClass");
  EXPECT_EQ(from_class.reduce_summary->arg_types, (std::vector<TypeExpr>{TypeExpr::Named("builtins.float")}));

  const auto& opaque = Pkg().ResolveClass("pkg.reducers.Opaque");
  ASSERT_TRUE(opaque.reduce_summary);
  EXPECT_FALSE(opaque.reduce_summary->callable);
  EXPECT_EQ(opaque.warnings.size(), 1u);

  const auto& derived = Pkg().ResolveClass("pkg.reducers.Derived");
  ASSERT_TRUE(derived.reduce_summary);
  EXPECT_EQ(derived.reduce_summary->callable, "pkg.reducers.rebuild");
  EXPECT_FALSE(Pkg().ResolveClass("pkg.diamond.Leaf").reduce_summary);
}

// ---- subclasses ----

TEST(SubclassesOf, Examples) {
  EXPECT_TRUE(Pkg().SubclassesOf("pkg.diamond.Leaf").empty());
  EXPECT_EQ(Pkg().SubclassesOf("pkg.diamond.A"), (NameSet{"pkg.diamond.B", "pkg.diamond.C", "pkg.diamond.D"}));
  EXPECT_EQ(Pkg().SubclassesOf("pkg.Base"), (NameSet{"pkg.child.Child", "pkg.sub.deep.Deep"}));
  auto seq = Library("toyseq");
  EXPECT_EQ(seq.SubclassesOf("toyseq.Module"),
            (NameSet{"toyseq.modules.Attention", "toyseq.modules.Decoder", "toyseq.modules.Encoder",
                     "toyseq.modules.RecurrentEncoder"}));
  auto flair = Library("toyflair");
  EXPECT_EQ(flair.SubclassesOf("toyflair.embeddings.Embeddings"),
            (NameSet{"toyflair.embeddings.CharacterEmbeddings", "toyflair.embeddings.StackedEmbeddings",
                     "toyflair.embeddings.WordEmbeddings"}));
  EXPECT_EQ(Library("toyvision").SubclassesOf("torch.nn.Module"),
            (NameSet{"toyvision.nets.ConvBlock", "toyvision.nets.TinyNet"}));
}

// ---- properties ----

std::map<std::string, std::map<std::string, std::string>> ReadExpected(const fs::path& file) {
  std::map<std::string, std::map<std::string, std::string>> out;
  std::istringstream in(testing::ReadText(file));
  std::string line;
  std::string current;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("class ", 0) == 0) {
      current = line.substr(6);
      out[current];
      continue;
    }
    auto sp = line.find(' ');
    out[current][line.substr(0, sp)] = line.substr(sp + 1);
  }
  return out;
}

TEST(SourceIndexProperty, AttributeCompletenessOnCorpus) {
  for (const auto& lib : testing::LoadCorpus().libraries) {
    SCOPED_TRACE(lib.name);
    auto expected = ReadExpected(testing::SourceDir() / "tests" / "data" / "attributes" / (lib.name + ".txt"));
    auto index = ModuleIndex::Build(testing::CorpusDir() / lib.path, lib.package);
    std::vector<std::string> listed;
    for (const auto& [cls, attrs] : expected) listed.push_back(cls);
    EXPECT_EQ(index.ClassNames(), listed);
    for (const auto& [cls, attrs] : expected) {
      SCOPED_TRACE(cls);
      EXPECT_EQ(Table(index.ResolveClass(cls)), attrs);
    }
  }
}

TEST(SourceIndexProperty, Deterministic) {
  for (const auto& lib : testing::LoadCorpus().libraries) {
    auto a = ModuleIndex::Build(testing::CorpusDir() / lib.path, lib.package);
    auto b = ModuleIndex::Build(testing::CorpusDir() / lib.path, lib.package);
    EXPECT_EQ(a.DebugDump(), b.DebugDump()) << lib.name;
    for (const auto& name : a.ClassNames()) EXPECT_EQ(a.ResolveClass(name), b.ResolveClass(name));
  }
  EXPECT_EQ(ModuleIndex::Build(PySrc(), "pkg").DebugDump(), Pkg().DebugDump());
}

void CollectNames(const TypeExpr& t, std::set<std::string>& out) {
  if (t.kind == Kind::kNamed || t.kind == Kind::kReference) out.insert(t.text);
  if ((t.kind == Kind::kSequence || t.kind == Kind::kMapping) && !t.text.empty()) out.insert(t.text);
  for (const auto& a : t.args) CollectNames(a, out);
}

// Every resolved name is a definition in the tree, a builtin, or reached
// through a module that some import statement of the tree names.
void CheckSoundness(const ModuleIndex& index) {
  std::set<std::string> imported_roots;
  std::set<std::string> defined;
  for (const auto& module : index.ModuleNames()) {
    for (const auto& [alias, target] : *index.ImportTable(module)) {
      if (target == module + "." + alias) {
        defined.insert(target);
      } else {
        imported_roots.insert(target.substr(0, target.find('.')));
      }
    }
  }
  for (const auto& cls : index.ClassNames()) {
    const auto& r = index.ResolveClass(cls);
    std::set<std::string> names(r.bases.begin(), r.bases.end());
    for (const auto& [attr, t] : r.attributes) CollectNames(t, names);
    if (r.reduce_summary) {
      if (r.reduce_summary->callable) names.insert(*r.reduce_summary->callable);
      for (const auto& t : r.reduce_summary->arg_types) CollectNames(t, names);
      for (const auto& t : r.reduce_summary->state_types) CollectNames(t, names);
    }
    for (const auto& n : names) {
      std::string root = n.substr(0, n.find('.'));
      bool ok = root == "builtins" || defined.count(n) || index.FindClass(n) ||
                (root != index.package() && imported_roots.count(root));
      EXPECT_TRUE(ok) << cls << " mentions " << n;
    }
  }
}

TEST(SourceIndexProperty, ImportResolutionSoundness) {
  for (const auto& lib : testing::LoadCorpus().libraries) CheckSoundness(Library(lib.name));
  CheckSoundness(Pkg());
}

}  // namespace
}  // namespace pickleward
