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

#include <algorithm>
#include <functional>
#include <sstream>

#include "pickleward/container.h"
#include "pickleward/error.h"
#include "python_ast.h"

namespace pickleward {

using py::Expr;
using py::ExprKind;
using py::Stmt;
using py::StmtKind;

TypeExpr TypeExpr::Named(std::string name) { return TypeExpr{Kind::kNamed, std::move(name), {}}; }
TypeExpr TypeExpr::Reference(std::string name) {
  return TypeExpr{Kind::kReference, std::move(name), {}};
}
TypeExpr TypeExpr::Optional(TypeExpr inner) { return TypeExpr{Kind::kOptional, "", {std::move(inner)}}; }

TypeExpr TypeExpr::Union(std::vector<TypeExpr> members) {
  std::vector<TypeExpr> flat;
  for (auto& m : members) {
    if (m.kind == Kind::kUnion) {
      for (auto& inner : m.args) flat.push_back(std::move(inner));
    } else {
      flat.push_back(std::move(m));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.size() == 1) return std::move(flat.front());
  if (flat.empty()) return Unknown("empty union");
  return TypeExpr{Kind::kUnion, "", std::move(flat)};
}

TypeExpr TypeExpr::Sequence(TypeExpr element, std::string origin) {
  return TypeExpr{Kind::kSequence, std::move(origin), {std::move(element)}};
}
TypeExpr TypeExpr::Mapping(TypeExpr key, TypeExpr value, std::string origin) {
  return TypeExpr{Kind::kMapping, std::move(origin), {std::move(key), std::move(value)}};
}
TypeExpr TypeExpr::Tuple(std::vector<TypeExpr> elements) {
  return TypeExpr{Kind::kTuple, "", std::move(elements)};
}
TypeExpr TypeExpr::Unknown(std::string reason) { return TypeExpr{Kind::kUnknown, std::move(reason), {}}; }

std::string TypeExpr::ToString() const {
  auto join = [&](std::string head) {
    head += "[";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) head += ", ";
      head += args[i].ToString();
    }
    if (args.empty()) head += "()";
    return head + "]";
  };
  switch (kind) {
    case Kind::kNamed: return text;
    case Kind::kReference: return "type[" + text + "]";
    case Kind::kOptional: return join("Optional");
    case Kind::kUnion: return join("Union");
    case Kind::kSequence: return join(text.empty() ? "Sequence" : text);
    case Kind::kMapping: return join(text.empty() ? "Mapping" : text);
    case Kind::kTuple: return join("Tuple");
    case Kind::kUnknown: return "Unknown(" + text + ")";
  }
  return "";
}

void CollectTypeNames(const TypeExpr& type, const std::string& context, TypeNames& out) {
  switch (type.kind) {
    case TypeExpr::Kind::kNamed:
      out.names.insert(type.text);
      return;
    case TypeExpr::Kind::kReference:
      out.references.insert(type.text);
      return;
    case TypeExpr::Kind::kUnknown:
      out.warnings.push_back(context + ": " + type.text);
      return;
    case TypeExpr::Kind::kSequence:
    case TypeExpr::Kind::kMapping:
      if (!type.text.empty()) out.names.insert(type.text);
      break;
    default:
      break;
  }
  for (const auto& arg : type.args) CollectTypeNames(arg, context, out);
}

TypeNames ExtractAttributeTypes(const ClassRecord& record) {
  TypeNames out;
  for (const auto& [attr, type] : record.attributes) {
    CollectTypeNames(type, record.name + "." + attr, out);
  }
  return out;
}

namespace {

const std::set<std::string, std::less<>>& BuiltinTypes() {
  static const std::set<std::string, std::less<>> k = {
      "bool", "bytearray", "bytes", "complex", "dict", "float", "frozenset", "int", "list",
      "object", "range", "set", "slice", "str", "tuple", "type", "memoryview"};
  return k;
}

bool IsKnownBuiltinClass(const std::string& bare) {
  auto ends_with = [&](std::string_view suffix) {
    return bare.size() >= suffix.size() && bare.compare(bare.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return BuiltinTypes().count(bare) || bare == "Exception" || bare == "BaseException" ||
         ends_with("Error") || ends_with("Warning");
}

std::vector<std::string> SplitDots(const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream in(name);
  std::string part;
  while (std::getline(in, part, '.')) parts.push_back(part);
  return parts;
}

std::string JoinDots(const std::vector<std::string>& parts, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ".";
    out += parts[i];
  }
  return out;
}

enum Rank { kAnnotation = 0, kParamFlow = 1, kConstructor = 2, kLiteral = 3, kNoEvidence = 4 };

struct Evidence {
  TypeExpr type;
  int rank = kNoEvidence;
};

Evidence NoEvidence(std::string reason) { return {TypeExpr::Unknown(std::move(reason)), kNoEvidence}; }

struct ClassSource {
  std::string name;
  std::string module;
  const Stmt* stmt = nullptr;
};

}  // namespace

struct ModuleIndex::Data {
  struct Module {
    std::string name;
    std::string file;
    bool is_package = false;
    std::vector<py::StmtPtr> tree;
    std::map<std::string, std::string> table;
    std::vector<std::string> star_sources;
  };

  std::string package;
  std::map<std::string, Module> modules;
  std::vector<FileError> errors;
  std::map<std::string, ClassRecord> classes;
  std::set<std::string> functions;  // module-level defs
  std::set<std::string> variables;  // other module-level bindings
  std::map<std::string, NameSet> ancestors;

  std::optional<std::string> LookupInModule(const std::string& module, const std::string& name,
                                            int depth = 0) const {
    auto it = modules.find(module);
    if (it == modules.end() || depth > 32) return std::nullopt;
    if (auto t = it->second.table.find(name); t != it->second.table.end()) return t->second;
    for (const auto& src : it->second.star_sources) {
      if (name.empty() || name[0] == '_') break;
      if (auto hit = LookupInModule(src, name, depth + 1)) return hit;
    }
    return std::nullopt;
  }

  std::string Canonicalize(const std::string& name) const {
    std::string current = name;
    std::set<std::string> seen;
    while (seen.insert(current).second) {
      std::vector<std::string> parts = SplitDots(current);
      std::size_t k = parts.size();
      while (k > 0 && !modules.count(JoinDots(parts, 0, k))) --k;
      if (k == 0 || k == parts.size()) return current;
      std::string module = JoinDots(parts, 0, k);
      auto target = LookupInModule(module, parts[k]);
      if (!target || *target == module + "." + parts[k]) return current;
      std::string next = *target;
      if (k + 1 < parts.size()) next += "." + JoinDots(parts, k + 1, parts.size());
      current = next;
    }
    return current;
  }

  // True when `name` lies inside an indexed module.
  bool InIndexedModule(const std::string& name) const {
    std::vector<std::string> parts = SplitDots(name);
    for (std::size_t k = parts.size(); k > 0; --k) {
      if (modules.count(JoinDots(parts, 0, k))) return true;
    }
    return false;
  }
};

namespace {

const std::map<std::string, std::string>& SequenceOrigins() {
  static const std::map<std::string, std::string> k = {
      {"typing.List", ""},          {"typing.Sequence", ""},
      {"typing.MutableSequence", ""}, {"typing.Iterable", ""},
      {"typing.Iterator", ""},      {"typing.Collection", ""},
      {"typing.Set", ""},           {"typing.MutableSet", ""},
      {"typing.AbstractSet", ""},   {"typing.FrozenSet", "builtins.frozenset"},
      {"typing.Deque", "collections.deque"},
      {"builtins.list", ""},        {"builtins.set", ""},
      {"builtins.frozenset", "builtins.frozenset"},
      {"collections.deque", "collections.deque"},
      {"collections.abc.Sequence", ""}, {"collections.abc.MutableSequence", ""},
      {"collections.abc.Iterable", ""}, {"collections.abc.Iterator", ""},
      {"collections.abc.Collection", ""}, {"collections.abc.Set", ""},
      {"collections.abc.MutableSet", ""}};
  return k;
}

const std::map<std::string, std::string>& MappingOrigins() {
  static const std::map<std::string, std::string> k = {
      {"typing.Dict", ""},
      {"typing.Mapping", ""},
      {"typing.MutableMapping", ""},
      {"typing.DefaultDict", "collections.defaultdict"},
      {"typing.OrderedDict", "collections.OrderedDict"},
      {"typing.Counter", "collections.Counter"},
      {"typing.ChainMap", "collections.ChainMap"},
      {"builtins.dict", ""},
      {"collections.OrderedDict", "collections.OrderedDict"},
      {"collections.defaultdict", "collections.defaultdict"},
      {"collections.Counter", "collections.Counter"},
      {"collections.ChainMap", "collections.ChainMap"},
      {"collections.abc.Mapping", ""},
      {"collections.abc.MutableMapping", ""}};
  return k;
}

bool IsOneOf(const std::string& name, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return name == o; });
}

bool IsNoneConst(const Expr* e) {
  return e && e->kind == ExprKind::kConstant && e->const_kind == py::ConstKind::kNone;
}

bool IsSelfAttr(const Expr& e, const std::string& self_name) {
  return !self_name.empty() && e.kind == ExprKind::kAttribute &&
         e.children[0]->kind == ExprKind::kName && e.children[0]->text == self_name;
}

bool IsSelfDict(const Expr& e, const std::string& self_name) {
  if (IsSelfAttr(e, self_name) && e.text == "__dict__") return true;
  // self.__dict__.copy()
  return e.kind == ExprKind::kCall && e.children.size() == 1 &&
         e.children[0]->kind == ExprKind::kAttribute && e.children[0]->text == "copy" &&
         IsSelfAttr(*e.children[0]->children[0], self_name) &&
         e.children[0]->children[0]->text == "__dict__";
}

bool HasDecorator(const Stmt& def, const char* name) {
  for (const auto& d : def.decorators) {
    if (d->kind == ExprKind::kName && d->text == name) return true;
  }
  return false;
}

// Name resolution and typing for one class body.
class Analyzer {
 public:
  Analyzer(const ModuleIndex::Data& data, std::string module) : data_(data), module_(std::move(module)) {}

  // Absolute dotted name of a module-scope reference, or nullopt for
  // locals and non-name expressions. `fallback` reports a builtins guess.
  std::optional<std::string> Resolve(const Expr& e, const std::set<std::string>* locals,
                                     bool* fallback = nullptr) const {
    if (fallback) *fallback = false;
    if (e.kind == ExprKind::kName) {
      if (locals && locals->count(e.text)) return std::nullopt;
      if (auto hit = data_.LookupInModule(module_, e.text)) return data_.Canonicalize(*hit);
      if (fallback) *fallback = true;
      return "builtins." + e.text;
    }
    if (e.kind == ExprKind::kAttribute) {
      auto base = Resolve(*e.children[0], locals, fallback);
      if (!base) return std::nullopt;
      if (fallback && *fallback) return std::nullopt;
      return data_.Canonicalize(*base + "." + e.text);
    }
    return std::nullopt;
  }

  TypeExpr Annotation(const Expr& e, int depth = 0) const {
    if (depth > 32) return TypeExpr::Unknown("annotation nested too deeply");
    switch (e.kind) {
      case ExprKind::kConstant:
        if (e.const_kind == py::ConstKind::kNone) return TypeExpr::Named("builtins.NoneType");
        if (e.const_kind == py::ConstKind::kStr) {
          try {
            py::ExprPtr parsed = py::ParseExpression(e.text);
            return Annotation(*parsed, depth + 1);
          } catch (const py::SyntaxError&) {
            return TypeExpr::Unknown("unparseable string annotation '" + e.text + "'");
          }
        }
        return TypeExpr::Unknown("constant used as annotation");
      case ExprKind::kBinOp:
        if (e.text == "|") {
          return TypeExpr::Union({Annotation(*e.children[0], depth + 1), Annotation(*e.children[1], depth + 1)});
        }
        return TypeExpr::Unknown("operator in annotation");
      case ExprKind::kName:
      case ExprKind::kAttribute: {
        auto name = Resolve(e, nullptr);
        if (!name) return TypeExpr::Unknown("unresolvable annotation");
        return BareAnnotation(Normalize(*name));
      }
      case ExprKind::kSubscript:
        return Generic(e, depth);
      default:
        return TypeExpr::Unknown("unsupported annotation syntax");
    }
  }

  // Typing of a value expression inside a method.
  struct Scope {
    std::string self_name;
    std::string cls_name;  // first parameter of a classmethod
    std::map<std::string, std::optional<TypeExpr>> params;
    std::map<std::string, Evidence> locals;
    std::set<std::string> shadowed;  // params and locals
  };

  Evidence Value(const Expr& e, const Scope& scope, int depth = 0) const {
    if (depth > 32) return NoEvidence("expression nested too deeply");
    switch (e.kind) {
      case ExprKind::kConstant:
        return {TypeExpr::Named(ConstantType(e.const_kind)), kLiteral};
      case ExprKind::kJoinedStr:
        return {TypeExpr::Named("builtins.str"), kLiteral};
      case ExprKind::kList:
      case ExprKind::kSet: {
        if (e.children.empty()) return {TypeExpr::Sequence(TypeExpr::Unknown("empty container literal")), kLiteral};
        std::vector<TypeExpr> members;
        for (const auto& c : e.children) members.push_back(Value(*c, scope, depth + 1).type);
        return {TypeExpr::Sequence(TypeExpr::Union(std::move(members))), kLiteral};
      }
      case ExprKind::kTuple: {
        std::vector<TypeExpr> members;
        for (const auto& c : e.children) members.push_back(Value(*c, scope, depth + 1).type);
        return {TypeExpr::Tuple(std::move(members)), kLiteral};
      }
      case ExprKind::kDict: {
        if (e.children.empty()) {
          return {TypeExpr::Mapping(TypeExpr::Unknown("empty container literal"),
                                    TypeExpr::Unknown("empty container literal")),
                  kLiteral};
        }
        std::vector<TypeExpr> keys;
        std::vector<TypeExpr> values;
        for (std::size_t i = 0; i + 1 < e.children.size(); i += 2) {
          if (!e.children[i]) {
            keys.push_back(TypeExpr::Unknown("dict unpacking"));
            values.push_back(TypeExpr::Unknown("dict unpacking"));
            continue;
          }
          keys.push_back(Value(*e.children[i], scope, depth + 1).type);
          values.push_back(Value(*e.children[i + 1], scope, depth + 1).type);
        }
        return {TypeExpr::Mapping(TypeExpr::Union(std::move(keys)), TypeExpr::Union(std::move(values))),
                kLiteral};
      }
      case ExprKind::kComprehension:
        return NoEvidence("comprehension");
      case ExprKind::kBinOp:
        if (e.text == "*" || e.text == "+") {
          for (const auto& c : e.children) {
            if (c->kind == ExprKind::kList || c->kind == ExprKind::kTuple) {
              return Value(*c, scope, depth + 1);
            }
          }
        }
        return NoEvidence("result of operator '" + e.text + "'");
      case ExprKind::kBoolOp:
      case ExprKind::kIfExp: {
        std::vector<TypeExpr> members;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          if (e.kind == ExprKind::kIfExp && i == 1) continue;  // the test
          members.push_back(Value(*e.children[i], scope, depth + 1).type);
        }
        return {TypeExpr::Union(std::move(members)), kLiteral};
      }
      case ExprKind::kCompare:
        return {TypeExpr::Named("builtins.bool"), kLiteral};
      case ExprKind::kUnary:
        if (e.text == "not") return {TypeExpr::Named("builtins.bool"), kLiteral};
        if (e.children[0]->kind == ExprKind::kConstant) return Value(*e.children[0], scope, depth + 1);
        return NoEvidence("result of operator '" + e.text + "'");
      case ExprKind::kName:
        return NameValue(e, scope);
      case ExprKind::kAttribute:
        return Reference(e, scope);
      case ExprKind::kCall:
        return Call(e, scope);
      default:
        return NoEvidence("untyped expression");
    }
  }

  // The callable of a `__reduce__` tuple.
  std::optional<std::string> Callable(const Expr& e, const Scope& scope, const std::string& cls,
                                      std::string& reason) const {
    if (e.kind == ExprKind::kName && (e.text == scope.self_name || e.text == scope.cls_name) &&
        !scope.cls_name.empty() && e.text == scope.cls_name) {
      return cls;
    }
    if (IsSelfAttr(e, scope.self_name) && e.text == "__class__") return cls;
    if (e.kind == ExprKind::kCall && e.children.size() == 2 && e.children[0]->kind == ExprKind::kName &&
        e.children[0]->text == "type" && e.children[1]->kind == ExprKind::kName &&
        e.children[1]->text == scope.self_name) {
      return cls;
    }
    if (e.kind == ExprKind::kName || e.kind == ExprKind::kAttribute) {
      auto name = Resolve(e, &scope.shadowed);
      if (name) return name;
      reason = "callable is a local value";
      return std::nullopt;
    }
    reason = "callable is not a name";
    return std::nullopt;
  }

  const std::string& module() const { return module_; }

 private:
  static std::string ConstantType(py::ConstKind kind) {
    switch (kind) {
      case py::ConstKind::kNone: return "builtins.NoneType";
      case py::ConstKind::kTrue:
      case py::ConstKind::kFalse: return "builtins.bool";
      case py::ConstKind::kEllipsis: return "builtins.ellipsis";
      case py::ConstKind::kStr: return "builtins.str";
      case py::ConstKind::kBytes: return "builtins.bytes";
      case py::ConstKind::kInt: return "builtins.int";
      case py::ConstKind::kFloat: return "builtins.float";
      case py::ConstKind::kComplex: return "builtins.complex";
    }
    return "builtins.object";
  }

  static std::string Normalize(std::string name) {
    static const std::string kExt = "typing_extensions.";
    if (name.compare(0, kExt.size(), kExt) == 0) name = "typing." + name.substr(kExt.size());
    return name;
  }

  TypeExpr BareAnnotation(const std::string& name) const {
    if (auto it = SequenceOrigins().find(name); it != SequenceOrigins().end()) {
      return TypeExpr::Sequence(TypeExpr::Unknown("unparameterized " + name), it->second);
    }
    if (auto it = MappingOrigins().find(name); it != MappingOrigins().end()) {
      return TypeExpr::Mapping(TypeExpr::Unknown("unparameterized " + name),
                               TypeExpr::Unknown("unparameterized " + name), it->second);
    }
    if (IsOneOf(name, {"typing.Tuple", "builtins.tuple"})) {
      return TypeExpr::Sequence(TypeExpr::Unknown("unparameterized " + name));
    }
    if (IsOneOf(name, {"typing.Any", "typing.Callable", "collections.abc.Callable", "typing.Type",
                       "typing.Optional", "typing.Union", "typing.Literal"})) {
      return TypeExpr::Unknown(name);
    }
    if (data_.InIndexedModule(name) && !data_.classes.count(name)) {
      return TypeExpr::Unknown(name + " is not a class");
    }
    return TypeExpr::Named(name);
  }

  TypeExpr Generic(const Expr& e, int depth) const {
    auto origin_name = Resolve(*e.children[0], nullptr);
    if (!origin_name) return TypeExpr::Unknown("unresolvable generic annotation");
    std::string origin = Normalize(*origin_name);
    const Expr& slice = *e.children[1];
    std::vector<const Expr*> args;
    if (slice.kind == ExprKind::kTuple) {
      for (const auto& c : slice.children) args.push_back(c.get());
    } else {
      args.push_back(&slice);
    }
    auto arg = [&](std::size_t i) {
      return i < args.size() ? Annotation(*args[i], depth + 1)
                             : TypeExpr::Unknown("missing type argument of " + origin);
    };
    if (origin == "typing.Optional") return TypeExpr::Optional(arg(0));
    if (origin == "typing.Union") {
      std::vector<TypeExpr> members;
      for (std::size_t i = 0; i < args.size(); ++i) members.push_back(arg(i));
      return TypeExpr::Union(std::move(members));
    }
    if (auto it = SequenceOrigins().find(origin); it != SequenceOrigins().end()) {
      return TypeExpr::Sequence(arg(0), it->second);
    }
    if (auto it = MappingOrigins().find(origin); it != MappingOrigins().end()) {
      if (it->second == "collections.Counter") {
        return TypeExpr::Mapping(arg(0), TypeExpr::Named("builtins.int"), it->second);
      }
      return TypeExpr::Mapping(arg(0), arg(1), it->second);
    }
    if (IsOneOf(origin, {"typing.Tuple", "builtins.tuple"})) {
      if (args.size() == 2 && args[1]->kind == ExprKind::kConstant &&
          args[1]->const_kind == py::ConstKind::kEllipsis) {
        return TypeExpr::Sequence(arg(0));
      }
      if (slice.kind == ExprKind::kTuple && slice.children.empty()) return TypeExpr::Tuple({});
      std::vector<TypeExpr> members;
      for (std::size_t i = 0; i < args.size(); ++i) members.push_back(arg(i));
      return TypeExpr::Tuple(std::move(members));
    }
    if (IsOneOf(origin, {"typing.Type", "builtins.type"})) {
      TypeExpr inner = arg(0);
      if (inner.kind == TypeExpr::Kind::kNamed) return TypeExpr::Reference(inner.text);
      if (inner.kind == TypeExpr::Kind::kUnion) {
        for (auto& m : inner.args) {
          if (m.kind == TypeExpr::Kind::kNamed) m.kind = TypeExpr::Kind::kReference;
        }
        return inner;
      }
      return TypeExpr::Unknown("Type[...] of a non-class");
    }
    if (IsOneOf(origin, {"typing.ClassVar", "typing.Final", "typing.Annotated", "typing.Required",
                         "typing.NotRequired", "typing.ReadOnly"})) {
      return arg(0);
    }
    if (IsOneOf(origin, {"typing.Callable", "collections.abc.Callable", "typing.Literal"})) {
      return TypeExpr::Unknown(origin);
    }
    return BareAnnotation(origin);
  }

  Evidence NameValue(const Expr& e, const Scope& scope) const {
    if (auto it = scope.params.find(e.text); it != scope.params.end()) {
      if (it->second) return {*it->second, kParamFlow};
      return NoEvidence("unannotated parameter '" + e.text + "'");
    }
    if (auto it = scope.locals.find(e.text); it != scope.locals.end()) return it->second;
    if (scope.shadowed.count(e.text)) return NoEvidence("local '" + e.text + "'");
    return Reference(e, scope);
  }

  // A name or attribute chain naming a module-level object.
  Evidence Reference(const Expr& e, const Scope& scope) const {
    bool fallback = false;
    auto name = Resolve(e, &scope.shadowed, &fallback);
    if (!name) return NoEvidence("attribute of a local value");
    if (fallback) {
      std::string bare = name->substr(std::string("builtins.").size());
      if (BuiltinTypes().count(bare)) return {TypeExpr::Reference(*name), kLiteral};
      return NoEvidence("unresolved name '" + bare + "'");
    }
    if (data_.InIndexedModule(*name) && !data_.classes.count(*name) && !data_.functions.count(*name)) {
      return NoEvidence("value of " + *name);
    }
    return {TypeExpr::Reference(*name), kLiteral};
  }

  Evidence Call(const Expr& e, const Scope& scope) const {
    bool fallback = false;
    auto callee = Resolve(*e.children[0], &scope.shadowed, &fallback);
    if (!callee) return NoEvidence("result of a call");
    if (data_.classes.count(*callee)) return {TypeExpr::Named(*callee), kConstructor};
    if (fallback || callee->compare(0, 9, "builtins.") == 0) {
      std::string bare = callee->substr(9);
      if (BuiltinTypes().count(bare) && bare != "type") return {TypeExpr::Named(*callee), kConstructor};
      return NoEvidence("result of " + *callee + "()");
    }
    if (data_.InIndexedModule(*callee)) return NoEvidence("result of " + *callee + "()");
    return {TypeExpr::Named(*callee), kConstructor};
  }

  const ModuleIndex::Data& data_;
  std::string module_;
};

// Evidence gathered for one class from its own source.
struct ClassFacts {
  std::map<std::string, std::vector<Evidence>> evidence;
  std::vector<std::string> warnings;
  const Stmt* reduce = nullptr;  // own __reduce_ex__ or __reduce__
};

void CollectLocalNames(const Expr& target, std::set<std::string>& out) {
  if (target.kind == ExprKind::kName) out.insert(target.text);
  if (target.kind == ExprKind::kTuple || target.kind == ExprKind::kList ||
      target.kind == ExprKind::kStarred) {
    for (const auto& c : target.children) CollectLocalNames(*c, out);
  }
}

void CollectAssignedNames(const std::vector<py::StmtPtr>& body, std::set<std::string>& out) {
  for (const auto& s : body) {
    switch (s->kind) {
      case StmtKind::kAssign:
        for (std::size_t i = 0; i + 1 < s->exprs.size(); ++i) CollectLocalNames(*s->exprs[i], out);
        break;
      case StmtKind::kAnnAssign:
      case StmtKind::kAugAssign:
        CollectLocalNames(*s->exprs[0], out);
        break;
      case StmtKind::kImport:
      case StmtKind::kImportFrom:
        for (const auto& n : s->names) {
          out.insert(!n.asname.empty() ? n.asname : n.name.substr(0, n.name.find('.')));
        }
        break;
      case StmtKind::kFunctionDef:
      case StmtKind::kClassDef:
        out.insert(s->name);
        break;
      case StmtKind::kBlock:
        CollectAssignedNames(s->body, out);
        break;
      default:
        break;
    }
  }
}

Analyzer::Scope MethodScope(const Analyzer& analyzer, const Stmt& def) {
  Analyzer::Scope scope;
  bool is_static = HasDecorator(def, "staticmethod");
  bool is_class = HasDecorator(def, "classmethod");
  for (std::size_t i = 0; i < def.params.size(); ++i) {
    const auto& p = def.params[i];
    std::string name = p.name;
    name.erase(0, name.find_first_not_of('*'));
    if (i == 0 && !is_static && p.name[0] != '*') {
      (is_class ? scope.cls_name : scope.self_name) = name;
    } else if (p.annotation && p.name[0] != '*') {
      scope.params[name] = analyzer.Annotation(*p.annotation);
    } else {
      scope.params[name] = std::nullopt;
    }
    scope.shadowed.insert(name);
  }
  CollectAssignedNames(def.body, scope.shadowed);
  return scope;
}

// Walks a method body in order, tracking locals and recording evidence
// for `self.<attr>` writes when `facts` is set.
void WalkMethod(const Analyzer& analyzer, const std::vector<py::StmtPtr>& body, Analyzer::Scope& scope,
                ClassFacts* facts, const std::function<bool(const Stmt&)>& on_return) {
  std::function<void(const Expr&, const Evidence&, const Expr*)> assign =
      [&](const Expr& target, const Evidence& value, const Expr* value_expr) {
        if (IsSelfAttr(target, scope.self_name)) {
          if (facts) facts->evidence[target.text].push_back(value);
        } else if (target.kind == ExprKind::kName) {
          scope.locals[target.text] = value;
        } else if (target.kind == ExprKind::kTuple || target.kind == ExprKind::kList) {
          bool pairwise = value_expr && (value_expr->kind == ExprKind::kTuple || value_expr->kind == ExprKind::kList) &&
                          value_expr->children.size() == target.children.size();
          for (std::size_t i = 0; i < target.children.size(); ++i) {
            if (pairwise) {
              const Expr& v = *value_expr->children[i];
              assign(*target.children[i], analyzer.Value(v, scope), &v);
            } else {
              assign(*target.children[i], NoEvidence("tuple unpacking"), nullptr);
            }
          }
        } else if (target.kind == ExprKind::kStarred) {
          assign(*target.children[0], NoEvidence("starred unpacking"), nullptr);
        }
      };
  for (const auto& s : body) {
    switch (s->kind) {
      case StmtKind::kAssign: {
        const Expr& value = *s->exprs.back();
        Evidence ev = analyzer.Value(value, scope);
        for (std::size_t i = 0; i + 1 < s->exprs.size(); ++i) assign(*s->exprs[i], ev, &value);
        break;
      }
      case StmtKind::kAnnAssign:
        assign(*s->exprs[0], Evidence{analyzer.Annotation(*s->exprs[1]), kAnnotation}, nullptr);
        break;
      case StmtKind::kReturn:
        if (on_return && on_return(*s)) return;
        break;
      case StmtKind::kBlock:
        WalkMethod(analyzer, s->body, scope, facts, on_return);
        break;
      default:
        break;
    }
  }
}

TypeExpr Settle(const std::vector<Evidence>& evidence) {
  int best = kNoEvidence;
  for (const auto& e : evidence) best = std::min(best, e.rank);
  if (best == kNoEvidence) return evidence.front().type;
  std::vector<TypeExpr> members;
  for (const auto& e : evidence) {
    if (e.rank == best) members.push_back(e.type);
  }
  return TypeExpr::Union(std::move(members));
}

void CollectMethods(const std::vector<py::StmtPtr>& body, std::vector<const Stmt*>& out) {
  for (const auto& s : body) {
    if (s->kind == StmtKind::kFunctionDef) out.push_back(s.get());
    if (s->kind == StmtKind::kBlock) CollectMethods(s->body, out);
  }
}

ClassFacts GatherFacts(const Analyzer& analyzer, const Stmt& cls) {
  ClassFacts facts;
  std::function<void(const std::vector<py::StmtPtr>&)> body_fields = [&](const std::vector<py::StmtPtr>& body) {
    for (const auto& s : body) {
      if (s->kind == StmtKind::kAnnAssign && s->exprs[0]->kind == ExprKind::kName) {
        facts.evidence[s->exprs[0]->text].push_back({analyzer.Annotation(*s->exprs[1]), kAnnotation});
      }
      if (s->kind == StmtKind::kBlock) body_fields(s->body);
    }
  };
  body_fields(cls.body);
  std::vector<const Stmt*> methods;
  CollectMethods(cls.body, methods);
  const Stmt* reduce = nullptr;
  const Stmt* reduce_ex = nullptr;
  for (const Stmt* m : methods) {
    if (m->name == "__reduce__" && !reduce) reduce = m;
    if (m->name == "__reduce_ex__" && !reduce_ex) reduce_ex = m;
    if (HasDecorator(*m, "staticmethod") || HasDecorator(*m, "classmethod")) continue;
    Analyzer::Scope scope = MethodScope(analyzer, *m);
    if (scope.self_name.empty()) continue;
    WalkMethod(analyzer, m->body, scope, &facts, nullptr);
  }
  facts.reduce = reduce_ex ? reduce_ex : reduce;
  return facts;
}

TypeExpr ReduceComponent(const Analyzer& analyzer, const Expr& e, const Analyzer::Scope& scope,
                         const ClassRecord& record) {
  if (e.kind == ExprKind::kName && e.text == scope.self_name) return TypeExpr::Named(record.name);
  if (IsSelfDict(e, scope.self_name)) {
    std::vector<TypeExpr> values;
    for (const auto& [attr, type] : record.attributes) values.push_back(type);
    return TypeExpr::Mapping(TypeExpr::Named("builtins.str"), TypeExpr::Union(std::move(values)));
  }
  if (IsSelfAttr(e, scope.self_name)) {
    auto it = record.attributes.find(e.text);
    if (it != record.attributes.end()) return it->second;
    return TypeExpr::Unknown("attribute '" + e.text + "' is not known");
  }
  if (e.kind == ExprKind::kTuple) {
    std::vector<TypeExpr> members;
    for (const auto& c : e.children) members.push_back(ReduceComponent(analyzer, *c, scope, record));
    return TypeExpr::Tuple(std::move(members));
  }
  return analyzer.Value(e, scope).type;
}

ReduceSummary Summarize(const Analyzer& analyzer, const Stmt& method, ClassRecord& record) {
  ReduceSummary summary;
  Analyzer::Scope scope = MethodScope(analyzer, method);
  const Expr* tuple = nullptr;
  WalkMethod(analyzer, method.body, scope, nullptr, [&](const Stmt& ret) {
    if (ret.exprs.empty()) return false;
    const Expr& v = *ret.exprs[0];
    if (v.kind != ExprKind::kTuple || v.children.size() < 2) return false;
    tuple = &v;
    return true;
  });
  std::string where = record.name + "." + method.name;
  if (!tuple) {
    summary.callable_reason = method.name + " does not return a literal tuple";
    record.warnings.push_back(where + ": " + summary.callable_reason);
    return summary;
  }
  summary.callable = analyzer.Callable(*tuple->children[0], scope, record.name, summary.callable_reason);
  if (!summary.callable) record.warnings.push_back(where + ": " + summary.callable_reason);
  const Expr& args = *tuple->children[1];
  if (args.kind == ExprKind::kTuple) {
    for (const auto& a : args.children) summary.arg_types.push_back(ReduceComponent(analyzer, *a, scope, record));
  } else {
    summary.arg_types.push_back(TypeExpr::Unknown("arguments are not a literal tuple"));
  }
  if (tuple->children.size() > 2 && !IsNoneConst(tuple->children[2].get())) {
    const Expr& state = *tuple->children[2];
    if (IsSelfDict(state, scope.self_name)) {
      for (const auto& [attr, type] : record.attributes) summary.state_types.push_back(type);
    } else {
      summary.state_types.push_back(ReduceComponent(analyzer, state, scope, record));
    }
  }
  if (tuple->children.size() > 3 && !IsNoneConst(tuple->children[3].get())) {
    summary.state_types.push_back(TypeExpr::Sequence(TypeExpr::Unknown("list items returned by " + method.name)));
    record.warnings.push_back(where + ": list items iterator is not analysed");
  }
  if (tuple->children.size() > 4 && !IsNoneConst(tuple->children[4].get())) {
    summary.state_types.push_back(TypeExpr::Mapping(TypeExpr::Unknown("dict items returned by " + method.name),
                                                    TypeExpr::Unknown("dict items returned by " + method.name)));
    record.warnings.push_back(where + ": dict items iterator is not analysed");
  }
  return summary;
}

std::string ModuleNameFor(const std::filesystem::path& rel, const std::string& package, bool& is_package) {
  std::vector<std::string> parts;
  for (const auto& p : rel.parent_path()) parts.push_back(p.string());
  std::string stem = rel.stem().string();
  is_package = stem == "__init__";
  if (!is_package) parts.push_back(stem);
  std::string name = package;
  for (const auto& p : parts) name += "." + p;
  return name;
}

// Absolute module named by a `from` statement.
std::string FromTarget(const ModuleIndex::Data::Module& m, const Stmt& s) {
  if (s.level == 0) return s.name;
  std::vector<std::string> parts = SplitDots(m.name);
  std::size_t up = static_cast<std::size_t>(s.level) - (m.is_package ? 1 : 0);
  if (up > parts.size()) up = parts.size();
  parts.resize(parts.size() - up);
  std::string base = JoinDots(parts, 0, parts.size());
  if (s.name.empty()) return base;
  return base.empty() ? s.name : base + "." + s.name;
}

void BuildTable(ModuleIndex::Data& data, ModuleIndex::Data::Module& m, const std::vector<py::StmtPtr>& body,
                std::vector<ClassSource>& classes) {
  for (const auto& s : body) {
    switch (s->kind) {
      case StmtKind::kImport:
        for (const auto& n : s->names) {
          if (!n.asname.empty()) {
            m.table[n.asname] = n.name;
          } else {
            std::string top = n.name.substr(0, n.name.find('.'));
            m.table[top] = top;
          }
        }
        break;
      case StmtKind::kImportFrom: {
        std::string target = FromTarget(m, *s);
        if (target == "__future__") break;
        for (const auto& n : s->names) {
          if (n.name == "*") {
            m.star_sources.push_back(target);
            continue;
          }
          m.table[n.asname.empty() ? n.name : n.asname] = target.empty() ? n.name : target + "." + n.name;
        }
        break;
      }
      case StmtKind::kClassDef: {
        std::string qual = m.name + "." + s->name;
        m.table[s->name] = qual;
        std::function<void(const Stmt&, const std::string&)> add = [&](const Stmt& c, const std::string& name) {
          classes.push_back(ClassSource{name, m.name, &c});
          for (const auto& inner : c.body) {
            if (inner->kind == StmtKind::kClassDef) add(*inner, name + "." + inner->name);
          }
        };
        add(*s, qual);
        break;
      }
      case StmtKind::kFunctionDef:
        m.table[s->name] = m.name + "." + s->name;
        data.functions.insert(m.name + "." + s->name);
        break;
      case StmtKind::kAssign:
      case StmtKind::kAnnAssign: {
        std::set<std::string> names;
        std::size_t targets = s->kind == StmtKind::kAssign ? s->exprs.size() - 1 : 1;
        for (std::size_t i = 0; i < targets; ++i) CollectLocalNames(*s->exprs[i], names);
        for (const auto& n : names) {
          m.table[n] = m.name + "." + n;
          data.variables.insert(m.name + "." + n);
        }
        break;
      }
      case StmtKind::kBlock:
        BuildTable(data, m, s->body, classes);
        break;
      default:
        break;
    }
  }
}

}  // namespace

ModuleIndex::ModuleIndex(std::unique_ptr<Data> data) : data_(std::move(data)) {}
ModuleIndex::ModuleIndex(ModuleIndex&&) noexcept = default;
ModuleIndex& ModuleIndex::operator=(ModuleIndex&&) noexcept = default;
ModuleIndex::~ModuleIndex() = default;

ModuleIndex ModuleIndex::Build(const std::filesystem::path& root_path, const std::string& package_name) {
  namespace fs = std::filesystem;
  auto data = std::make_unique<Data>();
  data->package = package_name;
  std::error_code ec;
  fs::path dir = root_path / package_name;
  if (!fs::is_directory(dir, ec)) dir = root_path;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kNoSources, "no Python sources: " + root_path.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(dir, ec); it != fs::recursive_directory_iterator(); ++it) {
    const std::string leaf = it->path().filename().string();
    if (it->is_directory() && (leaf == "__pycache__" || leaf.front() == '.')) {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && it->path().extension() == ".py") files.push_back(it->path());
  }
  if (files.empty()) throw Error(ErrorCode::kNoSources, "no Python sources under " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<ClassSource> sources;
  for (const auto& file : files) {
    fs::path rel = fs::relative(file, dir);
    Data::Module m;
    m.file = rel.generic_string();
    m.name = ModuleNameFor(rel, package_name, m.is_package);
    try {
      m.tree = py::ParseModule(ReadFileBytes(file));
    } catch (const py::SyntaxError& e) {
      data->errors.push_back(FileError{m.file, e.line, e.what()});
      continue;
    }
    data->modules.emplace(m.name, std::move(m));
  }
  for (auto& [name, m] : data->modules) BuildTable(*data, m, m.tree, sources);

  // Class names first so that typing can tell classes from other values.
  for (const auto& src : sources) {
    ClassRecord record;
    record.name = src.name;
    record.defined_at = SourceLocation{src.module, src.stmt->line};
    data->classes.emplace(src.name, std::move(record));
  }
  std::map<std::string, ClassFacts> facts;
  std::map<std::string, std::map<std::string, TypeExpr>> own;
  for (const auto& src : sources) {
    Analyzer analyzer(*data, src.module);
    ClassRecord& record = data->classes.at(src.name);
    const Stmt& cls = *src.stmt;
    for (std::size_t i = 0; i < cls.exprs.size(); ++i) {
      if (!cls.keywords[i].empty()) continue;
      const Expr* base = cls.exprs[i].get();
      if (base->kind == ExprKind::kSubscript) base = base->children[0].get();
      bool fallback = false;
      auto name = analyzer.Resolve(*base, nullptr, &fallback);
      if (!name) {
        record.warnings.push_back(src.name + ": base at line " + std::to_string(cls.exprs[i]->line) +
                                  " is not a name");
        continue;
      }
      record.bases.push_back(*name);
      if (!data->classes.count(*name) && (!fallback || !IsKnownBuiltinClass(name->substr(9)))) {
        record.warnings.push_back(src.name + ": base " + *name + " is not in the index");
      }
    }
    facts[src.name] = GatherFacts(analyzer, cls);
    for (const auto& [attr, ev] : facts[src.name].evidence) own[src.name][attr] = Settle(ev);
  }

  // Merge attribute tables: own first, then bases depth-first.
  std::map<std::string, int> state;  // 1 visiting, 2 done
  std::function<void(const std::string&)> merge = [&](const std::string& name) {
    if (state[name]) return;
    state[name] = 1;
    ClassRecord& record = data->classes.at(name);
    record.attributes = own[name];
    std::map<std::string, std::string> provider;
    for (const auto& base : record.bases) {
      if (!data->classes.count(base) || state[base] == 1) continue;
      merge(base);
      for (const auto& [attr, type] : data->classes.at(base).attributes) {
        if (own[name].count(attr)) continue;
        auto [it, inserted] = record.attributes.emplace(attr, type);
        if (!inserted && !(it->second == type)) {
          record.warnings.push_back(name + ": attribute '" + attr + "' differs between bases " +
                                    provider[attr] + " and " + base + "; using " + provider[attr]);
        }
        if (inserted) provider[attr] = base;
      }
    }
    state[name] = 2;
  };
  for (const auto& src : sources) merge(src.name);

  // Ancestors and reduce summaries.
  for (const auto& src : sources) {
    NameSet& anc = data->ancestors[src.name];
    std::vector<std::string> stack(data->classes.at(src.name).bases);
    while (!stack.empty()) {
      std::string b = stack.back();
      stack.pop_back();
      if (!anc.insert(b).second) continue;
      if (auto it = data->classes.find(b); it != data->classes.end()) {
        stack.insert(stack.end(), it->second.bases.begin(), it->second.bases.end());
      }
    }
  }
  for (const auto& src : sources) {
    ClassRecord& record = data->classes.at(src.name);
    // Nearest definition: own, then bases depth-first.
    std::string owner;
    std::set<std::string> seen;
    std::function<bool(const std::string&)> find = [&](const std::string& name) {
      if (!seen.insert(name).second || !facts.count(name)) return false;
      if (facts[name].reduce) {
        owner = name;
        return true;
      }
      for (const auto& b : data->classes.at(name).bases) {
        if (find(b)) return true;
      }
      return false;
    };
    if (!find(src.name)) continue;
    std::string module = data->classes.at(owner).defined_at.module;
    Analyzer analyzer(*data, module);
    record.reduce_summary = Summarize(analyzer, *facts[owner].reduce, record);
  }
  for (auto& [name, record] : data->classes) {
    std::sort(record.warnings.begin(), record.warnings.end());
    record.warnings.erase(std::unique(record.warnings.begin(), record.warnings.end()), record.warnings.end());
  }
  return ModuleIndex(std::move(data));
}

const std::string& ModuleIndex::package() const { return data_->package; }

std::vector<std::string> ModuleIndex::ModuleNames() const {
  std::vector<std::string> out;
  for (const auto& [name, m] : data_->modules) out.push_back(name);
  return out;
}

const std::map<std::string, std::string>* ModuleIndex::ImportTable(const std::string& module) const {
  auto it = data_->modules.find(module);
  return it == data_->modules.end() ? nullptr : &it->second.table;
}

const std::vector<FileError>& ModuleIndex::errors() const { return data_->errors; }

std::string ModuleIndex::Canonicalize(const std::string& name) const { return data_->Canonicalize(name); }

const ClassRecord* ModuleIndex::FindClass(const std::string& name) const {
  auto it = data_->classes.find(Canonicalize(name));
  return it == data_->classes.end() ? nullptr : &it->second;
}

const ClassRecord& ModuleIndex::ResolveClass(const std::string& name) const {
  const ClassRecord* record = FindClass(name);
  if (!record) throw Error(ErrorCode::kClassNotFound, "class not found: " + name, std::nullopt, name);
  return *record;
}

NameSet ModuleIndex::SubclassesOf(const std::string& name) const {
  std::string target = Canonicalize(name);
  NameSet out;
  for (const auto& [cls, anc] : data_->ancestors) {
    if (anc.count(target)) out.insert(cls);
  }
  return out;
}

std::vector<std::string> ModuleIndex::ClassNames() const {
  std::vector<std::string> out;
  for (const auto& [name, r] : data_->classes) out.push_back(name);
  return out;
}

std::string ModuleIndex::DebugDump() const {
  std::ostringstream out;
  out << "package " << data_->package << "\n";
  for (const auto& [name, m] : data_->modules) {
    out << "module " << name << " (" << m.file << ")\n";
    for (const auto& [alias, target] : m.table) out << "  " << alias << " -> " << target << "\n";
    for (const auto& s : m.star_sources) out << "  * -> " << s << "\n";
  }
  for (const auto& [name, r] : data_->classes) {
    out << "class " << name << " (" << r.defined_at.module << ":" << r.defined_at.line << ")\n";
    for (const auto& b : r.bases) out << "  base " << b << "\n";
    for (const auto& [attr, type] : r.attributes) out << "  attr " << attr << ": " << type.ToString() << "\n";
    if (r.reduce_summary) {
      const auto& s = *r.reduce_summary;
      out << "  reduce " << (s.callable ? *s.callable : "Unknown(" + s.callable_reason + ")") << "\n";
      for (const auto& t : s.arg_types) out << "    arg " << t.ToString() << "\n";
      for (const auto& t : s.state_types) out << "    state " << t.ToString() << "\n";
    }
    for (const auto& w : r.warnings) out << "  warning " << w << "\n";
  }
  for (const auto& e : data_->errors) out << "error " << e.file << ":" << e.line << ": " << e.message << "\n";
  return out.str();
}

}  // namespace pickleward
