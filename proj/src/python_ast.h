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

// A parser for the part of Python that class indexing needs: the full
// statement and expression grammar is accepted, but only imports, class
// and function definitions, assignments and returns keep their structure.

#ifndef PICKLEWARD_SRC_PYTHON_AST_H_
#define PICKLEWARD_SRC_PYTHON_AST_H_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pickleward::py {

struct SyntaxError : std::runtime_error {
  SyntaxError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line(line) {}
  int line;
};

enum class ExprKind {
  kName,
  kAttribute,  // children[0].text
  kCall,       // children[0](children[1..]); keywords parallel to args
  kSubscript,  // children[0][children[1]]
  kConstant,
  kTuple,
  kList,
  kSet,
  kDict,       // children alternate key, value; a null key marks **value
  kComprehension,
  kBinOp,      // text is the operator
  kBoolOp,
  kCompare,
  kUnary,      // text is the operator
  kIfExp,      // body, test, orelse
  kLambda,
  kStarred,
  kJoinedStr,
  kSlice,
  kOther,
};

enum class ConstKind { kNone, kTrue, kFalse, kEllipsis, kStr, kBytes, kInt, kFloat, kComplex };

struct Expr {
  ExprKind kind = ExprKind::kOther;
  ConstKind const_kind = ConstKind::kNone;
  std::string text;  // name, attribute, operator, or decoded string constant
  std::vector<std::unique_ptr<Expr>> children;
  std::vector<std::string> keywords;  // kCall: keyword per argument, "" if positional
  int line = 0;
};

using ExprPtr = std::unique_ptr<Expr>;

struct Param {
  std::string name;
  ExprPtr annotation;
  ExprPtr default_value;
};

struct ImportName {
  std::string name;  // dotted for `import`, a single name for `from`
  std::string asname;
};

enum class StmtKind {
  kImport,
  kImportFrom,
  kClassDef,
  kFunctionDef,
  kAssign,     // targets..., value
  kAnnAssign,  // target, annotation, optional value
  kAugAssign,
  kReturn,
  kBlock,      // any other compound statement; body holds all its branches
  kOther,
};

struct Stmt {
  StmtKind kind = StmtKind::kOther;
  int line = 0;
  std::string name;  // class / function name, or `from` module
  int level = 0;     // relative import level
  std::vector<ImportName> names;
  std::vector<ExprPtr> exprs;  // bases, targets + value, annotation, return value
  std::vector<std::string> keywords;  // kClassDef: keyword per base ("" if positional)
  std::vector<ExprPtr> decorators;
  std::vector<Param> params;
  std::vector<std::unique_ptr<Stmt>> body;
};

using StmtPtr = std::unique_ptr<Stmt>;

// Throws SyntaxError.
std::vector<StmtPtr> ParseModule(std::string_view source);
ExprPtr ParseExpression(std::string_view source);

}  // namespace pickleward::py

#endif  // PICKLEWARD_SRC_PYTHON_AST_H_
