#pragma once

#include <string>
#include <vector>

#include "txsc/ast.hpp"

namespace txsc {

enum class DiagKind { TypeMismatch, UnresolvedName, BadOperand, MarkerMisuse, Other };

std::string to_string(DiagKind k);

struct Diagnostic {
    DiagKind kind;
    SourceLoc loc;
    std::string message;
    std::string str() const { return to_string(kind) + " at " + loc.str() + ": " + message; }
};

/// Static checks over a parsed contract. Empty result means the contract is
/// well-typed: every name resolves and every expression checks under the
/// primitive type set. msg.data.<key> values are dynamically typed; they
/// unify with any primitive here and are checked at execution time.
std::vector<Diagnostic> typecheck(const ContractAst& ast);

}  // namespace txsc
