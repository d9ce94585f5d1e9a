#pragma once

#include <string>

#include "txsc/ast.hpp"

namespace txsc {

/// Canonical source emission. parse_contract(print_contract(ast)) is
/// structurally identical to ast.
std::string print_contract(const ContractAst& ast);

/// Single expression, as the printer would embed it in a statement.
std::string print_expr(const Expr& e);

/// Single statement at the given indent depth (two spaces per level).
std::string print_stmt(const Stmt& s, int indent = 0);

}  // namespace txsc
