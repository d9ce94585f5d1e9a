#pragma once

#include <string_view>

#include "txsc/ast.hpp"

namespace txsc {

/// Parses a `.txsc` contract. Throws SyntaxError or DuplicateNameError.
/// Grammar summary:
///   contract NAME { attr TYPE NAME; ...  fn NAME(params) { stmts } ... }
/// with C-style blocks, `//` line comments and statement forms
///   x = expr;  requires(expr);  if (expr) { } else { }  transfer(to, amount);
///   external_query("service", "text");  return;  start_tx;  end_tx;
///   escrow(expr);  escrow_refund();  escrow_forfeit(expr);
///   lock_release(expr);  lock_forfeit(expr);
ContractAst parse_contract(std::string_view source);

}  // namespace txsc
