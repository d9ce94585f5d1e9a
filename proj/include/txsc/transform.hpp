#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "txsc/analysis.hpp"
#include "txsc/ast.hpp"

namespace txsc {

struct TransformConfig {
    // Attributes excluded from the injected freshness checks, per function.
    // Excluded names must be inside that function's read set.
    std::map<std::string, std::set<std::string>> check_exclusions;
    // Stake required at a cross-domain entry point, in currency units.
    std::uint64_t deposit_amount = 0;
    // Identifier of the lock-manager chain (informational; lock records are
    // resolved by the executing environment).
    std::string lock_chain_id;

    /// Parses the TOML form: deposit_amount, lock_chain, [exclusions] table.
    static TransformConfig from_toml(const std::string& toml_text);

    /// Copy with the exclusions narrowed to functions of `ast`. Shared
    /// config files name functions across several contracts; the transform
    /// itself validates keys strictly.
    TransformConfig restricted_to(const ContractAst& ast) const;
};

struct FunctionTransform {
    std::string function;
    std::vector<std::string> injected_checks;       // freshness-checked attributes
    std::vector<std::string> generated_shadow_attrs;  // __after_* names
    int lock_checks = 0;
    int escrows = 0;
    int generated_statements = 0;
};

struct TransformReport {
    std::vector<FunctionTransform> per_function;
    Json to_json() const;
    int total_injected_checks() const;
    int total_shadow_attrs() const;
};

/// Freshness-check injection for single-domain transactional functions: a
/// prologue of `requires(attr == msg.data.attr)` per check-set attribute, in
/// declaration order, replaces the start/end markers.
ContractAst transform_sdtf(const ContractAst& ast, const ProfileMap& profiles,
                           const TransformConfig& config, TransformReport* report = nullptr);

/// Lock/deposit/after-image generation for cross-domain transactional
/// functions: lock-evidence check and escrow at the entry point, staging of
/// all entry writes into `__after_*` shadow attributes, copy-back plus lock
/// release and escrow refund in the callback, and a generated owner_recover
/// function for abandoned calls.
ContractAst transform_cdtf(const ContractAst& ast, const ProfileMap& profiles,
                           const TransformConfig& config, TransformReport* report = nullptr);

/// Full rewriting pass: transform_cdtf after transform_sdtf.
std::pair<ContractAst, TransformReport> transform(const ContractAst& ast,
                                                  const ProfileMap& profiles,
                                                  const TransformConfig& config);

}  // namespace txsc
