#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "txsc/ast.hpp"

namespace txsc {

enum class Classification { SDTF, CDTF, NonTransactional };

std::string to_string(Classification c);

/// Static access profile of one contract function.
struct FunctionProfile {
    std::string function;
    // Attributes whose first access on some control-flow path is a read
    // before any write to them on that path (union over paths).
    std::set<std::string> read_set;
    // Attributes assigned on any path.
    std::set<std::string> write_set;
    // External services named in external_query statements.
    std::set<std::string> external_calls;
    // True iff external_calls is nonempty or the function is a designated
    // callback target (first statement `requires(msg.sender == oracle_address())`).
    bool triggers_callback = false;
    bool is_callback_target = false;
    Classification classification = Classification::NonTransactional;
};

using ProfileMap = std::map<std::string, FunctionProfile>;

/// Computes per-function read/write/external-call sets and the SDTF/CDTF
/// classification. Throws AnalysisError when a transactional function has an
/// empty write set (every function call must update at least one attribute).
ProfileMap analyze(const ContractAst& ast);

/// The attributes whose client-observed values must accompany a call to an
/// SDTF, in attribute declaration order. Throws AnalysisError when the
/// profile is not an SDTF.
std::vector<std::string> client_checkset(const ContractAst& ast, const FunctionProfile& profile);

/// Name of the designated callback target of the contract, if any.
std::optional<std::string> callback_target(const ProfileMap& profiles);

/// Attributes a lock must cover before calling `fn`: the union of read and
/// write sets of `fn` and, when `fn` issues external queries, of the
/// designated callback; generated (`__`-prefixed) attributes excluded.
std::set<std::string> lock_cover_set(const ContractAst& ast, const ProfileMap& profiles,
                                     const std::string& fn);

/// Profiles rendered as the JSON array `txsc analyze` prints.
Json profiles_to_json(const ContractAst& ast, const ProfileMap& profiles);

}  // namespace txsc
