#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "txsc/analysis.hpp"
#include "txsc/ast.hpp"
#include "txsc/history.hpp"
#include "txsc/interp.hpp"
#include "txsc/scenario.hpp"

namespace txsc {

enum class LockStatus { Held, Released, Forfeited };

std::string to_string(LockStatus s);

struct LockRecordState {
    std::string lock_id;
    std::string holder;
    std::vector<std::string> items;  // "chain/contract/attr", sorted
    LockStatus status = LockStatus::Held;
    int acquired_tick = 0;
    int released_tick = -1;
};

struct EscrowCellState {
    std::uint64_t amount = 0;
    Address depositor;
};

/// One committed entry of a block: a contract execution or a lock-registry
/// operation. Every entry carries the gas payment made to the miner.
struct BlockEntry {
    enum class Kind { Deploy, Call, Callback, LockAcquire, LockRelease };
    Kind kind = Kind::Call;
    std::string span_id;
    std::string client_id;
    std::string contract;
    std::string fn;
    CallContext ctx;
    Outcome outcome = Outcome::Committed;
    std::string detail;
    std::uint64_t gas_used = 0;
    std::uint64_t gas_payment = 0;
    // lock-registry entries
    std::string lock_id;
    std::vector<std::string> lock_items;
    bool lock_granted = false;
    bool lock_forfeit = false;
};

struct Block {
    std::uint64_t index = 0;
    int tick = 0;
    std::string miner;
    std::string prev_digest;
    std::vector<BlockEntry> entries;
    std::string digest;
};

struct ChainResult {
    std::string id;
    std::vector<Block> blocks;
    std::map<std::string, ObjectState> objects;
    std::map<std::string, std::int64_t> accounts;
    std::map<std::string, LockRecordState> locks;
    std::map<std::string, EscrowCellState> escrows;
};

struct SimResult {
    History history;
    std::vector<ChainResult> chains;
    std::uint64_t total_gas_spent = 0;
    std::uint64_t total_gas_paid = 0;
    std::vector<std::string> warnings;

    const ChainResult* find_chain(const std::string& id) const;
    const ObjectState* find_object(const std::string& chain, const std::string& contract) const;
};

/// Native lock-registry handlers (the lock-manager chain executes these when
/// mining acquire/release entries).
struct LockGrant {
    bool granted = false;
    std::string lock_id;
};

LockGrant try_acquire(std::map<std::string, LockRecordState>& locks, int& counter,
                      const std::string& holder, const std::vector<std::string>& items, int tick);

enum class ReleaseResult { Ok, UnknownLock, AlreadyReleased };

ReleaseResult do_release(std::map<std::string, LockRecordState>& locks, const std::string& lock_id,
                         bool forfeit, int tick);

/// Runs a scenario to completion. Contract sources are looked up through
/// `resolver` by the file names in the config. Deterministic: equal
/// (config, sources) produce byte-identical exported histories. Throws
/// ConfigError on bad configs and ReplayMismatchError if re-executing all
/// blocks fails to reproduce the final state.
SimResult run(const ScenarioConfig& config, const SourceResolver& resolver);

}  // namespace txsc
