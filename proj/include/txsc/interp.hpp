#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "txsc/ast.hpp"
#include "txsc/value.hpp"

namespace txsc {

/// Materialized state of one deployed contract object.
struct ObjectState {
    std::string contract;
    std::map<std::string, Value> attrs;
    std::uint64_t balance = 0;

    bool operator==(const ObjectState&) const = default;
};

/// Implicit parameters accompanying one function call.
struct CallContext {
    Address sender;
    std::uint64_t value = 0;
    std::map<std::string, Value> data;
    std::uint64_t block_number = 0;
    std::uint64_t gas_budget = 0;
};

enum class Outcome { Committed, AbortedRequires, AbortedOutOfGas, AbortedError };

std::string to_string(Outcome o);

struct TraceOp {
    bool is_write = false;
    std::string attr;
    Value value;
    bool operator==(const TraceOp&) const = default;
};

struct ExternalRequest {
    std::string service;
    std::string query;
    std::string callback_id;
};

struct EscrowOp {
    enum class Kind { Deposit, Refund, Forfeit } kind;
    std::string lock_id;
    std::uint64_t amount = 0;  // Deposit only
    Address recipient;         // Forfeit only
};

struct LockOp {
    std::string lock_id;
    bool forfeit = false;  // false: Released, true: Forfeited
};

/// Host-environment results consumed during execution, recorded so a
/// history can be replayed without the live lock and escrow state.
struct EnvLog {
    std::vector<bool> lock_held;
    std::vector<std::string> oracle_address;
    std::vector<std::optional<std::uint64_t>> escrow_amount;
    bool operator==(const EnvLog&) const = default;
};

struct ExecResult {
    Outcome outcome = Outcome::Committed;
    std::string detail;  // failed check text or error reason
    SourceLoc fail_loc;
    ObjectState new_state;
    std::uint64_t gas_used = 0;
    std::vector<std::pair<Address, std::uint64_t>> transfers;
    std::vector<ExternalRequest> external_requests;
    std::vector<TraceOp> trace;
    // Effects the simulator applies at commit; empty unless Committed.
    std::vector<EscrowOp> escrow_ops;
    std::vector<LockOp> lock_ops;
    EnvLog env_log;

    bool committed() const { return outcome == Outcome::Committed; }
};

/// Read-only queries the interpreter makes against the hosting chain
/// environment. The simulator binds these to live chain state; tests and the
/// replay oracle substitute stubs.
class HostEnv {
public:
    virtual ~HostEnv() = default;
    virtual bool lock_held(const Value& lock_id) = 0;
    virtual Address oracle_address() = 0;
    virtual std::optional<std::uint64_t> escrow_amount(const Value& lock_id) = 0;
    virtual std::string new_callback_id() = 0;
};

/// Fixed-answer environment for standalone interpreter use.
class StubEnv : public HostEnv {
public:
    bool lock_held_answer = false;
    Address oracle = Address{"oracle"};
    std::optional<std::uint64_t> escrow = std::nullopt;

    bool lock_held(const Value&) override { return lock_held_answer; }
    Address oracle_address() override { return oracle; }
    std::optional<std::uint64_t> escrow_amount(const Value&) override { return escrow; }
    std::string new_callback_id() override { return "cb-" + std::to_string(next_id_++); }

private:
    int next_id_ = 0;
};

/// Replays recorded host answers in order; used by the serializability oracle.
class ReplayEnv : public HostEnv {
public:
    explicit ReplayEnv(EnvLog log) : log_(std::move(log)) {}
    bool lock_held(const Value&) override {
        return lh_ < log_.lock_held.size() ? log_.lock_held[lh_++] : false;
    }
    Address oracle_address() override {
        return Address{oa_ < log_.oracle_address.size() ? log_.oracle_address[oa_++] : ""};
    }
    std::optional<std::uint64_t> escrow_amount(const Value&) override {
        return ea_ < log_.escrow_amount.size() ? log_.escrow_amount[ea_++] : std::nullopt;
    }
    std::string new_callback_id() override { return "replay-cb-" + std::to_string(cb_++); }

private:
    EnvLog log_;
    std::size_t lh_ = 0, oa_ = 0, ea_ = 0;
    int cb_ = 0;
};

/// Executes one function call against a working copy of `state`. Every
/// non-marker statement costs one gas unit. Any non-committed outcome leaves
/// the returned state equal to the input state and stages no effects; the
/// gas used is still reported (the miner is paid either way).
ExecResult execute(const ContractAst& ast, const std::string& fn, const ObjectState& state,
                   const CallContext& ctx, HostEnv& env);

/// Attribute map with every declared attribute at its type's zero value.
ObjectState default_state(const ContractAst& ast);

/// Reads in `trace` that precede any write to the same attribute.
std::vector<TraceOp> pre_write_reads(const std::vector<TraceOp>& trace);

}  // namespace txsc
