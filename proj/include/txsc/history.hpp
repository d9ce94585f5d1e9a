#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "txsc/interp.hpp"
#include "txsc/value.hpp"

namespace txsc {

enum class EventKind { Deploy, Call, Callback };

std::string to_string(EventKind k);

/// One pre-call read a client performed against committed chain state.
struct ObservedRead {
    std::string chain;
    std::string contract;
    std::string attr;
    Value value;
    int tick = 0;
    std::uint64_t order = 0;  // position in the global commit/observation order
};

/// One committed execution belonging to a client span: the call itself or a
/// callback it triggered.
struct SpanEvent {
    EventKind kind = EventKind::Call;
    std::string chain;
    std::string contract;
    std::string fn;
    CallContext ctx;
    std::uint64_t order = 0;
    std::uint64_t block = 0;
    Outcome outcome = Outcome::Committed;
    std::string detail;
    std::uint64_t gas_used = 0;
    std::vector<std::pair<Address, std::uint64_t>> transfers;
    std::vector<ExternalRequest> external_requests;
    std::vector<TraceOp> trace;
    EnvLog env_log;
};

/// A client transaction span: reads observed before the call, the call, and
/// every callback the call triggered.
struct ClientSpan {
    std::string span_id;
    std::string client_id;
    std::vector<ObservedRead> observed_reads;
    std::vector<SpanEvent> events;
    std::vector<std::string> dropped_callbacks;

    bool any_committed() const {
        for (const auto& e : events)
            if (e.outcome == Outcome::Committed) return true;
        return false;
    }
};

/// Deployment record: enough to rebuild the contract and its initial state.
struct DeployedContract {
    std::string chain;
    std::string name;
    std::string source;  // canonical printed form
    std::string deployer;
    CallContext deploy_ctx;
    ObjectState initial_state;
};

struct LockHistoryRecord {
    std::string lock_id;
    std::string holder;
    std::vector<std::string> items;  // "chain/contract/attr"
    std::string status;              // Held | Released | Forfeited
    int acquired_tick = 0;
    int released_tick = -1;
};

struct FinalState {
    std::string chain;
    std::string contract;
    ObjectState state;
};

struct History {
    std::vector<DeployedContract> contracts;
    std::vector<ClientSpan> spans;
    std::vector<LockHistoryRecord> locks;
    std::vector<FinalState> finals;
};

/// Canonical JSON with stable field order; equal histories produce equal
/// bytes. Schema documented in docs/history-schema.md.
std::string export_history(const History& h);
Json history_to_json(const History& h);
History history_from_json(const Json& j);

}  // namespace txsc
