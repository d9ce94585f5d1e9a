#pragma once

#include <string>
#include <vector>

#include "txsc/history.hpp"

namespace txsc {

enum class ConflictKind { RW, WR, WW };

std::string to_string(ConflictKind k);

struct ConflictEdge {
    std::string from;  // span ids
    std::string to;
    std::string chain;
    std::string contract;
    std::string attr;
    ConflictKind kind = ConflictKind::RW;
};

struct Verdict {
    bool serializable = false;
    std::vector<std::string> witness_order;   // present when a replayed witness exists
    std::vector<ConflictEdge> conflict_cycle; // present when not serializable and a cycle exists
    std::string method;                       // "permutation" or "conflict-graph"
    std::string notes;
    Json to_json() const;
};

/// Serializability of the committed history with respect to client spans.
///
/// Within `bound` spans this is an exhaustive view-style oracle: some
/// permutation of spans, re-executed serially through the interpreter from
/// the recorded initial states, must reproduce each span's observed reads
/// (waived for spans that committed nothing; their abort is the correct
/// response to staleness), per-event outcomes and committed traces, and the
/// recorded final states. Above the bound, conflict-graph acyclicity is used
/// when `fallback_graph` is set (sound for conflict-serializability, may
/// reject view-serializable histories); otherwise BoundExceededError.
Verdict check(const History& history, int bound = 8, bool fallback_graph = false);

/// Directed conflict edges between spans: an edge u -> v exists when an
/// operation of u precedes a conflicting operation of v on the same
/// attribute in commit order. Observed reads participate for every span;
/// execution traces participate only for committed events.
std::vector<ConflictEdge> conflict_graph(const History& history);

}  // namespace txsc
