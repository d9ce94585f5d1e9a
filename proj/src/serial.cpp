#include "txsc/serial.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "txsc/errors.hpp"
#include "txsc/parse.hpp"

namespace txsc {

std::string to_string(ConflictKind k) {
    switch (k) {
        case ConflictKind::RW: return "RW";
        case ConflictKind::WR: return "WR";
        case ConflictKind::WW: return "WW";
    }
    return "?";
}

namespace {

using StateMap = std::map<std::string, ObjectState>;  // "chain|contract" -> state

std::string object_key(const std::string& chain, const std::string& contract) {
    return chain + "|" + contract;
}

struct ReplayWorld {
    std::map<std::string, ContractAst> code;  // "chain|contract" -> ast
    StateMap initial;

    explicit ReplayWorld(const History& h) {
        for (const auto& c : h.contracts) {
            code.emplace(object_key(c.chain, c.name), parse_contract(c.source));
            initial[object_key(c.chain, c.name)] = c.initial_state;
        }
    }
};

bool committed_class(Outcome o) { return o == Outcome::Committed; }

// Re-executes one span at the current state. Committed events must commit
// again with identical traces; aborted events must abort again. Observed
// reads must match the state for spans that committed anything.
bool replay_span(const ReplayWorld& world, StateMap& state, const ClientSpan& span) {
    if (span.any_committed()) {
        for (const auto& read : span.observed_reads) {
            auto it = state.find(object_key(read.chain, read.contract));
            if (it == state.end()) return false;
            auto av = it->second.attrs.find(read.attr);
            if (av == it->second.attrs.end() || !(av->second == read.value)) return false;
        }
    }
    for (const auto& event : span.events) {
        std::string key = object_key(event.chain, event.contract);
        auto code_it = world.code.find(key);
        auto state_it = state.find(key);
        if (code_it == world.code.end() || state_it == state.end()) return false;
        ReplayEnv env(event.env_log);
        ExecResult res;
        try {
            res = execute(code_it->second, event.fn, state_it->second, event.ctx, env);
        } catch (const TxscError&) {
            return false;
        }
        if (committed_class(res.outcome) != committed_class(event.outcome)) return false;
        if (res.committed()) {
            if (!(res.trace == event.trace)) return false;
            state_it->second = res.new_state;
        }
    }
    return true;
}

bool finals_match(const History& h, const StateMap& state) {
    for (const auto& fin : h.finals) {
        auto it = state.find(object_key(fin.chain, fin.contract));
        if (it == state.end()) return false;
        if (!(it->second == fin.state)) return false;
    }
    return true;
}

bool search(const ReplayWorld& world, const History& h, const StateMap& state,
            std::vector<std::size_t>& order, std::vector<bool>& used) {
    if (order.size() == h.spans.size()) return finals_match(h, state);
    for (std::size_t i = 0; i < h.spans.size(); ++i) {
        if (used[i]) continue;
        StateMap next = state;
        if (!replay_span(world, next, h.spans[i])) continue;
        used[i] = true;
        order.push_back(i);
        if (search(world, h, next, order, used)) return true;
        order.pop_back();
        used[i] = false;
    }
    return false;
}

struct Op {
    std::size_t span;
    std::uint64_t order;
    std::uint64_t sub;
    bool is_write;
    std::string chain, contract, attr;
};

std::vector<Op> collect_ops(const History& h) {
    std::vector<Op> ops;
    for (std::size_t i = 0; i < h.spans.size(); ++i) {
        const auto& span = h.spans[i];
        for (const auto& r : span.observed_reads)
            ops.push_back(Op{i, r.order, 0, false, r.chain, r.contract, r.attr});
        for (const auto& e : span.events) {
            if (e.outcome != Outcome::Committed) continue;
            for (std::size_t k = 0; k < e.trace.size(); ++k)
                ops.push_back(Op{i, e.order, k + 1, e.trace[k].is_write, e.chain, e.contract,
                                 e.trace[k].attr});
        }
    }
    std::sort(ops.begin(), ops.end(), [](const Op& a, const Op& b) {
        if (a.order != b.order) return a.order < b.order;
        return a.sub < b.sub;
    });
    return ops;
}

std::vector<ConflictEdge> cycle_from_graph(const History& h,
                                           const std::vector<ConflictEdge>& edges) {
    // prefer a two-span cycle on a single attribute (the classic stale-read
    // shape) before falling back to any cycle
    for (const auto& e : edges) {
        for (const auto& back : edges) {
            if (back.from == e.to && back.to == e.from && back.attr == e.attr &&
                back.chain == e.chain && back.contract == e.contract) {
                return {e, back};
            }
        }
    }
    // DFS over span ids; returns the edges along the first cycle found
    std::map<std::string, std::vector<const ConflictEdge*>> adj;
    for (const auto& e : edges) adj[e.from].push_back(&e);
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    std::vector<const ConflictEdge*> path;
    std::vector<ConflictEdge> cycle;

    std::function<bool(const std::string&)> dfs = [&](const std::string& u) -> bool {
        color[u] = 1;
        for (const ConflictEdge* e : adj[u]) {
            if (color[e->to] == 1) {
                // unwind the path back to e->to
                cycle.clear();
                bool keep = false;
                for (const ConflictEdge* p : path) {
                    if (p->from == e->to) keep = true;
                    if (keep) cycle.push_back(*p);
                }
                cycle.push_back(*e);
                return true;
            }
            if (color[e->to] == 0) {
                path.push_back(e);
                if (dfs(e->to)) return true;
                path.pop_back();
            }
        }
        color[u] = 2;
        return false;
    };
    for (const auto& span : h.spans) {
        if (color[span.span_id] == 0 && dfs(span.span_id)) return cycle;
    }
    return {};
}

std::vector<std::string> topological_order(const History& h,
                                           const std::vector<ConflictEdge>& edges) {
    std::map<std::string, std::set<std::string>> out_edges;
    std::map<std::string, int> in_degree;
    for (const auto& s : h.spans) in_degree[s.span_id] = 0;
    for (const auto& e : edges) {
        if (out_edges[e.from].insert(e.to).second) in_degree[e.to]++;
    }
    std::vector<std::string> order;
    // pick ready spans in history order for determinism
    std::vector<std::string> all;
    for (const auto& s : h.spans) all.push_back(s.span_id);
    std::set<std::string> done;
    while (order.size() < all.size()) {
        bool progressed = false;
        for (const auto& id : all) {
            if (done.contains(id) || in_degree[id] != 0) continue;
            order.push_back(id);
            done.insert(id);
            for (const auto& v : out_edges[id]) in_degree[v]--;
            progressed = true;
        }
        if (!progressed) return {};  // cyclic
    }
    return order;
}

}  // namespace

std::vector<ConflictEdge> conflict_graph(const History& h) {
    std::vector<Op> ops = collect_ops(h);
    std::vector<ConflictEdge> edges;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const Op& a = ops[i];
            const Op& b = ops[j];
            if (a.span == b.span) continue;
            if (a.chain != b.chain || a.contract != b.contract || a.attr != b.attr) continue;
            if (!a.is_write && !b.is_write) continue;
            ConflictKind kind = a.is_write ? (b.is_write ? ConflictKind::WW : ConflictKind::WR)
                                           : ConflictKind::RW;
            const auto& from = h.spans[a.span].span_id;
            const auto& to = h.spans[b.span].span_id;
            std::string dedup = from + "\x1f" + to + "\x1f" + a.chain + "/" + a.contract + "/" +
                                a.attr + "\x1f" + to_string(kind);
            if (seen.insert(dedup).second)
                edges.push_back(ConflictEdge{from, to, a.chain, a.contract, a.attr, kind});
        }
    }
    return edges;
}

Verdict check(const History& history, int bound, bool fallback_graph) {
    Verdict verdict;
    if (history.spans.size() > static_cast<std::size_t>(bound)) {
        if (!fallback_graph)
            throw BoundExceededError("history has " + std::to_string(history.spans.size()) +
                                     " spans, above the permutation bound " +
                                     std::to_string(bound));
        std::vector<ConflictEdge> edges = conflict_graph(history);
        std::vector<std::string> topo = topological_order(history, edges);
        verdict.method = "conflict-graph";
        verdict.serializable = !topo.empty() || history.spans.empty();
        if (verdict.serializable) {
            // validate the witness by replay when possible
            ReplayWorld world(history);
            StateMap state = world.initial;
            bool replay_ok = true;
            std::map<std::string, const ClientSpan*> by_id;
            for (const auto& s : history.spans) by_id[s.span_id] = &s;
            for (const auto& id : topo)
                if (!replay_span(world, state, *by_id.at(id))) {
                    replay_ok = false;
                    break;
                }
            if (replay_ok && finals_match(history, state)) {
                verdict.witness_order = topo;
                verdict.notes = "conflict-graph acyclic; witness validated by replay";
            } else {
                verdict.notes = "conflict-graph acyclic; topological order did not replay";
            }
        } else {
            verdict.conflict_cycle = cycle_from_graph(history, edges);
            verdict.notes =
                "conflict-graph approximation (may reject view-serializable histories)";
        }
        return verdict;
    }

    ReplayWorld world(history);
    std::vector<std::size_t> order;
    std::vector<bool> used(history.spans.size(), false);
    verdict.method = "permutation";
    if (search(world, history, world.initial, order, used)) {
        verdict.serializable = true;
        for (std::size_t i : order) verdict.witness_order.push_back(history.spans[i].span_id);
        bool waived = false;
        for (const auto& s : history.spans)
            if (!s.any_committed() && !s.observed_reads.empty()) waived = true;
        if (waived)
            verdict.notes = "aborted spans placed with observed reads marked invalidated-and-aborted";
    } else {
        verdict.serializable = false;
        verdict.conflict_cycle = cycle_from_graph(history, conflict_graph(history));
        verdict.notes = "no permutation of spans replays to the observed reads and final state";
    }
    return verdict;
}

Json Verdict::to_json() const {
    Json j = Json::object();
    j["serializable"] = serializable;
    j["method"] = method;
    j["witnessOrder"] = witness_order;
    Json cyc = Json::array();
    for (const auto& e : conflict_cycle) {
        cyc.push_back(Json{{"from", e.from},
                           {"to", e.to},
                           {"chain", e.chain},
                           {"contract", e.contract},
                           {"attr", e.attr},
                           {"kind", to_string(e.kind)}});
    }
    j["conflictCycle"] = cyc;
    if (!notes.empty()) j["notes"] = notes;
    return j;
}

}  // namespace txsc
