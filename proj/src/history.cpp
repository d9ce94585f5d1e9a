#include "txsc/history.hpp"

#include "txsc/errors.hpp"

namespace txsc {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Deploy: return "deploy";
        case EventKind::Call: return "call";
        case EventKind::Callback: return "callback";
    }
    return "?";
}

namespace {

EventKind event_kind_from(const std::string& s) {
    if (s == "deploy") return EventKind::Deploy;
    if (s == "call") return EventKind::Call;
    if (s == "callback") return EventKind::Callback;
    throw TxscError("bad event kind '" + s + "'");
}

Outcome outcome_from(const std::string& s) {
    if (s == "Committed") return Outcome::Committed;
    if (s == "AbortedRequires") return Outcome::AbortedRequires;
    if (s == "AbortedOutOfGas") return Outcome::AbortedOutOfGas;
    if (s == "AbortedError") return Outcome::AbortedError;
    throw TxscError("bad outcome '" + s + "'");
}

Json data_json(const std::map<std::string, Value>& data) {
    Json j = Json::object();
    for (const auto& [k, v] : data) j[k] = v.to_json();
    return j;
}

std::map<std::string, Value> data_from(const Json& j) {
    std::map<std::string, Value> out;
    for (const auto& [k, v] : j.items()) out[k] = Value::from_json(v);
    return out;
}

Json ctx_json(const CallContext& ctx) {
    return Json{{"sender", ctx.sender.id},
                {"value", ctx.value},
                {"data", data_json(ctx.data)},
                {"blockNumber", ctx.block_number},
                {"gasBudget", ctx.gas_budget}};
}

CallContext ctx_from(const Json& j) {
    CallContext ctx;
    ctx.sender = Address{j.at("sender").get<std::string>()};
    ctx.value = j.at("value").get<std::uint64_t>();
    ctx.data = data_from(j.at("data"));
    ctx.block_number = j.at("blockNumber").get<std::uint64_t>();
    ctx.gas_budget = j.at("gasBudget").get<std::uint64_t>();
    return ctx;
}

Json state_json(const ObjectState& st) {
    Json attrs = Json::object();
    for (const auto& [k, v] : st.attrs) attrs[k] = v.to_json();
    return Json{{"contract", st.contract}, {"attrs", attrs}, {"balance", st.balance}};
}

ObjectState state_from(const Json& j) {
    ObjectState st;
    st.contract = j.at("contract").get<std::string>();
    for (const auto& [k, v] : j.at("attrs").items()) st.attrs[k] = Value::from_json(v);
    st.balance = j.at("balance").get<std::uint64_t>();
    return st;
}

Json trace_json(const std::vector<TraceOp>& trace) {
    Json arr = Json::array();
    for (const auto& op : trace)
        arr.push_back(Json{{"op", op.is_write ? "W" : "R"}, {"attr", op.attr}, {"value", op.value.to_json()}});
    return arr;
}

std::vector<TraceOp> trace_from(const Json& j) {
    std::vector<TraceOp> out;
    for (const auto& t : j)
        out.push_back(TraceOp{t.at("op").get<std::string>() == "W", t.at("attr").get<std::string>(),
                              Value::from_json(t.at("value"))});
    return out;
}

Json env_log_json(const EnvLog& log) {
    Json j = Json::object();
    if (!log.lock_held.empty()) j["lockHeld"] = log.lock_held;
    if (!log.oracle_address.empty()) j["oracleAddress"] = log.oracle_address;
    if (!log.escrow_amount.empty()) {
        Json arr = Json::array();
        for (const auto& a : log.escrow_amount) {
            if (a) arr.push_back(*a);
            else arr.push_back(nullptr);
        }
        j["escrowAmount"] = arr;
    }
    return j;
}

EnvLog env_log_from(const Json& j) {
    EnvLog log;
    if (j.contains("lockHeld"))
        for (const auto& b : j["lockHeld"]) log.lock_held.push_back(b.get<bool>());
    if (j.contains("oracleAddress"))
        for (const auto& s : j["oracleAddress"]) log.oracle_address.push_back(s.get<std::string>());
    if (j.contains("escrowAmount"))
        for (const auto& a : j["escrowAmount"]) {
            if (a.is_null()) log.escrow_amount.push_back(std::nullopt);
            else log.escrow_amount.push_back(a.get<std::uint64_t>());
        }
    return log;
}

Json event_json(const SpanEvent& e) {
    Json j = Json{{"kind", to_string(e.kind)}, {"chain", e.chain},   {"contract", e.contract},
                  {"fn", e.fn},                {"ctx", ctx_json(e.ctx)}, {"order", e.order},
                  {"block", e.block},          {"outcome", to_string(e.outcome)}};
    if (!e.detail.empty()) j["detail"] = e.detail;
    j["gasUsed"] = e.gas_used;
    if (!e.transfers.empty()) {
        Json arr = Json::array();
        for (const auto& [to, amount] : e.transfers)
            arr.push_back(Json{{"to", to.id}, {"amount", amount}});
        j["transfers"] = arr;
    }
    if (!e.external_requests.empty()) {
        Json arr = Json::array();
        for (const auto& r : e.external_requests)
            arr.push_back(Json{{"service", r.service}, {"query", r.query}, {"callbackId", r.callback_id}});
        j["externalRequests"] = arr;
    }
    j["trace"] = trace_json(e.trace);
    Json env = env_log_json(e.env_log);
    if (!env.empty()) j["env"] = env;
    return j;
}

SpanEvent event_from(const Json& j) {
    SpanEvent e;
    e.kind = event_kind_from(j.at("kind").get<std::string>());
    e.chain = j.at("chain").get<std::string>();
    e.contract = j.at("contract").get<std::string>();
    e.fn = j.at("fn").get<std::string>();
    e.ctx = ctx_from(j.at("ctx"));
    e.order = j.at("order").get<std::uint64_t>();
    e.block = j.at("block").get<std::uint64_t>();
    e.outcome = outcome_from(j.at("outcome").get<std::string>());
    if (j.contains("detail")) e.detail = j["detail"].get<std::string>();
    e.gas_used = j.at("gasUsed").get<std::uint64_t>();
    if (j.contains("transfers"))
        for (const auto& t : j["transfers"])
            e.transfers.emplace_back(Address{t.at("to").get<std::string>()},
                                     t.at("amount").get<std::uint64_t>());
    if (j.contains("externalRequests"))
        for (const auto& r : j["externalRequests"])
            e.external_requests.push_back(ExternalRequest{r.at("service").get<std::string>(),
                                                          r.at("query").get<std::string>(),
                                                          r.at("callbackId").get<std::string>()});
    e.trace = trace_from(j.at("trace"));
    if (j.contains("env")) e.env_log = env_log_from(j["env"]);
    return e;
}

}  // namespace

Json history_to_json(const History& h) {
    Json j = Json::object();
    if (!h.contracts.empty()) {
        Json arr = Json::array();
        for (const auto& c : h.contracts) {
            arr.push_back(Json{{"chain", c.chain},
                               {"name", c.name},
                               {"deployer", c.deployer},
                               {"deployCtx", ctx_json(c.deploy_ctx)},
                               {"initialState", state_json(c.initial_state)},
                               {"source", c.source}});
        }
        j["contracts"] = arr;
    }
    Json spans = Json::array();
    for (const auto& s : h.spans) {
        Json sj = Json{{"spanId", s.span_id}, {"clientId", s.client_id}};
        Json reads = Json::array();
        for (const auto& r : s.observed_reads)
            reads.push_back(Json{{"chain", r.chain},
                                 {"contract", r.contract},
                                 {"attr", r.attr},
                                 {"value", r.value.to_json()},
                                 {"tick", r.tick},
                                 {"order", r.order}});
        sj["observedReads"] = reads;
        Json events = Json::array();
        for (const auto& e : s.events) events.push_back(event_json(e));
        sj["events"] = events;
        if (!s.dropped_callbacks.empty()) sj["droppedCallbacks"] = s.dropped_callbacks;
        spans.push_back(sj);
    }
    j["spans"] = spans;
    if (!h.locks.empty()) {
        Json arr = Json::array();
        for (const auto& l : h.locks) {
            Json lj = Json{{"lockId", l.lock_id},
                           {"holder", l.holder},
                           {"items", l.items},
                           {"status", l.status},
                           {"acquiredTick", l.acquired_tick}};
            if (l.released_tick >= 0) lj["releasedTick"] = l.released_tick;
            arr.push_back(lj);
        }
        j["locks"] = arr;
    }
    if (!h.finals.empty()) {
        Json arr = Json::array();
        for (const auto& f : h.finals)
            arr.push_back(
                Json{{"chain", f.chain}, {"contract", f.contract}, {"state", state_json(f.state)}});
        j["finalStates"] = arr;
    }
    return j;
}

std::string export_history(const History& h) { return history_to_json(h).dump(2) + "\n"; }

History history_from_json(const Json& j) {
    History h;
    if (j.contains("contracts")) {
        for (const auto& c : j["contracts"]) {
            DeployedContract d;
            d.chain = c.at("chain").get<std::string>();
            d.name = c.at("name").get<std::string>();
            d.deployer = c.at("deployer").get<std::string>();
            d.deploy_ctx = ctx_from(c.at("deployCtx"));
            d.initial_state = state_from(c.at("initialState"));
            d.source = c.at("source").get<std::string>();
            h.contracts.push_back(std::move(d));
        }
    }
    for (const auto& sj : j.at("spans")) {
        ClientSpan s;
        s.span_id = sj.at("spanId").get<std::string>();
        s.client_id = sj.at("clientId").get<std::string>();
        for (const auto& r : sj.at("observedReads")) {
            s.observed_reads.push_back(ObservedRead{
                r.at("chain").get<std::string>(), r.at("contract").get<std::string>(),
                r.at("attr").get<std::string>(), Value::from_json(r.at("value")),
                r.at("tick").get<int>(), r.at("order").get<std::uint64_t>()});
        }
        for (const auto& e : sj.at("events")) s.events.push_back(event_from(e));
        if (sj.contains("droppedCallbacks"))
            for (const auto& d : sj["droppedCallbacks"]) s.dropped_callbacks.push_back(d.get<std::string>());
        h.spans.push_back(std::move(s));
    }
    if (j.contains("locks")) {
        for (const auto& lj : j["locks"]) {
            LockHistoryRecord l;
            l.lock_id = lj.at("lockId").get<std::string>();
            l.holder = lj.at("holder").get<std::string>();
            for (const auto& i : lj.at("items")) l.items.push_back(i.get<std::string>());
            l.status = lj.at("status").get<std::string>();
            l.acquired_tick = lj.at("acquiredTick").get<int>();
            if (lj.contains("releasedTick")) l.released_tick = lj["releasedTick"].get<int>();
            h.locks.push_back(std::move(l));
        }
    }
    if (j.contains("finalStates")) {
        for (const auto& fj : j["finalStates"]) {
            h.finals.push_back(FinalState{fj.at("chain").get<std::string>(),
                                          fj.at("contract").get<std::string>(),
                                          state_from(fj.at("state"))});
        }
    }
    return h;
}

}  // namespace txsc
