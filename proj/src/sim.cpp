#include "txsc/sim.hpp"

#include <algorithm>
#include <memory>

#include "txsc/digest.hpp"
#include "txsc/errors.hpp"
#include "txsc/parse.hpp"
#include "txsc/print.hpp"
#include "txsc/rng.hpp"
#include "txsc/typecheck.hpp"

namespace txsc {

std::string to_string(LockStatus s) {
    switch (s) {
        case LockStatus::Held: return "Held";
        case LockStatus::Released: return "Released";
        case LockStatus::Forfeited: return "Forfeited";
    }
    return "?";
}

const ChainResult* SimResult::find_chain(const std::string& id) const {
    for (const auto& c : chains)
        if (c.id == id) return &c;
    return nullptr;
}

const ObjectState* SimResult::find_object(const std::string& chain,
                                          const std::string& contract) const {
    const ChainResult* c = find_chain(chain);
    if (!c) return nullptr;
    auto it = c->objects.find(contract);
    return it == c->objects.end() ? nullptr : &it->second;
}

LockGrant try_acquire(std::map<std::string, LockRecordState>& locks, int& counter,
                      const std::string& holder, const std::vector<std::string>& items, int tick) {
    for (const auto& [id, rec] : locks) {
        if (rec.status != LockStatus::Held) continue;
        for (const auto& item : items)
            if (std::binary_search(rec.items.begin(), rec.items.end(), item)) return LockGrant{};
    }
    LockRecordState rec;
    rec.lock_id = "L" + std::to_string(++counter);
    rec.holder = holder;
    rec.items = items;
    std::sort(rec.items.begin(), rec.items.end());
    rec.status = LockStatus::Held;
    rec.acquired_tick = tick;
    locks[rec.lock_id] = rec;
    return LockGrant{true, rec.lock_id};
}

ReleaseResult do_release(std::map<std::string, LockRecordState>& locks, const std::string& lock_id,
                         bool forfeit, int tick) {
    auto it = locks.find(lock_id);
    if (it == locks.end()) return ReleaseResult::UnknownLock;
    if (it->second.status != LockStatus::Held) return ReleaseResult::AlreadyReleased;
    it->second.status = forfeit ? LockStatus::Forfeited : LockStatus::Released;
    it->second.released_tick = tick;
    return ReleaseResult::Ok;
}

namespace {

constexpr const char* kZeroDigest =
    "0x0000000000000000000000000000000000000000000000000000000000000000";

std::string qualified_item(const std::string& chain, const std::string& contract,
                           const std::string& attr) {
    return chain + "/" + contract + "/" + attr;
}

struct PendingTx {
    BlockEntry::Kind kind = BlockEntry::Kind::Call;
    int arrival = 0;
    std::uint64_t jitter = 0;
    std::uint64_t seq = 0;
    std::string span_id;
    std::string client_id;
    std::string contract;
    std::string fn;
    CallContext ctx;
    std::vector<std::string> lock_items;  // LockAcquire
    std::string lock_id;                  // LockRelease
    bool lock_forfeit = false;
};

struct ContractCode {
    ContractAst ast;
    ProfileMap profiles;
    std::string canonical_source;
};

struct SimChain {
    ChainSpec spec;
    std::vector<Block> blocks;
    std::map<std::string, std::shared_ptr<const ContractCode>> code;  // static, from the config
    std::map<std::string, ObjectState> objects;
    std::map<std::string, std::int64_t> accounts;
    std::map<std::string, LockRecordState> locks;
    std::map<std::string, EscrowCellState> escrows;
    std::deque<PendingTx> mempool;
    int miner_offset = 0;
};

struct ClientRt {
    const ClientSpec* spec = nullptr;
    std::size_t next_step = 0;
    int ready_tick = 0;
    bool waiting = false;
    bool stalled = false;
    bool acquire_started = false;
    int attempts_left = 0;
    std::map<std::string, Value> observations;
    std::vector<ObservedRead> pending_reads;
    std::string last_lock_id;
    int span_count = 0;

    bool done() const { return stalled || (next_step >= spec->steps.size() && !waiting); }
};

class SimEnv : public HostEnv {
public:
    SimChain* lock_chain = nullptr;
    SimChain* self_chain = nullptr;
    std::string oracle_addr;
    std::vector<std::string> required_items;  // sorted
    std::string cb_base;
    int cb_n = 0;

    bool lock_held(const Value& id) override {
        if (!lock_chain || id.type() != PrimType::String) return false;
        auto it = lock_chain->locks.find(id.as_string());
        if (it == lock_chain->locks.end() || it->second.status != LockStatus::Held) return false;
        const auto& held = it->second.items;
        for (const auto& item : required_items)
            if (!std::binary_search(held.begin(), held.end(), item)) return false;
        return true;
    }

    Address oracle_address() override { return Address{oracle_addr}; }

    std::optional<std::uint64_t> escrow_amount(const Value& id) override {
        if (!self_chain || id.type() != PrimType::String) return std::nullopt;
        auto it = self_chain->escrows.find(id.as_string());
        if (it == self_chain->escrows.end()) return std::nullopt;
        return it->second.amount;
    }

    std::string new_callback_id() override {
        return sha256_hex(cb_base + "#" + std::to_string(cb_n++));
    }
};

struct BlockMeta {
    std::uint64_t index = 0;
    int tick = 0;
    std::string miner;
};

class Simulator {
public:
    Simulator(const ScenarioConfig& config, const SourceResolver& resolver)
        : config_(config),
          resolver_(resolver),
          rng_mempool_(config.seed ^ 0x7473786d656d70ull),
          rng_oracle_(config.seed ^ 0x74787363726e67ull),
          rng_miner_(config.seed ^ 0x6d696e6572737eull) {}

    SimResult run() {
        setup();
        for (int tick = 0; tick <= config_.max_ticks; ++tick) {
            client_steps(tick);
            if (tick > 0 && tick % config_.block_interval_ticks == 0) mine_all(tick);
            if (quiet()) break;
        }
        if (!quiet()) warnings_.push_back("run stopped at max_ticks with pending work");
        verify_replay();
        return assemble();
    }

private:
    // ----- setup ---------------------------------------------------------

    void setup() {
        for (const auto& spec : config_.chains) {
            SimChain chain;
            chain.spec = spec;
            chain.miner_offset =
                static_cast<int>(rng_miner_.next_in(0, static_cast<std::uint64_t>(spec.miner_count - 1)));
            chains_.push_back(std::move(chain));
        }
        for (const auto& d : config_.contracts) {
            SimChain& chain = chain_of(d.chain);
            ContractCode code;
            std::string source = resolver_(d.file);
            ContractAst parsed = parse_contract(source);
            auto diags = typecheck(parsed);
            if (!diags.empty())
                throw ConfigError("contract '" + d.file +
                                  "' does not typecheck: " + diags.front().str());
            ProfileMap parsed_profiles = analyze(parsed);
            if (config_.transform) {
                auto [rewritten, report] =
                    transform(parsed, parsed_profiles, config_.transform->restricted_to(parsed));
                code.ast = std::move(rewritten);
                code.profiles = analyze(code.ast);
            } else {
                code.ast = std::move(parsed);
                code.profiles = std::move(parsed_profiles);
            }
            code.canonical_source = print_contract(code.ast);
            std::string name = code.ast.name;
            if (chain.code.contains(name))
                throw ConfigError("contract '" + name + "' deployed twice on chain '" + d.chain +
                                  "'");
            deploy_names_.push_back(name);
            chain.code.emplace(name, std::make_shared<const ContractCode>(std::move(code)));
        }
        for (const auto& c : config_.clients) {
            for (auto& chain : chains_) chain.accounts[c.id] = static_cast<std::int64_t>(c.funds);
            clients_.push_back(ClientRt{&c});
        }
        for (std::size_t i = 0; i < config_.contracts.size(); ++i) {
            const DeploySpec& d = config_.contracts[i];
            PendingTx tx;
            tx.kind = BlockEntry::Kind::Deploy;
            tx.arrival = 0;
            tx.client_id = d.deployer;
            tx.contract = deploy_names_[i];
            tx.fn = "constructor";
            tx.ctx.sender = Address{d.deployer};
            tx.ctx.value = d.value;
            tx.ctx.gas_budget = d.gas;
            tx.ctx.data = resolve_data(d.data, nullptr);
            enqueue(chain_of(d.chain), std::move(tx));
        }
    }

    // ----- client scripting ------------------------------------------------

    void client_steps(int tick) {
        for (auto& client : clients_) {
            if (client.stalled || client.waiting) continue;
            while (client.next_step < client.spec->steps.size() && !client.waiting &&
                   !client.stalled) {
                const ClientStep& step = client.spec->steps[client.next_step];
                if (tick < step.tick || tick < client.ready_tick) break;
                run_step(client, step, tick);
            }
        }
    }

    void run_step(ClientRt& client, const ClientStep& step, int tick) {
        std::visit(
            [&](const auto& action) {
                using T = std::decay_t<decltype(action)>;
                if constexpr (std::is_same_v<T, ObserveStep>) {
                    SimChain& chain = chain_of(action.chain);
                    auto it = chain.objects.find(action.contract);
                    if (it == chain.objects.end())
                        throw ConfigError("client '" + client.spec->id + "' observes '" +
                                          action.contract + "' before deployment");
                    for (const auto& attr : action.attrs) {
                        auto av = it->second.attrs.find(attr);
                        if (av == it->second.attrs.end())
                            throw ConfigError("observe: no attribute '" + attr + "' on " +
                                              action.contract);
                        client.observations[attr] = av->second;
                        client.pending_reads.push_back(ObservedRead{
                            action.chain, action.contract, attr, av->second, tick, next_order()});
                    }
                    client.next_step++;
                } else if constexpr (std::is_same_v<T, AcquireStep>) {
                    SimChain* lock_chain = lock_chain_ptr();
                    if (!lock_chain)
                        throw ConfigError("acquire step needs a chain with lock_manager = true");
                    if (!client.acquire_started) {
                        client.acquire_started = true;
                        client.attempts_left = action.max_attempts;
                    }
                    PendingTx tx;
                    tx.kind = BlockEntry::Kind::LockAcquire;
                    tx.arrival = tick;
                    tx.client_id = client.spec->id;
                    tx.lock_items = acquire_items(action);
                    enqueue(*lock_chain, std::move(tx));
                    client.waiting = true;
                } else if constexpr (std::is_same_v<T, CallStep>) {
                    SimChain& chain = chain_of(action.chain);
                    if (!chain.code.contains(action.contract))
                        throw ConfigError("call to unknown contract '" + action.contract +
                                          "' on '" + action.chain + "'");
                    ClientSpan span;
                    span.span_id = client.spec->id + "-" + std::to_string(++client.span_count);
                    span.client_id = client.spec->id;
                    span.observed_reads = std::move(client.pending_reads);
                    client.pending_reads.clear();
                    span_index_[span.span_id] = spans_.size();
                    spans_.push_back(std::move(span));

                    PendingTx tx;
                    tx.kind = BlockEntry::Kind::Call;
                    tx.arrival = tick;
                    tx.span_id = spans_.back().span_id;
                    tx.client_id = client.spec->id;
                    tx.contract = action.contract;
                    tx.fn = action.fn;
                    tx.ctx.sender = Address{client.spec->id};
                    tx.ctx.value = action.value;
                    tx.ctx.gas_budget = action.gas;
                    tx.ctx.data = resolve_data(action.data, &client);
                    enqueue(chain, std::move(tx));
                    client.waiting = true;
                }
            },
            step.action);
    }

    std::vector<std::string> acquire_items(const AcquireStep& action) {
        std::vector<std::string> items = action.items;
        if (!action.for_fn.empty()) {
            SimChain& chain = chain_of(action.for_chain);
            auto it = chain.code.find(action.for_contract);
            if (it == chain.code.end())
                throw ConfigError("lock_for names unknown contract '" + action.for_contract + "'");
            for (const auto& attr :
                 lock_cover_set(it->second->ast, it->second->profiles, action.for_fn))
                items.push_back(qualified_item(action.for_chain, action.for_contract, attr));
        }
        if (items.empty()) throw ConfigError("acquire step resolves to an empty item set");
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        return items;
    }

    std::map<std::string, Value> resolve_data(const std::map<std::string, Json>& tmpl,
                                              const ClientRt* client) {
        std::map<std::string, Value> out;
        for (const auto& [key, j] : tmpl) out[key] = resolve_datum(key, j, client);
        return out;
    }

    Value resolve_datum(const std::string& key, const Json& j, const ClientRt* client) {
        if (j.is_string()) {
            const std::string s = j.get<std::string>();
            if (s.rfind("$observed.", 0) == 0) {
                if (!client) throw ConfigError("$observed is only valid in client call data");
                std::string attr = s.substr(10);
                auto it = client->observations.find(attr);
                if (it == client->observations.end())
                    throw ConfigError("client '" + client->spec->id + "' never observed '" + attr +
                                      "'");
                return it->second;
            }
            if (s == "$lock") {
                if (!client || client->last_lock_id.empty())
                    throw ConfigError("$lock used before any lock was granted");
                return Value(client->last_lock_id);
            }
            if (s.rfind("0x", 0) == 0 && s.size() == 66) return Value(Bytes32::from_hex(s));
            return Value(s);
        }
        if (j.is_boolean()) return Value(j.get<bool>());
        if (j.is_number_unsigned()) return Value(j.get<std::uint64_t>());
        if (j.is_object() && j.size() == 1) return Value::from_json(j);
        throw ConfigError("cannot interpret data entry '" + key + "': " + j.dump());
    }

    // ----- mining ----------------------------------------------------------

    void enqueue(SimChain& chain, PendingTx tx) {
        tx.jitter = rng_mempool_.next_u64();
        tx.seq = next_seq_++;
        chain.mempool.push_back(std::move(tx));
    }

    void mine_all(int tick) {
        for (auto& chain : chains_) mine_chain(chain, tick);
    }

    void mine_chain(SimChain& chain, int tick) {
        std::vector<PendingTx> due;
        std::deque<PendingTx> rest;
        for (auto& tx : chain.mempool) {
            if (tx.arrival <= tick) due.push_back(std::move(tx));
            else rest.push_back(std::move(tx));
        }
        chain.mempool = std::move(rest);
        if (due.empty()) return;
        std::stable_sort(due.begin(), due.end(), [](const PendingTx& a, const PendingTx& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.jitter < b.jitter;
        });

        BlockMeta meta;
        meta.index = chain.blocks.size() + 1;
        meta.tick = tick;
        int miner_idx =
            static_cast<int>((chain.blocks.size() + static_cast<std::size_t>(chain.miner_offset)) %
                             static_cast<std::size_t>(chain.spec.miner_count));
        meta.miner = "miner:" + chain.spec.id + ":" + std::to_string(miner_idx);

        Block block;
        block.index = meta.index;
        block.tick = meta.tick;
        block.miner = meta.miner;
        block.prev_digest = chain.blocks.empty() ? kZeroDigest : chain.blocks.back().digest;
        for (std::size_t i = 0; i < due.size(); ++i)
            block.entries.push_back(execute_tx(chain, due[i], meta, i, /*live=*/true));
        block.digest = block_digest(chain.spec.id, block);
        chain.blocks.push_back(std::move(block));
    }

    BlockEntry execute_tx(SimChain& chain, const PendingTx& tx, const BlockMeta& block,
                          std::size_t entry_pos, bool live) {
        BlockEntry entry;
        entry.kind = tx.kind;
        entry.span_id = tx.span_id;
        entry.client_id = tx.client_id;
        entry.contract = tx.contract;
        entry.fn = tx.fn;
        entry.ctx = tx.ctx;
        entry.ctx.block_number = block.index;
        entry.lock_id = tx.lock_id;
        entry.lock_items = tx.lock_items;
        entry.lock_forfeit = tx.lock_forfeit;

        switch (tx.kind) {
            case BlockEntry::Kind::LockAcquire: {
                LockGrant grant =
                    try_acquire(chain.locks, lock_counter_, tx.client_id, tx.lock_items, block.tick);
                entry.lock_granted = grant.granted;
                entry.lock_id = grant.lock_id;
                entry.gas_payment = 1;
                pay_gas(chain, tx.client_id, block.miner, 1);
                if (live) {
                    if (grant.granted) lock_order_.push_back(grant.lock_id);
                    notify_lock_result(tx.client_id, grant, block.tick);
                }
                break;
            }
            case BlockEntry::Kind::LockRelease: {
                ReleaseResult rr = do_release(chain.locks, tx.lock_id, tx.lock_forfeit, block.tick);
                if (rr == ReleaseResult::UnknownLock) entry.detail = "UnknownLock";
                else if (rr == ReleaseResult::AlreadyReleased) entry.detail = "AlreadyReleased";
                entry.gas_payment = 0;
                break;
            }
            default: {
                ExecResult res = run_contract_call(chain, tx, block, entry_pos, live);
                entry.outcome = res.outcome;
                entry.detail = res.detail;
                entry.gas_used = res.gas_used;
                entry.gas_payment = res.gas_used;
                pay_gas(chain, tx.client_id, block.miner, res.gas_used);
                if (live) {
                    if (tx.kind == BlockEntry::Kind::Deploy && res.committed()) {
                        initial_states_[chain.spec.id + "|" + tx.contract] =
                            chain.objects.at(tx.contract);
                        deploy_ctxs_[chain.spec.id + "|" + tx.contract] = entry.ctx;
                    }
                    record_span_event(chain, tx, entry, res, block);
                    if (tx.kind == BlockEntry::Kind::Call)
                        notify_call_done(tx.client_id, block.tick);
                }
                break;
            }
        }
        return entry;
    }

    ExecResult run_contract_call(SimChain& chain, const PendingTx& tx, const BlockMeta& block,
                                 std::size_t entry_pos, bool live) {
        ExecResult res;
        auto code_it = chain.code.find(tx.contract);
        if (code_it == chain.code.end()) {
            res.outcome = Outcome::AbortedError;
            res.detail = "no contract '" + tx.contract + "'";
            return res;
        }
        const ContractCode& code = *code_it->second;

        if (tx.kind == BlockEntry::Kind::Deploy && !chain.objects.contains(tx.contract))
            chain.objects[tx.contract] = default_state(code.ast);

        auto obj_it = chain.objects.find(tx.contract);
        if (obj_it == chain.objects.end()) {
            res.outcome = Outcome::AbortedError;
            res.detail = "object '" + tx.contract + "' not deployed";
            return res;
        }

        CallContext ctx = tx.ctx;
        ctx.block_number = block.index;

        SimEnv env;
        env.lock_chain = lock_chain_ptr();
        env.self_chain = &chain;
        env.oracle_addr = oracle_address_str();
        env.cb_base =
            chain.spec.id + "|" + std::to_string(block.index) + "|" + std::to_string(entry_pos);
        if (code.ast.find_function(tx.fn)) {
            for (const auto& attr : lock_cover_set(code.ast, code.profiles, tx.fn))
                env.required_items.push_back(qualified_item(chain.spec.id, tx.contract, attr));
            std::sort(env.required_items.begin(), env.required_items.end());
        }

        if (tx.kind == BlockEntry::Kind::Deploy && !code.ast.find_function("constructor")) {
            res.outcome = Outcome::Committed;  // attributes keep their defaults
            res.new_state = obj_it->second;
            res.new_state.balance += ctx.value;
        } else if (!code.ast.find_function(tx.fn)) {
            res.outcome = Outcome::AbortedError;
            res.detail = "no function '" + tx.fn + "'";
        } else {
            res = execute(code.ast, tx.fn, obj_it->second, ctx, env);
        }

        if (res.committed()) {
            obj_it->second = res.new_state;
            chain.accounts[tx.client_id] -= static_cast<std::int64_t>(ctx.value);
            for (const auto& [to, amount] : res.transfers)
                chain.accounts[to.id] += static_cast<std::int64_t>(amount);
            for (const auto& op : res.escrow_ops) apply_escrow(chain, op);
            if (live) {
                for (const auto& op : res.lock_ops) {
                    SimChain* lc = lock_chain_ptr();
                    if (!lc) {
                        warnings_.push_back("lock release without a lock-manager chain");
                        continue;
                    }
                    PendingTx release;
                    release.kind = BlockEntry::Kind::LockRelease;
                    release.arrival = block.tick;
                    release.client_id = tx.client_id;
                    release.span_id = tx.span_id;
                    release.lock_id = op.lock_id;
                    release.lock_forfeit = op.forfeit;
                    enqueue(*lc, std::move(release));
                }
                if (!res.external_requests.empty())
                    schedule_callbacks(chain, tx, res, block.tick);
            }
        }
        return res;
    }

    void apply_escrow(SimChain& chain, const EscrowOp& op) {
        switch (op.kind) {
            case EscrowOp::Kind::Deposit:
                // recipient carries the depositor for deposits; the stake
                // leaves the depositor's account until refund or forfeit
                chain.accounts[op.recipient.id] -= static_cast<std::int64_t>(op.amount);
                chain.escrows[op.lock_id] = EscrowCellState{op.amount, op.recipient};
                break;
            case EscrowOp::Kind::Refund: {
                auto it = chain.escrows.find(op.lock_id);
                if (it == chain.escrows.end()) break;  // interpreter checked; defensive
                chain.accounts[it->second.depositor.id] +=
                    static_cast<std::int64_t>(it->second.amount);
                chain.escrows.erase(it);
                break;
            }
            case EscrowOp::Kind::Forfeit: {
                auto it = chain.escrows.find(op.lock_id);
                if (it == chain.escrows.end()) break;
                chain.accounts[op.recipient.id] += static_cast<std::int64_t>(it->second.amount);
                chain.escrows.erase(it);
                break;
            }
        }
    }

    void schedule_callbacks(SimChain& chain, const PendingTx& tx, const ExecResult& res,
                            int tick) {
        ClientSpan* span = find_span(tx.span_id);
        auto cb_fn = callback_target(chain.code.at(tx.contract)->profiles);
        for (const auto& req : res.external_requests) {
            if (!config_.oracle) {
                if (span) span->dropped_callbacks.push_back(req.callback_id);
                warnings_.push_back("external query without a configured oracle; callback dropped");
                continue;
            }
            const OracleSpec& oracle = *config_.oracle;
            double drop_draw = rng_oracle_.next_unit();
            int delay = static_cast<int>(
                rng_oracle_.next_in(static_cast<std::uint64_t>(oracle.delay_min),
                                    static_cast<std::uint64_t>(oracle.delay_max)));
            std::uint64_t result =
                oracle.value_script.empty()
                    ? rng_oracle_.next_in(1, 9)
                    : oracle.value_script[value_script_idx_++ % oracle.value_script.size()];
            bool dropped = drop_draw < oracle.drop_probability;
            if (dropped || !cb_fn) {
                if (span) span->dropped_callbacks.push_back(req.callback_id);
                if (!cb_fn)
                    warnings_.push_back("contract '" + tx.contract +
                                        "' has no designated callback; response dropped");
                continue;
            }
            PendingTx cb;
            cb.kind = BlockEntry::Kind::Callback;
            cb.arrival = tick + delay;
            cb.span_id = tx.span_id;
            cb.client_id = tx.client_id;
            cb.contract = tx.contract;
            cb.fn = *cb_fn;
            cb.ctx.sender = Address{oracle_address_str()};
            cb.ctx.value = 0;
            cb.ctx.gas_budget = oracle.callback_gas;
            cb.ctx.data["myid"] = Value(req.callback_id);
            cb.ctx.data["result"] = Value(result);
            if (auto it = tx.ctx.data.find("lock_id"); it != tx.ctx.data.end())
                cb.ctx.data["lock_id"] = it->second;
            enqueue(chain, std::move(cb));
        }
    }

    void pay_gas(SimChain& chain, const std::string& payer, const std::string& miner,
                 std::uint64_t amount) {
        if (amount == 0) return;
        chain.accounts[payer] -= static_cast<std::int64_t>(amount);
        total_gas_spent_ += amount;
        chain.accounts[miner] += static_cast<std::int64_t>(amount);
        total_gas_paid_ += amount;
    }

    void record_span_event(SimChain& chain, const PendingTx& tx, const BlockEntry& entry,
                           const ExecResult& res, const BlockMeta& block) {
        ClientSpan* span = find_span(tx.span_id);
        if (!span) return;  // deployments carry no span
        SpanEvent ev;
        ev.kind = tx.kind == BlockEntry::Kind::Callback ? EventKind::Callback : EventKind::Call;
        ev.chain = chain.spec.id;
        ev.contract = tx.contract;
        ev.fn = tx.fn;
        ev.ctx = entry.ctx;
        ev.order = next_order();
        ev.block = block.index;
        ev.outcome = res.outcome;
        ev.detail = res.detail;
        ev.gas_used = res.gas_used;
        ev.transfers = res.transfers;
        ev.external_requests = res.external_requests;
        ev.trace = res.trace;
        ev.env_log = res.env_log;
        span->events.push_back(std::move(ev));
    }

    void notify_lock_result(const std::string& client_id, const LockGrant& grant, int tick) {
        ClientRt* client = find_client(client_id);
        if (!client) return;
        client->waiting = false;
        if (grant.granted) {
            client->last_lock_id = grant.lock_id;
            client->acquire_started = false;
            client->next_step++;
            client->ready_tick = tick + 1;
        } else if (--client->attempts_left <= 0) {
            client->stalled = true;
            client->acquire_started = false;
            warnings_.push_back("client '" + client_id + "' gave up acquiring a lock");
        } else {
            const ClientStep& step = client->spec->steps[client->next_step];
            client->ready_tick = tick + std::get<AcquireStep>(step.action).retry_every;
        }
    }

    void notify_call_done(const std::string& client_id, int tick) {
        ClientRt* client = find_client(client_id);
        if (!client) return;
        client->waiting = false;
        client->next_step++;
        client->ready_tick = tick + 1;
    }

    std::string block_digest(const std::string& chain_id, const Block& block) const {
        std::string enc = chain_id + "|" + std::to_string(block.index) + "|" +
                          std::to_string(block.tick) + "|" + block.prev_digest + "|" + block.miner;
        for (const auto& e : block.entries) {
            enc += "|" + std::to_string(static_cast<int>(e.kind)) + "," + e.client_id + "," +
                   e.span_id + "," + e.contract + "," + e.fn + "," + to_string(e.outcome) + "," +
                   std::to_string(e.gas_used) + "," + std::to_string(e.gas_payment) + "," +
                   e.lock_id + "," + (e.lock_granted ? "1" : "0") + "," +
                   (e.lock_forfeit ? "1" : "0") + "," + e.detail + "," + e.ctx.sender.id + "," +
                   std::to_string(e.ctx.value) + "," + std::to_string(e.ctx.gas_budget);
            for (const auto& [k, v] : e.ctx.data) enc += "," + k + "=" + v.canonical_encoding();
            for (const auto& item : e.lock_items) enc += ";" + item;
        }
        return sha256_hex(enc);
    }

    // ----- replay verification ---------------------------------------------

    // Re-executes every block entry from genesis against fresh state and
    // checks the fold reproduces the live outcome exactly.
    void verify_replay() {
        std::vector<SimChain> fresh;
        for (const auto& chain : chains_) {
            SimChain s;
            s.spec = chain.spec;
            s.code = chain.code;
            s.miner_offset = chain.miner_offset;
            fresh.push_back(std::move(s));
        }
        for (const auto& c : config_.clients)
            for (auto& s : fresh) s.accounts[c.id] = static_cast<std::int64_t>(c.funds);

        int counter_backup = lock_counter_;
        std::uint64_t spent_backup = total_gas_spent_;
        std::uint64_t paid_backup = total_gas_paid_;
        lock_counter_ = 0;
        std::swap(chains_, fresh);  // chains_ now holds the fresh states; `fresh` the live run

        struct Slot {
            int tick;
            std::size_t chain_idx;
            const Block* block;
        };
        std::vector<Slot> slots;
        for (std::size_t i = 0; i < fresh.size(); ++i)
            for (const auto& b : fresh[i].blocks) slots.push_back(Slot{b.tick, i, &b});
        std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
            if (a.tick != b.tick) return a.tick < b.tick;
            return a.chain_idx < b.chain_idx;
        });

        bool ok = true;
        std::string why;
        for (const auto& slot : slots) {
            SimChain& chain = chains_[slot.chain_idx];
            BlockMeta meta{slot.block->index, slot.block->tick, slot.block->miner};
            for (std::size_t i = 0; ok && i < slot.block->entries.size(); ++i) {
                const BlockEntry& recorded = slot.block->entries[i];
                PendingTx tx;
                tx.kind = recorded.kind;
                tx.span_id = recorded.span_id;
                tx.client_id = recorded.client_id;
                tx.contract = recorded.contract;
                tx.fn = recorded.fn;
                tx.ctx = recorded.ctx;
                tx.lock_items = recorded.lock_items;
                if (recorded.kind == BlockEntry::Kind::LockRelease) tx.lock_id = recorded.lock_id;
                tx.lock_forfeit = recorded.lock_forfeit;
                BlockEntry redo = execute_tx(chain, tx, meta, i, /*live=*/false);
                if (redo.outcome != recorded.outcome || redo.gas_used != recorded.gas_used ||
                    redo.lock_granted != recorded.lock_granted ||
                    redo.lock_id != recorded.lock_id || redo.detail != recorded.detail) {
                    ok = false;
                    why = "entry diverged in block " + std::to_string(slot.block->index) +
                          " on '" + chain.spec.id + "' (" + recorded.fn + ")";
                }
            }
        }
        for (std::size_t i = 0; ok && i < chains_.size(); ++i) {
            if (chains_[i].objects != fresh[i].objects)
                ok = false, why = "objects diverged on '" + fresh[i].spec.id + "'";
            else if (chains_[i].accounts != fresh[i].accounts)
                ok = false, why = "accounts diverged on '" + fresh[i].spec.id + "'";
            else if (chains_[i].escrows.size() != fresh[i].escrows.size())
                ok = false, why = "escrows diverged on '" + fresh[i].spec.id + "'";
            else if (chains_[i].locks.size() != fresh[i].locks.size())
                ok = false, why = "locks diverged on '" + fresh[i].spec.id + "'";
        }

        std::swap(chains_, fresh);
        lock_counter_ = counter_backup;
        total_gas_spent_ = spent_backup;
        total_gas_paid_ = paid_backup;
        if (!ok) throw ReplayMismatchError("replay verification failed: " + why);
    }

    // ----- result assembly ---------------------------------------------------

    SimResult assemble() {
        SimResult result;
        for (std::size_t i = 0; i < config_.contracts.size(); ++i) {
            const DeploySpec& d = config_.contracts[i];
            const std::string& name = deploy_names_[i];
            SimChain& chain = chain_of(d.chain);
            const ContractCode& code = *chain.code.at(name);
            DeployedContract rec;
            rec.chain = d.chain;
            rec.name = name;
            rec.source = code.canonical_source;
            rec.deployer = d.deployer;
            std::string key = d.chain + "|" + name;
            if (auto it = deploy_ctxs_.find(key); it != deploy_ctxs_.end())
                rec.deploy_ctx = it->second;
            if (auto it = initial_states_.find(key); it != initial_states_.end())
                rec.initial_state = it->second;
            result.history.contracts.push_back(std::move(rec));
        }
        result.history.spans = spans_;
        if (SimChain* lc = lock_chain_ptr()) {
            for (const auto& id : lock_order_) {
                const LockRecordState& rec = lc->locks.at(id);
                LockHistoryRecord h;
                h.lock_id = rec.lock_id;
                h.holder = rec.holder;
                h.items = rec.items;
                h.status = to_string(rec.status);
                h.acquired_tick = rec.acquired_tick;
                h.released_tick = rec.released_tick;
                result.history.locks.push_back(std::move(h));
            }
        }
        for (const auto& chain : chains_)
            for (const auto& [name, state] : chain.objects)
                result.history.finals.push_back(FinalState{chain.spec.id, name, state});
        for (const auto& chain : chains_) {
            ChainResult cr;
            cr.id = chain.spec.id;
            cr.blocks = chain.blocks;
            cr.objects = chain.objects;
            cr.accounts = chain.accounts;
            cr.locks = chain.locks;
            cr.escrows = chain.escrows;
            result.chains.push_back(std::move(cr));
        }
        result.total_gas_paid = total_gas_paid_;
        result.total_gas_spent = total_gas_spent_;
        result.warnings = warnings_;
        return result;
    }

    // ----- small helpers -------------------------------------------------------

    SimChain& chain_of(const std::string& id) {
        for (auto& c : chains_)
            if (c.spec.id == id) return c;
        throw ConfigError("unknown chain '" + id + "'");
    }

    SimChain* lock_chain_ptr() {
        for (auto& c : chains_)
            if (c.spec.lock_manager) return &c;
        return nullptr;
    }

    std::string oracle_address_str() const {
        return "oracle:" + (config_.oracle ? config_.oracle->service : std::string("none"));
    }

    ClientSpan* find_span(const std::string& span_id) {
        auto it = span_index_.find(span_id);
        return it == span_index_.end() ? nullptr : &spans_[it->second];
    }

    ClientRt* find_client(const std::string& id) {
        for (auto& c : clients_)
            if (c.spec->id == id) return &c;
        return nullptr;
    }

    bool quiet() const {
        for (const auto& c : clients_)
            if (!c.done()) return false;
        for (const auto& chain : chains_)
            if (!chain.mempool.empty()) return false;
        return true;
    }

    std::uint64_t next_order() { return order_next_++; }

    const ScenarioConfig& config_;
    const SourceResolver& resolver_;
    RandomStream rng_mempool_;
    RandomStream rng_oracle_;
    RandomStream rng_miner_;
    std::vector<SimChain> chains_;
    std::vector<ClientRt> clients_;
    std::vector<ClientSpan> spans_;
    std::map<std::string, std::size_t> span_index_;
    std::vector<std::string> deploy_names_;
    std::map<std::string, ObjectState> initial_states_;
    std::map<std::string, CallContext> deploy_ctxs_;
    std::vector<std::string> lock_order_;
    std::vector<std::string> warnings_;
    int lock_counter_ = 0;
    std::uint64_t order_next_ = 1;
    std::uint64_t next_seq_ = 1;
    std::size_t value_script_idx_ = 0;
    std::uint64_t total_gas_spent_ = 0;
    std::uint64_t total_gas_paid_ = 0;
};

}  // namespace

SimResult run(const ScenarioConfig& config, const SourceResolver& resolver) {
    Simulator sim(config, resolver);
    return sim.run();
}

}  // namespace txsc
