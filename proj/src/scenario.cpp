#include "txsc/scenario.hpp"

#include "txsc/errors.hpp"
#include "txsc/toml.hpp"

namespace txsc {

namespace {

std::uint64_t get_u64(const Json& j, const std::string& key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned()) throw ConfigError("'" + key + "' must be a non-negative integer");
    return j[key].get<std::uint64_t>();
}

int get_int(const Json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() && !j[key].is_number_unsigned())
        throw ConfigError("'" + key + "' must be an integer");
    return j[key].get<int>();
}

std::string get_str(const Json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError("missing string field '" + key + "'");
    return j[key].get<std::string>();
}

std::map<std::string, Json> get_data(const Json& j) {
    std::map<std::string, Json> out;
    if (!j.contains("data")) return out;
    if (!j["data"].is_object()) throw ConfigError("'data' must be a table");
    for (const auto& [k, v] : j["data"].items()) out[k] = v;
    return out;
}

ClientStep parse_step(const Json& sj) {
    ClientStep step;
    step.tick = get_int(sj, "tick", 0);
    std::string op = get_str(sj, "op");
    if (op == "observe") {
        ObserveStep o;
        o.chain = get_str(sj, "chain");
        o.contract = get_str(sj, "contract");
        if (!sj.contains("attrs") || !sj["attrs"].is_array())
            throw ConfigError("observe step needs an 'attrs' array");
        for (const auto& a : sj["attrs"]) o.attrs.push_back(a.get<std::string>());
        step.action = std::move(o);
    } else if (op == "acquire") {
        AcquireStep a;
        if (sj.contains("items")) {
            for (const auto& i : sj["items"]) a.items.push_back(i.get<std::string>());
        } else if (sj.contains("lock_for")) {
            const auto& lf = sj["lock_for"];
            a.for_chain = get_str(lf, "chain");
            a.for_contract = get_str(lf, "contract");
            a.for_fn = get_str(lf, "fn");
        } else {
            throw ConfigError("acquire step needs 'items' or 'lock_for'");
        }
        a.retry_every = get_int(sj, "retry_every", 3);
        a.max_attempts = get_int(sj, "max_attempts", 50);
        step.action = std::move(a);
    } else if (op == "call") {
        CallStep c;
        c.chain = get_str(sj, "chain");
        c.contract = get_str(sj, "contract");
        c.fn = get_str(sj, "fn");
        c.gas = get_u64(sj, "gas", 20);
        c.value = get_u64(sj, "value", 0);
        c.data = get_data(sj);
        step.action = std::move(c);
    } else {
        throw ConfigError("unknown client step op '" + op + "'");
    }
    return step;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_toml(const std::string& toml_text) {
    Json doc = toml::parse(toml_text);
    ScenarioConfig config;
    config.seed = get_u64(doc, "seed", 0);
    config.block_interval_ticks = get_int(doc, "block_interval_ticks", 10);
    config.max_ticks = get_int(doc, "max_ticks", 300);
    if (config.block_interval_ticks <= 0) throw ConfigError("block_interval_ticks must be positive");

    if (!doc.contains("chains") || !doc["chains"].is_array() || doc["chains"].empty())
        throw ConfigError("scenario needs at least one [[chains]] entry");
    for (const auto& cj : doc["chains"]) {
        ChainSpec spec;
        spec.id = get_str(cj, "id");
        spec.miner_count = get_int(cj, "miners", 1);
        if (spec.miner_count <= 0) throw ConfigError("chain '" + spec.id + "' needs miners >= 1");
        if (cj.contains("lock_manager")) spec.lock_manager = cj["lock_manager"].get<bool>();
        for (const auto& other : config.chains)
            if (other.id == spec.id) throw ConfigError("duplicate chain id '" + spec.id + "'");
        config.chains.push_back(std::move(spec));
    }

    if (doc.contains("contracts")) {
        for (const auto& cj : doc["contracts"]) {
            DeploySpec d;
            d.file = get_str(cj, "file");
            d.chain = get_str(cj, "chain");
            d.deployer = get_str(cj, "deployer");
            d.value = get_u64(cj, "value", 0);
            d.gas = get_u64(cj, "gas", 50);
            d.data = get_data(cj);
            if (!config.find_chain(d.chain))
                throw ConfigError("contract '" + d.file + "' deploys to unknown chain '" + d.chain + "'");
            config.contracts.push_back(std::move(d));
        }
    }

    if (doc.contains("oracle")) {
        const auto& oj = doc["oracle"];
        OracleSpec o;
        if (oj.contains("service")) o.service = get_str(oj, "service");
        if (oj.contains("delay")) {
            const auto& d = oj["delay"];
            if (!d.is_array() || d.size() != 2) throw ConfigError("oracle delay must be [min, max]");
            o.delay_min = d[0].get<int>();
            o.delay_max = d[1].get<int>();
            if (o.delay_min < 0 || o.delay_max < o.delay_min)
                throw ConfigError("oracle delay range is invalid");
        }
        if (oj.contains("drop_probability")) {
            o.drop_probability = oj["drop_probability"].get<double>();
            if (o.drop_probability < 0.0 || o.drop_probability > 1.0)
                throw ConfigError("drop_probability must be within [0, 1]");
        }
        if (oj.contains("values")) {
            if (oj["values"].is_array()) {
                for (const auto& v : oj["values"]) o.value_script.push_back(v.get<std::uint64_t>());
            } else if (!(oj["values"].is_string() && oj["values"] == "uniform")) {
                throw ConfigError("oracle values must be an integer array or \"uniform\"");
            }
        }
        o.callback_gas = get_u64(oj, "callback_gas", 50);
        config.oracle = std::move(o);
    }

    if (doc.contains("clients")) {
        for (const auto& cj : doc["clients"]) {
            ClientSpec spec;
            spec.id = get_str(cj, "id");
            spec.funds = get_u64(cj, "funds", 1000);
            if (cj.contains("steps"))
                for (const auto& sj : cj["steps"]) spec.steps.push_back(parse_step(sj));
            for (const auto& other : config.clients)
                if (other.id == spec.id) throw ConfigError("duplicate client id '" + spec.id + "'");
            config.clients.push_back(std::move(spec));
        }
    }

    if (doc.contains("transform")) {
        const auto& tj = doc["transform"];
        TransformConfig t;
        t.deposit_amount = get_u64(tj, "deposit_amount", 0);
        if (tj.contains("lock_chain")) t.lock_chain_id = get_str(tj, "lock_chain");
        if (tj.contains("exclusions")) {
            for (const auto& [fn, arr] : tj["exclusions"].items())
                for (const auto& a : arr) t.check_exclusions[fn].insert(a.get<std::string>());
        }
        config.transform = std::move(t);
    }

    return config;
}

const ChainSpec* ScenarioConfig::find_chain(const std::string& id) const {
    for (const auto& c : chains)
        if (c.id == id) return &c;
    return nullptr;
}

const ChainSpec* ScenarioConfig::lock_chain() const {
    for (const auto& c : chains)
        if (c.lock_manager) return &c;
    return nullptr;
}

}  // namespace txsc
