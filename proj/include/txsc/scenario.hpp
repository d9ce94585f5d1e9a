#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "txsc/transform.hpp"
#include "txsc/value.hpp"

namespace txsc {

struct ChainSpec {
    std::string id;
    int miner_count = 1;
    bool lock_manager = false;
};

struct DeploySpec {
    std::string file;  // contract source, resolved by name against a source map
    std::string chain;
    std::string deployer;
    std::uint64_t value = 0;
    std::uint64_t gas = 50;
    std::map<std::string, Json> data;  // raw data template (placeholders allowed)
};

struct OracleSpec {
    std::string service = "WolframAlpha";
    int delay_min = 10;
    int delay_max = 10;
    double drop_probability = 0.0;
    std::vector<std::uint64_t> value_script;  // empty: uniform 1..9 from the seeded stream
    std::uint64_t callback_gas = 50;
};

/// One step of a scripted client. Data templates may hold literals, an
/// explicit typed table, "$observed.<attr>" (latest observation) or "$lock"
/// (latest granted lock id).
struct ObserveStep {
    std::string chain;
    std::string contract;
    std::vector<std::string> attrs;
};

struct AcquireStep {
    // either explicit items ("chain/contract/attr") or a function whose
    // cover set is locked
    std::vector<std::string> items;
    std::string for_chain;
    std::string for_contract;
    std::string for_fn;
    int retry_every = 3;
    int max_attempts = 50;
};

struct CallStep {
    std::string chain;
    std::string contract;
    std::string fn;
    std::uint64_t gas = 20;
    std::uint64_t value = 0;
    std::map<std::string, Json> data;
};

struct ClientStep {
    int tick = 0;
    std::variant<ObserveStep, AcquireStep, CallStep> action;
};

struct ClientSpec {
    std::string id;
    std::uint64_t funds = 1000;
    std::vector<ClientStep> steps;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    int block_interval_ticks = 10;
    int max_ticks = 300;
    std::vector<ChainSpec> chains;
    std::vector<DeploySpec> contracts;
    std::optional<OracleSpec> oracle;
    std::vector<ClientSpec> clients;
    std::optional<TransformConfig> transform;  // present: deploy rewritten contracts

    /// Parses and validates the TOML scenario schema. Throws ConfigError.
    static ScenarioConfig from_toml(const std::string& toml_text);

    const ChainSpec* find_chain(const std::string& id) const;
    const ChainSpec* lock_chain() const;
};

/// Resolves a contract file reference against available sources; the map is
/// keyed by file name (e.g. "puzzle.txsc").
using SourceResolver = std::function<std::string(const std::string& file)>;

}  // namespace txsc
