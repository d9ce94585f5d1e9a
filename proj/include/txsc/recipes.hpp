#pragma once

#include <optional>
#include <string>
#include <vector>

#include "txsc/serial.hpp"
#include "txsc/sim.hpp"

namespace txsc {

struct RecipeResult {
    std::string name;
    int exit_code = 0;  // 0: all assertions hold, 4: an assertion failed
    Json report;
    // exported history per scenario, in execution order
    std::vector<std::pair<std::string, std::string>> histories;
};

/// Runs one bundled end-to-end recipe: parse -> analyze -> [transform] ->
/// simulate -> check, then asserts the expected verdict and state. Known
/// names: puzzle-anomaly, puzzle-fixed, blockking-anomaly, blockking-fixed,
/// out-of-gas-atomicity, lost-callback. Throws ConfigError for unknown names.
RecipeResult run_recipe(const std::string& name,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

const std::vector<std::string>& recipe_names();

/// True iff no two Held intervals of records sharing an item overlap in time.
bool lock_safety_holds(const History& history);

}  // namespace txsc
