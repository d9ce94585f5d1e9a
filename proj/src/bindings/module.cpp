#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "txsc/analysis.hpp"
#include "txsc/corpus.hpp"
#include "txsc/errors.hpp"
#include "txsc/parse.hpp"
#include "txsc/print.hpp"
#include "txsc/recipes.hpp"
#include "txsc/serial.hpp"
#include "txsc/sim.hpp"
#include "txsc/transform.hpp"
#include "txsc/typecheck.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const txsc::Json& j) {
    switch (j.type()) {
        case txsc::Json::value_t::null: return py::none();
        case txsc::Json::value_t::boolean: return py::bool_(j.get<bool>());
        case txsc::Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case txsc::Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case txsc::Json::value_t::number_float: return py::float_(j.get<double>());
        case txsc::Json::value_t::string: return py::str(j.get<std::string>());
        case txsc::Json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case txsc::Json::value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
        default: return py::none();
    }
}

txsc::ContractAst parse_checked(const std::string& source) {
    txsc::ContractAst ast = txsc::parse_contract(source);
    auto diags = txsc::typecheck(ast);
    if (!diags.empty()) throw txsc::TxscError(diags.front().str());
    return ast;
}

txsc::TransformConfig config_from(const std::string& config_toml) {
    if (config_toml.empty()) return txsc::TransformConfig{};
    return txsc::TransformConfig::from_toml(config_toml);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Transactional smart contract toolkit: DSL front end, rewriting "
              "passes, multi-chain simulator and serializability checker.";

    py::register_exception<txsc::TxscError>(m, "TxscError");

    m.def("parse", [](const std::string& source) {
        return json_to_py(txsc::ast_to_json(txsc::parse_contract(source)));
    }, py::arg("source"), "Parse contract source into its AST (as nested dicts).");

    m.def("format", [](const std::string& source) {
        return txsc::print_contract(txsc::parse_contract(source));
    }, py::arg("source"), "Canonical form of a contract.");

    m.def("analyze", [](const std::string& source) {
        txsc::ContractAst ast = parse_checked(source);
        return json_to_py(txsc::profiles_to_json(ast, txsc::analyze(ast)));
    }, py::arg("source"), "Per-function read/write sets and SDTF/CDTF classification.");

    m.def("transform", [](const std::string& source, const std::string& config_toml) {
        txsc::ContractAst ast = parse_checked(source);
        auto [out, report] =
            txsc::transform(ast, txsc::analyze(ast), config_from(config_toml).restricted_to(ast));
        py::dict result;
        result["source"] = txsc::print_contract(out);
        result["report"] = json_to_py(report.to_json());
        return result;
    }, py::arg("source"), py::arg("config_toml") = std::string(),
       "Rewrite transactional functions; returns the new source and a report.");

    m.def("run_scenario", [](const std::string& scenario_toml,
                             const std::map<std::string, std::string>& contracts) {
        txsc::ScenarioConfig config = txsc::ScenarioConfig::from_toml(scenario_toml);
        txsc::SimResult result = txsc::run(config, [&](const std::string& file) -> std::string {
            auto it = contracts.find(file);
            if (it == contracts.end()) throw txsc::ConfigError("no source for '" + file + "'");
            return it->second;
        });
        return json_to_py(txsc::history_to_json(result.history));
    }, py::arg("scenario_toml"), py::arg("contracts"),
       "Run a scenario against the given {file name: source} map; returns the history.");

    m.def("check_history", [](const std::string& history_json, int bound, bool fallback_graph) {
        txsc::History h = txsc::history_from_json(txsc::Json::parse(history_json));
        return json_to_py(txsc::check(h, bound, fallback_graph).to_json());
    }, py::arg("history_json"), py::arg("bound") = 8, py::arg("fallback_graph") = false,
       "Serializability verdict for an exported history.");

    m.def("run_recipe", [](const std::string& name) {
        txsc::RecipeResult r = txsc::run_recipe(name);
        py::dict result;
        result["exit_code"] = r.exit_code;
        result["report"] = json_to_py(r.report);
        py::dict histories;
        for (const auto& [scenario, exported] : r.histories)
            histories[py::str(scenario)] = exported;
        result["histories"] = histories;
        return result;
    }, py::arg("name"), "Run a bundled end-to-end recipe.");

    m.def("recipe_names", [] { return txsc::recipe_names(); });

    m.def("corpus_file", [](const std::string& relpath) { return txsc::corpus_file(relpath); },
          py::arg("relpath"), "Fetch a bundled corpus file (e.g. 'contracts/puzzle.txsc').");

    m.def("corpus_list", [] {
        std::vector<std::string> names;
        for (const auto& [name, text] : txsc::corpus_files()) names.push_back(name);
        return names;
    });
}
