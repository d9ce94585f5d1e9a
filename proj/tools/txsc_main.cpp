#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
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

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw txsc::TxscError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw txsc::TxscError("cannot write '" + path + "'");
    out << content;
}

txsc::ContractAst parse_checked(const std::string& path) {
    txsc::ContractAst ast = txsc::parse_contract(read_file(path));
    auto diags = txsc::typecheck(ast);
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << path << ": " << d.str() << "\n";
        throw txsc::TxscError("contract does not typecheck");
    }
    return ast;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"txsc - transactional smart contract toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    bool as_json = false;
    std::optional<std::uint64_t> seed_override;
    app.add_flag("--json", as_json, "machine-readable JSON output");
    app.add_option("--seed", seed_override, "override the scenario seed");

    std::string in_file, out_file, config_file, report_file, contracts_dir, recipe_name;
    int bound = 8;
    bool fallback_graph = false;

    auto* cmd_parse = app.add_subcommand("parse", "parse a contract and print its AST as JSON");
    cmd_parse->add_option("file", in_file, "contract file (.txsc)")->required();

    auto* cmd_fmt = app.add_subcommand("fmt", "print the canonical form of a contract");
    cmd_fmt->add_option("file", in_file, "contract file (.txsc)")->required();

    auto* cmd_analyze =
        app.add_subcommand("analyze", "print per-function read/write sets and classification");
    cmd_analyze->add_option("file", in_file, "contract file (.txsc)")->required();

    auto* cmd_transform = app.add_subcommand("transform", "rewrite transactional functions");
    cmd_transform->add_option("file", in_file, "contract file (.txsc)")->required();
    cmd_transform->add_option("--config", config_file, "transform config (TOML)");
    cmd_transform->add_option("-o,--out", out_file, "write transformed source here");
    cmd_transform->add_option("--report", report_file, "write the transform report (JSON) here");

    auto* cmd_sim = app.add_subcommand("sim", "run a scenario and export its history");
    cmd_sim->add_option("scenario", in_file, "scenario file (TOML)")->required();
    cmd_sim->add_option("--contracts", contracts_dir,
                        "directory with contract files (default: scenario directory)");
    cmd_sim->add_option("--out", out_file, "write history JSON here (default: stdout)");

    auto* cmd_check = app.add_subcommand("check", "decide serializability of a history");
    cmd_check->add_option("history", in_file, "history file (JSON)")->required();
    cmd_check->add_option("--bound", bound, "span bound for the permutation oracle");
    cmd_check->add_flag("--fallback-graph", fallback_graph,
                        "fall back to conflict-graph acyclicity above the bound");

    auto* cmd_recipe = app.add_subcommand("recipe", "run a bundled end-to-end scenario recipe");
    cmd_recipe->add_option("name", recipe_name, "one of the bundled recipes")->required();
    cmd_recipe->add_option("--out-dir", out_file, "write per-scenario histories here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_parse) {
            txsc::ContractAst ast = txsc::parse_contract(read_file(in_file));
            std::cout << txsc::ast_to_json(ast).dump(2) << "\n";
        } else if (*cmd_fmt) {
            txsc::ContractAst ast = txsc::parse_contract(read_file(in_file));
            std::string source = txsc::print_contract(ast);
            if (as_json) std::cout << txsc::Json{{"source", source}}.dump(2) << "\n";
            else std::cout << source;
        } else if (*cmd_analyze) {
            txsc::ContractAst ast = parse_checked(in_file);
            std::cout << txsc::profiles_to_json(ast, txsc::analyze(ast)).dump(2) << "\n";
        } else if (*cmd_transform) {
            txsc::ContractAst ast = parse_checked(in_file);
            txsc::TransformConfig config;
            if (!config_file.empty())
                config = txsc::TransformConfig::from_toml(read_file(config_file)).restricted_to(ast);
            auto [rewritten, report] = txsc::transform(ast, txsc::analyze(ast), config);
            std::string source = txsc::print_contract(rewritten);
            if (!report_file.empty()) write_file(report_file, report.to_json().dump(2) + "\n");
            if (as_json) {
                std::cout << txsc::Json{{"source", source}, {"report", report.to_json()}}.dump(2)
                          << "\n";
            } else if (!out_file.empty()) {
                write_file(out_file, source);
            } else {
                std::cout << source;
            }
        } else if (*cmd_sim) {
            txsc::ScenarioConfig config = txsc::ScenarioConfig::from_toml(read_file(in_file));
            if (seed_override) config.seed = *seed_override;
            fs::path dir = contracts_dir.empty() ? fs::path(in_file).parent_path()
                                                 : fs::path(contracts_dir);
            txsc::SimResult result = txsc::run(config, [&](const std::string& file) {
                return read_file((dir / file).string());
            });
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            std::string exported = txsc::export_history(result.history);
            if (!out_file.empty()) write_file(out_file, exported);
            else std::cout << exported;
        } else if (*cmd_check) {
            txsc::History history =
                txsc::history_from_json(txsc::Json::parse(read_file(in_file)));
            txsc::Verdict verdict = txsc::check(history, bound, fallback_graph);
            std::cout << verdict.to_json().dump(2) << "\n";
            return verdict.serializable ? 0 : 3;
        } else if (*cmd_recipe) {
            txsc::RecipeResult result = txsc::run_recipe(recipe_name, seed_override);
            if (!out_file.empty()) {
                fs::create_directories(out_file);
                for (const auto& [scenario, exported] : result.histories) {
                    fs::path p = fs::path(out_file) /
                                 (fs::path(scenario).stem().string() + ".history.json");
                    write_file(p.string(), exported);
                }
            }
            if (as_json) {
                std::cout << result.report.dump(2) << "\n";
            } else {
                std::cout << "recipe " << result.name << ": "
                          << (result.exit_code == 0 ? "PASS" : "FAIL") << "\n";
                for (const auto& item : result.report["assertions"]) {
                    std::cout << "  " << (item["passed"].get<bool>() ? "ok  " : "FAIL") << " "
                              << item["name"].get<std::string>();
                    if (item.contains("detail"))
                        std::cout << "  (" << item["detail"].get<std::string>() << ")";
                    std::cout << "\n";
                }
            }
            return result.exit_code;
        }
    } catch (const txsc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        // unknown recipe names are usage errors
        return *cmd_recipe ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
