"""End-to-end smoke tests for the python bindings."""

import json

import pytest

import txsc


@pytest.fixture(scope="module")
def puzzle_source():
    return txsc.corpus_file("contracts/puzzle.txsc")


def test_parse_shape(puzzle_source):
    ast = txsc.parse(puzzle_source)
    assert ast["contract"] == "Puzzle"
    assert len(ast["attributes"]) == 5
    assert len(ast["functions"]) == 3


def test_format_round_trips(puzzle_source):
    once = txsc.format(puzzle_source)
    assert txsc.format(once) == once
    assert "requires(msg.sender == owner);" in once


def test_parse_error_is_typed():
    with pytest.raises(txsc.TxscError):
        txsc.parse("contract {")


def test_analyze_classifications(puzzle_source):
    profiles = {p["function"]: p for p in txsc.analyze(puzzle_source)}
    assert profiles["UpdateReward"]["classification"] == "SDTF"
    assert profiles["UpdateReward"]["readSet"] == ["owner", "solved", "reward"]
    assert profiles["SubmitSolution"]["writeSet"] == ["solved", "solution"]
    assert profiles["constructor"]["classification"] == "NonTransactional"

    bk = {p["function"]: p for p in txsc.analyze(txsc.corpus_file("contracts/blockking.txsc"))}
    assert bk["enter"]["classification"] == "CDTF"


def test_transform_injects_the_paper_checks(puzzle_source):
    result = txsc.transform(puzzle_source, txsc.corpus_file("config/standard.toml"))
    assert "requires(solved == msg.data.solved);" in result["source"]
    assert "requires(reward == msg.data.reward);" in result["source"]
    checks = sum(len(f["injectedChecks"]) for f in result["report"]["perFunction"])
    assert checks == 4


def test_run_scenario_and_check():
    scenario = txsc.corpus_file("scenarios/puzzle_anomaly.toml")
    contracts = {"puzzle.txsc": txsc.corpus_file("contracts/puzzle.txsc")}
    history = txsc.run_scenario(scenario, contracts)
    assert len(history["spans"]) == 2
    verdict = txsc.check_history(json.dumps(history))
    assert verdict["serializable"] is False

    fixed = txsc.corpus_file("scenarios/puzzle_fixed.toml")
    history2 = txsc.run_scenario(fixed, contracts)
    verdict2 = txsc.check_history(json.dumps(history2))
    assert verdict2["serializable"] is True
    assert verdict2["witnessOrder"] == ["alice-1", "bob-1"]


def test_recipes_pass():
    assert set(txsc.recipe_names()) == {
        "puzzle-anomaly",
        "puzzle-fixed",
        "blockking-anomaly",
        "blockking-fixed",
        "out-of-gas-atomicity",
        "lost-callback",
    }
    result = txsc.run_recipe("puzzle-fixed")
    assert result["exit_code"] == 0
    assert result["report"]["passed"] is True
