# tests/commands/test_simulation_commands.py

import dataclasses

import pytest
from click.testing import CliRunner
from mockito import verify, when

from tclflex.commands import simulation_commands
from tclflex.logic import trace_logic

pytestmark = pytest.mark.usefixtures("unstub_fixture")

SET_A_FLAGS = ["--delta", "1", "--v", "0.4", "--w", "1", "--p", "1", "--n", "1400"]


def _record(output):
    return dict(line.split("=", 1) for line in output.splitlines() if "=" in line)


def test_simulate_indiv(tmp_path, capture_logs):
    out_path = tmp_path / "trace.csv"
    baseline_path = tmp_path / "baseline.csv"

    result = CliRunner().invoke(
        simulation_commands.simulate,
        SET_A_FLAGS
        + ["--t", "0.35", "--scheme", "indiv", "--horizon", "4"]
        + ["--out", str(out_path), "--baseline-out", str(baseline_path)],
    )

    assert result.exit_code == 0
    record = _record(result.output)
    assert float(record["avg_reduction_watts"]) == pytest.approx(510.0, abs=2.0)
    assert float(record["sup_deviation_watts"]) <= 2.0
    assert record["over_delivery"] == "false"
    assert record["temp_violations"] == "0"
    assert record["acting_appliances"] == "510"
    trace = trace_logic.read_trace_csv(str(out_path), horizon=4.0)
    baseline = trace_logic.read_trace_csv(str(baseline_path), horizon=4.0)
    assert trace_logic.value_at(baseline, 0.1) - trace_logic.value_at(
        trace, 0.1
    ) == pytest.approx(510.0, abs=1.0)
    assert f"Wrote trace to {out_path}" in capture_logs.text
    assert "Acting appliances" in capture_logs.text


def test_simulate_without_request():
    result = CliRunner().invoke(simulation_commands.simulate, SET_A_FLAGS)

    assert result.exit_code == 0
    record = _record(result.output)
    assert "avg_reduction_watts" not in record
    assert record["acting_appliances"] == "0"


def test_simulate_is_deterministic(write_scenario, make_scenario):
    document = make_scenario(amplitude=100, mode="probabilistic")
    document["fleets"][0].update(sampling="uniform_random", seed=9)
    path = write_scenario(document)
    runner = CliRunner()

    first = runner.invoke(simulation_commands.simulate, [path, "--seed", "3"])
    second = runner.invoke(simulation_commands.simulate, [path, "--seed", "3"])

    assert first.exit_code == 0
    assert first.output == second.output


def test_simulate_horizon_too_short(capture_logs):
    result = CliRunner().invoke(
        simulation_commands.simulate,
        SET_A_FLAGS + ["--t", "0.35", "--horizon", "0.3"],
    )

    assert result.exit_code == 2
    assert "must exceed the request duration" in capture_logs.text


def test_verify_passes(write_scenario, make_scenario, capture_logs):
    path = write_scenario(make_scenario())

    result = CliRunner().invoke(
        simulation_commands.verify, [path, "--tolerance", "5"]
    )

    assert result.exit_code == 0
    record = _record(result.output)
    assert float(record["analytic_watts"]) == pytest.approx(510.0)
    assert record["passed"] == "true"
    assert "Simulation agrees with the analytic quote" in capture_logs.text


def test_verify_flags_over_delivery(capture_logs):
    result = CliRunner().invoke(
        simulation_commands.verify,
        SET_A_FLAGS + ["--t", "1.0", "--scheme", "coord", "--tolerance", "5"],
    )

    assert result.exit_code == 1
    assert _record(result.output)["passed"] == "false"
    assert "Verification failed" in capture_logs.text
    assert "over_delivery" in capture_logs.text


def test_verify_without_constancy(capture_logs):
    result = CliRunner().invoke(
        simulation_commands.verify,
        SET_A_FLAGS
        + ["--t", "1.0", "--scheme", "coord", "--tolerance", "20", "--no-constancy"],
    )

    assert result.exit_code == 0


def test_verify_default_tolerance(
    write_scenario, make_scenario, sim_config, capture_logs
):
    when(simulation_commands).load_config().thenReturn(
        dataclasses.replace(sim_config, default_tolerance_watts=12.5)
    )
    path = write_scenario(make_scenario())

    result = CliRunner().invoke(simulation_commands.verify, [path])

    assert result.exit_code == 0
    assert "12.5 W" in capture_logs.text
    verify(simulation_commands).load_config()


def test_verify_corrupted_scenario(tmp_path, capture_logs):
    path = tmp_path / "scenario.json"
    path.write_text('{"classes": {}, "fleets": [{"class": "fridge"}]}')

    result = CliRunner().invoke(simulation_commands.verify, [str(path)])

    assert result.exit_code == 2
    assert "fleet #0 refers to unknown class 'fridge'" in capture_logs.text


def test_verify_without_request(capture_logs):
    result = CliRunner().invoke(simulation_commands.verify, SET_A_FLAGS)

    assert result.exit_code == 2
    assert "Verification needs a request" in capture_logs.text
