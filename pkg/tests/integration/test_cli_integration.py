import csv
import json

import numpy as np
import pytest

pytestmark = pytest.mark.cli

H_STAR_BV = 1.1476
H_STAR_UBV = 0.5590


def _json(result):
    """
    Extract the JSON document from the command output.
    """
    text = result.output
    return json.loads(text[text.index("{"): text.rindex("}") + 1])


def _read_csv(path):
    with path.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    return rows[0], rows[1:]


def test_boundary_text_and_json(invoke):
    """
    Steps:
      1. Solve the boundary of the default configuration and read h_star from the text output.
      2. Repeat with --json and check the window and pasting diagnostics.
    """
    result = invoke("boundary")
    assert result.exit_code == 0, result.output
    line = next(line for line in result.output.splitlines() if line.startswith("h_star"))
    assert float(line.split()[1]) == pytest.approx(H_STAR_BV, abs=5e-4), "h* of the sigma = 0 model"

    result = invoke("boundary", "--json")
    assert result.exit_code == 0, result.output
    report = _json(result)
    sol = report["solution"]
    assert sol["h_star"] == pytest.approx(H_STAR_BV, abs=5e-4), "JSON h* must match the text output"
    assert sol["gamma_window"][0] < -1.0 < sol["gamma_window"][1], "gamma = -1 lies in the window"
    assert report["payoff_at_h_star"] == pytest.approx(0.5621, abs=5e-4), "G_b(h*)"
    assert sol["pasting_gap"] <= 1e-8, "smooth pasting"


def test_boundary_with_overrides(invoke):
    """
    Test --set for the diffusive model and a switching cost outside the window.
    """
    result = invoke("--set", "model.sigma=0.2", "boundary", "--json")
    assert result.exit_code == 0, result.output
    assert _json(result)["solution"]["h_star"] == pytest.approx(H_STAR_UBV, abs=5e-4), "h* of the sigma = 0.2 model"

    result = invoke("--set", "switch.gamma=-0.001", "boundary")
    assert result.exit_code == 1, "a window violation is a numerical failure"
    assert "WindowViolation" in result.output, "error type must be reported"


def test_boundary_from_config_file(invoke, write_config):
    """
    Test --config with a file outside the project.
    """
    path = write_config(lambda doc: doc["model"].update(sigma=0.2))
    result = invoke("--config", str(path), "boundary", "--json")
    assert result.exit_code == 0, result.output
    assert _json(result)["solution"]["h_star"] == pytest.approx(H_STAR_UBV, abs=5e-4), "file must be used"


def test_price(invoke):
    """
    Steps:
      1. Price at y = 1 inside the stopping region and check the total is the sum of its parts.
      2. Price outside [0, b] and expect a usage error.
    """
    result = invoke("price", "--y", "1.0", "--json")
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["total_value"] == pytest.approx(report["cds_value"] + report["option_value"], abs=1e-12), \
        "total value must be the sum"
    assert report["option_value"] > 0.0, "switching is worth something below h*"
    assert report["h_star"] == pytest.approx(H_STAR_BV, abs=5e-4), "report carries h*"

    result = invoke("price", "--y", "5")
    assert result.exit_code == 2, "y > b is a domain error"
    assert "DomainError" in result.output, "error type must be reported"


def test_price_text_output(invoke):
    result = invoke("price", "--y", "0.5")
    assert result.exit_code == 0, result.output
    names = [line.split()[0] for line in result.output.splitlines() if line.strip()]
    for name in ("y", "cds_value", "option_value", "total_value", "h_star", "par_spread"):
        assert name in names, f"missing {name}"


def test_verify_analytic(invoke):
    """
    Test that the analytic suite passes for the default model and reports the generator statistics.
    """
    result = invoke("verify", "--json")
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["passed"], [check["name"] for check in report["checks"] if not check["passed"]]
    stats = report["generator_values"]
    assert stats["target"] == pytest.approx(-0.1), "target is r * gamma"
    assert stats["min"] == pytest.approx(-0.1, abs=1e-3), "generator minimum"
    assert stats["max"] == pytest.approx(-0.1, abs=1e-3), "generator maximum"


def test_verify_rejects_invalid_model(invoke):
    result = invoke("--set", "model.sigma=-1", "verify")
    assert result.exit_code == 2, "invalid configuration is a usage error"
    assert "model.sigma" in result.output, "error must name the field"


def test_verify_monte_carlo_runs(invoke):
    """
    Test the Monte Carlo suite end to end with a small path count.
    """
    result = invoke("--set", "numerics.mc.n_paths=4000", "--set", "numerics.mc.batch_size=2000", "verify", "--mc")
    assert result.exit_code in (0, 1), result.output
    lines = [line for line in result.output.splitlines() if line.startswith(("PASS", "FAIL"))]
    names = {line.split()[1] for line in lines}
    assert "martingale_constancy" in names, "martingale scan must run"
    assert any(name.startswith("mc_candidate_J@") for name in names), "candidate value must be simulated"
    assert "mc_dt_halving" not in names, "dt halving only applies when sigma > 0"


def test_figures(invoke, tmp_path):
    """
    Steps:
      1. Write the four CSV files for sigma = 0 and sigma = 0.2.
      2. Check headers, line endings and the generator and boundary-function shapes.
    """
    out = tmp_path / "figures"
    result = invoke("figures", "--out", str(out))
    assert result.exit_code == 0, result.output
    assert "wrote 4 files" in result.output, "four files expected"

    header, _ = _read_csv(out / "fig1_scale.csv")
    assert header == ["sigma", "x", "W_phi", "ratio"], "scale header"

    header, rows = _read_csv(out / "fig3_value.csv")
    assert header[:3] == ["sigma", "y", "G"] and header[-1] == "V", "value header"
    assert "J_minus_0.05" in header and "J_plus_0.2" in header, "sub-optimal threshold columns"
    table = np.array(rows, dtype=float)
    value, others = table[:, -1], table[:, 2:-1]
    assert np.all(value[:, None] >= others - 1e-9), "V dominates G and every threshold rule"

    header, rows = _read_csv(out / "fig4_generator.csv")
    assert header == ["sigma", "y", "generator"], "generator header"
    generator = np.array(rows, dtype=float)
    assert set(generator[:, 0]) == {0.0, 0.2}, "one curve per sigma"
    assert np.max(np.abs(generator[:, 2] + 0.1)) <= 1e-3, "(L_Y - r) G_b is flat at r * gamma"

    header, rows = _read_csv(out / "fig2_roots.csv")
    assert header == ["sigma", "b", "f_r", "h", "f_h"], "roots header"
    table = np.array(rows, dtype=float)
    for sigma in (0.0, 0.2):
        f_h = table[table[:, 0] == sigma, 4]
        assert np.count_nonzero(np.diff(np.sign(f_h)) != 0) == 1, f"f(h) crosses zero once for sigma = {sigma}"

    for name in ("fig1_scale.csv", "fig2_roots.csv", "fig3_value.csv", "fig4_generator.csv"):
        assert b"\r" not in (out / name).read_bytes(), f"{name} must use LF line endings"


def test_schema(invoke):
    result = invoke("schema", "price")
    assert result.exit_code == 0, result.output
    assert "total_value" in json.loads(result.output)["properties"], "price schema"

    result = invoke("schema")
    assert set(json.loads(result.output)) == {"price", "boundary", "verify"}, "all report schemas"


def test_price_at_default_level_with_diffusion(invoke):
    """
    Test that at y = b with sigma > 0 the par spread is reported as undefined and the option is worthless.
    """
    result = invoke("--config", "configs/sigma_0_2.json", "price", "--y", "1.6094379124341003", "--json")
    assert result.exit_code == 0, result.output
    report = _json(result)
    assert report["par_spread"] is None, "no premium is ever paid from y = b"
    assert report["option_value"] == 0.0, "default is immediate, the option cannot be exercised"
    assert report["cds_value"] == pytest.approx(10.0, abs=1e-12), "the buyer receives alpha at once"
