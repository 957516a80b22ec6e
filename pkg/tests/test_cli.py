import csv
import io
import json

import pytest

from splitbound import cli
from splitbound.cli import (CHECK_NAMES, ConfigError, ExperimentConfig,
                            default_config, main, parse_config, run,
                            rows_to_csv, rows_to_json)
from splitbound.problems import ProblemSpec
from splitbound.splittings import Method

TINY_CONFIG = {
    "problems": [{"kind": "nilpotent_2x2"}],
    "methods": ["LT", "PLT", "STRANG"],
    "t_grid": [0.25, 0.5],
    "checks": ["representations", "bounds", "symmetry"],
}


def tiny_config(**overrides):
    raw = dict(TINY_CONFIG)
    raw.update(overrides)
    return parse_config(json.dumps(raw))


# ---------------------------------------------------------------------------
# config parsing


def test_parse_full_config():
    cfg = parse_config(json.dumps({
        "problems": [
            {"kind": "random_skew", "dim": 4, "seed": 9, "scale": 2.0},
            {"kind": "schrodinger_1d", "grid_points": 16, "potential": "well"},
        ],
        "methods": ["LT", "STRANG_REV"],
        "t_grid": {"t0": 1.0, "ratio": 0.5, "count": 3},
        "checks": ["bounds"],
        "quad_tol": 1e-8,
        "output": {"format": "json", "path": "out.json"},
    }))
    assert cfg.problems[0].kind == "random_skew"
    assert cfg.problems[1].dim == 16
    assert cfg.methods == (Method.LT, Method.STRANG_REV)
    assert cfg.t_grid == (1.0, 0.5, 0.25)
    assert cfg.quad_tol == 1e-8
    assert cfg.output_format == "json"
    assert cfg.output_path == "out.json"


def test_default_config_is_the_seven_problem_corpus():
    cfg = default_config()
    assert len(cfg.problems) == 7
    assert cfg.checks == CHECK_NAMES
    assert cfg.t_grid == (0.1, 0.5, 1.0)


@pytest.mark.parametrize("mutation,needle", [
    ({"t_grid": []}, "t_grid"),
    ({"problems": []}, "problems"),
    ({"methods": []}, "methods"),
    ({"methods": ["MAGNUS"]}, "methods[0]"),
    ({"checks": ["everything"]}, "checks[0]"),
    ({"quad_tol": 1e-3}, "quad_tol"),
    ({"quad_tol": 0.0}, "quad_tol"),
    ({"t_grid": [0.5, -1.0]}, "t_grid[1]"),
    ({"t_grid": {"t0": 1.0, "ratio": 0.5}}, "count"),
    ({"output": {"format": "xml"}}, "output.format"),
    ({"problems": [{"kind": "nope"}]}, "problems[0]"),
    ({"problems": [{"kind": "nilpotent_2x2", "extra": 1}]}, "problems[0]"),
    ({"bogus_top": 1}, "bogus_top"),
])
def test_parse_errors_cite_the_field(mutation, needle):
    raw = dict(TINY_CONFIG)
    raw.update(mutation)
    with pytest.raises(ConfigError, match=needle.replace("[", r"\[")):
        parse_config(json.dumps(raw))


def test_parse_error_cites_line_and_column():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config('{\n  "problems": oops\n}')


def test_load_config_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        cli.load_config("/nonexistent/config.json")


# ---------------------------------------------------------------------------
# run


def test_run_commuting_only_all_pass():
    cfg = parse_config(json.dumps({
        "problems": [{"kind": "commuting_diag", "dim": 3, "seed": 4}],
        "methods": ["LT", "PLT", "STRANG"],
        "t_grid": [0.5],
        "checks": ["representations"],
    }))
    rows = run(cfg)
    assert rows and all(r.passed for r in rows)
    assert all(r.measured <= 1e-11 for r in rows)


def test_run_rows_sorted_deterministically():
    rows = run(tiny_config())
    keys = [(r.problem_id, r.method, r.t, r.check) for r in rows]
    assert keys == sorted(keys)


def test_run_reruns_byte_identical():
    cfg = tiny_config()
    a, b = run(cfg), run(cfg)
    assert rows_to_csv(a) == rows_to_csv(b)
    assert rows_to_json(a) == rows_to_json(b)


def test_run_includes_scalar_bound_rows():
    rows = run(tiny_config(checks=["bounds"]))
    scalar = [r for r in rows if r.problem_id == "(scalar)"]
    assert {r.check for r in scalar} == {"bound_seam_x+", "bound_seam_x-",
                                         "bound_limit"}
    assert all(r.passed for r in scalar)


def test_run_orders_and_leading_checks():
    cfg = parse_config(json.dumps({
        "problems": [{"kind": "nilpotent_2x2"}],
        "methods": ["LT", "STRANG"],
        "t_grid": [0.5],
        "checks": ["orders", "leading"],
    }))
    rows = run(cfg)
    by_check = {}
    for r in rows:
        by_check.setdefault(r.check, []).append(r)
    assert len(by_check["order_slope"]) == 2
    assert len(by_check["leading_term"]) == 2
    assert all(r.passed for r in rows)
    slopes = {r.method: r.measured for r in by_check["order_slope"]}
    assert abs(slopes["LT"] - 2.0) <= 0.05
    assert abs(slopes["STRANG"] - 3.0) <= 0.05


def test_run_skips_orders_on_commuting():
    cfg = parse_config(json.dumps({
        "problems": [{"kind": "commuting_diag", "dim": 3, "seed": 4}],
        "methods": ["LT"],
        "t_grid": [0.5],
        "checks": ["orders", "leading", "symmetry"],
    }))
    rows = run(cfg)
    assert {r.check for r in rows} == set()  # nothing applicable


def test_run_symmetry_rows():
    rows = run(tiny_config(checks=["symmetry"]))
    strang = [r for r in rows if r.method == "STRANG"]
    witness = [r for r in rows if r.check == "nonsymmetry_witness"]
    assert strang and all(r.check == "symmetry_defect" and r.passed
                          for r in strang)
    assert witness and all(r.passed and r.measured > 0 for r in witness)
    assert {r.method for r in witness} == {"LT", "PLT"}


# ---------------------------------------------------------------------------
# serialization


def test_csv_round_trips_17_digits():
    rows = run(tiny_config(checks=["bounds"]))
    text = rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert len(parsed) == len(rows)
    for raw, row in zip(parsed, rows):
        assert float(raw["measured"]) == row.measured
        assert float(raw["tolerance"]) == row.tolerance
        assert raw["pass"] == ("true" if row.passed else "false")


def test_json_matches_rows():
    rows = run(tiny_config(checks=["symmetry"]))
    payload = json.loads(rows_to_json(rows))
    assert [p["check"] for p in payload] == [r.check for r in rows]
    assert all(set(p) == {"problem_id", "method", "t", "check", "measured",
                          "reference", "tolerance", "pass", "detail"}
               for p in payload)


# ---------------------------------------------------------------------------
# command line


def write_config(tmp_path, raw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_main_run_writes_output_and_exits_zero(tmp_path, capsys):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    out = tmp_path / "rows.csv"
    code = main(["run", "--config", cfg_path, "--output", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.startswith("problem_id,method,t,check,")
    assert "repr_lt_integral" in text


def test_main_rerun_byte_identical_files(tmp_path):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", cfg_path, "--output", str(out1)]) == 0
    assert main(["run", "--config", cfg_path, "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_main_exit_one_on_failing_row(tmp_path):
    # quad_tol far below what fixed-node quadrature achieves -> failing rows
    raw = dict(TINY_CONFIG)
    raw["checks"] = ["representations"]
    raw["quad_tol"] = 1e-16
    cfg_path = write_config(tmp_path, raw)
    out = tmp_path / "rows.csv"
    assert main(["run", "--config", cfg_path, "--output", str(out)]) == 1
    assert ",false," in out.read_text()


def test_main_bad_config_exits_two(tmp_path, capsys):
    cfg_path = write_config(tmp_path, {"problems": []})
    assert main(["run", "--config", cfg_path]) == 2
    assert "problems" in capsys.readouterr().err


def test_main_missing_config_exits_two(capsys):
    assert main(["run", "--config", "/no/such/file.json"]) == 2


def test_verify_representations_subcommand(tmp_path):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    out = tmp_path / "rows.csv"
    code = main(["verify-representations", "--config", cfg_path,
                 "--quad-tol", "1e-9", "--output", str(out)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert rows and all(r["check"].startswith("repr_") for r in rows)
    assert all(float(r["measured"]) < 1e-9 for r in rows)


def test_check_bounds_subcommand(tmp_path):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    out = tmp_path / "rows.json"
    code = main(["check-bounds", "--config", cfg_path, "--format", "json",
                 "--output", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    checks = {p["check"] for p in payload}
    assert "bound_dominance" in checks
    assert "bound_limit" in checks


def test_estimate_order_subcommand(tmp_path):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    out = tmp_path / "rows.csv"
    assert main(["estimate-order", "--config", cfg_path,
                 "--output", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert {r["check"] for r in rows} == {"order_slope"}


def test_leading_terms_subcommand(tmp_path):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    out = tmp_path / "rows.csv"
    assert main(["leading-terms", "--config", cfg_path,
                 "--output", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert {r["check"] for r in rows} == {"leading_term"}
    assert all(float(r["measured"]) <= 1e-4 for r in rows)


def test_seed_override_changes_random_rows(tmp_path):
    raw = {
        "problems": [{"kind": "random_general", "dim": 3, "seed": 1}],
        "methods": ["LT"],
        "t_grid": [0.5],
        "checks": ["bounds"],
    }
    cfg_path = write_config(tmp_path, raw)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["check-bounds", "--config", cfg_path, "--output", str(a)])
    main(["check-bounds", "--config", cfg_path, "--seed-override", "999",
          "--output", str(b)])
    row_a = [r for r in csv.DictReader(io.StringIO(a.read_text()))
             if r["check"] == "bound_dominance"]
    row_b = [r for r in csv.DictReader(io.StringIO(b.read_text()))
             if r["check"] == "bound_dominance"]
    assert row_a[0]["measured"] != row_b[0]["measured"]


def test_seed_override_out_of_range_exits_two(tmp_path):
    cfg_path = write_config(tmp_path, TINY_CONFIG)
    assert main(["run", "--config", cfg_path, "--seed-override", "-3"]) == 2


def test_schrodinger_demo(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    code = main(["schrodinger-demo", "--grid-points", "8", "--scale", "2.0",
                 "--output", str(out)])
    assert code == 0
    table = capsys.readouterr().out
    assert table.splitlines()[0] == "method,t,error,bound"
    assert len(table.splitlines()) == 1 + 3 * 8  # header + 3 methods x 8 ts
    assert "repr_" in out.read_text()


def test_print_config_schema(capsys):
    assert main(["print-config-schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    props = schema["properties"]
    assert set(schema["required"]) == {"problems", "methods", "t_grid"}
    assert "quad_tol" in props and "checks" in props and "output" in props


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code != 0
