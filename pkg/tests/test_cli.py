import subprocess
import sys

import pytest

from plkernel.cli import fmt, main, parse_levels


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(out):
    return [line for line in out.splitlines() if line and not line.startswith("#")]


# --- kernel eval -----------------------------------------------------------------


def test_kernel_eval_row(capsys):
    code, out, _ = run(["kernel", "eval", "--kind", "released-bm", "--alpha0", "1", "--beta", "1",
                        "--x", "0.3", "--y", "0.7"], capsys)
    assert code == 0
    assert rows(out) == ["x,y,K", "0.3,0.7,1.3"]


def test_kernel_eval_invalid_params_names_condition(capsys):
    code, _, err = run(["kernel", "eval", "--kind", "general", "--alpha0", "1", "--alpha1", "1",
                        "--alpha2", "1", "--beta", "1", "--x", "0.3", "--y", "0.7"], capsys)
    assert code == 2
    assert "determinant" in err


def test_kernel_eval_domain_error(capsys):
    code, _, err = run(["kernel", "eval", "--kind", "released-bm", "--alpha0", "1", "--beta", "1",
                        "--x", "1.5", "--y", "0.7"], capsys)
    assert code == 2
    assert "[0, 1]" in err


def test_kernel_eval_grid(capsys):
    code, out, _ = run(["kernel", "eval", "--kind", "brownian-bridge", "--beta", "1", "--grid", "3"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 1 + 9
    assert "0.5,0.5,0.25" in table


def test_kernel_eval_missing_parameter(capsys):
    code, _, err = run(["kernel", "eval", "--kind", "general", "--alpha0", "1", "--x", "0.1", "--y", "0.2"], capsys)
    assert code == 2
    assert "--alpha1" in err


def test_unknown_flag_rejected(capsys):
    code, _, _ = run(["kernel", "eval", "--kind", "bm", "--beta", "1", "--gamma", "2"], capsys)
    assert code == 2


# --- verify green -----------------------------------------------------------------


def test_verify_green_general(capsys):
    code, out, _ = run(["verify", "green", "--kind", "general", "--alpha0", "2", "--alpha1", "1",
                        "--alpha2", "-0.5", "--beta", "0.7"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == "x,jump_residual,bc_left,bc_right"
    assert len(table) == 1 + 99
    summary = out.strip().splitlines()[-1]
    assert summary.startswith("# max_jump=") and "ok=true" in summary
    for line in table[1:]:
        assert all(abs(float(v)) < 1e-10 for v in line.split(",")[1:])


def test_verify_green_limit_kind_unsupported(capsys):
    code, _, err = run(["verify", "green", "--kind", "bm", "--beta", "1"], capsys)
    assert code == 2
    assert "--dirichlet" in err


def test_verify_green_dirichlet_bridge(capsys):
    code, out, _ = run(["verify", "green", "--kind", "brownian-bridge", "--beta", "1", "--dirichlet"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == "x,jump_residual,K_x0,K_x1"
    for line in table[1:]:
        _, jump, k0, k1 = (float(v) for v in line.split(","))
        assert abs(jump) < 1e-12 and k0 == 0.0 and k1 == 0.0


def test_verify_green_tolerance_failure(capsys):
    # rounding-level residuals exceed a 1e-18 tolerance
    code, out, _ = run(["verify", "green", "--kind", "general", "--alpha0", "3", "--alpha1", "0.2",
                        "--alpha2", "0.7", "--beta", "0.05", "--tol", "1e-18"], capsys)
    assert code == 1
    assert "ok=false" in out


# --- rates ----------------------------------------------------------------------------


def test_rates_sin(capsys):
    code, out, _ = run(["rates", "--function", "sin_pi", "--scheme", "uniform", "--levels", "8:256", "--r", "2"],
                       capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == "n,h,error"
    assert [int(r.split(",")[0]) for r in table[1:]] == [8, 16, 32, 64, 128, 256]
    last = out.strip().splitlines()[-1]
    fields = dict(kv.split("=") for kv in last[2:].split())
    assert abs(float(fields["slope"]) - 2) < 0.1
    assert fields["expected"] == "2.0"
    assert fields["source"] == "spline_f"


def test_rates_power_expected_exponent(capsys):
    code, out, _ = run(["rates", "--function", "pow:0.75", "--levels", "16:512"], capsys)
    assert code == 0
    assert "expected=1.25" in out and "source=spline_de" in out


def test_rates_affine_degenerate(capsys):
    code, _, err = run(["rates", "--function", "affine"], capsys)
    assert code == 1
    assert "degenerate fit" in err


def test_rates_band_failure(capsys):
    code, _, _ = run(["rates", "--function", "sin_pi", "--levels", "8:128", "--band", "0.0001"], capsys)
    assert code == 1


def test_rates_unknown_function(capsys):
    code, _, err = run(["rates", "--function", "cosine"], capsys)
    assert code == 2
    assert "unknown function" in err


def test_rates_kernel_singular_gram(capsys):
    code, _, err = run(["rates", "--function", "quadratic", "--kind", "bm", "--beta", "1", "--levels", "4:16"],
                       capsys)
    assert code == 1
    assert "singular" in err


def test_rates_seed_from_environment(capsys, monkeypatch):
    argv = ["rates", "--function", "sin_pi", "--scheme", "random", "--seed", "1", "--levels", "16:256"]
    _, a, _ = run(argv, capsys)
    monkeypatch.setenv("PLK_SEED", "99")
    _, b, _ = run(argv, capsys)
    _, c, _ = run(argv[:-4] + ["--seed", "99", "--levels", "16:256"], capsys)
    monkeypatch.delenv("PLK_SEED")
    assert a != b
    assert rows(b) == rows(c)


# --- quad -------------------------------------------------------------------------------


def test_quad_sharpness(capsys):
    code, out, _ = run(["quad", "--function", "quadratic", "--bound", "cu_d", "--p", "inf", "--levels", "2:64"],
                       capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == "n,Tn,I,abs_err,bound,satisfied"
    for line in table[1:]:
        _, _, _, err, bound, ok = line.split(",")
        assert abs(float(err) / float(bound) - 1) < 1e-10
        assert ok == "true"


def test_quad_affine(capsys):
    code, out, _ = run(["quad", "--function", "affine"], capsys)
    assert code == 0
    assert all(float(r.split(",")[3]) == 0.0 for r in rows(out)[1:])


def test_quad_sin_p2(capsys):
    code, out, _ = run(["quad", "--function", "sin_pi", "--bound", "cu_d", "--p", "2"], capsys)
    assert code == 0
    assert all(r.endswith(",true") for r in rows(out)[1:])


def test_quad_rate_only_bound_has_empty_column(capsys):
    code, out, _ = run(["quad", "--function", "sin_pi", "--bound", "cu_c_rate_only", "--alpha", "1",
                        "--levels", "2:8"], capsys)
    assert code == 0
    for line in rows(out)[1:]:
        assert line.split(",")[4] == ""


def test_quad_function_outside_space(capsys):
    code, _, _ = run(["quad", "--function", "hat", "--bound", "cu_d", "--p", "2"], capsys)
    assert code == 2


# --- output -----------------------------------------------------------------------------


def test_output_file_and_determinism(tmp_path, capsys):
    argv = ["rates", "--function", "hat", "--scheme", "random", "--seed", "3", "--levels", "16:256"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--output", str(a)]) in (0, 1)
    assert main(argv + ["--output", str(b)]) in (0, 1)
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert "n,h,error" in a.read_text().splitlines()


def test_plain_format(capsys):
    code, out, _ = run(["kernel", "eval", "--kind", "bm", "--beta", "1", "--x", "0.25", "--y", "0.5",
                        "--format", "plain"], capsys)
    assert code == 0
    assert "," not in rows(out)[-1]


def test_fmt_and_levels():
    assert fmt(0.1 + 0.2) == "0.30000000000000004"
    assert fmt(1.3) == "1.3"
    assert fmt(float("inf")) == "inf"
    assert fmt(True) == "true"
    assert parse_levels("2:64") == [2, 4, 8, 16, 32, 64]
    assert parse_levels("3,5,9") == [3, 5, 9]


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["kernel", "eval", "--kind", "wendland", "--epsilon", "0.5", "--x", "0.2", "--y", "0.4"], 0),
        (["verify", "green", "--kind", "released-bm", "--alpha0", "1", "--beta", "1"], 0),
        (["rates", "--function", "sin_pi", "--levels", "8:256"], 0),
        (["quad", "--function", "quadratic", "--levels", "2:16"], 0),
        (["rates", "--function", "affine"], 1),
        (["kernel", "eval", "--kind", "wendland", "--epsilon", "2", "--x", "0.2", "--y", "0.4"], 2),
    ],
)
def test_subprocess_exit_codes_and_determinism(argv, expected):
    cmd = [sys.executable, "-m", "plkernel", *argv]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == expected
    assert first.stdout == second.stdout
