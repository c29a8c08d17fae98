import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nrpmf.cli import OutputTable, main
from nrpmf.scenario import bundled_scenario_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parsed(capsys, *argv, fmt="csv"):
    code, out, _ = run(capsys, *argv, "--format", fmt)
    assert code == 0
    return OutputTable.parse(out, fmt)


cells = st.one_of(
    st.none(),
    st.integers(-10**12, 10**12),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(alphabet="abcxyz-_[] ,\"", min_size=1).filter(lambda t: t.strip() == t and t),
)


@given(st.integers(1, 4).flatmap(lambda k: st.tuples(
    st.just(k), st.lists(st.lists(cells, min_size=k, max_size=k), max_size=6))),
    st.sampled_from(["csv", "records"]))
def test_output_table_round_trip(shape, fmt):
    k, rows = shape
    t = OutputTable([f"c{j}" for j in range(k)], [tuple(r) for r in rows],
                    {"seed": 3, "x": 0.1}, {"total": [1.5, None]})
    back = OutputTable.parse(t.render(fmt), fmt)
    assert back == t


def test_output_table_is_rectangular():
    with pytest.raises(ValueError):
        OutputTable(("a", "b"), [(1,)])
    t = OutputTable(("a",))
    with pytest.raises(ValueError):
        t.add(1, 2)


def test_numbers_keep_six_significant_digits():
    t = OutputTable(("v",), [(1.0,), (0.5,), (1.23456789,)])
    lines = t.to_csv().splitlines()[2:5]
    assert lines == ["1.00000", "0.500000", "1.23456789"]


def test_coverage_budget_mode(capsys):
    t = parsed(capsys, "coverage", "--p-c", "0.01", "--p-c", "0.05", "--p-c", "0.1")
    assert t.column("mode") == ["link-budget"] * 3
    d = t.column("d_e_m")
    assert d == sorted(d) and d[0] > 500


def test_coverage_pinned_radii(capsys):
    t = parsed(capsys, "coverage", "--reference-radii", "--p-c", "0.01", "--p-c", "0.05", "--p-c", "0.1")
    assert t.column("d_e_m") == [65.0, 119.0, 165.0]
    assert set(t.footer["budget_d_e_m"]) == {"0.0100000", "0.0500000", "0.100000"}


def test_coverage_half_outage(capsys):
    t = parsed(capsys, "coverage", "--p-c", "0.5")
    assert t.column("m_sb_db") == [0.0]


def test_missing_file(capsys, tmp_path):
    path = tmp_path / "nope.toml"
    code, out, err = run(capsys, "coverage", "--scenario", str(path))
    assert code == 2 and str(path) in err and out == ""


def test_invalid_scenario_file(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(bundled_scenario_path().read_text().replace("h_u_m = 1.5", "h_u_m = 9.0"))
    code, _, err = run(capsys, "coverage", "--scenario", str(path))
    assert code == 2 and "heights" in err and str(path) in err


@pytest.mark.parametrize("argv", [
    ["coverage", "--p-c", "0.7"],
    ["coverage", "--p-c", "0.2", "--reference-radii"],
    ["coverage", "--p-c", "0.1", "--p-c", "0.05", "--radius", "1", "--radius", "2", "--radius", "3"],
    ["pmf", "--rate", "-5"],
    ["validate", "--samples", "0"],
])
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["coverage", "--format", "xml"])
    assert info.value.code == 2


def test_snr_cdf_no_fading_starts_at_zero(capsys):
    t = parsed(capsys, "snr-cdf", "--no-fading", "--reference-radii", "--grid-n", "101")
    cdf = t.column("cdf")
    assert cdf[0] == 0.0 and cdf[-1] == 1.0
    assert all(b >= a for a, b in zip(cdf, cdf[1:]))


def test_snr_cdf_reports_ks_and_approx_alias(capsys):
    exact = parsed(capsys, "snr-cdf", "--reference-radii", "--grid-n", "11")
    approx = parsed(capsys, "approx", "--reference-radii", "--grid-n", "11", "--grid-lo", "-20",
                    "--grid-hi", "60")
    flag = parsed(capsys, "snr-cdf", "--approx", "--reference-radii", "--grid-n", "11",
                  "--grid-lo", "-20", "--grid-hi", "60")
    assert 0 < exact.header["ks_exact_vs_approx"] <= 0.05
    assert approx.header["ks_exact_vs_approx"] == exact.header["ks_exact_vs_approx"]
    assert approx.rows == flag.rows and approx.header["kind"] == "normal-approx"


def test_snr_cdf_branches(capsys):
    for branch in ("blocked", "nonblocked"):
        t = parsed(capsys, "snr-cdf", "--branch", branch, "--reference-radii", "--grid-n", "5",
                   fmt="records")
        assert t.header["branch"] == branch and t.header["kind"] == "convolved-exact"


def test_snr_cdf_one_file_per_p_c(capsys, tmp_path):
    out = tmp_path / "cdf.csv"
    code, stdout, _ = run(capsys, "snr-cdf", "--p-c", "0.01", "--p-c", "0.05", "--p-c", "0.1",
                          "--reference-radii", "--grid-n", "21", "--out", str(out))
    assert code == 0 and stdout == ""
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["cdf_pc0.01.csv", "cdf_pc0.05.csv", "cdf_pc0.1.csv"]
    t = OutputTable.parse((tmp_path / "cdf_pc0.05.csv").read_text())
    assert set(t.column("p_c")) == {0.05} and len(t.rows) == 21


def test_pmf_outage_row_and_footer(capsys):
    t = parsed(capsys, "pmf", "--p-c", "0.01", "--reference-radii", "--rate", "5e6",
               "--convention", "include-outage-as-zero")
    assert t.rows[0][2:4] == (0, "outage")
    assert sum(t.column("probability")) == pytest.approx(1.0, abs=1e-9)
    s = t.footer["summary"][0]
    assert s["mean"] == s["mean[include-outage-as-zero]"]
    assert s["mean"] == pytest.approx(1.42256, rel=0.03)
    assert s["variance[condition-on-served]"] == pytest.approx(s["std[condition-on-served]"] ** 2)


def test_pmf_outage_row_present_when_zero(capsys, tmp_path):
    path = tmp_path / "quiet.toml"
    text = bundled_scenario_path().read_text() + "r_a_m = 5.0\n"
    path.write_text(text.replace("sigma_b_db = 8.2", "sigma_b_db = 0.0")
                    .replace("sigma_nb_db = 4.0", "sigma_nb_db = 0.0"))
    t = parsed(capsys, "pmf", "--scenario", str(path), "--p-c", "0.5")
    assert t.rows[0][2:] == (0, "outage", 0.0)


def test_pmf_low_rate_masses_sum_to_one(capsys):
    t = parsed(capsys, "pmf", "--p-c", "0.1", "--reference-radii", "--rate", "2e6")
    assert sum(t.column("probability")) == pytest.approx(1.0, abs=1e-9)


def test_sweep_cross_product(capsys):
    t = parsed(capsys, "sweep", "--reference-radii", "--p-c", "0.01", "--p-c", "0.1",
               "--rate", "2e6", "--rate", "5e6")
    assert [(r[0], r[1]) for r in t.rows] == [(0.01, 2e6), (0.01, 5e6), (0.1, 2e6), (0.1, 5e6)]
    means = t.column("prb_mean_zero")
    assert means[0] < means[1] and means[2] < means[3]


def test_validate_small_run_is_wide_and_repeatable(capsys):
    argv = ["validate", "--reference-radii", "--p-c", "0.1", "--rate", "5e6", "--samples", "100",
            "--seed", "42"]
    code, out, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code == code2 == 0 and out == out2
    t = OutputTable.parse(out)
    assert t.header["wide_tolerance"] is True and t.header["seed"] == 42
    assert t.header["dkw_bound"] == pytest.approx(math.sqrt(math.log(2 / 0.0027) / 200))
    oracle = [r for r in t.rows if r[1] == "ks_oracle"]
    assert oracle and all(r[6] == "no" and r[7] == "INFO" for r in oracle)


def test_validate_budget_mode_fails(capsys):
    code, out, _ = run(capsys, "validate", "--p-c", "0.1", "--rate", "5e6", "--samples", "100")
    t = OutputTable.parse(out)
    assert code == 1 and t.footer["result"] == "FAIL"
    failing = {r[1] for r in t.rows if r[7] == "FAIL" and r[6] == "yes"}
    assert "snr_mean_db" in failing


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nrpmf", "coverage", "--p-c", "0.5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "m_sb_db" in proc.stdout
