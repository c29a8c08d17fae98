import pytest
from hypothesis import given
from hypothesis import strategies as st

from nrpmf.scenario import (
    McsEntry,
    McsTable,
    Scenario,
    ScenarioError,
    default_mcs_table,
    dumps_scenario,
    load_scenario,
    loads_scenario,
    bundled_scenario_path,
)

# (code rate x1024, efficiency, SNR threshold) for CQI 1..15
GOLDEN = [
    (78, 0.15237, -9.478), (120, 0.2344, -6.658), (193, 0.377, -4.098),
    (308, 0.6016, -1.798), (449, 0.877, 0.399), (602, 1.1758, 2.424),
    (378, 1.4766, 4.489), (490, 1.9141, 6.367), (616, 2.4063, 8.456),
    (466, 2.7305, 10.266), (567, 3.3223, 12.218), (666, 3.9023, 14.122),
    (772, 4.5234, 15.849), (873, 5.1152, 17.786), (948, 5.5547, 19.809),
]


def test_default_table_golden():
    t = default_mcs_table()
    assert len(t) == 15
    for cqi, (rate, eff, thr) in enumerate(GOLDEN, start=1):
        e = t[cqi]
        assert e.cqi == cqi
        assert e.modulation.endswith(f" {rate}/1024")
        assert e.spectral_efficiency == eff
        assert e.snr_threshold_db == thr


def test_default_table_named_rows():
    t = default_mcs_table()
    assert (t[1].modulation, t[1].spectral_efficiency, t[1].snr_threshold_db) == (
        "QPSK 78/1024", 0.15237, -9.478)
    assert (t[9].modulation, t[9].spectral_efficiency, t[9].snr_threshold_db) == (
        "16QAM 616/1024", 2.4063, 8.456)
    assert t[15].modulation.startswith("16QAM")
    assert t.s_min_db == -9.478


def test_default_table_monotone():
    t = default_mcs_table()
    for a, b in zip(t.entries, t.entries[1:]):
        assert b.spectral_efficiency > a.spectral_efficiency
        assert b.snr_threshold_db > a.snr_threshold_db


def test_table_rejects_unsorted_and_empty():
    a = McsEntry(1, "x", 1.0, 0.0)
    b = McsEntry(2, "y", 0.5, 1.0)
    with pytest.raises(ScenarioError):
        McsTable((a, b))
    with pytest.raises(ScenarioError):
        McsTable(())
    with pytest.raises(ScenarioError):
        McsTable((McsEntry(1, "x", -1.0, 0.0),))


def test_bundled_scenario(bundled):
    assert bundled.f_c_ghz == 28.0
    assert bundled.p_t_dbm == 23.0
    assert bundled.lambda_b_per_m2 == 0.2
    assert bundled.sigma_b_db == 8.2 and bundled.sigma_nb_db == 4.0
    assert bundled.zeta == 2.1 and bundled.l_b_db == 20.0
    assert bundled.w_prb_hz == 1.44e6
    assert bundled.s_min == -9.478


def _doc(**changes):
    lines = []
    text = bundled_scenario_path().read_text()
    for line in text.splitlines():
        key = line.split("=")[0].strip()
        if key in changes:
            if changes[key] is None:
                continue
            line = f"{key} = {changes[key]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def test_heights_invariant():
    with pytest.raises(ScenarioError) as info:
        loads_scenario(_doc(h_u_m=5.0))
    assert info.value.field == "heights"


def test_missing_key_named():
    with pytest.raises(ScenarioError) as info:
        loads_scenario(_doc(sigma_nb_db=None))
    assert info.value.field == "sigma_nB"
    assert "sigma_nb_db" in str(info.value)


def test_unit_violation_named():
    text = _doc(f_c_ghz=None) + "f_c_mhz = 28000.0\n"
    with pytest.raises(ScenarioError) as info:
        loads_scenario(text)
    assert info.value.field == "f_c"
    assert "unit violation" in str(info.value)


@pytest.mark.parametrize(
    "key, value, field",
    [
        ("p_c", 0.0, "p_C"),
        ("p_c", 0.6, "p_C"),
        ("r_b_m", 0.0, "r_B"),
        ("lambda_b_per_m2", -0.1, "lambda_B"),
        ("w_prb_hz", 0.0, "W_PRB"),
        ("rate_bps", -1.0, "R"),
        ("sigma_b_db", -1.0, "sigma_B"),
        ("zeta", 0.0, "zeta"),
        ("f_c_ghz", 0.0, "f_c"),
        ("p_t_dbm", '"high"', "P_T"),
        ("s_min_db", -9.0, "S_min"),
    ],
)
def test_invariant_violations_name_field(key, value, field):
    text = _doc(**{key: value}) if key in _doc() else _doc() + f"{key} = {value}\n"
    with pytest.raises(ScenarioError) as info:
        loads_scenario(text)
    assert info.value.field == field


def test_unknown_and_nested_keys():
    with pytest.raises(ScenarioError, match="unknown key"):
        loads_scenario(_doc() + "colour = 3\n")
    with pytest.raises(ScenarioError, match="flat"):
        loads_scenario(_doc() + "[extra]\nx = 1\n")
    with pytest.raises(ScenarioError, match="TOML"):
        loads_scenario("p_c = = 1")


def test_round_trip_bundled(bundled):
    assert loads_scenario(dumps_scenario(bundled)) == bundled


@given(
    p_c=st.floats(1e-6, 0.5),
    lam=st.floats(0, 2),
    h_u=st.floats(0.1, 1.6),
    sigma=st.floats(0, 20),
    r_a=st.one_of(st.none(), st.floats(1, 500)),
)
def test_round_trip_random(bundled, p_c, lam, h_u, sigma, r_a):
    s = bundled.replace(p_c=p_c, lambda_b_per_m2=lam, h_u_m=h_u, sigma_b_db=sigma, r_a_m=r_a)
    assert loads_scenario(dumps_scenario(s)) == s


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "absent.toml")


def test_scenario_is_immutable(bundled):
    with pytest.raises(AttributeError):
        bundled.p_c = 0.2
    assert isinstance(bundled.replace(p_c=0.2), Scenario)
