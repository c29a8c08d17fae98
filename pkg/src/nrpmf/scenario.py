"""Deployment/radio parameters and the CQI/MCS table.

Scenario files are flat TOML documents whose keys carry their unit as a
suffix (``f_c_ghz``, ``p_t_dbm``, ...).  Physical parameters have no
defaults; only ``zeta`` (2.1), ``l_b_db`` (20) and the MCS table do.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

__all__ = [
    "ScenarioError",
    "Scenario",
    "McsEntry",
    "McsTable",
    "default_mcs_table",
    "load_scenario",
    "loads_scenario",
    "dumps_scenario",
    "bundled_scenario_path",
]


class ScenarioError(ValueError):
    """Invalid scenario document; ``field`` names the offending parameter."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class McsEntry:
    cqi: int
    modulation: str
    spectral_efficiency: float  # bit/s/Hz
    snr_threshold_db: float


# CQI 1..15: (modulation, code rate x1024, efficiency, SNR threshold dB)
_TABLE2 = (
    ("QPSK", 78, 0.15237, -9.478),
    ("QPSK", 120, 0.2344, -6.658),
    ("QPSK", 193, 0.377, -4.098),
    ("QPSK", 308, 0.6016, -1.798),
    ("QPSK", 449, 0.877, 0.399),
    ("QPSK", 602, 1.1758, 2.424),
    ("16QAM", 378, 1.4766, 4.489),
    ("16QAM", 490, 1.9141, 6.367),
    ("16QAM", 616, 2.4063, 8.456),
    # rows 10-15 keep a 16QAM label although the efficiencies imply 64QAM
    ("16QAM", 466, 2.7305, 10.266),
    ("16QAM", 567, 3.3223, 12.218),
    ("16QAM", 666, 3.9023, 14.122),
    ("16QAM", 772, 4.5234, 15.849),
    ("16QAM", 873, 5.1152, 17.786),
    ("16QAM", 948, 5.5547, 19.809),
)


@dataclass(frozen=True)
class McsTable:
    """Ordered MCS rows; CQI 0 ("out of range") is implicit below the first threshold."""

    entries: tuple[McsEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ScenarioError("mcs_table", "table must not be empty")
        for prev, cur in zip(entries, entries[1:]):
            if not (
                cur.cqi > prev.cqi
                and cur.spectral_efficiency > prev.spectral_efficiency
                and cur.snr_threshold_db > prev.snr_threshold_db
            ):
                raise ScenarioError(
                    "mcs_table", f"rows not strictly increasing at CQI {cur.cqi}"
                )
        if any(e.spectral_efficiency <= 0 for e in entries):
            raise ScenarioError("mcs_table", "spectral efficiencies must be positive")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, cqi: int) -> McsEntry:
        """Row by CQI index (1-based, as printed in the table)."""
        for e in self.entries:
            if e.cqi == cqi:
                return e
        raise KeyError(cqi)

    @property
    def thresholds_db(self) -> tuple[float, ...]:
        return tuple(e.snr_threshold_db for e in self.entries)

    @property
    def efficiencies(self) -> tuple[float, ...]:
        return tuple(e.spectral_efficiency for e in self.entries)

    @property
    def s_min_db(self) -> float:
        return self.entries[0].snr_threshold_db


def default_mcs_table() -> McsTable:
    return McsTable(
        tuple(
            McsEntry(cqi, f"{mod} {rate}/1024", eff, snr)
            for cqi, (mod, rate, eff, snr) in enumerate(_TABLE2, start=1)
        )
    )


# key in file -> (attribute, symbol used in messages)
_KEYS: dict[str, tuple[str, str]] = {
    "f_c_ghz": ("f_c_ghz", "f_c"),
    "p_t_dbm": ("p_t_dbm", "P_T"),
    "g_b_dbi": ("g_b_dbi", "G_B"),
    "g_u_dbi": ("g_u_dbi", "G_U"),
    "l_b_db": ("l_b_db", "L_B"),
    "h_a_m": ("h_a_m", "h_A"),
    "h_u_m": ("h_u_m", "h_U"),
    "h_b_m": ("h_b_m", "h_B"),
    "r_b_m": ("r_b_m", "r_B"),
    "lambda_b_per_m2": ("lambda_b_per_m2", "lambda_B"),
    "rate_bps": ("rate_bps", "R"),
    "c_o_db": ("c_o_db", "C_O"),
    "c_l_db": ("c_l_db", "C_L"),
    "m_i_db": ("m_i_db", "M_I"),
    "n_f_db": ("n_f_db", "N_F"),
    "n_0_dbm_per_hz": ("n_0_dbm_per_hz", "N_0"),
    "w_prb_hz": ("w_prb_hz", "W_PRB"),
    "sigma_b_db": ("sigma_b_db", "sigma_B"),
    "sigma_nb_db": ("sigma_nb_db", "sigma_nB"),
    "p_c": ("p_c", "p_C"),
    "zeta": ("zeta", "zeta"),
    "r_a_m": ("r_a_m", "r_A"),
    "s_min_db": ("s_min_db", "S_min"),
}
_OPTIONAL = {"zeta", "l_b_db", "r_a_m", "s_min_db"}
_UNIT_SUFFIXES = ("_ghz", "_mhz", "_hz", "_dbm", "_dbi", "_db", "_m", "_km", "_bps",
                  "_mbps", "_per_m2", "_dbm_per_hz", "_w", "_linear")


@dataclass(frozen=True)
class Scenario:
    """Deployment and radio parameters of a single NR BS sector.

    Units are in the attribute names.  ``r_a_m``, when set, pins the 2-D cell
    radius instead of solving it from the link budget (see
    :func:`nrpmf.linkbudget.anchored_link_budget`).
    """

    f_c_ghz: float
    p_t_dbm: float
    g_b_dbi: float
    g_u_dbi: float
    h_a_m: float
    h_u_m: float
    h_b_m: float
    r_b_m: float
    lambda_b_per_m2: float
    rate_bps: float
    c_o_db: float
    c_l_db: float
    m_i_db: float
    n_f_db: float
    n_0_dbm_per_hz: float
    w_prb_hz: float
    sigma_b_db: float
    sigma_nb_db: float
    p_c: float
    l_b_db: float = 20.0
    zeta: float = 2.1
    r_a_m: float | None = None
    s_min_db: float | None = None
    mcs_table: McsTable = field(default_factory=default_mcs_table, compare=True)

    def __post_init__(self):
        for key, (attr, sym) in _KEYS.items():
            v = getattr(self, attr)
            if v is None and key in _OPTIONAL:
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ScenarioError(sym, f"expected a number for '{key}', got {v!r}")
            if not math.isfinite(v):
                raise ScenarioError(sym, f"'{key}' must be finite")
            object.__setattr__(self, attr, float(v))
        if not self.h_a_m > self.h_b_m > self.h_u_m > 0:
            raise ScenarioError(
                "heights", "require h_A > h_B > h_U > 0 "
                f"(h_A={self.h_a_m}, h_B={self.h_b_m}, h_U={self.h_u_m})"
            )
        checks = (
            ("r_B", self.r_b_m > 0, "must be > 0"),
            ("lambda_B", self.lambda_b_per_m2 >= 0, "must be >= 0"),
            ("p_C", 0 < self.p_c <= 0.5, "must lie in (0, 0.5]"),
            ("W_PRB", self.w_prb_hz > 0, "must be > 0"),
            ("R", self.rate_bps > 0, "must be > 0"),
            ("sigma_B", self.sigma_b_db >= 0, "must be >= 0"),
            ("sigma_nB", self.sigma_nb_db >= 0, "must be >= 0"),
            ("zeta", self.zeta > 0, "must be > 0"),
            ("f_c", self.f_c_ghz > 0, "must be > 0"),
            ("L_B", self.l_b_db >= 0, "must be >= 0"),
        )
        for sym, ok, msg in checks:
            if not ok:
                raise ScenarioError(sym, msg)
        if self.r_a_m is not None and not self.r_a_m > 0:
            raise ScenarioError("r_A", "must be > 0")
        if self.s_min_db is not None and abs(self.s_min_db - self.mcs_table.s_min_db) > 1e-9:
            raise ScenarioError(
                "S_min",
                f"{self.s_min_db} dB differs from the lowest MCS threshold "
                f"{self.mcs_table.s_min_db} dB",
            )

    def replace(self, **changes: Any) -> "Scenario":
        return dataclasses.replace(self, **changes)

    @property
    def s_min(self) -> float:
        return self.mcs_table.s_min_db


def _field_for_unknown(key: str) -> str | None:
    """Known field whose key differs from ``key`` only in the unit suffix."""
    for suffix in sorted(_UNIT_SUFFIXES, key=len, reverse=True):
        if key.endswith(suffix):
            stem = key[: -len(suffix)]
            for known in _KEYS:
                for ksuf in sorted(_UNIT_SUFFIXES, key=len, reverse=True):
                    if known.endswith(ksuf) and known[: -len(ksuf)] == stem:
                        return known
    return None


def scenario_from_mapping(doc: Mapping[str, Any]) -> Scenario:
    kwargs: dict[str, Any] = {}
    for key, value in doc.items():
        if key not in _KEYS:
            known = _field_for_unknown(key)
            if known is not None:
                raise ScenarioError(
                    _KEYS[known][1], f"unit violation: '{key}' given, expected '{known}'"
                )
            raise ScenarioError(key, "unknown key")
        kwargs[_KEYS[key][0]] = value
    for key, (attr, sym) in _KEYS.items():
        if key not in doc and key not in _OPTIONAL:
            raise ScenarioError(sym, f"missing required key '{key}'")
    return Scenario(**kwargs)


def loads_scenario(text: str) -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError("document", f"not valid TOML: {exc}") from exc
    nested = [k for k, v in doc.items() if isinstance(v, dict)]
    if nested:
        raise ScenarioError(nested[0], "scenario files are flat; tables are not allowed")
    return scenario_from_mapping(doc)


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file."""
    return loads_scenario(Path(path).read_text(encoding="utf-8"))


def dumps_scenario(s: Scenario) -> str:
    """Serialise to the flat key format; ``loads_scenario`` inverts it exactly."""
    lines = []
    for key, (attr, _) in _KEYS.items():
        v = getattr(s, attr)
        if v is None:
            continue
        lines.append(f"{key} = {float(v)!r}")
    return "\n".join(lines) + "\n"


def bundled_scenario_path() -> Path:
    """Path of the bundled 28 GHz scenario (p_C = 0.1)."""
    return Path(str(resources.files("nrpmf") / "scenarios" / "mmwave28.toml"))
