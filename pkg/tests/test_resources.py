import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nrpmf.mathcore import DomainError
from nrpmf.reference import SUMMARY
from nrpmf.resources import (
    Conditioning,
    ResourcePmf,
    mcs_probabilities,
    pmf_moments,
    prbs_needed,
    resource_pmf,
)
from nrpmf.scenario import default_mcs_table
from nrpmf.snrmodel import NormalMixtureCdf

TABLE = default_mcs_table()
W = 1.44e6


def step(at):
    return NormalMixtureCdf((1.0,), (at,), (0.0,))


def test_point_mass_selects_one_cqi():
    m = mcs_probabilities(step(9.0), TABLE)
    assert m[9] == 1.0 and m.sum() == 1.0


def test_uniform_cdf_masses_follow_gaps():
    lo, hi = TABLE.s_min_db, TABLE.thresholds_db[-1]
    uniform = lambda x: np.clip((np.asarray(x) - lo) / (hi - lo), 0, 1)
    m = mcs_probabilities(uniform, TABLE)
    gaps = np.diff(TABLE.thresholds_db) / (hi - lo)
    assert m[0] == 0.0
    assert m[1:-1] == pytest.approx(gaps, abs=1e-15)
    assert m[-1] == pytest.approx(0.0, abs=1e-15)


def test_prbs_needed_examples():
    assert prbs_needed(2e6, 1.4766, W) == 1
    assert prbs_needed(2e6, 1.1758, W) == 2
    assert prbs_needed(5e6, 5.5547, W) == 1
    # an efficiency exactly on the boundary belongs to the smaller count
    for i in (1, 2, 3, 7):
        assert prbs_needed(2e6, 2e6 / (i * W), W) == i
    for bad in ((0, 1, W), (1, 0, W), (1, 1, 0), (-1, 1, W)):
        with pytest.raises(DomainError):
            prbs_needed(*bad)


def test_pmf_examples():
    pmf = resource_pmf(step(20.0), TABLE, 5e6, W)
    assert pmf.probs == {1: 1.0} and pmf.outage == 0.0
    out = resource_pmf(step(-20.0), TABLE, 5e6, W)
    assert out.outage == 1.0 and out.probs == {}
    with pytest.raises(DomainError):
        out.mean()
    assert pmf_moments(out, Conditioning.ZERO) == (0.0, 0.0)


def test_pmf_moments_examples():
    assert pmf_moments(ResourcePmf({1: 1.0}, 0.0, 1.0, 1.0)) == (1.0, 0.0)
    assert pmf_moments(ResourcePmf({1: 0.5, 3: 0.5}, 0.0, 1.0, 1.0)) == (2.0, 1.0)
    p = ResourcePmf({2: 0.5}, 0.5, 1.0, 1.0)
    assert p.mean() == 2.0 and p.mean("include-outage-as-zero") == 1.0
    assert p.variance(Conditioning.ZERO) == pytest.approx(1.0)


def test_pmf_validation():
    with pytest.raises(DomainError):
        ResourcePmf({1: 0.5}, 0.4, 1.0, 1.0)
    with pytest.raises(DomainError):
        ResourcePmf({0: 1.0}, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ResourcePmf({1: 1.1}, -0.1, 1.0, 1.0)


def normal_cdfs():
    return st.builds(
        lambda mu, sd: NormalMixtureCdf((1.0,), (mu,), (sd,)),
        st.floats(-30, 40), st.floats(0.1, 20),
    )


@given(normal_cdfs(), st.floats(1e5, 5e7))
def test_pmf_normalised_and_bounded(cdf, rate):
    pmf = resource_pmf(cdf, TABLE, rate, W)
    assert abs(pmf.outage + sum(pmf.probs.values()) - 1.0) <= 1e-9
    i_max = math.ceil(rate / (TABLE.efficiencies[0] * W))
    assert all(1 <= i <= i_max for i in pmf.support())


@given(st.floats(-30, 40), st.floats(0, 20), st.floats(0.1, 20), st.floats(1e5, 5e7))
def test_better_snr_needs_fewer_prbs(mu, shift, sd, rate):
    # F = N(mu + shift) lies below G = N(mu): F has the better SNR.  With outage
    # charged at the largest count the mean is monotone; see the ledger for why
    # neither moment convention is by itself.
    good = resource_pmf(NormalMixtureCdf((1.0,), (mu + shift,), (sd,)), TABLE, rate, W)
    bad = resource_pmf(NormalMixtureCdf((1.0,), (mu,), (sd,)), TABLE, rate, W)
    i_max = math.ceil(rate / (TABLE.efficiencies[0] * W))

    def charged(p):
        return sum(i * q for i, q in p.probs.items()) + p.outage * i_max

    assert charged(good) <= charged(bad) + 1e-9


@given(st.floats(0, 20), st.floats(0.1, 3), st.floats(1e5, 5e7))
def test_dominance_without_outage(shift, sd, rate):
    # both CDFs well above the lowest threshold: no outage, both conventions agree
    bad = resource_pmf(NormalMixtureCdf((1.0,), (20.0,), (sd,)), TABLE, rate, W)
    good = resource_pmf(NormalMixtureCdf((1.0,), (20.0 + shift,), (sd,)), TABLE, rate, W)
    for conv in Conditioning:
        assert good.mean(conv) <= bad.mean(conv) + 1e-9


def test_pmf_only_uses_thresholds(anchored):
    a = anchored[0.1]
    cdf = a.cdf("fading")
    calls = []

    def spy(x):
        calls.append(np.asarray(x).copy())
        return cdf(x)

    m = mcs_probabilities(spy, TABLE)
    assert len(calls) == 1 and calls[0].tolist() == list(TABLE.thresholds_db)
    assert m.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p_c", [0.01, 0.05, 0.1])
def test_reference_prb_means(anchored, p_c):
    ref = SUMMARY[p_c]
    a = anchored[p_c]
    for variant, key in (("fading", "prb_mean"), ("no-fading", "prb_mean_no_fading"),
                         ("approx", "prb_mean_approx")):
        got = a.pmf(variant, 5e6).mean(Conditioning.ZERO)
        assert got == pytest.approx(ref[key], rel=0.03)


def test_mcs_probabilities_vs_monte_carlo(anchored):
    from nrpmf.simulator import SimConfig, simulate

    a = anchored[0.1]
    rep = simulate(a.scenario, a.lb, a.geometry,
                   SimConfig(10**6, seed=9, blockage_sampling="independent"))
    m = mcs_probabilities(a.cdf("fading"), TABLE)
    assert np.max(np.abs(rep.cqi_frequencies - m)) <= 0.003
