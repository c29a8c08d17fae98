"""Print a summary statistics for the bundled scenario at R = 5 Mbps.

    python scripts/reproduce_summary.py            # radius pinned per p_C
    python scripts/reproduce_summary.py --budget   # link budget alone

The reference column holds the reference value; PRB spreads are printed as
both std and variance under the include-outage-as-zero convention.
"""

import argparse

from nrpmf import Analysis, Conditioning, load_scenario, bundled_scenario_path
from nrpmf.reference import RADII, RATE_BPS, SUMMARY

ROWS = [
    ("Mean SNR", "fading", "snr_mean", lambda a, v: a.moments(v).mean),
    ("Mean SNR no SF", "no-fading", "snr_mean_no_fading", lambda a, v: a.moments(v).mean),
    ("Mean SNR approx", "approx", "snr_mean_approx", lambda a, v: a.moments(v).mean),
    ("STD SNR", "fading", "snr_std", lambda a, v: a.moments(v).std),
    ("STD SNR no SF", "no-fading", "snr_std_no_fading", lambda a, v: a.moments(v).std),
    ("STD SNR approx", "approx", "snr_std_approx", lambda a, v: a.moments(v).std),
    ("Mean PRBs", "fading", "prb_mean",
     lambda a, v: a.pmf(v, RATE_BPS).mean(Conditioning.ZERO)),
    ("Mean PRBs no SF", "no-fading", "prb_mean_no_fading",
     lambda a, v: a.pmf(v, RATE_BPS).mean(Conditioning.ZERO)),
    ("Mean PRBs approx", "approx", "prb_mean_approx",
     lambda a, v: a.pmf(v, RATE_BPS).mean(Conditioning.ZERO)),
    ("PRB variance", "fading", "prb_spread",
     lambda a, v: a.pmf(v, RATE_BPS).variance(Conditioning.ZERO)),
    ("PRB variance no SF", "no-fading", "prb_spread_no_fading",
     lambda a, v: a.pmf(v, RATE_BPS).variance(Conditioning.ZERO)),
    ("PRB variance approx", "approx", "prb_spread_approx",
     lambda a, v: a.pmf(v, RATE_BPS).variance(Conditioning.ZERO)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--budget", action="store_true", help="solve the radius from the link budget")
    args = ap.parse_args()

    base = load_scenario(bundled_scenario_path())
    p_cs = sorted(SUMMARY)
    analyses = {
        p: Analysis(base.replace(p_c=p, r_a_m=None if args.budget else RADII[p])) for p in p_cs
    }
    print(f"{'':22s}" + "".join(f"{'p_C=' + str(p):>22s}" for p in p_cs))
    print(f"{'d_E [m]':22s}" + "".join(f"{analyses[p].coverage.d_e:22.2f}" for p in p_cs))
    for label, variant, key, fn in ROWS:
        cells = "".join(
            f"{fn(analyses[p], variant):11.4f} ({SUMMARY[p][key]:8.4f})" for p in p_cs
        )
        print(f"{label:22s}{cells}")


if __name__ == "__main__":
    main()
