"""Reference summary statistics for the bundled 28 GHz scenario at R = 5 Mbps.

Keyed by cell-edge outage probability ``p_C``.  The two ``*_prb_spread``
rows are nominally standard deviations but numerically
equal the variance of the include-outage-as-zero PRB demand.
"""

RATE_BPS = 5e6

SUMMARY = {
    0.01: {
        "snr_mean": 27.016, "snr_mean_no_fading": 27.016, "snr_mean_approx": 27.016,
        "snr_std": 12.0514, "snr_std_no_fading": 10.538, "snr_std_approx": 12.0513,
        "prb_mean": 1.42256, "prb_mean_no_fading": 1.22362, "prb_mean_approx": 1.43419,
        "prb_spread": 2.71887, "prb_spread_no_fading": 0.17362, "prb_spread_approx": 3.03627,
    },
    0.05: {
        "snr_mean": 17.8982, "snr_mean_no_fading": 17.8982, "snr_mean_approx": 17.8982,
        "snr_std": 12.7718, "snr_std_no_fading": 10.9461, "snr_std_approx": 12.7718,
        "prb_mean": 2.37408, "prb_mean_no_fading": 1.69017, "prb_mean_approx": 2.35948,
        "prb_spread": 11.7379, "prb_spread_no_fading": 0.64415, "prb_spread_approx": 11.9472,
    },
    0.1: {
        "snr_mean": 12.7958, "snr_mean_no_fading": 12.7958, "snr_mean_approx": 12.7958,
        "snr_std": 12.7065, "snr_std_no_fading": 10.6159, "snr_std_approx": 12.7065,
        "prb_mean": 3.27115, "prb_mean_no_fading": 2.21262, "prb_mean_approx": 3.20999,
        "prb_spread": 20.8665, "prb_spread_no_fading": 1.29765, "prb_spread_approx": 20.5599,
    },
}

# 2-D coverage radii listed with each p_C, metres
RADII = {0.01: 65.0, 0.05: 119.0, 0.1: 165.0}

SNR_TOL_DB = 0.15
PRB_MEAN_REL_TOL = 0.03
RADIUS_TOL_M = 3.0
