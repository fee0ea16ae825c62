#!/usr/bin/env python3
"""Feedback filter construction and the empirical state-norm bound."""

import numpy as np

from fusionsd import (build_filter, example1_config, example_frame_r3,
                      feasibility_report, ffsd_run, min_sigma_for_alpha,
                      stability_params, stability_trials)

# sparse taps: supports at sigma (j-1)^2 + 1, exact rational coefficients
for order, sigma in ((2, 50), (3, 50), (3, 10)):
    f = build_filter(order, sigma)
    taps = ", ".join("h[%d]=%s" % (n, d) for n, d in zip(f.supports, f.coeffs_exact))
    print("r=%d sigma=%-3d  %s" % (order, sigma, taps))
    print("   bandwidth K=%d  coeff growth M_r=%d  |h|_1=%.6f" %
          (f.bandwidth, f.coeff_growth, f.h_l1))

# the loop is certified stable when |h|_1 stays below alpha
p = stability_params(2, 0.1, 1.101)
print("\nadmissible gain interval: alpha1=%.7f alpha2=%.7f" % (p.alpha1, p.alpha2))
print("certified state bound at alpha=1.101: C=%.7f" % p.c_bound)
print("smallest sigma with |h|_1 < 1.101:", min_sigma_for_alpha(1.101))

rep = feasibility_report(build_filter(2, 50), 1.101)
print("feasibility: |h|_1=%.6f < alpha -> %s" % (rep["h_l1"], rep["passed"]))

# run the loop on the reference signal and watch the state stay small
x = np.array(example1_config().signal)
f = build_filter(2, 50)
print("\nmax state norm along the run (bound C=%.4f):" % p.c_bound)
for n in (60, 120, 240, 480, 960):
    fr = example_frame_r3(n)
    run = ffsd_run(fr, f, fr.analysis(x), stability=p)
    print("  N=%4d  max|v_n| = %.6f" % (n, run.max_state_norm))

# the empirical sweep: random signals inside the delta ball
report = stability_trials(200, example1_config(), n_blocks=500)
print("\n200 random trials at N=500: max state %.6f, violations %d, verdict %s"
      % (report["max_state_norm"], report["violations"], report["verdict"]))
