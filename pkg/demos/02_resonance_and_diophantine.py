"""Which background fields make the flow recoverable?

Rational direction ratios leave a resonant set of wavevectors invisible to
the transport operator. Irrational ratios clear it, and the Diophantine scan
measures how close the small divisors F.g(k) come to zero.
"""

import warnings

import numpy as np

from induction_inverse import diophantine_estimate, is_incommensurable, resonant_set

print("exact scans, |k_i| <= 8")
for F in (["1/1", "1/1"], ["2", "3"], ["1", "3/2"]):
    rep = resonant_set(F, (1.0, 1.0), 8, "exact-rational")
    flag, witness = is_incommensurable(F)
    shown = ", ".join(str(k) for k in rep.resonant_modes[:4])
    print(f"  F = {F}: {len(rep.resonant_modes)} resonant modes ({shown}, ...), witness {witness}")

F = (1.0, np.sqrt(2.0))
rep = resonant_set(F, (1.0, 1.0), 64, "float-threshold", 1e-12)
print(f"\nF = (1, sqrt 2), |k_i| <= 64: {len(rep.resonant_modes)} resonant modes")
print(f"  smallest |F.g(k)| = {rep.min_abs_pairing:.3e} at k = {rep.argmin_k}")

print("\nDiophantine constant C_est(kmax), tau = 1")
for kmax in (2, 4, 8, 16, 32, 64):
    est = diophantine_estimate(F, (1.0, 1.0), 1.0, kmax)
    print(f"  kmax {kmax:3d}: C_est = {est.C_est:.6f} at k = {est.argmin_k}")

# the lower envelope of |F.g(k)| against |k| decays like 1/|k|
env = diophantine_estimate(F, (1.0, 1.0), 1.0, 64).envelope
for knorm in (1, 10, 30, 60):
    row = env[np.searchsorted(env[:, 0], knorm)]
    print(f"  |k| ~ {row[0]:5.1f}: running min {row[2]:.2e}, times |k| = {row[0] * row[2]:.3f}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    F3 = (1.0, np.sqrt(2.0), np.sqrt(3.0))
    print(f"\nF = (1, sqrt 2, sqrt 3), tau = 2, kmax 32: C_est = {diophantine_estimate(F3, (1, 1, 1), 2.0, 32).C_est:.4f}")
