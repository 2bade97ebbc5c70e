"""Adaptive estimation: doubling down on every successful measurement.

The controlled information at time T is A^2 T^4 / pi^2, but achieving it
requires knowing the frequency already.  The adaptive schedule resolves the
circularity: measure crudely without control, then repeatedly set the next
interrogation time to T_n = sqrt(I_{n-1}) and rebuild the pulse pattern at
the refined estimate.  The booked information then satisfies
I_n = I_0^(2^n) * ((A/pi)^2 (1 - 1/(2N)))^(2^n - 1), a double exponential,
so reaching a target duration takes only log2(ln T) rounds.
"""

import math

from qfi_lab import (
    DriveParams,
    adaptive_loop,
    iteration_info,
    predicted_rounds,
    total_info_bounds,
)

A = 2 * math.pi * 0.6
drive = DriveParams(A, 2 * math.pi)
N = 100

print(__doc__)

print("exact-estimator schedule (6 controlled rounds):")
traj = adaptive_loop(drive, N_per_round=N, n_rounds=6, exact=True)
I0 = traj.iterations[0].I_n
print(f"{'n':>3} {'T_n (us)':>12} {'I_n (us^2)':>14} {'closed form':>14}")
for r in traj.iterations:
    print(f"{r.n:>3} {r.T_n:>12.4f} {r.I_n:>14.6g} "
          f"{iteration_info(I0, A, N, r.n):>14.6g}")

print("\nrounds needed to reach a duration budget:")
for budget in (10.0, 100.0, 1000.0):
    t = adaptive_loop(drive, N_per_round=N, T_budget=budget, exact=True)
    print(f"  budget {budget:7.0f} us: {t.iterations[-1].n} rounds "
          f"(double-log prediction {predicted_rounds(budget, I0, A, N):.2f})")

t = adaptive_loop(drive, N_per_round=N, T_budget=100.0, exact=True)
lo, hi = total_info_bounds(t.total_time, N, A)
print(f"\ntotal information {t.total_information:.3g} us^2 inside the "
      f"schedule bounds [{lo:.3g}, {hi:.3g}]")

print("\nsampled estimator (projection noise only), three seeds:")
for seed in (0, 1, 2):
    t = adaptive_loop(drive, N_per_round=N, n_rounds=4, seed=seed)
    last = t.iterations[-1]
    print(f"  seed {seed}: final T = {last.T_n:8.3f} us, "
          f"|delta_omega| = {abs(last.delta_omega):.2e} rad/us")
