"""How fast can a qubit learn the frequency of its own modulation?

A two-level system under H(t) = A sin(omega t) sigma_z / 2 accumulates a
relative phase between its energy eigenstates.  Without any control the
phase slope d(phi)/d(omega) oscillates and its envelope grows only linearly
in the interrogation time, so the extractable information (the squared
slope) grows as T^2.  Placing a pi pulse at every antinode of the modulation
rectifies the slope integrand: each half-period now adds with the same sign
and the slope itself grows as A T^2 / pi, i.e. the information grows as T^4.

This script evaluates both protocols from the closed-form integrals and
prints the scaling table; the fitted log-log exponents come out at 2 and 4.
"""

import math

import numpy as np

from qfi_lab import (
    DriveParams,
    PulseSchedule,
    antinode_schedule,
    envelope_times,
    phase_slope_frequency,
    linear_regression,
)

A = 2 * math.pi * 0.6      # rad/us  (A/2pi = 0.60 MHz)
OMEGA = 2 * math.pi        # rad/us  (1 MHz modulation)
drive = DriveParams(A, OMEGA)
empty = PulseSchedule(())

print(__doc__)

print("controlled QFI at integer periods (exact A^2 T^4 / pi^2):")
periods = np.arange(1.0, 9.0)
ctrl = []
for T in periods:
    sched = antinode_schedule(drive, float(T))
    q = phase_slope_frequency(drive, sched, float(T)) ** 2
    ctrl.append(q)
    print(f"  T = {T:4.1f} us   pulses = {sched.n_pulses:2d}   QFI = {q:10.2f} us^2"
          f"   A^2T^4/pi^2 = {(A * T * T / math.pi) ** 2:10.2f}")

print("\nuncontrolled QFI at its stationary (envelope) times:")
ts = envelope_times(drive, count=16, k_start=2)
unc = []
for T in ts:
    q = phase_slope_frequency(drive, empty, float(T)) ** 2
    unc.append(q)
print("  T from", round(float(ts[0]), 3), "to", round(float(ts[-1]), 3), "us")

fit_c = linear_regression(np.log(periods), np.log(np.asarray(ctrl)))
fit_u = linear_regression(np.log(ts), np.log(np.asarray(unc)))
print(f"\nfitted exponents:  controlled {fit_c.slope:.3f}   uncontrolled {fit_u.slope:.3f}")
print(f"improvement at T = 8 us: factor {ctrl[-1] / (A * 8 / OMEGA) ** 2:.0f} "
      f"over the uncontrolled envelope (omega*T/pi)^2 = {(OMEGA * 8 / math.pi) ** 2:.0f}")
