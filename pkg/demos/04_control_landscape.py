"""The control landscape: how wrong can the pulse pattern be?

The antinode placement needs the very frequency and phase we are trying to
estimate.  Sweeping the control frequency and control phase around the true
values maps out how the information degrades: the peak at the matched point
falls off as (1 - delta_omega^2 T^2 / 2) in frequency and roughly as
cos^2(delta_theta) in phase, so a crude uncontrolled estimate is enough to
land on the peak.  Far away, the pattern decorrelates from the signal and
the information drops to the uncontrolled level.
"""

import math

import numpy as np

from qfi_lab import DriveParams, landscape_sweep, qfi_freq_mismatch

A = 2 * math.pi * 0.6
OMEGA = 2 * math.pi
drive = DriveParams(A, OMEGA)
T = 1.25

print(__doc__)

grid = landscape_sweep(drive, T=T, noiseless=True)
peak_w, peak_th = grid.argmax_cell()
print(f"landscape at T = {T} us: {grid.qfi.shape[0]}x{grid.qfi.shape[1]} cells, "
      f"argmax at omega_c/omega = {peak_w / OMEGA:.3f}, delta_theta = {peak_th:.3f}")

print("\nfrequency cut (delta_theta = 0) vs the leading-order mismatch law:")
freqs, cut = grid.frequency_cut(0.0)
for ratio_target in (0.96, 0.98, 1.0, 1.02, 1.04):
    i = int(np.argmin(np.abs(freqs / OMEGA - ratio_target)))
    dw = freqs[i] - OMEGA
    formula = qfi_freq_mismatch(A, T, dw)
    print(f"  omega_c/omega = {freqs[i] / OMEGA:5.3f}   "
          f"QFI = {cut[i]:7.3f}   leading order = {formula:7.3f}")

print("\nphase cut at matched frequency:")
phases, pcut = grid.phase_cut(OMEGA)
for th_target in (-1.0, -0.5, 0.0, 0.5, 1.0):
    j = int(np.argmin(np.abs(phases - th_target)))
    print(f"  delta_theta = {phases[j]:+5.2f} rad   QFI = {pcut[j]:7.3f}")

unc_level = (A * T / OMEGA) ** 2
print(f"\nuncontrolled envelope level at this T: {unc_level:.3f} us^2 "
      "(the far-detuned sidelobes oscillate about it)")
