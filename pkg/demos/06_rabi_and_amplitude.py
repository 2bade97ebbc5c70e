"""Two baselines: Rabi spectroscopy and amplitude estimation.

Rabi spectroscopy reads the frequency from the side of a detuned Rabi
fringe; its phase slope saturates, giving information pi*T/A at long times,
which antinode control beats for any T beyond one signal period.

For the signal amplitude instead of its frequency, the eigenvalue splitting
does not grow with time, so the uncontrolled slope d(phi)/dA is stuck below
2/omega.  Pi pulses at the nodes rectify the sine and the slope grows as
2T/pi: amplitude sensitivity then improves linearly in time, down to the
pi/T bound.
"""

import math

from qfi_lab import (
    DriveParams,
    PulseSchedule,
    antinode_schedule,
    node_schedule,
    phase_slope_amplitude,
    qfi_generator,
    rabi_qfi,
)

A = 2 * math.pi * 0.6
OMEGA = 2 * math.pi
drive = DriveParams(A, OMEGA)
empty = PulseSchedule(())

print(__doc__)

print("frequency information, Rabi vs antinode control:")
print(f"{'T (us)':>7} {'rabi':>10} {'controlled':>12} {'ratio':>8}")
for T in (1.0, 2.0, 4.0, 8.0):
    q_rabi = rabi_qfi(A, T)
    q_ctrl = qfi_generator(drive, antinode_schedule(drive, T), T).value
    print(f"{T:7.1f} {q_rabi:10.3f} {q_ctrl:12.1f} {q_ctrl / q_rabi:8.1f}")

print("\namplitude slope d(phi)/dA, uncontrolled vs node pulses:")
print(f"{'T (us)':>7} {'uncontrolled':>13} {'bound 2/omega':>14} {'node':>8} {'2T/pi':>8}")
for T in (0.5, 1.5, 3.5, 5.5):
    s_unc = phase_slope_amplitude(drive, empty, T)
    s_node = phase_slope_amplitude(drive, node_schedule(drive, T), T)
    print(f"{T:7.1f} {s_unc:13.4f} {2 / OMEGA:14.4f} {s_node:8.4f} "
          f"{2 * T / math.pi:8.4f}")
