import math

import numpy as np
import pytest

from qfi_lab import DriveParams, NoiseParams

TWO_PI = 2.0 * math.pi

#: Hardware-motivated working point: A/2pi = 0.60 MHz, omega/2pi = 1 MHz.
A_DEFAULT = TWO_PI * 0.6
OMEGA_DEFAULT = TWO_PI


@pytest.fixture
def drive():
    return DriveParams(A_DEFAULT, OMEGA_DEFAULT, 0.0)


@pytest.fixture
def noise():
    return NoiseParams()  # T1=14 us, T2*=4 us, contrast 0.8


def segment_quadrature(drive, schedule, T, integrand, panels_per_period=20_000):
    """Independent composite-Simpson oracle for sign-toggled integrals.

    Integrates integrand(t) * f(t) over [0, T] by splitting at the pulse
    centers (where f flips) and applying Simpson's rule with at least
    `panels_per_period` panels per drive period inside each segment.
    """
    from scipy.integrate import simpson

    sign = 1.0
    total = 0.0
    edges = [0.0] + [c for c in schedule.pulse_centers if c < T] + [T]
    per_time = panels_per_period / drive.period
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            n = max(64, int(math.ceil((b - a) * per_time)))
            n += n % 2  # Simpson needs an even panel count
            t = np.linspace(a, b, n + 1)
            total += sign * simpson(integrand(t), x=t)
        sign = -sign
    return total
