"""
Link budget: why D2D only pays off at short range
=================================================

A UE talking to the base station enjoys a 40 dB antenna gain and twice the
transmit power of a direct UE-to-UE link. This script tabulates both link
types against distance and finds the D2D distance that matches a BS link.
"""

import numpy as np

from d2dsim.channel import RadioParams, link_rate, link_snr

radio = RadioParams()

# rates without shadowing, in b/s/Hz
distances = np.array([10, 25, 50, 100, 200, 500, 700])
print(f"{'d [m]':>6} {'UE->BS':>8} {'D2D':>8}")
for d in distances:
    bs = link_rate(link_snr(260.0, 2.0, 40.0, d, radio))
    d2d = link_rate(link_snr(130.0, 2.0, 2.0, d, radio))
    print(f"{d:>6} {bs:8.3f} {d2d:8.3f}")

# the SNR gap is a constant factor, so equal-rate distances scale by a
# fixed ratio: gap ** (1 / alpha)
gap = link_snr(260.0, 2.0, 40.0, 100.0, radio) / link_snr(130.0, 2.0, 2.0, 100.0, radio)
ratio = gap ** (1 / radio.pathloss_exponent)
print(f"\nSNR gap {10 * np.log10(gap):.1f} dB; a D2D hop matches a BS hop "
      f"{ratio:.1f}x farther away (e.g. {500 / ratio:.0f} m vs 500 m)")
