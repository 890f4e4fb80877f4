"""
Spectral transmission of filtered photon pairs
==============================================

A pulsed pump has a finite linewidth, and the pair spectrum it produces
is detected behind a Gaussian bandpass filter.  The pair transmission
factor depends on only one number: the pump linewidth measured against
the filter bandwidth, delta = 4 ln 2 / (pulse FWHM x filter bandwidth).

This script tabulates the factor over a range of delta and shows the
closed-form checkpoints at delta = 0 and delta = sqrt(2).
"""

import numpy as np

from spdc_coupler import omega2_factor_gaussian, spectral_curve

# A monochromatic pump transmits the most; the factor decays as the pump
# linewidth grows past the filter bandwidth.
print("delta    pair factor")
for delta, value in spectral_curve([0.0, 0.25, 0.5, 1.0, np.sqrt(2.0),
                                    2.0, 4.0, 8.0]):
    print(f"{delta:5.2f}    {value:.7f}")

# Two checkpoints pin the curve.  At delta = 0 the factor is
# sqrt(pi / (8 ln 2)), and at delta = sqrt(2) it is exactly the
# monochromatic value divided by sqrt(2).
v0 = omega2_factor_gaussian(0.0)
vr = omega2_factor_gaussian(np.sqrt(2.0))
print()
print(f"monochromatic value        {v0:.9f}")
print(f"sqrt(pi / (8 ln 2))        {np.sqrt(np.pi / (8 * np.log(2))):.9f}")
print(f"value at sqrt(2), scaled   {vr * np.sqrt(2.0):.9f}")
