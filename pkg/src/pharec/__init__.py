"""pharec: phase-amplitude reconstruction of coupled oscillator networks.

Fits vector fields of oscillator networks as uncoupled-plus-pairwise
Fourier-Taylor series from phase/radius time series, computes phase-amplitude
transformations by finite-time Fourier/Laplace averaging, and expresses the
coupling as coefficient tensors in the reduced phase-amplitude space.
"""

__version__ = "0.1.0"
