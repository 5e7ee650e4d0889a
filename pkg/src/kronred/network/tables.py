"""Monotone Hermite Tables

Sampled reduced-edge laws: strictly increasing (voltage, current) pairs with
slopes, interpolated by a piecewise-cubic Hermite spline whose slopes are
Fritsch–Carlson limited so the interpolant stays monotone.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from kronred.errors import NonMonotoneError

INTERPOLATION_KIND = "monotone-cubic-hermite"


def limit_slopes(x: np.ndarray, f: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """
    Fritsch–Carlson limiting for increasing data.

    Negative slopes are clipped to zero; on every interval where
    (m_k/δ)² + (m_k+1/δ)² > 9 both end slopes are scaled back onto that circle.
    """
    limited = np.clip(np.array(slopes, dtype=float), 0.0, None)
    secants = np.diff(f) / np.diff(x)
    for k, delta in enumerate(secants):
        alpha = limited[k] / delta
        beta = limited[k + 1] / delta
        radius = np.hypot(alpha, beta)
        if radius > 3.0:
            tau = 3.0 / radius
            limited[k] = tau * alpha * delta
            limited[k + 1] = tau * beta * delta
    return limited


@dataclass(frozen=True)
class EdgeTable:
    """
    Recovered law of one reduced edge.

    `slope` holds the slopes actually used by the interpolant; `cocontent`
    tabulates Ĝ(ŷ) = ∫₀^ŷ Î, anchored at Ĝ(0) = 0. Outside the table the
    cubic end pieces are extrapolated.
    """
    y: np.ndarray
    current: np.ndarray
    slope: np.ndarray
    cocontent: np.ndarray
    interpolation: str = INTERPOLATION_KIND
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)
    _primitive: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        spline = CubicHermiteSpline(self.y, self.current, self.slope, extrapolate=True)
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_primitive", spline.antiderivative())

    def __call__(self, y):
        """Î(ŷ)."""
        return self._spline(y)

    def derivative(self, y):
        """dÎ/dŷ."""
        return self._spline(y, 1)

    def integral(self, y):
        """Ĝ(ŷ), anchored at zero."""
        return self._primitive(y) - self._primitive(0.0)

    @classmethod
    def from_samples(cls, y, current, slopes: Optional[np.ndarray] = None, limit: bool = True) -> "EdgeTable":
        """
        Builds a table from samples sorted by voltage.

        Without `slopes` they are estimated by PCHIP.

        Raises:
            NonMonotoneError: voltages or currents not strictly increasing.
        """
        y = np.asarray(y, dtype=float)
        current = np.asarray(current, dtype=float)
        if y.size < 2:
            raise NonMonotoneError("a recovered law needs at least two distinct samples")
        if np.any(np.diff(y) <= 0.0):
            raise NonMonotoneError("table voltages are not strictly increasing")
        if np.any(np.diff(current) <= 0.0):
            k = int(np.argmax(np.diff(current) <= 0.0))
            raise NonMonotoneError(f"recovered current is not strictly increasing near y={y[k]!r}")
        if slopes is None:
            slopes = PchipInterpolator(y, current).derivative()(y)
        slopes = limit_slopes(y, current, slopes) if limit else np.asarray(slopes, dtype=float)
        primitive = CubicHermiteSpline(y, current, slopes, extrapolate=True).antiderivative()
        cocontent = primitive(y) - primitive(0.0)
        return cls(y=y, current=current, slope=slopes, cocontent=cocontent)
