"""Standard normal CDF and quantile function.

The quantile uses Acklam's rational approximation (|error| ≲ 1e-9) refined
by one Newton step on the erfc-based CDF.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

from ..exceptions import InputError

_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425
_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)


def normal_cdf(z):
    """Φ(z) = erfc(-z/√2) / 2."""
    value = 0.5 * erfc(-np.asarray(z, dtype=np.float64) / _SQRT2)
    return value[()] if np.ndim(value) == 0 else value


def normal_pdf(z):
    z = np.asarray(z, dtype=np.float64)
    value = np.exp(-0.5 * z * z) / _SQRT2PI
    return value[()] if np.ndim(value) == 0 else value


def _tail(q: np.ndarray) -> np.ndarray:
    c, d = _C, _D
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
        (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
    )


def _acklam(p: np.ndarray) -> np.ndarray:
    z = np.empty_like(p)
    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)
    if np.any(low):
        z[low] = _tail(np.sqrt(-2.0 * np.log(p[low])))
    if np.any(high):
        z[high] = -_tail(np.sqrt(-2.0 * np.log1p(-p[high])))
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        a, b = _A, _B
        z[mid] = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / (
            ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        )
    return z


def inv_normal_cdf(p):
    """z with Φ(z) = p for 0 < p < 1.

    Raises:
        InputError: If any p lies outside the open interval (0, 1)
    """
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise InputError("Probability must lie in (0, 1)", {"p": arr.tolist()})
    flat = arr.reshape(-1)
    z = _acklam(flat)
    z = z - (normal_cdf(z) - flat) / normal_pdf(z)
    z = z.reshape(arr.shape)
    return float(z) if z.ndim == 0 else z
