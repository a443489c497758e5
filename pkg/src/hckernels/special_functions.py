"""Complex log-Gamma on the branch used by the Gindikin-Karpelevich product.

``log_gamma`` is the analytic continuation of the real log Gamma from the
positive axis, with a single cut along (-inf, 0].  On that branch the
recurrence log_gamma(z + 1) = log_gamma(z) + log(z) holds exactly, which is
what makes log-space products of Gamma ratios safe.
"""

from __future__ import annotations

import numpy as np

# Lanczos approximation, g = 7, n = 9 (P. Godfrey's table, as reproduced on the
# Wikipedia "Lanczos approximation" page); about 15 significant digits for
# Re z >= 1/2.
_G = 7.0
_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * np.log(2 * np.pi)
_LOG_PI = np.log(np.pi)


class PoleError(ValueError):
    """Raised for arguments at (or numerically on) a pole of Gamma."""


def _lanczos(z):
    # valid for Re z >= 1/2
    zm = z - 1.0
    x = np.full(z.shape, _COEF[0], dtype=complex)
    for k in range(1, len(_COEF)):
        x = x + _COEF[k] / (zm + k)
    t = zm + _G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi_upper(z):
    """A branch of log(sin(pi z)) analytic on Im z > 0, continuous up to the real axis.

    sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}) and |e^{2 pi i z}| <= 1 there.
    """
    delta = z - np.round(z.real)
    near = delta.imag < 1.0
    # close to the real axis 1 - e^{2 pi i z} cancels, so use -2i sin(pi d) e^{i pi d};
    # further up |e^{2 pi i z}| < e^{-2 pi} and the direct form is exact enough
    theta = np.pi * np.where(near, delta, 0.0)
    one_minus_w = np.where(
        near,
        -2j * np.sin(theta) * np.exp(1j * theta),
        1.0 - np.exp(2j * np.pi * np.where(near, 0.0, delta)),
    )
    return np.log(0.5) + 0.5j * np.pi - 1j * np.pi * z + np.log(one_minus_w)


def _reflect_upper(z):
    return _LOG_PI - _log_sin_pi_upper(z) - _lanczos(1.0 - z)


def log_gamma(z):
    """log Gamma(z) for complex ``z`` (scalar or array).

    Uses the Lanczos sum for Re z >= 1/2 and the reflection identity
    Gamma(z) Gamma(1 - z) = pi / sin(pi z) elsewhere, with the branch of
    log sin fixed so the result is continuous off the negative real axis.
    On the cut itself the value is the limit from the upper half-plane.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise ValueError("log_gamma: non-finite argument")
    poles = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if np.any(poles):
        raise PoleError(f"log_gamma: pole at {arr[poles][0].real:g}")

    out = np.empty_like(arr)
    right = arr.real >= 0.5
    if np.any(right):
        out[right] = _lanczos(arr[right])
    left = ~right
    if np.any(left):
        zl = arr[left]
        lower = zl.imag < 0
        w = np.where(lower, np.conj(zl), zl)
        val = _reflect_upper(w)
        out[left] = np.where(lower, np.conj(val), val)
    return out[0] if scalar else out


def gamma(z):
    """Gamma(z) = exp(log_gamma(z))."""
    return np.exp(log_gamma(z))


def rgamma(z):
    """1 / Gamma(z), zero at the poles instead of raising."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    poles = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    out = np.zeros_like(arr)
    if np.any(~poles):
        out[~poles] = np.exp(-log_gamma(arr[~poles]))
    return out if np.ndim(z) else out[0]
