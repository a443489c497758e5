"""Harish-Chandra c-function, series coefficients and spherical functions.

Conventions follow Helgason: for H in the open positive chamber

    e^{rho(H)} phi_lambda(exp H) = sum_{s in W} c(s lambda) e^{i s lambda(H)}
                                   sum_{mu in Lambda} Gamma_mu(s lambda) e^{-mu(H)}

with Gamma_0 = 1 and Gamma_mu fixed by the level-ordered recurrence
implemented in :func:`gamma_coefficients`.  Most functions accept a stack of
spectral parameters (shape ``(N, rank)``) because the kernel quadrature
evaluates thousands of nodes at once.

Complex spectral parameters are accepted as long as their imaginary part lies
in the closed positive chamber (used for contour-shifted kernel quadrature and
for the normalisation point -i rho of the c-function).
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .root_system import ChamberPoint, RootDatum, lattice_points
from .special_functions import log_gamma, rgamma

ETA_MIN = 0.05
GROWTH_LEVELS = 60
GROWTH_SAFETY = 10.0


class IrregularError(ValueError):
    """Spectral parameter on a root hyperplane."""


class WallProximityError(ValueError):
    """Chamber point too close to a wall for the series to be used."""


@dataclass(frozen=True)
class CFunctionValue:
    value: complex
    lam: tuple

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)


@dataclass(frozen=True)
class GammaTable:
    datum: RootDatum
    lam: tuple
    max_level: int
    entries: dict  # lattice coordinates (n_1, ..., n_l) -> complex

    def __getitem__(self, mu):
        return self.entries[tuple(mu)]


@dataclass(frozen=True)
class SphericalValue:
    """``value`` is e^{rho(H)} phi_lambda(exp H); ``phi`` removes the factor."""

    value: complex
    tail_bound: float
    rho_H: float
    levels: int

    @property
    def phi(self) -> complex:
        return self.value * np.exp(-self.rho_H)


# -- c-function -------------------------------------------------------------

def _as_lambda(datum, lam):
    lam = np.asarray(lam, dtype=complex)
    if lam.shape[-1:] != (datum.rank,):
        if datum.rank == 1:
            lam = lam[..., None]
        else:
            raise ValueError(f"spectral parameter must have {datum.rank} components")
    return lam


def _log_c_unnormalised(datum, lam):
    out = np.zeros(lam.shape[:-1], dtype=complex)
    log2 = np.log(2.0)
    for alpha, m1, m2 in datum.reduced_pairs():
        z = 1j * datum.inner(lam, alpha) / datum.inner(alpha, alpha)
        out += (
            -z * log2
            + log_gamma(z)
            - log_gamma(0.5 * (0.5 * m1 + 1 + z))
            - log_gamma(0.5 * (0.5 * m1 + m2 + z))
        )
    return out


@functools.lru_cache(maxsize=None)
def _log_c0(datum: RootDatum) -> complex:
    return -complex(_log_c_unnormalised(datum, (-1j * datum.rho)[None, :])[0])


def check_regular(datum: RootDatum, lam, tol: float = 1e-12):
    lam = _as_lambda(datum, lam)
    prods = np.abs(lam @ datum.metric @ datum.roots[datum.reduced].T)
    if np.any(prods <= tol):
        raise IrregularError("spectral parameter lies on a root hyperplane")


def log_c_function(datum: RootDatum, lam):
    """log c(lambda), normalised so that c(-i rho) = 1."""
    lam = _as_lambda(datum, lam)
    z = 1j * (lam @ datum.metric @ datum.roots[datum.reduced].T)
    bad = (np.abs(z.imag) < 1e-300) & (z.real <= 0) & (np.round(z.real) == z.real)
    if np.any(bad):
        raise IrregularError("c-function pole: i<lambda, alpha_0> is a nonpositive integer")
    return _log_c_unnormalised(datum, lam) + _log_c0(datum)


def c_values(datum: RootDatum, lam):
    """Vectorised c(lambda) over a stack of spectral parameters."""
    out = np.exp(log_c_function(datum, lam))
    return complex(out) if np.ndim(out) == 0 else out


def c_function(datum: RootDatum, lam) -> CFunctionValue:
    """Gindikin-Karpelevich product at a single lambda, evaluated in log space.

    ``lam`` may be complex (e.g. ``-1j * datum.rho``); poles raise IrregularError.
    """
    lam = _as_lambda(datum, lam).reshape(datum.rank)
    return CFunctionValue(complex(c_values(datum, lam)), tuple(complex(x) for x in lam))


def inverse_c_function(datum: RootDatum, lam):
    """1 / c(lambda); vanishes (instead of raising) where c has a pole."""
    lam = _as_lambda(datum, lam)
    out = np.full(lam.shape[:-1], np.exp(-_log_c0(datum)), dtype=complex)
    log2 = np.log(2.0)
    for alpha, m1, m2 in datum.reduced_pairs():
        z = 1j * datum.inner(lam, alpha) / datum.inner(alpha, alpha)
        out = out * np.exp(
            z * log2 + log_gamma(0.5 * (0.5 * m1 + 1 + z)) + log_gamma(0.5 * (0.5 * m1 + m2 + z))
        ) * rgamma(z)
    return complex(out) if np.ndim(out) == 0 else out


def plancherel_density(datum: RootDatum, lam):
    """|c(lambda)|^{-2} for real regular lambda."""
    lam = _as_lambda(datum, lam)
    if np.any(np.abs(lam.imag) > 0):
        raise ValueError("plancherel_density takes real spectral parameters")
    out = np.exp(-2.0 * log_c_function(datum, lam).real)
    return float(out) if np.ndim(out) == 0 else out


@functools.lru_cache(maxsize=None)
def density_growth_constant(datum: RootDatum, lam_max: float = 400.0) -> float:
    """Smallest C with |c(lambda)|^{-2} <= C (1 + |lambda|)^{n-l} on a fine radial grid."""
    r = np.linspace(1e-3, lam_max, 4001)
    if datum.rank == 1:
        dirs = np.ones((1, 1))
    else:
        ang = np.linspace(0, 2 * np.pi, 73)[:-1] + 1e-3
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    best = 0.0
    for u in dirs:
        u = u / np.sqrt(datum.inner(u, u))
        dens = plancherel_density(datum, r[:, None] * u)
        best = max(best, float(np.max(dens / (1 + r) ** datum.n_minus_l)))
    return 1.05 * best


# -- Gamma_mu coefficients -------------------------------------------------

@functools.lru_cache(maxsize=None)
def _lattice_plan(datum: RootDatum, max_level: int):
    """Level-ordered lattice points plus, per positive root, the index of mu - 2 alpha."""
    pts = lattice_points(datum, max_level)
    index = {p: i for i, p in enumerate(pts)}
    coords = np.array(pts, dtype=int).reshape(len(pts), datum.rank)
    levels = coords.sum(axis=1)
    preds = []
    for c in datum.root_coords:
        prev = coords - 2 * c
        ok = np.all(prev >= 0, axis=1)
        preds.append(np.array([index[tuple(p)] if o else -1 for p, o in zip(prev, ok)]))
    starts = np.searchsorted(levels, np.arange(max_level + 2))
    mu = coords @ datum.simple_roots  # lattice points as vectors in a*
    return pts, coords, mu, preds, starts


def gamma_coefficients(datum: RootDatum, lam, max_level: int):
    """Gamma_mu(lambda) for all lattice points up to ``max_level``.

    Returns ``(points, values)`` with ``values`` of shape ``(P, N)`` for a
    stack of N spectral parameters.  The inner sum over k >= 1 of the
    recurrence is carried as a running sum along mu - 2k alpha, so each level
    costs O(P * |roots|).
    """
    lam = np.atleast_2d(_as_lambda(datum, lam))
    pts, coords, mu, preds, starts = _lattice_plan(datum, max_level)
    P, N = len(pts), lam.shape[0]
    G = np.zeros((P, N), dtype=complex)
    G[0] = 1.0
    mu_lam = mu @ datum.metric @ lam.T  # (P, N) <mu, lambda>
    mu_mu = datum.inner(mu, mu)  # (P,)
    denom = mu_mu[:, None] - 2j * mu_lam
    a_lam = datum.roots @ datum.metric @ lam.T  # (k, N) <alpha, lambda>
    a_rho = datum.roots @ datum.metric @ datum.rho  # (k,)
    a_mu = mu @ datum.metric @ datum.roots.T  # (P, k) <mu, alpha>
    S = [np.zeros((P, N), dtype=complex) for _ in datum.roots]
    for level in range(1, max_level + 1):
        sl = slice(starts[level], starts[level + 1])
        acc = np.zeros((sl.stop - sl.start, N), dtype=complex)
        for j, (m, pred) in enumerate(zip(datum.multiplicities, preds)):
            p = pred[sl]
            has = p >= 0
            if not np.any(has):
                continue
            pp = p[has]
            # T_alpha(nu) = Gamma_nu (<nu + rho, alpha> - i <alpha, lambda>) with nu = mu - 2 alpha
            T = G[pp] * ((a_mu[pp, j] + a_rho[j])[:, None] - 1j * a_lam[j])
            rows = np.nonzero(has)[0] + sl.start
            S[j][rows] = T + S[j][pp]
            acc[has] += 2 * m * S[j][rows]
        d = denom[sl]
        if np.any(np.abs(d) == 0):
            raise IrregularError("vanishing recurrence denominator")
        G[sl] = acc / d
    return pts, G


def gamma_table(datum: RootDatum, lam, max_level: int) -> GammaTable:
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    lam = _as_lambda(datum, lam).reshape(datum.rank)
    pts, G = gamma_coefficients(datum, lam[None, :], max_level)
    entries = {p: complex(g) for p, g in zip(pts, G[:, 0])}
    return GammaTable(datum, tuple(lam.tolist()), max_level, entries)


@dataclass(frozen=True)
class CoefficientGrowth:
    """|Gamma_mu(lambda)| <= C * max(level, 1)^p, fitted per datum."""

    C: float
    p: float

    def tail(self, level: int, eta: float, rank: int) -> float:
        """Bound on sum over mu with level > ``level`` of |Gamma_mu| e^{-level * eta}."""
        m = np.arange(level + 1, level + 20001, dtype=float)
        terms = self.C * m**self.p * (m + 1) ** (rank - 1) * np.exp(-m * eta)
        total = float(terms.sum())
        # geometric bound on whatever is left after the explicit block
        last = terms[-1]
        ratio = np.exp(-eta) * ((m[-1] + 1) / m[-1]) ** (abs(self.p) + rank)
        if ratio < 1:
            total += last * ratio / (1 - ratio)
        else:
            total = np.inf
        return total

    def levels_for(self, eta: float, tol: float, rank: int, scale: float = 1.0, cap: int = 4000) -> int:
        """Smallest truncation level whose tail, times ``scale``, is below ``tol``."""
        lo = 1
        while lo < cap and scale * self.tail(lo, eta, rank) >= tol:
            lo = int(lo * 1.5) + 1
        hi = min(lo, cap)
        lo = max(1, hi // 2)
        while lo < hi:
            mid = (lo + hi) // 2
            if scale * self.tail(mid, eta, rank) < tol:
                hi = mid
            else:
                lo = mid + 1
        return hi


@functools.lru_cache(maxsize=None)
def coefficient_growth(datum: RootDatum, levels: int = GROWTH_LEVELS) -> CoefficientGrowth:
    """Empirical polynomial envelope of the Gamma_mu over real spectral parameters.

    The envelope is regressed on log|Gamma| against log(level) for levels up
    to ``levels`` and then inflated by GROWTH_SAFETY so the fitted line sits
    above every sample.
    """
    rng = np.random.default_rng(12345)
    radii = np.concatenate([[0.01, 0.05, 0.2, 0.5, 1, 2, 5, 10, 30, 100]])
    if datum.rank == 1:
        lam = np.concatenate([radii, -radii])[:, None]
    else:
        ang = rng.uniform(0, 2 * np.pi, (len(radii), 6))
        lam = np.concatenate(
            [np.stack([r * np.cos(a), r * np.sin(a)], axis=1) for r, a in zip(radii, ang)]
        )
    pts, G = gamma_coefficients(datum, lam, levels)
    lv = np.array([sum(p) for p in pts])
    env = np.array([np.abs(G[lv == m]).max() for m in range(1, levels + 1)])
    m = np.arange(1, levels + 1, dtype=float)
    keep = env > 1e-300
    p, _ = np.polyfit(np.log(m[keep]), np.log(env[keep]), 1)
    C = GROWTH_SAFETY * float(np.max(env[keep] / m[keep] ** p))
    return CoefficientGrowth(C=max(C, GROWTH_SAFETY), p=float(p))


# -- series ------------------------------------------------------------------

def series_terms(datum: RootDatum, lam, Hs, max_level: int):
    """Phi(lambda, H) = sum_mu Gamma_mu(lambda) e^{-mu(H)} for stacks of lambda and H.

    Returns an (N, K) array.  Truncation is at ``max_level``.
    """
    lam = np.atleast_2d(_as_lambda(datum, lam))
    Hs = np.atleast_2d(np.asarray(Hs, dtype=float))
    pts, G = gamma_coefficients(datum, lam, max_level)
    _, coords, mu, _, _ = _lattice_plan(datum, max_level)
    E = np.exp(-(mu @ Hs.T))  # (P, K)
    return G.T @ E


def _weyl_sum(datum, lam, Hs, max_level):
    """e^{rho(H)} phi_lambda(exp H) as an (N, K) array, truncated at ``max_level``."""
    lam = np.atleast_2d(_as_lambda(datum, lam))
    Hs = np.atleast_2d(np.asarray(Hs, dtype=float))
    total = np.zeros((lam.shape[0], Hs.shape[0]), dtype=complex)
    for s in datum.weyl_group:
        slam = lam @ s.T
        c = c_values(datum, slam)
        phase = np.exp(1j * (slam @ Hs.T))
        total += c[:, None] * phase * series_terms(datum, slam, Hs, max_level)
    return total


def required_levels(datum: RootDatum, eta: float, tol: float, scale: float = 1.0) -> int:
    return coefficient_growth(datum).levels_for(eta, tol, datum.rank, scale=scale)


def spherical_series(datum: RootDatum, lam, H, tol: float = 1e-12, eta_min: float = ETA_MIN) -> SphericalValue:
    """e^{rho(H)} phi_lambda(exp H) by the truncated Harish-Chandra series.

    The truncation level is the smallest one whose certified tail,
    |W| max_s |c(s lambda)| * sum_{level > M} C m^p (m+1)^{l-1} e^{-m eta},
    is below ``tol``; eta is the smallest simple-root value at H.
    """
    H = H.array if isinstance(H, ChamberPoint) else np.atleast_1d(np.asarray(H, dtype=float))
    lam = _as_lambda(datum, lam).reshape(datum.rank)
    if np.any(lam.imag != 0):
        raise ValueError("spherical_series takes a real spectral parameter")
    check_regular(datum, lam)
    eta = datum.wall_distance(H)
    if eta < eta_min:
        raise WallProximityError(f"min simple-root value {eta:.3g} below {eta_min}")
    cmax = max(abs(c_values(datum, s @ lam)) for s in datum.weyl_group)
    scale = len(datum.weyl_group) * cmax
    growth = coefficient_growth(datum)
    M = growth.levels_for(eta, tol, datum.rank, scale=scale)
    val = _weyl_sum(datum, lam[None, :], H[None, :], M)[0, 0]
    tail = scale * growth.tail(M, eta, datum.rank)
    rho_H = float(datum.rho @ H)
    return SphericalValue(complex(val), float(tail), rho_H, M)


def spherical_function(datum: RootDatum, lam, H, tol: float = 1e-12) -> complex:
    """phi_lambda(exp H); H = 0 returns exactly 1."""
    H = H.array if isinstance(H, ChamberPoint) else np.atleast_1d(np.asarray(H, dtype=float))
    if not np.any(H):
        return 1.0 + 0j
    return spherical_series(datum, lam, H, tol).phi


# -- independent oracle ------------------------------------------------------

def spherical_oracle_rank1(datum: RootDatum, lam: float, r: float, tol: float = 1e-13) -> complex:
    """phi_lambda(a_r) on real hyperbolic space from the K-integral.

    With the sphere angle theta, phi_lambda(a_r) is the normalised average of
    (cosh r - sinh r cos theta)^{-(rho + i lambda)} against sin^{n-2} theta.
    The substitution tan(theta/2) = e^u turns the boundary layer of width
    e^{-r} near theta = 0 into an O(1) feature, and the integrand decays
    like e^{-(n-1)|u|} at both ends.
    """
    if datum.rank != 1 or len(datum.roots) != 1:
        raise ValueError("oracle only covers real hyperbolic spaces")
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return 1.0 + 0j
    n = datum.dim
    rho = float(datum.rho[0])
    lam = complex(np.asarray(lam).reshape(()))
    # log(sin^2(theta/2)) = 2u - log(1 + e^{2u}),   log(cos^2) = -log(1 + e^{2u})
    def integrand(u):
        l1p = np.logaddexp(0.0, 2 * u)
        log_base = np.logaddexp(r + 2 * u - l1p, -r - l1p)
        # sin(theta)^{n-2} dtheta = (2 e^u / (1 + e^{2u}))^{n-1} du
        log_w = (n - 1) * (np.log(2.0) + u - l1p)
        return np.exp(-(rho + 1j * lam) * log_base + log_w)

    span = 40.0 / (n - 1)
    a, b = -r - span, span
    brk = np.linspace(a, b, 2 + int((b - a) * (1 + abs(lam)) / 2.0))
    total = 0j
    with warnings.catch_warnings():
        # quadpack flags roundoff on the (vanishing) imaginary part for real lambda
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(brk[:-1], brk[1:]):
            val, _ = integrate.quad(integrand, lo, hi, complex_func=True, epsabs=tol * 1e-2, epsrel=tol, limit=200)
            total += val
    norm = np.exp(0.5 * np.log(np.pi) + gammaln((n - 1) / 2) - gammaln(n / 2))
    return total / norm


def radial_laplacian(datum: RootDatum, f, H, step: float = 1e-3):
    """Radial part of the Laplace-Beltrami operator applied to ``f`` at ``H``.

    sum_i d_i^2 f + sum_{alpha > 0} m_alpha coth(alpha(H)) <alpha, grad f>, by
    central differences with the given step; in rank one this reduces to
    f'' + (m_alpha coth r + 2 m_2alpha coth 2r) f'.
    """
    H = np.atleast_1d(np.asarray(H, dtype=float))
    metric_inv = np.linalg.inv(datum.metric)
    l = datum.rank
    f0 = f(H)
    grad = np.zeros(l, dtype=complex)
    hess_trace = 0j
    # orthonormal basis of a for the metric dual to the one on a*
    w, V = np.linalg.eigh(metric_inv)
    basis = V * np.sqrt(w)
    for i in range(l):
        e = basis[:, i]
        fp, fm = f(H + step * e), f(H - step * e)
        hess_trace += (fp - 2 * f0 + fm) / step**2
        grad += (fp - fm) / (2 * step) * e
    # gradient as a vector in a: grad f = sum_i (e_i f) e_i
    drift = 0j
    for alpha, m in zip(datum.roots, datum.multiplicities):
        drift += m / np.tanh(alpha @ H) * (alpha @ grad)
    return hess_trace + drift, f0


def eigen_residual(datum: RootDatum, f, H, lam, step: float = 1e-3) -> float:
    """|L f + (<lambda,lambda> + <rho,rho>) f| at H for a candidate spherical function f."""
    lam = np.asarray(lam, dtype=float).reshape(datum.rank)
    Lf, f0 = radial_laplacian(datum, f, H, step)
    ev = datum.inner(lam, lam) + datum.inner(datum.rho, datum.rho)
    return float(abs(Lf + ev * f0))
