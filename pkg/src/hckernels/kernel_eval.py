"""Kernels of spectral multipliers F(Delta_rho) restricted to the subgroup A.

For H in the closed positive chamber

    k_L(H) = e^{rho(H)} k_{F(Delta_rho)}(exp H) = int_{a*} F(|lambda|^2) |c(lambda)|^{-2} e^{rho(H)} phi_lambda(exp H) dlambda

with the inversion constant set to 1.  Three quadrature routes are provided:

* ``chamber``: real lambda over one Weyl chamber times |W| (rank one: the half
  line times 2), with the Harish-Chandra series evaluated at shared nodes for
  a whole grid of H.  Errors are absolute.
* ``shifted``: since |c|^{-2} c(s lambda) = 1/c(-s lambda), the Weyl sum folds
  into a single term, k_L = |W| int F(<z,z>) e^{i z(H)} Phi(z, H) / c(-z) dz over
  all of a*.  For the heat multiplier the contour is moved to z = xi + i H/(2t),
  which turns the oscillatory Gaussian into a positive one and gives relative
  accuracy far out in H where the real-axis integral cancels catastrophically.
* :func:`oscillatory_kernel` (rank one, wave family) separates the leading
  plane-wave terms and integrates them with a Filon rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import harish_chandra as hc
from .quadrature import filon, gauss_kronrod, gauss_kronrod_2d
from .root_system import ChamberPoint, RootDatum, lattice_points

CHUNK = 4_000_000  # max lattice points x nodes per Gamma table block


class DivergenceError(ValueError):
    """The multiplier is not integrable against the required weight."""


@dataclass(frozen=True)
class MultiplierSpec:
    kind: str  # heat | poisson | resolvent | wave | zero
    params: tuple

    @classmethod
    def heat(cls, t: float) -> "MultiplierSpec":
        if not t > 0:
            raise ValueError("heat: t must be > 0")
        return cls("heat", (float(t),))

    @classmethod
    def poisson(cls, t: float) -> "MultiplierSpec":
        if not t > 0:
            raise ValueError("poisson: t must be > 0")
        return cls("poisson", (float(t),))

    @classmethod
    def resolvent(cls, s: float, z: float) -> "MultiplierSpec":
        if not (s > 0 and z > 0):
            raise ValueError("resolvent: s and z must be > 0")
        return cls("resolvent", (float(s), float(z)))

    @classmethod
    def wave(cls, t: float, kappa: float) -> "MultiplierSpec":
        if not kappa > 0:
            raise ValueError("wave: kappa must be > 0")
        return cls("wave", (float(t), float(kappa)))

    @classmethod
    def zero(cls) -> "MultiplierSpec":
        return cls("zero", ())

    @classmethod
    def parse(cls, text: str) -> "MultiplierSpec":
        """``kind:p1,p2`` e.g. ``heat:1``, ``resolvent:2,1``, ``wave:10,8``."""
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        args = [float(v) for v in rest.split(",")] if rest.strip() else []
        makers = {"heat": cls.heat, "poisson": cls.poisson, "resolvent": cls.resolvent,
                  "wave": cls.wave, "zero": cls.zero}
        if kind not in makers:
            raise ValueError(f"unknown multiplier kind {kind!r}")
        try:
            return makers[kind](*args)
        except TypeError as exc:
            raise ValueError(f"bad parameters for {kind}: {rest!r}") from exc

    @property
    def is_real(self) -> bool:
        return self.kind != "wave"

    def __str__(self):
        return f"{self.kind}:" + ",".join(f"{p:g}" for p in self.params)

    def evaluate(self, x):
        """F(x); ``x`` may be complex for the heat multiplier."""
        x = np.asarray(x)
        if self.kind == "heat":
            return np.exp(-self.params[0] * x)
        if np.iscomplexobj(x) and np.any(x.imag != 0):
            raise ValueError(f"{self.kind} multiplier is only evaluated for real x >= 0")
        x = np.real(x)
        if np.any(x < 0):
            raise ValueError("multiplier argument must be >= 0")
        if self.kind == "poisson":
            return np.exp(-self.params[0] * np.sqrt(x))
        if self.kind == "resolvent":
            s, z = self.params
            return (x + z) ** (-s)
        if self.kind == "wave":
            t, kappa = self.params
            return np.exp(1j * t * np.sqrt(x)) * (1 + x) ** (-kappa)
        return np.zeros_like(x, dtype=float)

    def abs_radial(self, r):
        """|F(r^2)| for r >= 0."""
        r = np.asarray(r, dtype=float)
        if self.kind == "wave":
            return (1 + r * r) ** (-self.params[1])
        return np.abs(self.evaluate(r * r))

    def decay_order(self) -> float:
        """Polynomial decay rate of |F(r^2)| (inf for exponential decay)."""
        if self.kind == "resolvent":
            return 2 * self.params[0]
        if self.kind == "wave":
            return 2 * self.params[1]
        return math.inf

    def tail_mass(self, power: float, l: int, R: float) -> float:
        """Upper bound on int_R^inf |F(r^2)| (1 + r)^power r^{l-1} dr, for R >= 1.

        Uses (1 + r) <= 2r, after which heat and Poisson reduce to upper
        incomplete Gamma functions and the algebraic families to a power.
        """
        if R < 1:
            raise ValueError("tail_mass needs R >= 1")
        q = power + l - 1
        if self.kind == "zero":
            return 0.0
        if self.kind == "heat":
            t = self.params[0]
            a = (q + 1) / 2
            return float(2**power * 0.5 * t ** (-a) * np.exp(special.gammaln(a)) * special.gammaincc(a, t * R * R))
        if self.kind == "poisson":
            t = self.params[0]
            a = q + 1
            return float(2**power * t ** (-a) * np.exp(special.gammaln(a)) * special.gammaincc(a, t * R))
        decay = self.decay_order()
        if decay <= q + 1:
            return math.inf
        return float(2**power * R ** (q + 1 - decay) / (decay - q - 1))

    def check_integrable(self, power: float, l: int):
        if not math.isfinite(self.tail_mass(power, l, 1.0)):
            raise DivergenceError(
                f"{self} is not integrable against (1+|lambda|)^{power:g} in dimension {l}"
            )


def sphere_volume(l: int) -> float:
    """Surface measure of the unit sphere in R^l."""
    return 2 * math.pi ** (l / 2) / math.gamma(l / 2)


def cutoff_radius(bound, target: float, start: float = 1.0, cap: float = 1e6) -> float:
    """Smallest R (up to a factor 1.01) with bound(R) <= target; bound must decrease."""
    hi = start
    while bound(hi) > target:
        hi *= 2
        if hi > cap:
            raise DivergenceError("multiplier tail does not fall below the tolerance")
    lo = max(1.0, hi / 2)
    if bound(lo) <= target:
        return lo
    while hi / lo > 1.01:
        mid = math.sqrt(lo * hi)
        if bound(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def radial_moment(F: MultiplierSpec, power: float, l: int, tol: float = 1e-10, weight=None):
    """vol(S^{l-1}) int_0^inf |F(r^2)| w(r) (1 + r)^power r^{l-1} dr with a certified tail.

    Returns (value, error bound).  ``weight`` multiplies the integrand (and must
    be bounded by 1 for the tail bound to stay valid).
    """
    F.check_integrable(power, l)
    if F.kind == "zero":
        return 0.0, 0.0
    vol = sphere_volume(l)

    def f(r):
        v = F.abs_radial(r) * (1 + r) ** power * r ** (l - 1)
        if weight is not None:
            v = v * weight(r)
        return v[:, None]

    if math.isfinite(F.decay_order()):
        # algebraic decay: the tail [1, inf) becomes (0, 1] under r = 1/s,
        # where the integrand is a power of s times a smooth factor
        head = gauss_kronrod(f, np.linspace(0.0, 1.0, 5), atol=0.25 * tol, rtol=1e-13)
        tail = gauss_kronrod(lambda s: f(1.0 / s) / (s * s)[:, None], np.geomspace(1e-8, 1.0, 9),
                             atol=0.25 * tol, rtol=1e-13)
        rest = F.tail_mass(power, l, 1e8)  # the piece (1e8, inf) left out above
        return (vol * float(head.value[0] + tail.value[0]),
                vol * float(head.error[0] + tail.error[0] + rest))
    R = cutoff_radius(lambda R: vol * F.tail_mass(power, l, R), 0.1 * tol)
    edges = np.linspace(0.0, R, 1 + max(4, int(math.ceil(R))))
    res = gauss_kronrod(f, edges, atol=0.5 * tol, rtol=1e-13)
    tail = vol * F.tail_mass(power, l, R)
    return vol * float(res.value[0]), vol * float(res.error[0]) + tail


# -- samples -----------------------------------------------------------------

@dataclass(frozen=True)
class KernelSample:
    H: ChamberPoint
    k_delta_rho: complex  # k_{F(Delta_rho)}(exp H)
    quad_error: float  # bound on |error| of k_delta_rho
    rho_H: float
    method: str = "chamber"

    @property
    def k_L(self) -> complex:
        """e^{rho(H)} k_{F(Delta_rho)}(exp H)."""
        return np.exp(self.rho_H) * self.k_delta_rho

    @property
    def k_L_error(self) -> float:
        return float(np.exp(self.rho_H) * self.quad_error)


def _sample(datum, H, kL, err_L, method):
    rho_H = float(datum.rho @ H)
    scale = np.exp(-rho_H)
    return KernelSample(ChamberPoint(tuple(float(h) for h in H)), complex(kL * scale), float(err_L * scale), rho_H, method)


# -- shared pieces ------------------------------------------------------------

def _density_constants(datum):
    c_dens = hc.density_growth_constant(datum)
    return c_dens, math.sqrt(c_dens)


def _orthonormal_frame(datum):
    """T with T^T M T = I, so lambda = T x maps R^l isometrically onto a*."""
    L = np.linalg.cholesky(datum.metric)
    return np.linalg.inv(L).T


def _chamber_angles(datum, T):
    """Angular range (in x coordinates) of the positive Weyl chamber in a*."""
    a_x = (T.T @ datum.metric @ datum.simple_roots.T).T  # <T x, alpha> = x . a_x
    edges = []
    for i in range(2):
        other = a_x[1 - i]
        d = np.array([-other[1], other[0]])
        if d @ a_x[i] < 0:
            d = -d
        edges.append(math.atan2(d[1], d[0]))
    lo, hi = sorted(edges)
    if hi - lo > math.pi:
        lo, hi = hi, lo + 2 * math.pi
    return lo, hi


def _series_levels(datum, eta, target, scale, growth=None):
    growth = growth or hc.coefficient_growth(datum)
    return growth.levels_for(eta, target, datum.rank, scale=scale)


def _phi_sum(datum, lam, Hs, levels, prefactor):
    """sum_h prefactor[:, None] * e^{i lam(H_h)} Phi(lam, H_h) truncated at levels[h].

    ``lam`` (N, l) complex, ``Hs`` (K, l).  Returns (N, K).
    """
    N = lam.shape[0]
    K = Hs.shape[0]
    M = int(max(levels))
    pts = lattice_points(datum, M)
    P = len(pts)
    mu = np.array(pts, dtype=float).reshape(P, datum.rank) @ datum.simple_roots
    lv = np.array([sum(p) for p in pts])
    E = np.exp(-(mu @ Hs.T))  # (P, K)
    out = np.empty((N, K), dtype=complex)
    step = max(1, CHUNK // P)
    order = np.argsort(levels, kind="stable")
    for s0 in range(0, N, step):
        sl = slice(s0, min(N, s0 + step))
        _, G = hc.gamma_coefficients(datum, lam[sl], M)
        for h in order:
            rows = lv <= levels[h]
            out[sl, h] = E[rows, h] @ G[rows]
        out[sl] *= np.exp(1j * (lam[sl] @ Hs.T))
        out[sl] *= prefactor[sl, None]
    return out


# -- H = 0 -------------------------------------------------------------------

def _kernel_at_origin(datum, F, tol, rtol):
    """int F(|lambda|^2) |c(lambda)|^{-2} dlambda, using phi_lambda(e) = 1."""
    c_dens, _ = _density_constants(datum)
    vol = sphere_volume(datum.rank)
    target = 0.1 * tol
    R = cutoff_radius(lambda R: vol * c_dens * F.tail_mass(datum.n_minus_l, datum.rank, R), target)
    tail = vol * c_dens * F.tail_mass(datum.n_minus_l, datum.rank, R)
    W = len(datum.weyl_group)
    if datum.rank == 1:
        u = datum.roots[0] / datum.norm(datum.roots[0])

        def f(x):
            return (2 * F.evaluate(x * x) * hc.plancherel_density(datum, x[:, None] * u))[:, None]

        edges = np.linspace(0, R, 1 + max(8, int(math.ceil(2 * R))))
        res = gauss_kronrod(f, edges, atol=0.5 * tol, rtol=rtol)
    else:
        T = _orthonormal_frame(datum)
        lo, hi = _chamber_angles(datum, T)

        def f(p):
            r, th = p[:, 0], p[:, 1]
            lam = (r[:, None] * np.stack([np.cos(th), np.sin(th)], axis=1)) @ T.T
            return (W * r * F.evaluate(r * r) * hc.plancherel_density(datum, lam))[:, None]

        rad = np.linspace(0, R, 1 + max(4, int(math.ceil(R))))
        boxes = [(a, b, lo, hi) for a, b in zip(rad[:-1], rad[1:])]
        res = gauss_kronrod_2d(f, boxes, atol=0.5 * tol, rtol=rtol)
    return complex(res.value[0]), float(res.error[0]) + tail


# -- chamber route --------------------------------------------------------------

def _chamber_grid(datum, F, Hs, tol, rtol):
    """k_L on a stack of interior points with shared real-lambda nodes."""
    c_dens, c_half = _density_constants(datum)
    growth = hc.coefficient_growth(datum)
    W = len(datum.weyl_group)
    l = datum.rank
    nl = datum.n_minus_l
    vol = sphere_volume(l)
    etas = np.array([datum.wall_distance(H) for H in Hs])
    rhoH = Hs @ datum.rho
    # e^{rho} |phi| <= min(e^{rho(H)}, |W| |c| (1 + series tail from level 0))
    phi_env = W * (1 + np.array([growth.tail(0, e, l) for e in etas]))

    def tail_bound(R):
        a = c_dens * F.tail_mass(nl, l, R) * np.exp(rhoH)
        b = c_half * F.tail_mass(nl / 2, l, R) * phi_env
        return vol * np.minimum(a, b)

    target = 0.1 * tol
    R = cutoff_radius(lambda R: float(np.max(tail_bound(R))), target)
    tails = tail_bound(R)
    # series truncation: |W| int |F| |c|^{-1} * tail(M)
    J, _ = radial_moment(F, nl / 2, l, tol=1e-6)
    J = c_half * (J + 1e-6)
    levels = np.array([_series_levels(datum, e, 0.2 * tol, W * J, growth) for e in etas])
    trunc = np.array([W * J * growth.tail(m, e, l) for m, e in zip(levels, etas)])
    width = 2 * math.pi / (float(np.max(datum.norm(Hs))) + _phase_rate(F) + 1)

    if l == 1:
        u = datum.roots[0] / datum.norm(datum.roots[0])

        def f(x):
            lam = x[:, None] * u
            # integrand 2 F(x^2) |c|^{-2} e^{rho} phi = 2 F(x^2) 2 Re[e^{i lam H} Phi / c(-lam)]
            pref = hc.inverse_c_function(datum, -lam)
            vals = _phi_sum(datum, lam.astype(complex), Hs, levels, pref)
            return 2 * F.evaluate(x * x)[:, None] * 2 * vals.real

        edges = np.linspace(0, R, 1 + max(8, int(math.ceil(R / width))))
        res = gauss_kronrod(f, edges, atol=0.5 * tol, rtol=rtol)
    else:
        T = _orthonormal_frame(datum)
        lo, hi = _chamber_angles(datum, T)

        def f(p):
            r, th = p[:, 0], p[:, 1]
            lam = (r[:, None] * np.stack([np.cos(th), np.sin(th)], axis=1)) @ T.T
            total = 0
            for s in datum.weyl_group:
                slam = lam @ s.T
                pref = hc.inverse_c_function(datum, -slam)
                total = total + _phi_sum(datum, slam.astype(complex), Hs, levels, pref)
            return (W * r * F.evaluate(r * r))[:, None] * total

        rad = np.linspace(0, R, 1 + max(4, int(math.ceil(R / width))))
        nang = max(1, int(math.ceil((hi - lo) * R / (2 * width))))
        ang = np.linspace(lo, hi, nang + 1)
        boxes = [(a, b, c, d) for a, b in zip(rad[:-1], rad[1:]) for c, d in zip(ang[:-1], ang[1:])]
        res = gauss_kronrod_2d(f, boxes, atol=0.5 * tol, rtol=rtol)
    values = res.value.real if F.is_real else res.value
    return values, res.error + tails + trunc


def _phase_rate(F):
    return abs(F.params[0]) if F.kind == "wave" else 0.0


# -- shifted single-term route -------------------------------------------------

def _shift_for(datum, F, H):
    if F.kind == "heat":
        return np.linalg.solve(datum.metric, H) / (2 * F.params[0])
    return np.zeros(datum.rank)


def _contour_weight(F, datum, eta_norm):
    """Bound on int_{a*} |F(<z,z>) e^{i z(H)}| |1/c(-z)| dxi along the contour, per unit e^{-|H|^2/4t}.

    |1/c(-z)| is bounded by 10 c_half (1 + |xi| + |eta|)^{(n-l)/2}; the factor 10
    covers the complex-argument Gamma ratios (checked on the catalog).
    """
    _, c_half = _density_constants(datum)
    q = datum.n_minus_l / 2
    l = datum.rank
    if F.kind == "heat":
        t = F.params[0]
        f = lambda r: math.exp(-t * r * r) * (1 + r + eta_norm) ** q * r ** (l - 1)
        val = integrate.quad(f, 0, math.inf, epsrel=1e-8)[0]
        return 10 * c_half * sphere_volume(l) * val
    val, _ = radial_moment(F, q, l, tol=1e-6)
    return c_half * (val + 1e-6)


def _contour_tail(F, datum, eta_norm, R):
    """Same as :func:`_contour_weight` restricted to |xi| > R."""
    _, c_half = _density_constants(datum)
    q = datum.n_minus_l / 2
    l = datum.rank
    if F.kind == "heat":
        t = F.params[0]
        # (1 + r + |eta|) <= (1 + |eta|) 2r for r >= 1
        a = (q + l) / 2
        g = 0.5 * t ** (-a) * math.exp(special.gammaln(a)) * special.gammaincc(a, t * R * R)
        return 10 * c_half * sphere_volume(l) * (2 * (1 + eta_norm)) ** q * g
    return c_half * sphere_volume(l) * F.tail_mass(q, l, R)


def _line_kernel(datum, F, H, tol, rtol, eta=None):
    """|W| int_{a*} F(<z,z>) e^{i z(H)} Phi(z, H) / c(-z) dxi along z = xi + i eta."""
    if eta is None:
        eta = _shift_for(datum, F, H)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta != 0) and F.kind != "heat":
        raise ValueError("contour shift is only implemented for the heat multiplier")
    if np.any(datum.simple_roots @ eta < 0):
        raise ValueError("shift must lie in the closed positive chamber")
    W = len(datum.weyl_group)
    l = datum.rank
    growth = hc.coefficient_growth(datum)
    wall = datum.wall_distance(H)
    T = _orthonormal_frame(datum)
    eta_norm = float(datum.norm(eta))
    # |F(<z,z>) e^{i z(H)}| = e^{-t|xi|^2} e^{t|eta|^2 - eta(H)} for heat
    env0 = math.exp(F.params[0] * eta_norm**2 - float(eta @ H)) if F.kind == "heat" else 1.0

    # growth constant re-fitted on the contour itself
    m_probe = min(hc.GROWTH_LEVELS, 4 + int(20 / wall))
    probe = np.linspace(-3, 3, 13)[:, None] * np.ones(l) + 1j * eta
    _, Gp = hc.gamma_coefficients(datum, probe, m_probe)
    lv = np.array([sum(p) for p in lattice_points(datum, m_probe)])
    ratios = [np.abs(Gp[lv == m]).max() / m**growth.p for m in range(1, m_probe + 1)]
    g_eff = hc.CoefficientGrowth(C=max(growth.C, hc.GROWTH_SAFETY * max(ratios)), p=growth.p)
    phi_bound = 1 + g_eff.tail(0, wall, l)

    # target: tol absolute or rtol relative to the envelope scale e^{-|H|^2/4t}
    target = max(tol, rtol * env0 * 1e-3)
    scale = W * env0 * _contour_weight(F, datum, eta_norm)
    levels = max(2, g_eff.levels_for(wall, 0.1 * target, l, scale=scale))
    tail = lambda R: W * env0 * phi_bound * _contour_tail(F, datum, eta_norm, R)
    R = cutoff_radius(tail, 0.1 * target)

    def f_nodes(lam):
        z = lam.astype(complex) + 1j * eta
        pref = W * F.evaluate(datum.inner(z, z)) * hc.inverse_c_function(datum, -z)
        return _phi_sum(datum, z, H[None, :], np.array([levels]), pref)

    if np.any(eta != 0):
        # the Gaussian phase cancels on the shifted contour; panels only need to resolve e^{-t|xi|^2}
        width = 1.5 / math.sqrt(F.params[0])
    else:
        width = 2 * math.pi / (float(datum.norm(H)) + _phase_rate(F) + 1)
    if l == 1:
        u = datum.roots[0] / datum.norm(datum.roots[0])
        edges = np.linspace(-R, R, 1 + max(16, int(math.ceil(2 * R / width))))
        res = gauss_kronrod(lambda x: f_nodes(x[:, None] * u), edges, atol=0.5 * tol, rtol=rtol)
    else:
        grid = np.linspace(-R, R, 1 + max(4, int(math.ceil(2 * R / width))))
        boxes = [(a, b, c, d) for a, b in zip(grid[:-1], grid[1:]) for c, d in zip(grid[:-1], grid[1:])]
        res = gauss_kronrod_2d(lambda p: f_nodes(p @ T.T), boxes, atol=0.5 * tol, rtol=rtol)
    value = complex(res.value[0])
    err = float(res.error[0]) + tail(R) + scale * g_eff.tail(levels, wall, l)
    return (value.real if F.is_real else value), err


# -- public API ----------------------------------------------------------------

def _prepare(datum, H):
    H = H.array if isinstance(H, ChamberPoint) else np.atleast_1d(np.asarray(H, dtype=float))
    if H.shape != (datum.rank,):
        raise ValueError(f"H must have {datum.rank} components")
    if not datum.in_chamber(H, tol=1e-12):
        raise ValueError(f"H = {H} is not in the closed positive chamber")
    return H


def kernel_grid(datum: RootDatum, F: MultiplierSpec, Hs, tol: float = 1e-10, rtol: float = 0.0,
                method: str = "auto", eta_min: float = hc.ETA_MIN) -> list:
    """Kernel samples at a list of chamber points.

    ``method`` is ``chamber``, ``shifted`` or ``auto`` (shifted contour for the
    heat multiplier, chamber otherwise).  ``tol`` bounds the absolute error of
    k_L; ``rtol`` adds a relative target.  Chamber-route points share nodes.
    """
    if method not in ("auto", "chamber", "shifted"):
        raise ValueError(f"unknown method {method!r}")
    F.check_integrable(datum.n_minus_l, datum.rank)
    pts = [_prepare(datum, H) for H in Hs]
    out = [None] * len(pts)
    chamber_idx = []
    for i, H in enumerate(pts):
        if not np.any(H):
            k0, e0 = (0.0, 0.0) if F.kind == "zero" else _kernel_at_origin(datum, F, tol, rtol)
            out[i] = _sample(datum, H, k0.real if F.is_real else k0, e0, "origin")
            continue
        eta = datum.wall_distance(H)
        if eta < eta_min:
            raise hc.WallProximityError(f"min simple-root value {eta:.3g} below {eta_min} at H = {H}")
        if F.kind == "zero":
            out[i] = _sample(datum, H, 0.0, 0.0, "zero")
        elif method == "shifted" or (method == "auto" and F.kind == "heat"):
            v, e = _line_kernel(datum, F, H, tol, rtol)
            out[i] = _sample(datum, H, v, e, "shifted")
        else:
            chamber_idx.append(i)
    if chamber_idx:
        Hs_c = np.array([pts[i] for i in chamber_idx])
        vals, errs = _chamber_grid(datum, F, Hs_c, tol, rtol)
        for j, i in enumerate(chamber_idx):
            out[i] = _sample(datum, pts[i], vals[j], errs[j], "chamber")
    return out


def kernel(datum: RootDatum, F: MultiplierSpec, H, tol: float = 1e-10, rtol: float = 0.0,
           method: str = "auto") -> KernelSample:
    """k_{F(Delta_rho)}(exp H) with a certified error bound; H = 0 uses phi_lambda(e) = 1."""
    return kernel_grid(datum, F, [H], tol=tol, rtol=rtol, method=method)[0]


def density_integral(datum: RootDatum, F: MultiplierSpec, tol: float = 1e-10):
    """int F(|lambda|^2) |c(lambda)|^{-2} dlambda (the kernel at the identity)."""
    return _kernel_at_origin(datum, F, tol, 0.0)


# -- oscillatory route ------------------------------------------------------------

def oscillatory_kernel(datum: RootDatum, F: MultiplierSpec, H, tol: float = 1e-10) -> KernelSample:
    """Rank-one wave kernel for alpha(H) > 1.

    k_L = 2 int_0^inf psi(x) [e^{ix(t+r)} / c(-x) + e^{ix(t-r)} / c(x)] dx + remainder,
    where r = lambda(H) for unit lambda and the remainder carries Phi - 1 = O(e^{-2 alpha(H)}).
    The leading part uses the Filon rule; the remainder uses Gauss-Kronrod
    panels no wider than pi / (4 (|t| + r)).
    """
    if datum.rank != 1:
        raise ValueError("oscillatory_kernel is rank one only")
    if F.kind != "wave":
        raise ValueError("oscillatory_kernel expects a wave multiplier")
    H = _prepare(datum, H)
    alpha_H = float(datum.simple_roots[0] @ H)
    if alpha_H <= 1:
        raise ValueError(f"oscillatory_kernel needs alpha(H) > 1, got {alpha_H:.3g}")
    t, kappa = F.params
    nl = datum.n_minus_l
    F.check_integrable(nl / 2, 1)
    _, c_half = _density_constants(datum)
    growth = hc.coefficient_growth(datum)
    u = datum.roots[0] / datum.norm(datum.roots[0])
    r = float(u @ H)
    psi = lambda x: (1 + x * x) ** (-kappa)

    # leading terms: |1/c(+-x)| <= c_half (1+x)^{(n-l)/2}
    lead_tail = lambda R: 4 * c_half * F.tail_mass(nl / 2, 1, R)
    phi_env = 2 * (1 + growth.tail(0, alpha_H, 1))
    R = cutoff_radius(lambda R: lead_tail(R) + 2 * c_half * phi_env * F.tail_mass(nl / 2, 1, R), 0.1 * tol)

    def amp(x):
        lam = x[:, None] * u
        return np.stack([2 * psi(x) * hc.inverse_c_function(datum, -lam),
                         2 * psi(x) * hc.inverse_c_function(datum, lam)], axis=1)

    edges = np.linspace(0, R, 1 + max(4, int(math.ceil(R))))
    lead = filon(amp, [t + r, t - r], edges, atol=0.25 * tol)

    # remainder with Phi - 1
    J, _ = radial_moment(F, nl / 2, 1, tol=1e-6)
    J = c_half * (J + 1e-6)
    levels = max(2, _series_levels(datum, alpha_H, 0.1 * tol, 4 * J, growth))
    pts = lattice_points(datum, levels)
    mu = np.array(pts, dtype=float).reshape(-1, 1) @ datum.simple_roots
    E = np.exp(-(mu @ H))
    E[0] = 0.0  # drop Gamma_0 = 1

    def rem(x):
        out = np.zeros(len(x), dtype=complex)
        for sign in (1.0, -1.0):
            lam = sign * x[:, None] * u
            _, G = hc.gamma_coefficients(datum, lam.astype(complex), levels)
            phi1 = E @ G
            out += np.exp(1j * sign * x * r) * phi1 * hc.inverse_c_function(datum, -lam)
        return (2 * np.exp(1j * t * x) * psi(x) * out)[:, None]

    width = math.pi / (4 * (abs(t) + r))
    redges = np.linspace(0, R, 1 + max(4, int(math.ceil(R / width))))
    remainder = gauss_kronrod(rem, redges, atol=0.25 * tol)
    value = complex(lead.value.sum() + remainder.value[0])
    err = float(lead.error.sum() + remainder.error[0]) + lead_tail(R) + 4 * J * growth.tail(levels, alpha_H, 1)
    return _sample(datum, H, value, err, "oscillatory")
