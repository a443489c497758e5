"""Restricted root systems of rank one and two.

A :class:`RootDatum` stores the positive restricted roots of a symmetric space
together with their multiplicities and the inner product on the dual of the
Cartan subspace.  Everything else (reduced and simple roots, the Weyl vector,
dimensions, the Weyl group) is derived at construction time.

Coordinates: roots, spectral parameters and points of the Cartan subspace are
all stored as length-``rank`` float vectors; the pairing lambda(H) is the plain
dot product and the inner product on the dual space is ``x @ metric @ y``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

_SQ2 = np.sqrt(2.0)
_SQ6 = np.sqrt(6.0)

# e1-e2 and e2-e3 of sl(3), written in an orthonormal basis of the plane sum(x)=0
_A2_SIMPLE = (np.array([_SQ2, 0.0]), np.array([-_SQ2 / 2, _SQ6 / 2]))


class RootSystemError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RootDatum:
    """Positive roots with multiplicities, plus everything derived from them."""

    name: str
    rank: int
    roots: np.ndarray  # (k, rank) positive roots
    multiplicities: np.ndarray  # (k,) positive integers
    metric: np.ndarray = field(repr=False)
    reduced: np.ndarray = field(init=False, repr=False)  # bool mask over roots
    simple_roots: np.ndarray = field(init=False, repr=False)
    rho: np.ndarray = field(init=False, repr=False)
    dim: int = field(init=False)
    d: int = field(init=False)
    root_coords: np.ndarray = field(init=False, repr=False)  # in simple-root basis
    weyl_group: tuple = field(init=False, repr=False)

    def __post_init__(self):
        roots = np.atleast_2d(np.asarray(self.roots, dtype=float))
        mult = np.asarray(self.multiplicities, dtype=int)
        metric = np.asarray(self.metric, dtype=float)
        if self.rank not in (1, 2):
            raise RootSystemError(f"rank {self.rank} not supported (rank <= 2 only)")
        if roots.shape != (len(mult), self.rank):
            raise RootSystemError("roots and multiplicities do not match")
        if np.any(mult <= 0):
            raise RootSystemError("multiplicities must be positive integers")
        if metric.shape != (self.rank, self.rank) or not np.allclose(metric, metric.T):
            raise RootSystemError("metric must be a symmetric rank x rank matrix")
        if np.any(np.linalg.eigvalsh(metric) <= 0):
            raise RootSystemError("metric must be positive definite")
        set_ = object.__setattr__
        set_(self, "roots", roots)
        set_(self, "multiplicities", mult)
        set_(self, "metric", metric)
        for arr in (roots, mult, metric):
            arr.setflags(write=False)

        reduced = np.array([not _contains(roots, r / 2) for r in roots])
        set_(self, "reduced", reduced)
        simple = _simple_roots(roots[reduced])
        if len(simple) != self.rank:
            raise RootSystemError("simple roots do not form a basis")
        set_(self, "simple_roots", simple)
        coords = np.linalg.solve(simple.T, roots.T).T
        if not np.allclose(coords, np.round(coords), atol=1e-10) or np.any(coords < -1e-10):
            raise RootSystemError("positive roots are not nonnegative integer combinations of simple roots")
        set_(self, "root_coords", np.round(coords).astype(int))
        set_(self, "rho", 0.5 * (mult[:, None] * roots).sum(axis=0))
        set_(self, "dim", int(self.rank + mult.sum()))
        set_(self, "d", int(reduced.sum()))
        set_(self, "weyl_group", _weyl_closure(self))

    # -- inner products -------------------------------------------------
    def inner(self, x, y):
        """Bilinear form on the (complexified) dual space; broadcasts over leading axes."""
        x = np.asarray(x)
        y = np.asarray(y)
        return np.einsum("...i,ij,...j->...", x, self.metric, y)

    def norm(self, x):
        return np.sqrt(np.real(self.inner(x, x)))

    def reflect(self, x, alpha):
        alpha = np.asarray(alpha, dtype=float)
        return np.asarray(x) - 2 * self.inner(x, alpha)[..., None] / self.inner(alpha, alpha) * alpha

    @property
    def n_minus_l(self) -> int:
        return self.dim - self.rank

    @property
    def all_roots(self) -> np.ndarray:
        return np.vstack([self.roots, -self.roots])

    def multiplicity(self, alpha) -> int:
        """Multiplicity of ``alpha`` (zero if it is not a positive root)."""
        for r, m in zip(self.roots, self.multiplicities):
            if np.allclose(r, alpha, atol=1e-12):
                return int(m)
        return 0

    def reduced_pairs(self):
        """Yield ``(alpha, m_alpha, m_2alpha)`` for each reduced positive root."""
        for r, m, red in zip(self.roots, self.multiplicities, self.reduced):
            if red:
                yield r, int(m), self.multiplicity(2 * r)

    def in_chamber(self, H, tol: float = 0.0) -> bool:
        """Membership in the closed positive chamber."""
        return bool(np.all(self.roots @ np.asarray(H, dtype=float) >= -tol))

    def wall_distance(self, H) -> float:
        """min over simple roots of alpha(H)."""
        return float(np.min(self.simple_roots @ np.asarray(H, dtype=float)))

    def __repr__(self):
        return f"RootDatum({self.name!r}, rank={self.rank}, n={self.dim}, d={self.d})"


@dataclass(frozen=True)
class ChamberPoint:
    """A point H of the closed positive chamber, identified with log a."""

    H: tuple

    @classmethod
    def of(cls, datum: RootDatum, H) -> "ChamberPoint":
        H = np.atleast_1d(np.asarray(H, dtype=float))
        if H.shape != (datum.rank,):
            raise RootSystemError(f"expected a point of dimension {datum.rank}")
        if not datum.in_chamber(H, tol=1e-12):
            raise RootSystemError(f"{H} is not in the closed positive chamber")
        return cls(tuple(float(h) for h in H))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.H)


def pairing(datum: RootDatum, lam, H=None):
    """lambda(H) when ``H`` is given, otherwise <lambda, lambda>.

    ``H`` may also be a second spectral parameter, in which case pass it via
    :meth:`RootDatum.inner` instead; this helper only covers the two common
    evaluations.
    """
    lam = np.asarray(lam)
    if lam.shape[-1:] != (datum.rank,):
        raise RootSystemError("dimension mismatch")
    if H is None:
        return datum.inner(lam, lam)
    H = H.array if isinstance(H, ChamberPoint) else np.asarray(H, dtype=float)
    if H.shape[-1:] != (datum.rank,):
        raise RootSystemError("dimension mismatch")
    return lam @ H


def _contains(vectors, v, tol=1e-12) -> bool:
    return bool(np.any(np.all(np.abs(vectors - v) < tol, axis=1)))


def _simple_roots(reduced):
    """Reduced positive roots that are not a sum of two positive reduced roots."""
    simple = []
    for i, r in enumerate(reduced):
        decomposable = any(
            _contains(reduced, r - s) for j, s in enumerate(reduced) if j != i
        )
        if not decomposable:
            simple.append(r)
    return np.array(simple)


def _weyl_closure(datum: RootDatum):
    """Close the simple reflections under composition; matrices act on column vectors."""
    gens = []
    for a in datum.simple_roots:
        gens.append(np.eye(datum.rank) - 2 * np.outer(a, datum.metric @ a) / datum.inner(a, a))
    elems = [np.eye(datum.rank)]
    frontier = list(elems)
    while frontier:
        new = []
        for g in frontier:
            for s in gens:
                h = s @ g
                if not any(np.allclose(h, e, atol=1e-10) for e in elems):
                    elems.append(h)
                    new.append(h)
        frontier = new
        if len(elems) > 48:
            raise RootSystemError("Weyl group closure did not terminate")
    for e in elems:
        e.setflags(write=False)
    return tuple(elems)


# -- catalog ---------------------------------------------------------------

def _rank_one(name, m_alpha, m_2alpha):
    if m_alpha <= 0 or m_2alpha < 0:
        raise RootSystemError("need m_alpha > 0 and m_2alpha >= 0")
    roots, mult = [[1.0]], [m_alpha]
    if m_2alpha:
        roots.append([2.0])
        mult.append(m_2alpha)
    return RootDatum(name, 1, np.array(roots), np.array(mult), np.eye(1))


def real_hyperbolic(n: int) -> RootDatum:
    """SO(n,1)/SO(n): m_alpha = n - 1."""
    if n < 2:
        raise RootSystemError("real_hyperbolic needs n >= 2")
    return _rank_one(f"h{n}", n - 1, 0)


def complex_hyperbolic(n: int) -> RootDatum:
    """SU(n,1)/U(n): m_alpha = 2(n-1), m_2alpha = 1."""
    if n < 2:
        raise RootSystemError("complex_hyperbolic needs n >= 2")
    return _rank_one(f"ch{n}", 2 * (n - 1), 1)


def quaternionic_hyperbolic(n: int) -> RootDatum:
    """Sp(n,1)/Sp(n)Sp(1): m_alpha = 4(n-1), m_2alpha = 3."""
    if n < 2:
        raise RootSystemError("quaternionic_hyperbolic needs n >= 2")
    return _rank_one(f"qh{n}", 4 * (n - 1), 3)


def a2(m: int = 1) -> RootDatum:
    """SL(3,F)/K with m = dim_R F (1, 2, 4, 8)."""
    a1, a2_ = _A2_SIMPLE
    roots = np.array([a1, a2_, a1 + a2_])
    name = "a2" if m == 1 else f"a2[m={m}]"
    return RootDatum(name, 2, roots, np.array([m, m, m]), np.eye(2))


def b2(m_short: int = 1, m_long: int = 1) -> RootDatum:
    """B2 with short roots e1, e2 and long roots e1 +- e2 (SO(2,q): m_short = q-2)."""
    roots = np.array([[1.0, -1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    mult = np.array([m_long, m_short, m_short, m_long])
    name = "b2" if (m_short, m_long) == (1, 1) else f"b2[{m_short},{m_long}]"
    return RootDatum(name, 2, roots, mult, np.eye(2))


def bc2(m_short: int = 2, m_middle: int = 2, m_long: int = 1) -> RootDatum:
    """BC2: e_i (m_short), e1 +- e2 (m_middle), 2e_i (m_long); SU(2,3) by default."""
    roots = np.array(
        [[1.0, -1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.0, 2.0], [2.0, 0.0]]
    )
    mult = np.array([m_middle, m_short, m_short, m_middle, m_long, m_long])
    return RootDatum(f"bc2[{m_short},{m_middle},{m_long}]", 2, roots, mult, np.eye(2))


def custom(rank: int, multiplicities) -> RootDatum:
    """User multiplicities: rank 1 takes (m_alpha, m_2alpha); rank 2 takes
    (m_short, m_middle, m_long) for BC2, with m_long = 0 giving B2."""
    mults = [int(m) for m in multiplicities]
    if rank == 1:
        if len(mults) != 2:
            raise RootSystemError("rank-one custom datum needs (m_alpha, m_2alpha)")
        return _rank_one(f"custom1[{mults[0]},{mults[1]}]", *mults)
    if rank == 2:
        if len(mults) != 3:
            raise RootSystemError("rank-two custom datum needs (m_short, m_middle, m_long)")
        if any(m < 0 for m in mults) or mults[0] == 0 or mults[1] == 0:
            raise RootSystemError("multiplicities must be positive")
        if mults[2] == 0:
            return b2(mults[0], mults[1])
        return bc2(*mults)
    raise RootSystemError(f"rank {rank} rejected: only rank <= 2 is supported")


FAMILIES = {
    "real_hyperbolic": real_hyperbolic,
    "complex_hyperbolic": complex_hyperbolic,
    "quaternionic_hyperbolic": quaternionic_hyperbolic,
    "A2": a2,
    "B2": b2,
    "BC2": bc2,
    "custom": custom,
}


def build_root_datum(family: str, *params) -> RootDatum:
    try:
        factory = FAMILIES[family]
    except KeyError:
        raise RootSystemError(f"unknown family {family!r}") from None
    return factory(*params)


_SHORT = [
    (re.compile(r"h(\d+)$"), lambda n: real_hyperbolic(int(n))),
    (re.compile(r"ch(\d+)$"), lambda n: complex_hyperbolic(int(n))),
    (re.compile(r"qh(\d+)$"), lambda n: quaternionic_hyperbolic(int(n))),
]


def from_name(name: str) -> RootDatum:
    """Parse the catalog names used on the command line.

    ``h<n>``, ``ch<n>``, ``qh<n>``, ``a2``, ``b2``, ``bc2``, plus
    ``custom1:ma,m2a`` and ``custom2:ms,mm,ml``.
    """
    key = name.strip().lower()
    for pat, make in _SHORT:
        m = pat.match(key)
        if m:
            return make(m.group(1))
    if key == "a2":
        return a2()
    if key == "b2":
        return b2()
    if key == "bc2":
        return bc2()
    m = re.match(r"(a2|custom1|custom2):([\d,]+)$", key)
    if m:
        nums = [int(x) for x in m.group(2).split(",") if x]
        if m.group(1) == "a2":
            return a2(*nums)
        return custom(1 if m.group(1) == "custom1" else 2, nums)
    raise RootSystemError(f"unknown space {name!r}")


def lattice_points(datum: RootDatum, max_level: int):
    """Nonnegative integer coordinates (n_1, ..., n_l) in the simple-root basis,
    enumerated breadth-first by level n_1 + ... + n_l."""
    pts = []
    for level in range(max_level + 1):
        if datum.rank == 1:
            pts.append((level,))
        else:
            pts.extend((level - j, j) for j in range(level + 1))
    return pts


def weyl_images(datum: RootDatum, lam):
    """Stack of s(lambda) over the Weyl group: shape (|W|, ..., rank)."""
    lam = np.asarray(lam)
    return np.stack([lam @ s.T for s in datum.weyl_group])


def sample_regular(datum: RootDatum, rng: np.random.Generator, size: int, scale: float = 10.0):
    """Random real spectral parameters away from every root hyperplane."""
    out = []
    while len(out) < size:
        lam = rng.uniform(-scale, scale, datum.rank)
        if np.min(np.abs(datum.roots @ datum.metric @ lam)) > 1e-3:
            out.append(lam)
    return np.array(out)


__all__ = [
    "RootDatum",
    "ChamberPoint",
    "RootSystemError",
    "build_root_datum",
    "from_name",
    "pairing",
    "lattice_points",
    "weyl_images",
    "real_hyperbolic",
    "complex_hyperbolic",
    "quaternionic_hyperbolic",
    "a2",
    "b2",
    "bc2",
    "custom",
]
