"""Batched adaptive Gauss-Kronrod quadrature and a Filon-Legendre rule.

The integrands used here are expensive per call but cheap per node (a whole
Harish-Chandra series is evaluated for a stack of nodes at once), so every
refinement step gathers the nodes of all active panels into one call.
Integrands are vector valued: ``f(x)`` maps nodes of shape (N,) (or (N, 2)
for boxes) to values of shape (N, K).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre, spherical_jn

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 constants)
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # ascending, 15 nodes
KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS = np.zeros(15)
GAUSS[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass
class QuadResult:
    value: np.ndarray  # (K,)
    error: np.ndarray  # (K,) sum of |K15 - G7| over panels
    panels: int
    evaluations: int
    converged: bool


def _split_order(score, excess_share=0.5):
    """Indices of the worst panels that together carry ``excess_share`` of the total score."""
    order = np.argsort(-score, kind="stable")
    cum = np.cumsum(score[order])
    n = int(np.searchsorted(cum, excess_share * cum[-1])) + 1
    return order[:n]


def gauss_kronrod(f, edges, atol, rtol=0.0, max_panels=20000, min_width=0.0):
    """Adaptive G7/K15 over consecutive intervals given by ``edges``.

    Stops when for every component the summed panel error is below
    max(atol, rtol * |value|).  ``atol`` and ``rtol`` may be arrays of shape (K,).
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    vals = errs = None
    evals = 0
    while True:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        x = (mid[:, None] + half[:, None] * NODES).ravel()
        fx = f(x)
        evals += x.size
        fx = fx.reshape(len(a), 15, -1)
        k = np.einsum("pnk,n->pk", fx, KRONROD) * half[:, None]
        g = np.einsum("pnk,n->pk", fx, GAUSS) * half[:, None]
        e = np.abs(k - g)
        if vals is None:
            vals, errs = k, e
            pa, pb = a, b
        else:
            vals = np.concatenate([keep_val, k])
            errs = np.concatenate([keep_err, e])
            pa = np.concatenate([keep_a, a])
            pb = np.concatenate([keep_b, b])
        total = vals.sum(axis=0)
        total_err = errs.sum(axis=0)
        target = np.maximum(atol, rtol * np.abs(total))
        if np.all(total_err <= target):
            return QuadResult(total, total_err, len(pa), evals, True)
        score = np.max(errs / np.maximum(target, 1e-300), axis=1)
        splittable = (pb - pa) > min_width
        score = np.where(splittable, score, 0.0)
        if len(pa) >= max_panels or not np.any(score > 0):
            return QuadResult(total, total_err, len(pa), evals, False)
        idx = _split_order(score)
        keep = np.ones(len(pa), dtype=bool)
        keep[idx] = False
        keep_val, keep_err, keep_a, keep_b = vals[keep], errs[keep], pa[keep], pb[keep]
        sa, sb = pa[idx], pb[idx]
        sm = 0.5 * (sa + sb)
        a = np.concatenate([sa, sm])
        b = np.concatenate([sm, sb])


def gauss_kronrod_2d(f, boxes, atol, rtol=0.0, max_boxes=4000):
    """Adaptive tensor-product G7/K15 on rectangles ``boxes`` = [(x0, x1, y0, y1), ...].

    Each box is split in half along the direction whose one-dimensional
    Gauss/Kronrod difference is larger.
    """
    boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
    WK = np.outer(KRONROD, KRONROD)
    WGx = np.outer(GAUSS, KRONROD)  # Gauss in x, Kronrod in y
    WGy = np.outer(KRONROD, GAUSS)
    todo = boxes
    kept = []  # (box, value, err, err_x, err_y)
    evals = 0
    while True:
        cx = 0.5 * (todo[:, 0] + todo[:, 1])
        hx = 0.5 * (todo[:, 1] - todo[:, 0])
        cy = 0.5 * (todo[:, 2] + todo[:, 3])
        hy = 0.5 * (todo[:, 3] - todo[:, 2])
        X = cx[:, None, None] + hx[:, None, None] * NODES[None, :, None]
        Y = cy[:, None, None] + hy[:, None, None] * NODES[None, None, :]
        X, Y = np.broadcast_arrays(X, Y)
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        fx = f(pts).reshape(len(todo), 15, 15, -1)
        evals += len(pts)
        jac = (hx * hy)[:, None]
        k = np.einsum("pijk,ij->pk", fx, WK) * jac
        ex = np.abs(k - np.einsum("pijk,ij->pk", fx, WGx) * jac)
        ey = np.abs(k - np.einsum("pijk,ij->pk", fx, WGy) * jac)
        for i in range(len(todo)):
            kept.append((todo[i], k[i], ex[i] + ey[i], ex[i], ey[i]))
        vals = np.array([c[1] for c in kept])
        errs = np.array([c[2] for c in kept])
        total = vals.sum(axis=0)
        total_err = errs.sum(axis=0)
        target = np.maximum(atol, rtol * np.abs(total))
        if np.all(total_err <= target):
            return QuadResult(total, total_err, len(kept), evals, True)
        if len(kept) >= max_boxes:
            return QuadResult(total, total_err, len(kept), evals, False)
        score = np.max(errs / np.maximum(target, 1e-300), axis=1)
        idx = set(_split_order(score).tolist())
        new = []
        rest = []
        for i, (box, _, _, exi, eyi) in enumerate(kept):
            if i not in idx:
                rest.append(kept[i])
                continue
            x0, x1, y0, y1 = box
            if np.max(exi / target) >= np.max(eyi / target):
                xm = 0.5 * (x0 + x1)
                new += [(x0, xm, y0, y1), (xm, x1, y0, y1)]
            else:
                ym = 0.5 * (y0 + y1)
                new += [(x0, x1, y0, ym), (x0, x1, ym, y1)]
        kept = rest
        todo = np.array(new)


# -- Filon-Legendre ------------------------------------------------------------

_FILON_N = 24
_FU, _FW = roots_legendre(_FILON_N)
_FP = np.polynomial.legendre.legvander(_FU, _FILON_N - 1)  # (nodes, degree)
_FPROJ = (_FP * _FW[:, None]).T * ((2 * np.arange(_FILON_N) + 1) / 2)[:, None]


def legendre_fourier_moments(sigma, degree):
    """int_{-1}^{1} P_k(u) e^{i sigma u} du = 2 i^k j_k(sigma), for k < degree."""
    k = np.arange(degree)
    sigma = np.asarray(sigma, dtype=float)
    return 2 * (1j**k) * spherical_jn(k, np.abs(sigma)[..., None]) * np.where(
        (sigma[..., None] < 0) & (k % 2 == 1), -1.0, 1.0
    )


def filon(g, omegas, edges, atol, max_panels=4000):
    """sum_j int g_j(x) e^{i omega_j x} dx over the panels in ``edges``.

    ``g`` maps nodes (N,) to amplitudes (N, J); each column has its own
    frequency.  The amplitude is projected onto Legendre polynomials of
    degree < 24 on each panel and the moments are exact, so the panel width
    is limited only by the smoothness of g, not by the oscillation.  The
    error estimate is the size of the top four Legendre coefficients.
    """
    omegas = np.asarray(omegas, dtype=float)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    done_val = np.zeros(len(omegas), dtype=complex)
    done_err = np.zeros(len(omegas))
    panels = 0
    while True:
        m, h = 0.5 * (a + b), 0.5 * (b - a)
        x = (m[:, None] + h[:, None] * _FU).ravel()
        gx = g(x).reshape(len(a), _FILON_N, len(omegas))
        coef = np.einsum("kn,pnj->pkj", _FPROJ, gx)  # (P, degree, J)
        sig = h[:, None] * omegas[None, :]  # (P, J)
        mom = legendre_fourier_moments(sig, _FILON_N)  # (P, J, degree)
        phase = np.exp(1j * omegas[None, :] * m[:, None])
        val = h[:, None] * phase * np.einsum("pkj,pjk->pj", coef, mom)
        err = 2 * h[:, None] * np.abs(coef[:, -4:, :]).sum(axis=1)
        panels += len(a)
        share = atol * (b - a) / (edges[-1] - edges[0])
        # coefficients cannot resolve below round-off relative to the panel amplitude
        noise = 1000 * np.finfo(float).eps * 2 * h[:, None] * np.abs(coef).max(axis=1)
        ok = np.all(err <= np.maximum(share[:, None], noise), axis=1)
        done_val += val[ok].sum(axis=0)
        done_err += err[ok].sum(axis=0)
        if np.all(ok) or panels > max_panels:
            done_val += val[~ok].sum(axis=0)
            done_err += err[~ok].sum(axis=0)
            return QuadResult(done_val, done_err, panels, panels * _FILON_N, bool(np.all(ok)))
        a, b = a[~ok], b[~ok]
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
