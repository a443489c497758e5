import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from hckernels import verify as vf
from hckernels.kernel_eval import DivergenceError, MultiplierSpec
from hckernels.root_system import a2, from_name, real_hyperbolic


def test_exponent_powers():
    d = real_hyperbolic(3)
    assert vf.exponent_power(d, "sharp_6d") == 6 * 1 + 2 + 1
    assert vf.exponent_power(d, "coarse_7") == 7 * 2 + 1
    assert vf.exponent_power(d, "limsup") == 2
    assert vf.exponent_power(a2(), "sharp_6d") == 6 * 3 + 3 + 1
    with pytest.raises(ValueError):
        vf.exponent_power(d, "other")
    with pytest.raises(ValueError):
        vf.BoundConfig(exponent_mode="other")


def test_I_F_resolvent_against_fixed_rule():
    # 2 int_0^inf (r^2 + 1)^{-10} (1 + r)^power dr by Gauss-Legendre after r = tan(theta)
    d = real_hyperbolic(2)
    power = vf.exponent_power(d, "sharp_6d")
    x, w = np.polynomial.legendre.leggauss(400)
    theta = 0.25 * np.pi * (x + 1)
    r = np.tan(theta)
    ref = 2 * np.sum(0.25 * np.pi * w * (r * r + 1) ** -10 * (1 + r) ** power / np.cos(theta) ** 2)
    assert vf.compute_I_F(d, MultiplierSpec.resolvent(10, 1)) == pytest.approx(ref, rel=1e-8)


def test_I_F_heat_monotone_in_t():
    d = real_hyperbolic(2)
    vals = [vf.compute_I_F(d, MultiplierSpec.heat(t)) for t in (0.1, 0.5, 1.0, 5.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_I_F_divergent_wave():
    with pytest.raises(DivergenceError):
        vf.compute_I_F(real_hyperbolic(3), MultiplierSpec.wave(1, 4))


def test_I_F_rank_two_polar():
    d = a2()
    F = MultiplierSpec.heat(1.0)
    p = vf.exponent_power(d, "limsup")
    r = np.linspace(0, 40, 400001)
    ref = 2 * math.pi * trapezoid(np.exp(-r * r) * (1 + r) ** p * r, r)
    assert vf.compute_I_F(d, F, "limsup") == pytest.approx(ref, rel=1e-8)


def test_default_grid_shapes():
    h = vf.default_grid(real_hyperbolic(2))
    assert len(h) == 601 and not np.any(h[0])
    assert h[-1][0] == pytest.approx(30.0)
    g = vf.default_grid(a2())
    assert all(a2().in_chamber(H) for H in g)
    assert all(a2().wall_distance(H) >= 0.05 for H in g[1:])
    mask = vf.far_mask(h)
    assert mask.sum() == 401


def test_zero_multiplier_report():
    rep = vf.verify_uniform(real_hyperbolic(2), [MultiplierSpec.zero()],
                            vf.BoundConfig(H_grid=[[0.0], [1.0]]))
    assert rep.reports[0].sup_ratio == 0 and rep.reports[0].tail_ratio == 0
    assert rep.spread == 1.0


def test_family_spread():
    assert vf.family_spread([1.0, 4.0, 2.0]) == 4.0
    assert vf.family_spread([0.0, 1.0]) == math.inf
    assert vf.fit_constant([0.1, 0.4]) == pytest.approx(0.8)


def test_pointwise_table_equals_uniform_column():
    d = real_hyperbolic(2)
    grid = [np.array([r]) for r in (0.0, 0.5, 2.0, 11.0)]
    F = MultiplierSpec.poisson(1.0)
    p = vf.verify_pointwise(d, F, H_grid=grid)
    u = vf.verify_uniform(d, [F], vf.BoundConfig(H_grid=grid))
    assert p.table == u.reports[0].table
    assert np.all(p.abs_k_L() <= p.sup_ratio * p.I_F * (1 + 1e-12))


def test_h3_heat_decreasing_beyond_peak():
    d = real_hyperbolic(3)
    grid = vf.default_grid(d, r_max=15, step=0.25)
    rep = vf.verify_pointwise(d, MultiplierSpec.heat(1.0), H_grid=grid)
    k = rep.abs_k_L()
    err = np.array([row[-1] for row in rep.table]) * np.exp([H[0] for H in grid])
    peak = int(np.argmax(k))
    # compare only where neighbours are resolved above the quadrature error
    resolved = k[peak + 1:] > 10 * (err[peak:-1] + err[peak + 1:])
    assert resolved.sum() > 20
    assert np.all(np.diff(k[peak:])[resolved] < 0)
    # the peak of e^{r} r / sinh(r) e^{-r^2/4} sits near r = 2
    assert 1.0 < grid[peak][0] < 3.0


def test_sup_ratio_stable_under_grid_doubling():
    d = real_hyperbolic(2)
    F = MultiplierSpec.wave(5.0, 8.0)
    coarse = vf.verify_uniform(d, [F], vf.BoundConfig(H_grid=vf.default_grid(d, step=0.1)))
    fine = vf.verify_uniform(d, [F], vf.BoundConfig(H_grid=vf.default_grid(d, step=0.05)))
    ratio = fine.reports[0].sup_ratio / coarse.reports[0].sup_ratio
    assert 0.5 < ratio < 2


def test_heat_sup_ratio_bounded_as_t_decreases():
    # I_F blows up at least as fast as the kernel sup when t -> 0
    d = real_hyperbolic(2)
    grid = vf.default_grid(d, r_max=5, step=0.05)
    rep = vf.verify_uniform(d, [MultiplierSpec.heat(t) for t in (1.0, 0.5, 0.2, 0.1, 0.05)],
                            vf.BoundConfig(H_grid=grid))
    ratios = [r.sup_ratio for r in rep.reports]
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))


def test_far_tail_ratio_against_limsup_integral():
    d = real_hyperbolic(3)
    grid = vf.default_grid(d, step=0.5)
    rep = vf.verify_pointwise(d, MultiplierSpec.resolvent(6, 1), H_grid=grid)
    assert math.isfinite(rep.tail_ratio) and rep.tail_ratio < rep.sup_ratio * rep.I_F / rep.I_F_limsup


def test_lower_bound_preconditions():
    d = real_hyperbolic(2)
    with pytest.raises(ValueError):
        vf.verify_lower(d, 6.0, [10.0], amplitude=0.0)
    with pytest.raises(ValueError):
        vf.verify_lower(d, 4.0, [10.0])
    with pytest.raises(ValueError):
        vf.verify_lower(a2(), 10.0, [10.0])


def test_fourier_transform_quadrature_vs_fft():
    d = real_hyperbolic(2)
    a = np.arange(-3, 3, 0.01)
    mag = np.abs(vf.fourier_psi_tilde(d, 6.0, a))
    nu_fft, a0_fft = vf._fft_peak(d, 6.0, 1.0)
    k = int(np.argmax(mag))
    assert abs(a[k] - a0_fft) < 0.02
    assert abs(mag.max() / nu_fft - 1) < 1e-3


def test_fourier_transform_scales_with_amplitude():
    d = real_hyperbolic(2)
    one = vf.fourier_psi_tilde(d, 6.0, [0.3])
    three = vf.fourier_psi_tilde(d, 6.0, [0.3], amplitude=3.0)
    assert three[0] == pytest.approx(3 * one[0], rel=1e-10)


def test_lower_report_serialises():
    d = real_hyperbolic(2)
    rep = vf.verify_lower(d, 6.0, [10.0])
    data = json.loads(vf.to_json(rep))
    assert data["kappa"] == 6.0 and len(data["trace"]) == 1
    assert rep.nu > 0 and rep.trace[0][1] > 0


def test_table_csv_format():
    d = real_hyperbolic(2)
    rep = vf.verify_pointwise(d, MultiplierSpec.heat(1.0), H_grid=[[0.0], [1.0]])
    lines = vf.table_csv(rep, 1).splitlines()
    assert lines[0] == "H1,abs_k_L,abs_k_delta_rho,quad_error"
    assert len(lines) == 3
    assert vf.fmt(0.1) == "0.10000000000000001"
    assert vf.fmt(3) == "3"
