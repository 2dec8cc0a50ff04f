import cmath
import math

import pytest

import parapuzzle as pp


def test_misiurewicz_d():
    d = pp.misiurewicz_d()
    assert d == pytest.approx(-1.5436890126920764, abs=1e-12)
    alpha, _ = pp.fixed_points(d)
    assert abs(pp.iterate(d, 0, 3) - alpha) < 1e-12


def test_parameter_ray_lands_at_tip():
    ray = pp.trace_ray("param", 1, 2)
    assert ray.landing_point is not None
    assert abs(ray.landing_point + 2) < 1e-6


def test_fibonacci_nest_and_scaling():
    nest = pp.real_nest(-1.8705286321646448, max_level=10, model="exact", precision="quad", floor=1e-12)
    assert [lv.return_time for lv in nest.levels[:6]] == [3, 5, 8, 13, 21, 34]
    s = pp.scaling_factors(-1.8705286321646448, 8)
    assert len(s.lambdas) == 8
    assert all(b < a for a, b in zip(s.lambdas[1:], s.lambdas[2:]))
    assert s.rho < 0.9


def test_classification():
    k = pp.classify(-1.9)
    assert k.verdict == "NonRenormFiniteCascades"
    assert k.non_renormalizable
    assert list(k.return_times) == [4, 15, 481]


def test_round_annulus_modulus():
    outer = [2 * cmath.exp(2j * math.pi * k / 720) for k in range(720)]
    inner = [cmath.exp(2j * math.pi * k / 720) for k in range(720)]
    m = pp.annulus_modulus(outer, inner, 256)
    assert m.mod == pytest.approx(math.log(2), rel=0.02)


def test_winding_of_square():
    loop = [cmath.exp(2j * math.pi * k / 256) for k in range(256)]
    loop.append(loop[0])
    w = pp.winding_number(loop, [z * z for z in loop], [0j] * len(loop))
    assert w.w == 2


def test_density_experiment_is_seeded():
    d = pp.misiurewicz_d()
    a = pp.density_experiment(-2.0, d, 200, 8, 42, threads=1)
    b = pp.density_experiment(-2.0, d, 200, 8, 42, threads=2)
    assert a == b
    assert a["n_samples"] == 200


def test_errors_carry_codes():
    with pytest.raises(pp.Error) as info:
        pp.density_experiment(-0.5, -0.4, 10)
    assert info.value.code == "DomainError"
    with pytest.raises(pp.Error):
        pp.trace_ray("sideways", 0, 1)
