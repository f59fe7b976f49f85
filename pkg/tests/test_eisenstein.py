import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from ddseries import eisenstein as eis
from ddseries._common import RegionError

S_POINTS = [2.0, 1.3 + 0.7j, 0.5 + 3j, 0.8 - 1.2j, 2.5 + 10j]


def rel(a, b):
    return abs(complex(a) - complex(b)) / abs(complex(b))


@pytest.mark.parametrize("s", S_POINTS)
def test_r2_explicit_vs_direct(s):
    for n in [*range(1, 70), -1, -2, -3, -4, -12, -16, -48, -64, 256, 1024, -768]:
        assert abs(eis.r2_explicit(s, n) - eis.r2_direct(s, n)) < 1e-12


def test_r2_character_split():
    for n in (1, 3, -5, 12, 40):
        for k in range(2, 9):
            a, b = eis.r2_character_split(n, k)
            assert abs(a - b) < 1e-9


def test_r2_zero_rejected():
    with pytest.raises(ValueError):
        eis.r2_explicit(1, 0)


def test_level4_sum_factorises():
    for c in (1, 2, 3, 6, 8, 12, 45):
        for n in (-7, 0, 1, 5, 12):
            assert abs(eis.level4_sum(n, c) - eis._level4_sum_sturm(n, c)) < 1e-9 * c


@pytest.mark.parametrize("n", [1, 2, -1, -3, 5, 12, -20])
def test_phi_n_closed_vs_double_sum(n):
    s = 2.0 + 0.3j
    C = 3000
    raw = eis.phi_n_raw(s, n, C)
    closed = eis.phi_n(s, n).phi_n
    # terms decay like c^{1/2 - 2 Re s}
    assert abs(raw - closed) < 5 * C ** (1.5 - 2 * s.real) * abs(eis._coeff_prefactor(s, n)) * 4 ** -4
    assert abs(raw - eis.phi_n_raw(s, n, C, split=True)) < 1e-12 * abs(raw)


def test_phi_n_vanishes_at_half():
    assert eis.phi_n(0.5, 3).phi_n == 0


def test_scattering_forms_agree():
    for s in (1.3, 2 + 1j, 0.8 + 4j):
        assert rel(eis.scattering_phi(s), eis.scattering_phi_intermediate(s)) < 1e-11
    raw = eis.scattering_phi_raw(2.0, 4000)
    assert rel(raw, eis.scattering_phi(2.0)) < 1e-5


def test_scattering_at_one():
    expect = math.pi**2 / (21 * float(mp.zeta(3)))
    assert abs(eis.scattering_phi(1) - expect) < 1e-12
    assert eis.scattering_phi(0.5) == -1


@pytest.mark.parametrize("s", [0.5 + 2j, 0.5 + 7.5j, 1.7 + 0.4j, 0.3 - 1j])
def test_scattering_unitarity(s):
    assert eis.scattering_product_residual(s) < 1e-10
    if complex(s).real == 0.5:
        M = eis.scattering_matrix(s).entries
        assert np.max(np.abs(M @ M.conj().T - np.eye(2))) < 1e-10


def test_multiplier_and_cusps():
    ctx = eis.GroupContext()
    assert ctx.open_cusps() == ["inf", "0"]
    assert eis.nu((1, 1, 0, 1)) == 1
    with pytest.raises(ValueError):
        eis.nu((1, 0, 2, 1))
    # multiplier system consistency: nu(g1 g2) j(g1 g2, z) = nu(g1) j(g1, g2 z) nu(g2) j(g2, z)
    g1, g2 = (1, 0, 4, 1), (3, 1, 8, 3)
    prod = (g1[0] * g2[0] + g1[1] * g2[2], g1[0] * g2[1] + g1[1] * g2[3], g1[2] * g2[0] + g1[3] * g2[2], g1[2] * g2[1] + g1[3] * g2[3])
    z = 0.13 + 0.9j
    lhs = eis.automorphy_factor(prod, z)
    rhs = eis.automorphy_factor(g1, eis.mobius(g2, z)) * eis.automorphy_factor(g2, z)
    assert abs(lhs - rhs) < 1e-12


@pytest.mark.parametrize("gamma", [(1, 0, 4, 1), (1, 1, 0, 1), (3, -1, 4, -1), (1, 0, -4, 1)])
def test_automorphy(gamma):
    for s in (2.0, 0.5 + 2j):
        assert eis.automorphy_residual(gamma, 0.1 + 0.6j, s) < 1e-8


def test_group_sum_matches_fourier():
    z, s = 0.1 + 0.9j, 2.0
    g = eis.eval_E_group_sum(z, s, C=2000)
    f = eis.eval_E(z, s)
    assert abs(g.value - f.value) <= g.tail_bound + f.tail_bound
    with pytest.raises(RegionError):
        eis.eval_E_group_sum(z, 0.9)


def test_E_vanishes_at_half():
    assert abs(eis.eval_E(0.2 + 0.7j, 0.5).value) < 1e-12


def test_E_budget():
    with pytest.raises(eis.BudgetExceeded):
        eis.eval_E(0.001j, 2.0, budget=10)
    with pytest.raises(ValueError):
        eis.eval_E_grid([0.0], [-1.0], 2.0)


def test_mass_integral():
    rect = (-0.5, 0.5, 0.5, 1.5)
    r = eis.mass_integral(rect, 2.0, grid=16)
    assert r.value > 0 and r.warning is None
    finer = eis.mass_integral(rect, 2.0, grid=24)
    assert abs(r.value - finer.value) < 1e-6 * finer.value
    assert eis.mass_integral((0, 0, 1, 2), 1.0).value == 0
    assert eis.mass_integral(rect, 7.0, grid=8).warning
    with pytest.raises(RegionError):
        eis.mass_integral((0, 1, 0.01, 1), 1.0)
    with pytest.raises(RegionError):
        eis.mass_integral(rect, 11.0)


def test_coefficient_rows():
    rows = eis.coefficient_rows(1.5, [1, -1])
    assert rows[0][0] == 1 and cmath.isclose(complex(rows[0][1], rows[0][2]), eis.phi_n(1.5, 1).phi_n)
