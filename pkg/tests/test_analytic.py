import math

import numpy as np
import pytest
from scipy.optimize import brentq, linear_sum_assignment

from rtspin.analytic import (
    ParitySector,
    SurfacePrediction,
    dispersion,
    dispersion_squared,
    extremal_momentum,
    in_unbroken_region,
    lattice_sum,
    min_dispersion_squared,
    momentum_block,
    momentum_grid,
    reality_threshold,
)
from rtspin.errors import SpecError
from rtspin.model import ModelKind


def _paired_distance(a, b):
    cost = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    r, c = linear_sum_assignment(cost)
    return cost[r, c].max()


# ---------------------------------------------------------------- momentum block

def test_block_entries():
    k, l1, l2, g = 0.7, 1.1, 0.4, 0.3
    c, s = math.cos(k), math.sin(k)
    expected = np.array(
        [
            [l1 + c, -g * s, 0, -l2],
            [g * s, -l1 - c, l2, 0],
            [0, l2, c - l1, -g * s],
            [-l2, 0, g * s, l1 - c],
        ]
    )
    np.testing.assert_array_equal(momentum_block(k, l1, l2, g).entries, expected)


def test_block_at_zero_momentum_decouples():
    ev = momentum_block(0.0, 0.8, 0.0, 1.3).eigenvalues()
    assert _paired_distance(ev, [1.8, -1.8, -0.2, 0.2]) < 1e-12


def test_block_at_half_pi_free_fields():
    ev = momentum_block(math.pi / 2, 0.0, 0.0, 0.5).eigenvalues()
    assert _paired_distance(ev, [0.5j, -0.5j, 0.5j, -0.5j]) < 1e-12


def test_block_k_wrapped_and_sector_kept():
    b = momentum_block(3 * math.pi, 1, 0, 0, parity_sector="even")
    assert b.k == pytest.approx(math.pi)
    assert b.parity_sector is ParitySector.EVEN


def test_dispersion_matches_block(rng):
    for _ in range(100):
        k, l1, l2, g = rng.uniform(-2, 2, size=4)
        ep2, em2 = dispersion_squared(k, l1, l2, g)
        block_sq = momentum_block(k, l1, l2, g).eigenvalues() ** 2
        assert _paired_distance(block_sq, [ep2, ep2, em2, em2]) < 1e-10


def test_alternative_sign_of_mixed_term_disagrees_with_block():
    # with +l2^2 g^2 sin^2 k under the inner root the block is not reproduced;
    # this pins down which sign the implementation must use
    k, l1, l2, g = 0.9, 1.2, 0.7, 0.8
    c2, s2 = math.cos(k) ** 2, math.sin(k) ** 2
    outer = l1 ** 2 + l2 ** 2 + c2 - g ** 2 * s2
    inner = math.sqrt(l1 ** 2 * l2 ** 2 + l1 ** 2 * c2 + l2 ** 2 * g ** 2 * s2)
    wrong = [outer + 2 * inner] * 2 + [outer - 2 * inner] * 2
    block_sq = momentum_block(k, l1, l2, g).eigenvalues() ** 2
    assert _paired_distance(block_sq, wrong) > 1e-3


def test_free_dispersion():
    ep, em = dispersion(math.pi / 3, 0, 0, 0)
    assert ep == pytest.approx(0.5)
    assert em == pytest.approx(0.5)


def test_uniform_field_form(rng):
    for _ in range(20):
        k, l1, g = rng.uniform(-2, 2, size=3)
        ep2, em2 = dispersion_squared(k, l1, 0.0, g)
        base = l1 ** 2 + math.cos(k) ** 2 - g ** 2 * math.sin(k) ** 2
        cross = 2 * abs(l1 * math.cos(k))
        assert ep2 == pytest.approx(base + cross, abs=1e-12)
        assert em2 == pytest.approx(base - cross, abs=1e-12)


def test_squared_energies_real_where_inner_radicand_nonnegative(rng):
    for _ in range(200):
        k, l1, l2, g = rng.uniform(-2, 2, size=4)
        radicand = l1 ** 2 * l2 ** 2 + l1 ** 2 * math.cos(k) ** 2 - l2 ** 2 * g ** 2 * math.sin(k) ** 2
        ep2, em2 = dispersion_squared(k, l1, l2, g)
        if radicand >= 0:
            assert abs(ep2.imag) <= 1e-14 and abs(em2.imag) <= 1e-14


def test_squared_energies_can_be_complex():
    # small l1 with large l2 * g: the inner radicand is negative and the
    # block eigenvalues squared really are complex
    ep2, em2 = dispersion_squared(math.pi / 2, 0.1, 1.0, 1.0)
    assert abs(ep2.imag) > 0.1
    block_sq = momentum_block(math.pi / 2, 0.1, 1.0, 1.0).eigenvalues() ** 2
    assert np.abs(block_sq.imag).max() > 0.1


def test_dispersion_vectorized():
    ks = np.linspace(-math.pi, math.pi, 7)
    ep2, em2 = dispersion_squared(ks, 1.0, 0.5, 0.5)
    assert ep2.shape == em2.shape == ks.shape


# ---------------------------------------------------------------- grids

def test_momentum_grids():
    odd = momentum_grid(4, "odd")
    even = momentum_grid(4, ParitySector.EVEN)
    np.testing.assert_allclose(odd, [-math.pi / 2, 0, math.pi / 2, math.pi])
    np.testing.assert_allclose(even, [-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4])
    assert np.all((odd > -math.pi) & (odd <= math.pi))


# ---------------------------------------------------------------- extremum

def test_extremal_momentum_free_case():
    assert extremal_momentum(0, 0, 0) == pytest.approx(math.pi / 2, abs=1e-6)


def test_extremal_momentum_endpoint_is_none():
    # gamma = 0, strong field: E_-^2 = (l1 - |cos k|)^2 is smallest at k = 0
    assert extremal_momentum(0.5, 0.0, 0.0) is not None  # |cos k| = 0.5 inside
    assert extremal_momentum(3.0, 0.0, 0.0) is None


@pytest.mark.parametrize("l2, g", [(0.0, 0.5), (0.5, 0.5), (1.0, 1.0), (0.3, 1.4)])
def test_sign_of_minimum_across_surface(l2, g):
    s = reality_threshold("iatxy", l2, g).value
    assert min_dispersion_squared(s + 1e-3, l2, g)[1] >= 0
    assert min_dispersion_squared(s - 1e-3, l2, g)[1] < 0


def test_single_sign_change_located_at_surface(rng):
    for _ in range(10):
        l2, g = rng.uniform(0, 1.5), rng.uniform(0.05, 1.5)
        s = reality_threshold("iatxy", l2, g).value

        def f(l1):
            return min_dispersion_squared(l1, l2, g)[1]

        xs = np.linspace(l2 + 1e-3, s + 2, 300)
        signs = np.sign([f(x) for x in xs])
        assert np.count_nonzero(np.diff(signs)) == 1
        root = brentq(f, xs[np.argmax(signs > 0) - 1], xs[np.argmax(signs > 0)], xtol=1e-12)
        assert abs(root - s) <= 1e-6


# ---------------------------------------------------------------- predictions

def test_threshold_closed_forms():
    assert reality_threshold("iatxy", 0, 0).value == 1.0
    assert reality_threshold("iatxy", 0, 0.7).value == pytest.approx(math.sqrt(1.49))
    assert reality_threshold("iatxy", 0.5, 0.5).value == pytest.approx(math.sqrt(1.5))
    assert reality_threshold("ixyz", 0, 1.0).value == pytest.approx(math.sqrt(2))
    assert reality_threshold("ixyz", 0.5, 0.5).value == pytest.approx(math.sqrt(2.5))
    assert reality_threshold("ixyz", 0, 0.3).value == reality_threshold("iatxy", 0, 0.3).value


def test_threshold_square_identity(rng):
    for _ in range(50):
        l2, g = rng.uniform(-2, 2), rng.uniform(0, 2)
        s = reality_threshold("iatxy", l2, g).value
        assert s ** 2 - (1 + l2 ** 2) == pytest.approx(g ** 2, abs=1e-12)


def test_hermitian_partner_value(rng):
    for _ in range(50):
        l2, g = rng.uniform(0, 2), rng.uniform(0, 2)
        p = reality_threshold("iatxy", l2, g)
        if 1 + l2 ** 2 - g ** 2 >= 0:
            assert p.value ** 2 - p.hermitian_value ** 2 == pytest.approx(2 * g ** 2, abs=1e-12)
        else:
            assert p.hermitian_value is None
    assert reality_threshold("ixyz", 0.0, 1.5).hermitian_value is None


def test_hermitian_kinds_share_prediction():
    a = reality_threshold("hermitian_atxy", 0.3, 0.5)
    b = reality_threshold("iatxy", 0.3, 0.5)
    assert (a.value, a.hermitian_value) == (b.value, b.hermitian_value)


def test_lattice_sum():
    assert lattice_sum(1, 8) == pytest.approx(1 + 1 / 2 + 1 / 3 + 1 / 4)
    assert lattice_sum(2, 2) == 1.0
    with pytest.raises(SpecError):
        lattice_sum(1, 7)


def test_long_range_threshold():
    p = reality_threshold("iatxy_lr", 0, 0.5, alpha=1, n_sites=8)
    assert p.value == pytest.approx(math.sqrt(1.25) * (25 / 12))
    near = reality_threshold("iatxy_lr", 0.4, 0.5, alpha=50, n_sites=8).value
    assert abs(near - reality_threshold("iatxy", 0.4, 0.5).value) <= 1e-10
    q = reality_threshold("ixyz_lr", 0.5, 0.5, alpha=1, n_sites=8)
    assert q.value == pytest.approx(math.sqrt(2.5) * (25 / 12))


def test_long_range_requires_alpha_and_size():
    with pytest.raises(SpecError) as info:
        reality_threshold(ModelKind.IATXY_LR, 0, 0.5, n_sites=8)
    assert info.value.field == "alpha"
    with pytest.raises(SpecError) as info:
        reality_threshold("ixyz_lr", 0, 0.5, alpha=1.0)
    assert info.value.field == "n_sites"


def test_prediction_json():
    p = reality_threshold("iatxy", 0.5, 0.5)
    d = p.to_dict()
    assert set(d) == {"value", "hermitian_value", "kind", "inputs"}
    assert d["kind"] == "iatxy" and d["inputs"] == {"gamma": 0.5, "lambda2": 0.5}
    assert isinstance(p, SurfacePrediction)
    assert '"hermitian_value": null' in reality_threshold("iatxy", 0, 2).to_json()


def test_no_surface_below_alternating_field(rng):
    # the would-be branch l1 < l2 needs l1^2 - l2^2 > 1 + g^2, impossible
    for _ in range(200):
        l2, g = rng.uniform(0, 3), rng.uniform(0, 2)
        l1 = rng.uniform(0, l2)
        assert not in_unbroken_region(l1, l2, g)
    assert in_unbroken_region(2.0, 0.5, 0.5)
    assert not in_unbroken_region(1.2, 0.5, 0.5)
