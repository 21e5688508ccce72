import json

import numpy as np
import pytest

from kmpoly.params import default_param_sets, make_params
from kmpoly.partitions import down_set
from kmpoly.symcore import (
    NotInSpanError,
    QuadGrid,
    SymPoly,
    default_grid,
    eval_monomial,
    eval_sympoly,
    expand_from_samples,
    generic_points,
    gram_matrix,
    grid_for_accuracy,
    inner_product,
    inner_product_nodes,
    orbit,
)

P2 = default_param_sets(2)[1]


def test_orbit_sizes():
    assert orbit((0, 0)).shape == (1, 2)
    assert orbit((2, 1)).shape == (8, 2)
    assert orbit((1, 1)).shape == (4, 2)
    assert orbit((1, 0)).shape == (4, 2)
    assert orbit((2, 1, 0)).shape == (24, 3)
    assert orbit((1, 1, 1)).shape == (8, 3)


def test_monomial_examples():
    p1 = make_params(1, alpha=0.7)
    assert eval_monomial((0,), np.array([0.3]), p1) == 1
    x = 0.41
    assert eval_monomial((1,), np.array([x]), p1) == pytest.approx(2 * np.cosh(0.7 * x))
    assert eval_monomial((2, 1), np.zeros(2), P2) == 8


def test_sympoly_examples():
    assert eval_sympoly(SymPoly(), np.zeros(2), P2) == 0
    assert eval_sympoly(SymPoly({(0, 0): 1}), np.array([0.3, -1.0]), P2) == 1
    assert eval_sympoly(SymPoly({(1, 0): 2}), np.zeros(2), P2) == 8


def test_sympoly_structure():
    f = SymPoly({(2, 0): 1, (1, 1): 0.5, (0, 0): -1})
    assert f.leading() == (2, 0) and f.is_monic()
    assert not SymPoly({(2, 0): 2}).is_monic()
    assert SymPoly({(2, 0, 0): 1, (1, 1, 1): 1}).leading() is None  # incomparable
    g = f + SymPoly({(0, 0): 1})
    assert g[(0, 0)] == 0
    assert f.scaled(2)[(1, 1)] == 1
    with pytest.raises(ValueError):
        SymPoly({(1,): 1, (1, 0): 1})


def test_sympoly_json_roundtrip():
    f = SymPoly({(2, 1, 0): 1, (1, 0, 0): 0.25 - 2j})
    entries = json.loads(f.dumps())
    assert entries[0] == {"partition": "1,0,0", "re": 0.25, "im": -2.0}
    assert SymPoly.from_json(entries).coeffs == f.coeffs


def test_generic_points_deterministic_and_off_poles():
    a = generic_points(3, 10, P2, seed=4)
    b = generic_points(3, 10, P2, seed=4)
    assert np.array_equal(a, b)
    assert np.abs(np.sinh(a / 2)).min() > 0.12


def test_expand_identity_and_linearity():
    basis = down_set((2, 1))
    e = expand_from_samples(lambda X: eval_monomial((2, 1), X, P2), basis, P2)
    assert e.residual < 1e-12
    assert e.poly[(2, 1)] == pytest.approx(1, abs=1e-12)
    assert all(abs(e.poly[mu]) < 1e-11 for mu in basis if mu != (2, 1))
    f = lambda X: 3 * eval_monomial((1, 1), X, P2) + 2 * eval_monomial((2, 0), X, P2)
    e = expand_from_samples(f, basis, P2)
    assert e.poly[(1, 1)] == pytest.approx(3, abs=1e-11)
    assert e.poly[(2, 0)] == pytest.approx(2, abs=1e-11)


def test_expand_not_in_span():
    with pytest.raises(NotInSpanError) as info:
        expand_from_samples(lambda X: eval_monomial((3, 0), X, P2), down_set((2, 1)), P2)
    assert info.value.residual > 1e-8


def test_expand_rejects_duplicate_basis():
    with pytest.raises(ValueError):
        expand_from_samples(lambda X: X[:, 0], [(1, 0), (1, 0)], P2)


def test_grid_nodes_and_weight():
    g = QuadGrid(2, 6, alpha=2.0)
    th = g.theta
    assert th[0] == pytest.approx(-np.pi / 2 + np.pi / 12)
    assert np.allclose(np.diff(th), np.pi / 6)
    assert g.nodes().shape == (36, 2)
    assert g.node_weight * 36 == pytest.approx(1.0)
    assert default_grid(2, 3).M == 32 and default_grid(2, 10).M == 56


def test_unit_weight_inner_product():
    p = make_params(2)
    one = SymPoly({(0, 0): 1})
    assert inner_product(one, one, p, QuadGrid(2, 8)) == pytest.approx(1)
    # monomials orthogonal (Fourier) with squared norm = orbit size
    G = gram_matrix(down_set((2, 1)), p, QuadGrid(2, 16))
    assert np.allclose(G, np.diag([orbit(mu).shape[0] for mu in down_set((2, 1))]), atol=1e-13)


def test_inner_product_hermitian_and_real():
    p = default_param_sets(2)[2]
    g = QuadGrid(2, 20)
    f = SymPoly({(2, 1): 1, (1, 0): 0.3})
    h = SymPoly({(1, 1): 1, (2, 0): -0.7})
    a, b = inner_product(f, h, p, g), inner_product(h, f, p, g)
    assert a == pytest.approx(np.conj(b), abs=1e-12)
    assert abs(a.imag) < 1e-12 * abs(a)


@pytest.mark.parametrize("n,M", [(1, 7), (2, 9), (2, 12), (3, 6)])
def test_fourier_route_equals_node_sum(n, M):
    p = default_param_sets(n)[2].replace(alpha=0.8)
    g = QuadGrid(n, M, alpha=0.8)
    lam = (3,) + (1,) * (n - 1)
    f = SymPoly({mu: 1 + 0.1 * i for i, mu in enumerate(down_set(lam))})
    h = SymPoly({lam: 1j, (0,) * n: 0.5})
    assert inner_product(f, h, p, g) == pytest.approx(inner_product_nodes(f, h, p, g), rel=1e-12)


def test_grid_checks():
    with pytest.raises(ValueError):
        inner_product(SymPoly({(0,): 1}), SymPoly({(0,): 1}), P2, QuadGrid(1, 8))


def test_quadrature_converges_with_doubling():
    p = default_param_sets(2)[1]
    f, h = SymPoly({(2, 1): 1}), SymPoly({(1, 0): 1})
    M = grid_for_accuracy(p, 3).M
    a = inner_product(f, h, p, QuadGrid(2, M))
    b = inner_product(f, h, p, QuadGrid(2, 2 * M))
    assert abs(a - b) < 1e-9
