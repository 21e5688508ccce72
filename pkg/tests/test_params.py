import math

import pytest

from kmpoly.params import (
    DEFAULT_COUPLINGS,
    InvalidParameterError,
    Params,
    default_param_sets,
    dual,
    is_self_dual,
    make_params,
    params_from_mapping,
    parse_config,
)


def test_q_and_rho():
    p = make_params(3, alpha=0.5, beta=2.0, g=0.7, g0=1.9, g1=0.8, g2=0.6, g3=0.5)
    assert p.q == pytest.approx(math.exp(-1.0))
    half = (1.9 + 0.8 + 0.6 + 0.5) / 2
    assert p.rho == pytest.approx((2 * 0.7 + half, 0.7 + half, half))


def test_rho_star_uses_dual_couplings():
    p = make_params(2, g=0.4, g0=1.0, g1=0.2, g2=0.3, g3=0.1)
    # rho*_j = (n-j) g + g0
    assert p.rho_star == pytest.approx((0.4 + 1.0, 1.0))


def test_letters():
    p = make_params(1, g=0.5, g0=1, g1=2, g2=0, g3=0)
    t, a, b, c, d = p.letters
    q = p.q
    assert t == pytest.approx(q**0.5)
    assert a == pytest.approx(q)
    assert b == pytest.approx(-(q**2))
    assert c == pytest.approx(q**0.5)
    assert d == pytest.approx(-(q**0.5))


def test_dual_map_values():
    p = make_params(2, alpha=2, beta=3, g=1, g0=1, g1=2, g2=3, g3=4)
    d = dual(p)
    assert (d.alpha, d.beta, d.g) == (3, 2, 1)
    assert d.couplings == (5.0, -2.0, -1.0, 0.0)


def test_dual_is_exact_involution():
    p = make_params(3, alpha=0.3, beta=1.7, g=0.1, g0=0.1, g1=0.2, g2=0.7, g3=0.3)
    assert dual(dual(p)) == p
    # also for a freshly built dual (no memo)
    d = dual(p)
    fresh = Params(d.n, d.alpha, d.beta, d.g, d.g0, d.g1, d.g2, d.g3)
    assert dual(fresh) == p


@pytest.mark.parametrize("c", DEFAULT_COUPLINGS)
def test_default_sets_self_dual(c):
    p = make_params(2, **c)
    assert is_self_dual(p)
    assert dual(p).couplings == pytest.approx(p.couplings, abs=1e-15)


def test_self_dual_exact_decimal():
    # 0.3 == 0.1 + 0.2 fails in floats but holds for the decimal inputs
    assert is_self_dual(make_params(1, g0=0.3, g1=0.1, g2=0.2, g3=0.0))
    assert not is_self_dual(make_params(1, g0=0.3, g1=0.1, g2=0.2, g3=1e-12))


@pytest.mark.parametrize(
    "kw",
    [dict(n=0), dict(n=1.5), dict(n=2, alpha=0), dict(n=2, beta=-1), dict(n=2, g=math.nan), dict(n=2, alpha=math.inf)],
)
def test_invalid(kw):
    with pytest.raises(InvalidParameterError):
        make_params(**kw)


def test_parse_config():
    text = "# comment\nn = 2\ng=0.7  # inline\n\ng0=1.9\n"
    vals = parse_config(text)
    assert vals == {"n": 2, "g": 0.7, "g0": 1.9}
    p = params_from_mapping(vals)
    assert p.n == 2 and p.g1 == 0.0


@pytest.mark.parametrize("text", ["n=2\nbogus=1", "n 2", "n=x"])
def test_parse_config_errors(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_missing_n():
    with pytest.raises(InvalidParameterError):
        params_from_mapping({"g": 1})


def test_digest_stable_and_distinct():
    a, b, c = default_param_sets(2)
    assert a.digest() == make_params(2, **DEFAULT_COUPLINGS[0]).digest()
    assert len({a.digest(), b.digest(), c.digest()}) == 3


def test_replace_and_nonnegative():
    p = make_params(2, g=1)
    assert p.replace(g=2).g == 2 and p.g == 1
    assert p.is_nonnegative()
    assert not p.replace(g1=-0.1).is_nonnegative()
