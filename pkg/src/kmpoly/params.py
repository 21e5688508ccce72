"""Parameter sets for the Koornwinder-Macdonald family.

Couplings are stored as exponents ``(g, g0, g1, g2, g3)`` together with the
scale factors ``alpha`` and ``beta``; everything else (``q``, ``rho``, the
Askey-Wilson letters, the dual parameter set) is derived on demand.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from decimal import Decimal


class InvalidParameterError(ValueError):
    """Raised for parameter sets outside the supported domain."""


def _dec(x: float) -> Decimal:
    # shortest round-trip representation, so "1.9" stays 1.9 exactly
    return Decimal(repr(float(x)))


@dataclass(frozen=True)
class Params:
    n: int
    alpha: float = 1.0
    beta: float = 1.0
    g: float = 0.0
    g0: float = 0.0
    g1: float = 0.0
    g2: float = 0.0
    g3: float = 0.0
    # set on objects produced by dual(); makes the involution exact
    _dual_source: "Params | None" = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (value > 0) or not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        for name in ("g", "g0", "g1", "g2", "g3"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        object.__setattr__(self, "n", int(self.n))

    @property
    def couplings(self) -> tuple[float, float, float, float]:
        return (self.g0, self.g1, self.g2, self.g3)

    @property
    def q(self) -> float:
        return math.exp(-self.alpha * self.beta)

    def qpow(self, s):
        """``q**s`` evaluated from the exponent as ``exp(-alpha*beta*s)``."""
        import numpy as np

        return np.exp(-self.alpha * self.beta * np.asarray(s))

    @property
    def rho(self) -> tuple[float, ...]:
        half = sum(self.couplings) / 2
        return tuple((self.n - j) * self.g + half for j in range(1, self.n + 1))

    @property
    def rho_star(self) -> tuple[float, ...]:
        return self.dual().rho

    @property
    def letters(self) -> tuple[float, float, float, float, float]:
        """Askey-Wilson letters ``(t, a, b, c, d)``."""
        q = self.qpow
        return (
            float(q(self.g)),
            float(q(self.g0)),
            -float(q(self.g1)),
            float(q(self.g2 + 0.5)),
            -float(q(self.g3 + 0.5)),
        )

    def is_self_dual(self) -> bool:
        """Exact test of ``g0 == g1 + g2 + g3`` on the decimal inputs."""
        return _dec(self.g0) - _dec(self.g1) - _dec(self.g2) - _dec(self.g3) == 0

    def dual(self) -> "Params":
        if self._dual_source is not None:
            return self._dual_source
        a, b, c, d = (_dec(x) for x in self.couplings)
        duals = (
            (a + b + c + d) / 2,
            (a + b - c - d) / 2,
            (a - b + c - d) / 2,
            (a - b - c + d) / 2,
        )
        return Params(
            self.n,
            alpha=self.beta,
            beta=self.alpha,
            g=self.g,
            g0=float(duals[0]),
            g1=float(duals[1]),
            g2=float(duals[2]),
            g3=float(duals[3]),
            _dual_source=self,
        )

    def replace(self, **changes) -> "Params":
        fields = dict(
            n=self.n, alpha=self.alpha, beta=self.beta, g=self.g,
            g0=self.g0, g1=self.g1, g2=self.g2, g3=self.g3,
        )
        fields.update(changes)
        return Params(**fields)

    def is_nonnegative(self) -> bool:
        return self.g >= 0 and all(x >= 0 for x in self.couplings)

    def as_dict(self) -> dict:
        return dict(
            n=self.n, alpha=self.alpha, beta=self.beta, g=self.g,
            g0=self.g0, g1=self.g1, g2=self.g2, g3=self.g3,
        )

    def digest(self) -> str:
        text = ",".join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return hashlib.sha1(text.encode()).hexdigest()[:12]


DualParams = Params


def make_params(n, alpha=1.0, beta=1.0, g=0.0, g0=0.0, g1=0.0, g2=0.0, g3=0.0) -> Params:
    return Params(n, float(alpha), float(beta), float(g), float(g0), float(g1), float(g2), float(g3))


def dual(p: Params) -> Params:
    return p.dual()


def is_self_dual(p: Params) -> bool:
    return p.is_self_dual()


PARAM_KEYS = ("n", "alpha", "beta", "g", "g0", "g1", "g2", "g3")


def parse_config(text: str) -> dict:
    """Parse flat ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in PARAM_KEYS:
            raise InvalidParameterError(f"line {lineno}: unknown key {key!r}")
        out[key] = int(value) if key == "n" else float(value)
    return out


def params_from_mapping(values: dict) -> Params:
    if "n" not in values:
        raise InvalidParameterError("missing n")
    return make_params(**{k: values[k] for k in PARAM_KEYS if k in values})


# default self-dual sets used by the verification sweeps (alpha = beta = 1)
DEFAULT_COUPLINGS = (
    dict(g=1.0, g0=3.0, g1=1.0, g2=1.0, g3=1.0),
    dict(g=0.7, g0=1.9, g1=0.8, g2=0.6, g3=0.5),
    dict(g=0.3, g0=0.9, g1=0.4, g2=0.3, g3=0.2),
)


def default_param_sets(n: int) -> list[Params]:
    return [make_params(n, **c) for c in DEFAULT_COUPLINGS]
