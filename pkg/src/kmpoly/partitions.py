"""Partitions of length n, the partial-sum order on them, and signed moves."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate, combinations, product
from typing import Iterable, Sequence

Partition = tuple  # tuple[int, ...], weakly decreasing, nonnegative


def as_partition(parts: Iterable[int]) -> Partition:
    lam = tuple(int(x) for x in parts)
    if not is_partition(lam):
        raise ValueError(f"{lam} is not a weakly decreasing nonnegative vector")
    return lam


def is_partition(parts: Sequence[int]) -> bool:
    if any(x < 0 for x in parts):
        return False
    return all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1))


def parse_partition(text: str, n: int | None = None) -> Partition:
    """Parse ``"2,1,0"``; pads with zeros up to ``n`` when given."""
    parts = [int(s) for s in text.replace(" ", "").split(",") if s != ""]
    if n is not None:
        if len(parts) > n:
            raise ValueError(f"partition {text!r} has more than {n} parts")
        parts += [0] * (n - len(parts))
    return as_partition(parts)


def format_partition(lam: Partition) -> str:
    return ",".join(str(x) for x in lam)


def dominance_leq(mu: Partition, lam: Partition) -> bool:
    """``mu <= lam`` iff every partial sum of ``mu`` is bounded by that of ``lam``.

    Total weights may differ.
    """
    if len(mu) != len(lam):
        raise ValueError(f"length mismatch: {mu} vs {lam}")
    return all(a <= b for a, b in zip(accumulate(mu), accumulate(lam)))


def dominance_lt(mu: Partition, lam: Partition) -> bool:
    return mu != lam and dominance_leq(mu, lam)


def linear_extension_key(lam: Partition):
    # (weight, lex) refines the partial-sum order
    return (sum(lam), lam)


@lru_cache(maxsize=None)
def down_set(lam: Partition) -> tuple[Partition, ...]:
    """All ``mu <= lam`` in Lambda, sorted along a linear extension of the order.

    Any such ``mu`` has ``mu_1 <= lam_1`` and ``|mu| <= |lam|``, so the bounded
    enumeration is a complete candidate pool. Single-box removals alone are not:
    ``(1,1) <= (2,0)`` but cannot be reached from ``(2,0)`` that way.
    """
    lam = as_partition(lam)
    top = lam[0] if lam else 0
    return tuple(mu for mu in partitions_bounded(len(lam), top, sum(lam)) if dominance_leq(mu, lam))


@lru_cache(maxsize=None)
def partitions_bounded(n: int, max_part: int, max_weight: int) -> tuple[Partition, ...]:
    """All length-``n`` partitions with parts <= max_part and weight <= max_weight."""
    out = []

    def rec(prefix, cap, budget):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for x in range(min(cap, budget), -1, -1):
            rec(prefix + [x], x, budget - x)

    rec([], max_part, max_weight)
    out.sort(key=linear_extension_key)
    return tuple(out)


def partitions_up_to(n: int, max_weight: int) -> tuple[Partition, ...]:
    return partitions_bounded(n, max_weight, max_weight)


@dataclass(frozen=True)
class SignedSet:
    """A subset ``J`` of ``{0..n-1}`` (0-based) with a sign per member."""

    members: tuple[int, ...] = ()
    signs: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.members) != len(self.signs):
            raise ValueError("signs must be given exactly on members")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        if len(set(self.members)) != len(self.members):
            raise ValueError("repeated member")
        order = sorted(range(len(self.members)), key=lambda i: self.members[i])
        object.__setattr__(self, "members", tuple(self.members[i] for i in order))
        object.__setattr__(self, "signs", tuple(self.signs[i] for i in order))

    def __len__(self):
        return len(self.members)

    def vector(self, n: int) -> tuple[int, ...]:
        """The shift ``e_{eps J}`` as an integer n-vector."""
        v = [0] * n
        for j, s in zip(self.members, self.signs):
            v[j] = s
        return tuple(v)

    def complement(self, n: int) -> tuple[int, ...]:
        return tuple(k for k in range(n) if k not in self.members)

    def __str__(self):
        if not self.members:
            return "{}"
        return "{" + ",".join(("+" if s > 0 else "-") + str(j + 1) for j, s in zip(self.members, self.signs)) + "}"


OUT_OF_LAMBDA = None


def add_move(lam: Partition, s: SignedSet):
    """``lam + e_{eps J}``, or ``OUT_OF_LAMBDA`` (None) when the result leaves Lambda."""
    moved = tuple(a + b for a, b in zip(lam, s.vector(len(lam))))
    return moved if is_partition(moved) else OUT_OF_LAMBDA


@lru_cache(maxsize=None)
def signed_sets(n: int, r: int) -> tuple[SignedSet, ...]:
    """Every signed subset of ``{0..n-1}`` with at most ``r`` members."""
    out = []
    for k in range(0, r + 1):
        for J in combinations(range(n), k):
            for eps in product((1, -1), repeat=k):
                out.append(SignedSet(J, eps))
    return tuple(out)


def signed_moves(lam: Partition, r: int) -> tuple[SignedSet, ...]:
    n = len(lam)
    if not 1 <= r <= n:
        raise ValueError(f"r must lie in 1..{n}")
    return tuple(s for s in signed_sets(n, r) if add_move(lam, s) is not OUT_OF_LAMBDA)
