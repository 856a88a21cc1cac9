# Symm Module
# Newton identities between elementary symmetric functions and power sums

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from modules.series_module import TruncatedSeries
from utilities.logger import emit_log


@dataclass(frozen=True)
class SymmetricProfile:
    """Symmetric data of k points, given by e_1..e_k or p_1..p_k."""

    k: int
    e: Optional[Tuple[TruncatedSeries, ...]] = None
    p: Optional[Tuple[TruncatedSeries, ...]] = None

    def __post_init__(self):
        if self.e is None and self.p is None:
            raise ValueError("a symmetric profile needs elementary symmetric functions or power sums")
        for label, entries in (("e", self.e), ("p", self.p)):
            if entries is not None and len(entries) != self.k:
                raise ValueError(f"profile of {self.k} points needs {self.k} entries in {label}, got {len(entries)}")

    def elementary(self) -> Tuple[TruncatedSeries, ...]:
        if self.e is not None:
            return tuple(self.e)
        return tuple(elementary_from_power_sums(self.p))

    def power_sums(self, m: Optional[int] = None) -> Tuple[TruncatedSeries, ...]:
        m = self.k if m is None else m
        if self.p is not None and m <= self.k:
            return tuple(self.p[:m])
        return tuple(power_sums_from_elementary(self.elementary(), m))


def power_sums_from_elementary(e: Sequence[TruncatedSeries], m: int) -> List[TruncatedSeries]:
    """p_1..p_m from e_1..e_k, taking e_j = 0 for j > k."""
    if m <= 0:
        return []
    if not e:
        raise ValueError("need at least one elementary symmetric function")
    k = len(e)
    p: List[TruncatedSeries] = []
    for n in range(1, m + 1):
        acc = e[0].scale(0)
        for j in range(1, min(n - 1, k) + 1):
            term = e[j - 1] * p[n - j - 1]
            acc = acc + term if j % 2 == 1 else acc - term
        if n <= k:
            last = e[n - 1].scale(n)
            acc = acc + last if n % 2 == 1 else acc - last
        p.append(acc)
    emit_log(f"[SYMM] Newton: {k} elementary -> {m} power sums", level="debug")
    return p


def elementary_from_power_sums(p: Sequence[TruncatedSeries]) -> List[TruncatedSeries]:
    """Inverse Newton recursion: n e_n = sum_{j=1..n} (-1)^(j-1) e_{n-j} p_j."""
    if not p:
        raise ValueError("need at least one power sum")
    e: List[TruncatedSeries] = []
    for n in range(1, len(p) + 1):
        acc = p[0].scale(0)
        for j in range(1, n + 1):
            prev = e[n - j - 1] if n - j >= 1 else None
            term = p[j - 1] if prev is None else prev * p[j - 1]
            acc = acc + term if j % 2 == 1 else acc - term
        e.append(acc.scale(Fraction(1, n)))
    emit_log(f"[SYMM] Newton: {len(p)} power sums -> elementary", level="debug")
    return e
