# Averaging Module
# The averaging operator over Segre fibers, its restriction to antiholomorphic
# series, and reduction to polynomial representatives in zbar

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from modules.model_module import (
    AnyFiberData,
    FiberData,
    ModelHypersurface,
    UnsupportedModelError,
)
from modules.series_module import (
    TruncatedSeries,
    VariableSignature,
    collect,
    dumps_series,
    embed,
    invert_unit,
    loads_series,
    substitute,
)
from utilities.config import DEFAULT_JOBS
from utilities.logger import emit_log


class HolomorphicInputError(ValueError):
    pass


class RTableFormatError(ValueError):
    pass


# ---------------- Reduction ----------------

@dataclass(frozen=True)
class ReducedRepresentative:
    """f = sum_j coefficients[j](z, w) zbar^j on X, with j < k."""

    coefficients: Tuple[TruncatedSeries, ...]
    order: int
    signature: VariableSignature

    @property
    def k(self) -> int:
        return len(self.coefficients)

    def as_series(self) -> TruncatedSeries:
        sig = self.signature
        total = TruncatedSeries.zero(sig, self.order)
        for j, coeff in enumerate(self.coefficients):
            total = total + embed(coeff, sig, order=self.order) * TruncatedSeries.monomial(sig, self.order, {"zbar": j})
        return total

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def __str__(self):
        parts = [f"[zbar^{j}] {c}" for j, c in enumerate(self.coefficients)]
        return "\n".join(parts)


def _zbar_power_table(model: ModelHypersurface, top: int, hol: VariableSignature,
                      order: int) -> List[List[TruncatedSeries]]:
    """Representatives of zbar^a, a = 0..top, as k coefficient series each."""
    k = model.k
    a0 = model.alpha[0]
    zero = TruncatedSeries.zero(hol, order)
    # zbar^k = (w - sum_{i>=1} alpha_i z^i zbar^(k-i)) / alpha_0
    top_rule = [zero] * k
    top_rule[0] = TruncatedSeries.variable(hol, order, "w").scale(a0.inverse())
    for i in range(1, k + 1):
        c = -model.alpha[i] / a0
        if not c:
            continue
        mono = TruncatedSeries.monomial(hol, order, {"z": i}, c)
        if i == k:
            top_rule[0] = top_rule[0] + mono
        else:
            top_rule[k - i] = top_rule[k - i] + mono

    table = []
    for a in range(min(top, k - 1) + 1):
        row = [zero] * k
        row[a] = TruncatedSeries.constant(hol, order, 1)
        table.append(row)
    for a in range(k, top + 1):
        prev = table[a - 1]
        row = [zero] + prev[:-1]
        spill = prev[-1]
        if not spill.is_zero():
            row = [row[j] + spill * top_rule[j] for j in range(k)]
        table.append(row)
    return table


def reduce(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None) -> ReducedRepresentative:
    if not isinstance(fd, FiberData):
        raise UnsupportedModelError("reduction to zbar-polynomials needs a model w = p(z, zbar)")
    N = min(f.order, fd.order if order is None else order)
    model = fd.model
    sig = model.signature()
    if f.signature != sig:
        f = embed(f, sig)
    f = f.truncate(N)
    hol = model.holomorphic_signature()

    flat = substitute(f, "wbar", model.p_bar_series(N)) if "wbar" in f.variables_used() else f
    groups = collect(flat, ["zbar", "wbar"], hol)
    top = max((a for a, _ in groups), default=0)
    table = _zbar_power_table(model, top, hol, N)

    coeffs = [TruncatedSeries.zero(hol, N) for _ in range(model.k)]
    for (a, _), c in groups.items():
        for j, rep in enumerate(table[a]):
            if not rep.is_zero():
                coeffs[j] = coeffs[j] + c * rep
    return ReducedRepresentative(tuple(coeffs), N, sig)


# ---------------- Averaging ----------------

def average_by_power_sums(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None) -> TruncatedSeries:
    """A f = sum_{a,b} c_ab(z, w) S_ab / k over the zbar/wbar expansion of f."""
    N = min(f.order, fd.order if order is None else order)
    fd = fd.at_order(N)
    sig = fd.signature
    if f.signature != sig:
        f = embed(f, sig)
    total = TruncatedSeries.zero(fd.holomorphic, N)
    scale = Fraction(1, fd.k)
    for (a, b), c in sorted(collect(f, ["zbar", "wbar"], fd.holomorphic).items()):
        total = total + c * fd.mixed_power_sum(a, b)
    return total.scale(scale)


def average(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None) -> TruncatedSeries:
    if not isinstance(fd, FiberData):
        return average_by_power_sums(f, fd, order)
    rep = reduce(f, fd, order)
    N = rep.order
    fd = fd.at_order(N)
    total = TruncatedSeries.zero(fd.holomorphic, N)
    for j, c in enumerate(rep.coefficients):
        if not c.is_zero():
            total = total + c * fd.power_sum(j)
    return total.scale(Fraction(1, fd.k))


def raverage(g: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None) -> TruncatedSeries:
    holomorphic = g.variables_used() & {"z", "w"}
    if holomorphic:
        raise HolomorphicInputError(
            f"restricted averaging takes series in zbar, wbar only; found {sorted(holomorphic)}")
    return average(g, fd, order)


# ---------------- R-series tables ----------------

@dataclass
class RSeriesTable:
    """R(zbar^a wbar^b) for all (a, b) of weighted degree at most degree_bound."""

    k: int
    order: int
    degree_bound: int
    z_weight: int = 1
    w_weight: int = 2
    entries: Dict[Tuple[int, int], TruncatedSeries] = field(default_factory=dict)

    def __getitem__(self, key) -> TruncatedSeries:
        return self.entries[tuple(key)]

    def __contains__(self, key):
        return tuple(key) in self.entries

    def holomorphic_signature(self) -> VariableSignature:
        return VariableSignature.holomorphic(self.z_weight, self.w_weight)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "order": self.order,
            "degree_bound": self.degree_bound,
            "weights": {"z": self.z_weight, "w": self.w_weight},
            "entries": [{"a": a, "b": b, "series": dumps_series(s)}
                        for (a, b), s in sorted(self.entries.items())],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RSeriesTable":
        try:
            weights = data.get("weights", {})
            table = cls(int(data["k"]), int(data["order"]), int(data["degree_bound"]),
                        int(weights.get("z", 1)), int(weights.get("w", data["k"])))
            sig = table.holomorphic_signature()
            for item in data.get("entries", []):
                table.entries[(int(item["a"]), int(item["b"]))] = loads_series(item["series"], sig, table.order)
        except (KeyError, TypeError, AttributeError, ValueError, ZeroDivisionError) as e:
            raise RTableFormatError(f"malformed R-series table: {e!r}") from None
        return table

    def leading_term_violations(self, model: ModelHypersurface) -> List[Tuple[int, int]]:
        """Entries whose z = 0 part differs from conj(alpha_k)^b (w/alpha_0)^((a + k b)/k) or 0."""
        k = model.k
        a0, ak = model.alpha[0], model.alpha[-1]
        bad = []
        for (a, b), s in sorted(self.entries.items()):
            at_zero = {m: c for m, c in s.terms.items() if m[0] == 0}
            expected = {}
            if a % k == 0:
                n = a // k + b
                coeff = ak.conj() ** b * a0.inverse() ** n
                if coeff and s.signature.degree((0, n)) <= s.order:
                    expected[(0, n)] = coeff
            if at_zero != expected:
                bad.append((a, b))
        return bad


def r_table(fd: AnyFiberData, degree_bound: int, order: Optional[int] = None,
            jobs: int = DEFAULT_JOBS) -> RSeriesTable:
    N = fd.order if order is None else order
    fd = fd.at_order(N)
    sig = fd.signature
    zw, ww = sig.weight("z"), sig.weight("w")
    keys = [(a, b) for b in range(degree_bound // ww + 1)
            for a in range((degree_bound - b * ww) // zw + 1)]
    keys.sort(key=lambda ab: (ab[0] * zw + ab[1] * ww, ab))

    def entry(key):
        a, b = key
        return raverage(TruncatedSeries.monomial(sig, N, {"zbar": a, "wbar": b}), fd, N)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(entry, keys))
    else:
        values = [entry(key) for key in keys]
    table = RSeriesTable(fd.k, N, degree_bound, zw, ww, dict(zip(keys, values)))
    emit_log(f"[AVERAGE] R-table with {len(keys)} entries (degree <= {degree_bound}, order {N})")
    return table


# ---------------- Generating series ----------------

@dataclass
class GeneratingSeriesReport:
    order: int
    s_order: int
    agrees: bool
    mismatches: List[int] = field(default_factory=list)
    left: Dict[int, TruncatedSeries] = field(default_factory=dict)
    right: Dict[int, TruncatedSeries] = field(default_factory=dict)
    printed_form_agrees: Optional[bool] = None
    printed_form_mismatches: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "s_order": self.s_order,
            "status": "holds" if self.agrees else "fails",
            "mismatches": list(self.mismatches),
            "coefficients": [{"a": a, "series": dumps_series(self.left[a])} for a in sorted(self.left)],
            "printed_form_agrees": self.printed_form_agrees,
            "printed_form_mismatches": list(self.printed_form_mismatches),
        }


def _s_coefficients(series: TruncatedSeries, hol: VariableSignature, s_order: int,
                    order: int) -> Dict[int, TruncatedSeries]:
    groups = collect(series, ["s"], hol)
    zero = TruncatedSeries.zero(hol, order)
    return {a: groups.get((a,), zero).truncate(order) for a in range(s_order + 1)}


def _is_quadric(model) -> bool:
    return (isinstance(model, ModelHypersurface) and model.k == 2
            and model.alpha[0] == 1 and model.alpha[2] == 0)


def generating_series_check(fd: AnyFiberData, order: Optional[int] = None,
                            s_order: int = 8) -> GeneratingSeriesReport:
    """Compare sum_a R(zbar^a) s^a with (1/k) sum_a p_a s^a from the power-sum generating identity."""
    N = fd.order if order is None else order
    fd_n = fd.at_order(N)
    hol = fd_n.holomorphic
    zw = hol.weight("z")
    ext = hol.extend(("s",), (1,))
    inner = s_order * (zw + 1)
    full = fd.at_order(max(N, s_order * zw))

    numerator = TruncatedSeries.constant(ext, inner, full.k)
    denominator = TruncatedSeries.constant(ext, inner, 1)
    for m, e in enumerate(full.e, start=1):
        if m > s_order:
            break
        term = embed(e, ext, order=inner) * TruncatedSeries.monomial(ext, inner, {"s": m})
        sign = -1 if m % 2 else 1
        denominator = denominator + term.scale(sign)
        numerator = numerator + term.scale(sign * (full.k - m))
    generating = (numerator * invert_unit(denominator)).scale(Fraction(1, full.k))
    right = _s_coefficients(generating, hol, s_order, N)

    sig = fd_n.signature
    left = {a: raverage(TruncatedSeries.monomial(sig, N, {"zbar": a}), fd_n, N) for a in range(s_order + 1)}
    mismatches = [a for a in range(s_order + 1) if left[a] != right[a]]
    report = GeneratingSeriesReport(N, s_order, not mismatches, mismatches, left, right)

    if _is_quadric(fd.model):
        mu = fd.model.alpha[1] / 2
        wide = s_order + N
        z = TruncatedSeries.variable(ext, wide, "z")
        w = TruncatedSeries.variable(ext, wide, "w")
        s = TruncatedSeries.variable(ext, wide, "s")
        printed = (1 - z.scale(mu) + (z * s).scale(2 * mu)) * invert_unit(1 + (z * s).scale(2 * mu) - w)
        printed_coeffs = _s_coefficients(printed, hol, s_order, N)
        report.printed_form_mismatches = [a for a in range(s_order + 1) if printed_coeffs[a] != left[a]]
        report.printed_form_agrees = not report.printed_form_mismatches
        emit_log(f"[AVERAGE] Printed quadric generating function differs at s-powers "
                 f"{report.printed_form_mismatches or 'none'}")

    emit_log(f"[AVERAGE] Generating series check to s^{s_order}: "
             f"{'agrees' if report.agrees else 'mismatch at ' + str(mismatches)}")
    return report
