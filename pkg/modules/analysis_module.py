# Analysis Module
# Order-N decision procedures built on the averaging operator: holomorphic
# extension, equality on X, real-valuedness, flattening search, reconstruction

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import sympy

from modules.averaging_module import RSeriesTable, average, raverage, reduce
from modules.model_module import (
    AnyFiberData,
    ModelHypersurface,
    require_hypersurface,
)
from modules.series_module import (
    GaussianRational,
    TruncatedSeries,
    VariableSignature,
    dumps_series,
    embed,
    involution,
    loads_series,
)
from modules.symm_module import elementary_from_power_sums
from utilities.config import DEFAULT_JOBS
from utilities.logger import emit_log


class BelowDegreeError(ValueError):
    pass


class NotAModelTableError(ValueError):
    pass


class NotHolomorphicError(ValueError):
    pass


HOLDS = "holds"
FAILS = "fails"


# ---------------- Verdicts ----------------

@dataclass
class Verdict:
    """Outcome of an order-N check; on failure `ell` and `discrepancy` name the first failing power."""

    check: str
    status: str
    order: int
    ell: Optional[int] = None
    discrepancy: Optional[TruncatedSeries] = None
    extension: Optional[TruncatedSeries] = None
    discrepancies: Dict[int, TruncatedSeries] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> dict:
        data = {
            "check": self.check,
            "status": self.status,
            "order": self.order,
            "discrepancies": {str(ell): dumps_series(s) for ell, s in sorted(self.discrepancies.items())},
        }
        if self.ell is not None:
            data["witness"] = {"ell": self.ell, "discrepancy": dumps_series(self.discrepancy)}
        if self.extension is not None:
            data["extension"] = dumps_series(self.extension)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        witness = data.get("witness")
        return cls(
            check=data["check"],
            status=data["status"],
            order=int(data["order"]),
            ell=int(witness["ell"]) if witness else None,
            discrepancy=loads_series(witness["discrepancy"]) if witness else None,
            extension=loads_series(data["extension"]) if "extension" in data else None,
            discrepancies={int(ell): loads_series(s) for ell, s in data.get("discrepancies", {}).items()},
        )


def _run_powers(check: str, k: int, order: int, discrepancy: Callable[[int], TruncatedSeries],
                jobs: int) -> Verdict:
    ells = list(range(1, k + 1))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(discrepancy, ells))
    else:
        values = [discrepancy(ell) for ell in ells]
    found = dict(zip(ells, values))
    failing = [ell for ell in ells if not found[ell].is_zero()]
    if failing:
        ell = failing[0]
        verdict = Verdict(check, FAILS, order, ell, found[ell], discrepancies=found)
        emit_log(f"[ANALYSIS] {check} fails at ell = {ell} (order {order})")
    else:
        verdict = Verdict(check, HOLDS, order, discrepancies=found)
        emit_log(f"[ANALYSIS] {check} holds to order {order}")
    return verdict


def _ambient(f: TruncatedSeries, fd: AnyFiberData) -> TruncatedSeries:
    return f if f.signature == fd.signature else embed(f, fd.signature)


def _holomorphic(f: TruncatedSeries, fd: AnyFiberData) -> TruncatedSeries:
    anti = f.variables_used() - {"z", "w"}
    if anti:
        raise NotHolomorphicError(f"expected a series in z, w; found {sorted(anti)}")
    return f if f.signature == fd.holomorphic else embed(f, fd.holomorphic)


# ---------------- Single-power discrepancies ----------------

def holomorphic_discrepancy(f: TruncatedSeries, fd: AnyFiberData, ell: int, order: int) -> TruncatedSeries:
    f = _ambient(f, fd).truncate(order)
    return average(f ** ell, fd, order) - average(f, fd, order) ** ell


def equality_discrepancy(f: TruncatedSeries, g: TruncatedSeries, fd: AnyFiberData,
                         ell: int, order: int) -> TruncatedSeries:
    diff = (_ambient(f, fd) - _ambient(g, fd)).truncate(order)
    return average(diff ** ell, fd, order)


def reality_discrepancy(f: TruncatedSeries, fd: AnyFiberData, ell: int, order: int) -> TruncatedSeries:
    h = _holomorphic(f, fd).truncate(order)
    conj = involution(embed(h, fd.signature))
    return raverage(conj ** ell, fd, order) - h ** ell


# ---------------- Decision procedures ----------------

def is_holomorphic_restriction(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None,
                               jobs: int = DEFAULT_JOBS) -> Verdict:
    N = fd.order if order is None else order
    fd = fd.at_order(N)
    verdict = _run_powers("holomorphic-restriction", fd.k, N,
                          lambda ell: holomorphic_discrepancy(f, fd, ell, N), jobs)
    if verdict.holds:
        verdict.extension = average(_ambient(f, fd), fd, N)
    return verdict


def equal_on_X(f: TruncatedSeries, g: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None,
               jobs: int = DEFAULT_JOBS) -> Verdict:
    N = fd.order if order is None else order
    fd = fd.at_order(N)
    return _run_powers("equal-on-X", fd.k, N, lambda ell: equality_discrepancy(f, g, fd, ell, N), jobs)


def is_real_valued(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None,
                   jobs: int = DEFAULT_JOBS) -> Verdict:
    N = fd.order if order is None else order
    fd = fd.at_order(N)
    _holomorphic(f, fd)
    return _run_powers("real-valued", fd.k, N, lambda ell: reality_discrepancy(f, fd, ell, N), jobs)


# ---------------- Flattening ----------------

@dataclass
class ThetaCandidate:
    """Solution a z^k + b w of the degree-k condition; (cos t, sin t) is proportional to direction."""

    a: GaussianRational
    b: GaussianRational
    direction: Tuple[Fraction, Fraction]
    angle: Optional[float]
    generator: TruncatedSeries

    def to_dict(self) -> dict:
        return {
            "a": self.a.to_pair(),
            "b": self.b.to_pair(),
            "direction": [str(self.direction[0]), str(self.direction[1])],
            "angle": self.angle,
            "generator": str(self.generator),
        }


@dataclass
class FlatteningResult:
    degree_bound: int
    order: int
    theta_candidates: List[ThetaCandidate] = field(default_factory=list)
    linear_basis: List[TruncatedSeries] = field(default_factory=list)
    verified: List[TruncatedSeries] = field(default_factory=list)
    verdicts: List[Verdict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "order": self.order,
            "theta_candidates": [c.to_dict() for c in self.theta_candidates],
            "linear_basis": [dumps_series(f) for f in self.linear_basis],
            "verified": [dumps_series(f) for f in self.verified],
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def _q(x: Fraction) -> sympy.Rational:
    return sympy.Rational(x.numerator, x.denominator)


def _frac(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _monomials_of_degree(sig: VariableSignature, d: int) -> List[Tuple[int, int]]:
    zw, ww = sig.weight("z"), sig.weight("w")
    out = [((d - j * ww) // zw, j) for j in range(d // ww + 1) if (d - j * ww) % zw == 0]
    return sorted(out, key=sig.sort_key)


def _canonical_rows(vectors: List[sympy.Matrix]) -> List[List[sympy.Rational]]:
    if not vectors:
        return []
    stacked = sympy.Matrix.hstack(*vectors).T
    reduced, pivots = stacked.rref()
    return [list(reduced.row(i)) for i in range(len(pivots))]


def _series_from_real_vector(vec, monomials, sig, order) -> TruncatedSeries:
    n = len(monomials)
    terms = {}
    for i, mono in enumerate(monomials):
        c = GaussianRational(_frac(vec[i]), _frac(vec[n + i]))
        if c:
            terms[mono] = c
    return TruncatedSeries(sig, order, terms)


def _coefficient_equations(images: List[TruncatedSeries], monomials, targets) -> sympy.Matrix:
    """Rows Re/Im of sum_m conj(c_m) images[m] - sum_m c_m targets[m] = 0 in (Re c, Im c)."""
    support = sorted({mono for s in list(images) + list(targets) for mono in s.terms})
    n = len(monomials)
    rows = []
    for mono in support:
        re_row = [sympy.Integer(0)] * (2 * n)
        im_row = [sympy.Integer(0)] * (2 * n)
        for i in range(n):
            r = images[i].coefficient(mono)
            t = targets[i].coefficient(mono)
            # conj(c) r - c t with c = x + i y
            re_row[i] = _q(r.re - t.re)
            re_row[n + i] = _q(r.im + t.im)
            im_row[i] = _q(r.im - t.im)
            im_row[n + i] = _q(-r.re - t.re)
        rows.extend([re_row, im_row])
    if not rows:
        return sympy.zeros(0, 2 * n)
    return sympy.Matrix(rows)


def _theta_candidates(model: ModelHypersurface, hol: VariableSignature, order: int) -> List[ThetaCandidate]:
    k = model.k
    alpha = model.alpha
    rows = []
    for m in range(k + 1):
        # [m=k] a + b alpha_m - [m=0] conj(a) - conj(b) conj(alpha_(k-m)) = 0 in (Re a, Im a, Re b, Im b)
        am, ak = alpha[m], alpha[k - m]
        re_row = [Fraction(0)] * 4
        im_row = [Fraction(0)] * 4
        if m == k:
            re_row[0] += 1
            im_row[1] += 1
        if m == 0:
            re_row[0] -= 1
            im_row[1] += 1
        re_row[2] += am.re - ak.re
        re_row[3] += ak.im - am.im
        im_row[2] += am.im + ak.im
        im_row[3] += am.re + ak.re
        rows.extend([re_row, im_row])
    system = sympy.Matrix([[_q(x) for x in row] for row in rows])
    candidates = []
    for row in _canonical_rows(system.nullspace()):
        ra, ia, rb, ib = (_frac(x) for x in row)
        a, b = GaussianRational(ra, ia), GaussianRational(rb, ib)
        direction = (rb, -ib)
        angle = math.atan2(float(-ib), float(rb)) if b else None
        generator = TruncatedSeries(hol, order, {(k, 0): a, (0, 1): b})
        candidates.append(ThetaCandidate(a, b, direction, angle, generator))
    return candidates


def flatten_search(fd: AnyFiberData, degree_bound: int, order: Optional[int] = None,
                   jobs: int = DEFAULT_JOBS) -> FlatteningResult:
    """Holomorphic f of weighted degree 1..D with R(fbar) = f, kept only when real on X to order N.

    verified[i] is certified by verdicts[i], which always holds.
    """
    model = require_hypersurface(fd.model, "flatten-search")
    k = model.k
    if degree_bound < k:
        raise BelowDegreeError(f"degree bound {degree_bound} is below the Segre degree {k}")
    N = fd.order if order is None else order
    fd_d = fd.at_order(max(N, degree_bound))
    hol, sig = fd_d.holomorphic, fd_d.signature
    work = fd_d.order

    result = FlatteningResult(degree_bound, N)
    result.theta_candidates = _theta_candidates(model, hol, work)

    for d in range(1, degree_bound + 1):
        monomials = _monomials_of_degree(hol, d)
        if not monomials:
            continue
        targets = [TruncatedSeries(hol, work, {mono: 1}) for mono in monomials]
        bars = [TruncatedSeries(sig, work, {(0, 0) + mono: 1}) for mono in monomials]

        images = [raverage(bar, fd_d, work) for bar in bars]
        linear = _canonical_rows(_coefficient_equations(images, monomials, targets).nullspace())
        basis = [_series_from_real_vector(v, monomials, hol, work) for v in linear]
        result.linear_basis.extend(basis)
        if not basis:
            continue

        # f is real on X exactly when reduce(iota(f) - f) = 0; linear in the real span of `basis`
        residues = []
        for f in basis:
            rep = reduce(involution(embed(f, sig)) - embed(f, sig), fd_d, work)
            residues.append(rep.as_series())
        verify_rows = []
        support = sorted({mono for s in residues for mono in s.terms})
        for mono in support:
            verify_rows.append([_q(s.coefficient(mono).re) for s in residues])
            verify_rows.append([_q(s.coefficient(mono).im) for s in residues])
        if verify_rows:
            kernel = _canonical_rows(sympy.Matrix(verify_rows).nullspace())
        else:
            kernel = [[sympy.Integer(1) if i == j else sympy.Integer(0) for i in range(len(basis))]
                      for j in range(len(basis))]
        for row in kernel:
            f = TruncatedSeries.zero(hol, work)
            for t, b in zip(row, basis):
                if t != 0:
                    f = f + b.scale(_frac(t))
            result.verified.append(f)

    candidates, result.verified = result.verified, []
    for f in candidates:
        verdict = is_real_valued(f, fd, N, jobs)
        if verdict.holds:
            result.verified.append(f)
            result.verdicts.append(verdict)
        else:
            emit_log(f"[ANALYSIS] Dropped {f}: not real on X at ell = {verdict.ell}", level="debug")
    emit_log(f"[ANALYSIS] Flatten search to degree {degree_bound}: {len(result.linear_basis)} linear, "
             f"{len(result.verified)} verified, {len(result.theta_candidates)} theta candidates")
    return result


# ---------------- Reconstruction ----------------

def reconstruct_model(table: RSeriesTable, k: Optional[int] = None) -> ModelHypersurface:
    k = table.k if k is None else k
    if table.z_weight != 1 or table.w_weight != k:
        raise NotAModelTableError(f"table weights (z: {table.z_weight}, w: {table.w_weight}) "
                                  f"do not come from a degree-{k} model")
    if table.order < k:
        raise NotAModelTableError(f"table order {table.order} is below the Segre degree {k}")
    missing = [a for a in range(1, k + 1) if (a, 0) not in table]
    if missing:
        raise NotAModelTableError(f"table lacks R(zbar^a) for a in {missing}")

    power_sums = [table[(a, 0)].scale(k) for a in range(1, k + 1)]
    e = elementary_from_power_sums(power_sums)

    coeffs = []
    for j, ej in enumerate(e, start=1):
        allowed = {(j, 0)} | ({(0, 1)} if j == k else set())
        stray = set(ej.terms) - allowed
        if stray:
            raise NotAModelTableError(f"e_{j} = {ej} has terms outside the model fiber shape")
        coeffs.append(ej.coefficient((j, 0)))
    c_w = e[-1].coefficient((0, 1))
    if not c_w:
        raise NotAModelTableError(f"recovered e_{k} = {e[-1]} has no w term")

    a0 = GaussianRational(-1 if k % 2 == 0 else 1) / c_w
    alpha = [a0] + [a0 * c * (-1 if j % 2 else 1) for j, c in enumerate(coeffs, start=1)]
    model = ModelHypersurface(k, tuple(alpha))
    emit_log(f"[ANALYSIS] Reconstructed {model.describe()}")
    return model
