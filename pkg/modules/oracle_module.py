# oracle_module.py
# Floating-point cross-checks: Segre fibers from numpy root finding, averaged numerically.

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from modules.averaging_module import average, reduce
from modules.model_module import AnyFiberData, FiberData, ProductFiberData, UnsupportedModelError
from modules.series_module import TruncatedSeries
from utilities.config import (
    ORACLE_ABS_FLOOR,
    ORACLE_DENOMINATOR,
    ORACLE_POINTS,
    ORACLE_RADIUS,
    ORACLE_SEED,
    ORACLE_TOLERANCE,
)
from utilities.logger import emit_log

Point = Tuple[complex, complex]


@dataclass
class OracleConfig:
    points: int = ORACLE_POINTS
    radius: Fraction = ORACLE_RADIUS       # |z0|, |w0| stay below this
    denominator: int = ORACLE_DENOMINATOR  # sample coordinates are multiples of 1/denominator
    tolerance: float = ORACLE_TOLERANCE    # relative
    abs_floor: float = ORACLE_ABS_FLOOR    # absolute, for values near zero
    seed: int = ORACLE_SEED


@dataclass
class OracleReport:
    label: str
    points: List[Point] = field(default_factory=list)
    exact: List[complex] = field(default_factory=list)
    numeric: List[complex] = field(default_factory=list)
    failures: List[int] = field(default_factory=list)
    max_error: float = 0.0

    @property
    def agrees(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "points": len(self.points),
            "agrees": self.agrees,
            "failures": list(self.failures),
            "max_error": self.max_error,
        }


# ---------- fibers ----------

def fiber_points(fd: AnyFiberData, z0: complex, w0: complex) -> List[Point]:
    """The k points (zeta, omega) of the Segre fiber over (z0, w0)."""
    if isinstance(fd, ProductFiberData):
        m = fd.model
        point = {"z": z0, "w": w0}
        zetas = np.roots([1] + [0] * (m.r - 1) + [-m.a_series(fd.order).evaluate(point)])
        omegas = np.roots([1] + [0] * (m.s - 1) + [-m.b_series(fd.order).evaluate(point)])
        return [(complex(zeta), complex(omega)) for zeta in zetas for omega in omegas]

    alpha = [a.to_complex() for a in fd.model.alpha]
    k = fd.k
    # alpha_0 zeta^k + alpha_1 z zeta^(k-1) + ... + alpha_k z^k - w0
    coeffs = [alpha[j] * z0 ** j for j in range(k + 1)]
    coeffs[-1] -= w0
    zetas = np.roots(coeffs)
    if len(zetas) != k:
        raise UnsupportedModelError(f"fiber over ({z0}, {w0}) has {len(zetas)} points, expected {k}")
    out = []
    for zeta in zetas:
        omega = sum(np.conj(alpha[i]) * zeta ** i * z0 ** (k - i) for i in range(k + 1))
        out.append((complex(zeta), complex(omega)))
    return out


def numeric_average(f: TruncatedSeries, fd: AnyFiberData, z0: complex, w0: complex) -> complex:
    values = [f.evaluate({"z": z0, "w": w0, "zbar": zeta, "wbar": omega})
              for zeta, omega in fiber_points(fd, z0, w0)]
    return complex(np.mean(values))


def numeric_mixed_power_sum(fd: AnyFiberData, a: int, b: int, z0: complex, w0: complex) -> complex:
    return complex(sum(zeta ** a * omega ** b for zeta, omega in fiber_points(fd, z0, w0)))


# ---------- sampling ----------

def _rational_coordinate(rng, bound: int, denominator: int) -> complex:
    re, im = rng.integers(-bound, bound + 1, size=2)
    return complex(float(Fraction(int(re), denominator)), float(Fraction(int(im), denominator)))


def sample_points(config: Optional[OracleConfig] = None) -> List[Point]:
    cfg = config or OracleConfig()
    rng = np.random.default_rng(cfg.seed)
    # each of re, im below radius/sqrt(2) keeps the modulus below radius
    bound = int(cfg.radius * cfg.denominator / Fraction(3, 2))
    return [(_rational_coordinate(rng, bound, cfg.denominator), _rational_coordinate(rng, bound, cfg.denominator))
            for _ in range(cfg.points)]


def real_trace_points(fd: AnyFiberData, config: Optional[OracleConfig] = None) -> List[Point]:
    """Points (z0, p(z0, conj z0)) on the real surface w = p(z, zbar)."""
    if not isinstance(fd, FiberData):
        raise UnsupportedModelError("real trace sampling needs a model w = p(z, zbar)")
    cfg = config or OracleConfig()
    alpha = [a.to_complex() for a in fd.model.alpha]
    k = fd.k
    out = []
    for z0, _ in sample_points(cfg):
        w0 = sum(alpha[j] * z0 ** j * np.conj(z0) ** (k - j) for j in range(k + 1))
        out.append((z0, complex(w0)))
    return out


# ---------- comparison ----------

def agrees(exact: complex, numeric: complex, config: Optional[OracleConfig] = None) -> bool:
    cfg = config or OracleConfig()
    scale = max(abs(exact), abs(numeric))
    return abs(exact - numeric) <= max(cfg.tolerance * scale, cfg.abs_floor)


def _compare(report: OracleReport, cfg: OracleConfig) -> OracleReport:
    for i, (e, n) in enumerate(zip(report.exact, report.numeric)):
        scale = max(abs(e), abs(n), cfg.abs_floor)
        report.max_error = max(report.max_error, abs(e - n) / scale)
        if not agrees(e, n, cfg):
            report.failures.append(i)
    emit_log(f"[ORACLE] {report.label}: {len(report.points) - len(report.failures)}/{len(report.points)} "
             f"points agree (max relative error {report.max_error:.2e})", level="debug")
    return report


def cross_check(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None,
                config: Optional[OracleConfig] = None, points: Optional[List[Point]] = None) -> OracleReport:
    """Exact A f against the numeric mean of f over fiber roots."""
    cfg = config or OracleConfig()
    N = fd.order if order is None else order
    avg = average(f, fd, N)
    report = OracleReport(label=f"average of {f}")
    for z0, w0 in points if points is not None else sample_points(cfg):
        report.points.append((z0, w0))
        report.exact.append(avg.evaluate({"z": z0, "w": w0}))
        report.numeric.append(numeric_average(f, fd, z0, w0))
    return _compare(report, cfg)


def check_reduction(f: TruncatedSeries, fd: AnyFiberData, order: Optional[int] = None,
                    config: Optional[OracleConfig] = None) -> OracleReport:
    """f and its reduced representative agree at every fiber point."""
    cfg = config or OracleConfig()
    rep = reduce(f, fd, order).as_series()
    report = OracleReport(label=f"reduction of {f}")
    for z0, w0 in sample_points(cfg):
        for zeta, omega in fiber_points(fd, z0, w0):
            report.points.append((z0, w0))
            report.exact.append(rep.evaluate({"z": z0, "w": w0, "zbar": zeta}))
            report.numeric.append(f.evaluate({"z": z0, "w": w0, "zbar": zeta, "wbar": omega}))
    return _compare(report, cfg)
