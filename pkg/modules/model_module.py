# Model Module
# Segre-nondegenerate model surfaces w = p(z, zbar), product-fiber models,
# their Segre fibers and standard defining equations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from modules.series_module import (
    GaussianRational,
    TruncatedSeries,
    VariableSignature,
    collect,
    embed,
    involution,
    parse_expression,
)
from modules.symm_module import elementary_from_power_sums, power_sums_from_elementary
from utilities.logger import emit_log


class DegenerateModelError(ValueError):
    pass


class ModelConfigError(ValueError):
    pass


class UnsupportedModelError(ValueError):
    pass


# ---------------- Model records ----------------

@dataclass(frozen=True)
class ModelHypersurface:
    """The model surface w = p(z, zbar) with p = sum_j alpha_j z^j zbar^(k-j)."""

    k: int
    alpha: Tuple[GaussianRational, ...]

    def __post_init__(self):
        if self.k < 2:
            raise ModelConfigError(f"Segre degree must be at least 2, got {self.k}")
        alpha = tuple(GaussianRational.coerce(a) for a in self.alpha)
        if len(alpha) != self.k + 1:
            raise ModelConfigError(f"degree {self.k} model needs {self.k + 1} coefficients, got {len(alpha)}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def quadric(cls, mu=Fraction(1, 2)):
        return cls(2, (1, 2 * GaussianRational.coerce(mu), 0))

    @classmethod
    def bishop(cls, lam=Fraction(1, 4)):
        lam = GaussianRational.coerce(lam)
        return cls(2, (lam, 1, lam))

    @classmethod
    def pure_power(cls, k: int):
        return cls(k, (1,) + (0,) * k)

    @property
    def z_weight(self) -> int:
        return 1

    @property
    def w_weight(self) -> int:
        return self.k

    @property
    def multiplicity(self) -> int:
        return self.k

    @property
    def name(self) -> str:
        return "hypersurface"

    def signature(self) -> VariableSignature:
        return VariableSignature.canonical(1, self.k)

    def holomorphic_signature(self) -> VariableSignature:
        return VariableSignature.holomorphic(1, self.k)

    def is_normalized(self) -> bool:
        return self.alpha[0] == 1 and self.alpha[-1] == 0

    def normalize(self) -> "ModelHypersurface":
        """Coefficients after w -> (w - alpha_k z^k)/alpha_0."""
        a0 = self.alpha[0]
        if not a0:
            raise DegenerateModelError("cannot normalize a model with alpha_0 = 0")
        inner = tuple(a / a0 for a in self.alpha[1:-1])
        return ModelHypersurface(self.k, (GaussianRational(1),) + inner + (GaussianRational(0),))

    def p_series(self, order: int) -> TruncatedSeries:
        sig = self.signature()
        k = self.k
        return TruncatedSeries(sig, order, {(j, 0, k - j, 0): a for j, a in enumerate(self.alpha)})

    def p_bar_series(self, order: int) -> TruncatedSeries:
        """pbar(zbar, z) = sum_j conj(alpha_j) zbar^j z^(k-j); the value of wbar on X."""
        sig = self.signature()
        k = self.k
        return TruncatedSeries(sig, order, {(k - j, 0, j, 0): a.conj() for j, a in enumerate(self.alpha)})

    def defining_functions(self, order: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
        sig = self.signature()
        w = TruncatedSeries.variable(sig, order, "w")
        wbar = TruncatedSeries.variable(sig, order, "wbar")
        return w - self.p_series(order), wbar - self.p_bar_series(order)

    def describe(self) -> str:
        return "w = " + str(self.p_series(self.k))


@dataclass(frozen=True)
class ProductFiberModel:
    """Model whose Segre fiber is {zeta^r = A(z, w)} x {omega^s = B(z, w)}."""

    name: str
    r: int
    a_text: str
    s: int
    b_text: str
    z_weight: int
    w_weight: int
    note: str = ""

    @property
    def multiplicity(self) -> int:
        return self.r * self.s

    @property
    def k(self) -> int:
        return self.multiplicity

    def signature(self) -> VariableSignature:
        return VariableSignature.canonical(self.z_weight, self.w_weight)

    def holomorphic_signature(self) -> VariableSignature:
        return VariableSignature.holomorphic(self.z_weight, self.w_weight)

    def a_series(self, order: int) -> TruncatedSeries:
        return parse_expression(self.a_text, self.holomorphic_signature(), order)

    def b_series(self, order: int) -> TruncatedSeries:
        return parse_expression(self.b_text, self.holomorphic_signature(), order)

    def describe(self) -> str:
        return f"{self.name}: zeta^{self.r} = {self.a_text}, omega^{self.s} = {self.b_text}"


# The fiber is read off z^3 = w^2 + wbar^2 and its conjugate; see DESIGN.md.
BUILTIN_PRODUCT_MODELS: Dict[str, ProductFiberModel] = {
    "silly-cubic": ProductFiberModel(
        name="silly-cubic", r=3, a_text="z^3", s=2, b_text="z^3 - w^2",
        z_weight=2, w_weight=3,
        note="z^3 = w^2 + wbar^2; fiber zeta^3 = z^3, omega^2 = z^3 - w^2",
    ),
}

Model = Union[ModelHypersurface, ProductFiberModel]


def segre_multiplicity(m: Model) -> int:
    return m.multiplicity


# ---------------- Fiber data ----------------

class FiberData:
    """Segre fiber of a hypersurface model, known up to weighted degree `order`.

    e[j-1] is the j-th elementary symmetric function of the fiber points zeta^1..zeta^k.
    Power sums are cached as they are requested.
    """

    def __init__(self, model: ModelHypersurface, order: int):
        a0 = model.alpha[0]
        if not a0:
            raise DegenerateModelError(f"alpha_0 = 0: the Segre fiber of {model.describe()} is not finite")
        self.model = model
        self.k = model.k
        self.order = order
        self.signature = model.signature()
        self.holomorphic = model.holomorphic_signature()
        self.fiber_signature = VariableSignature.fiber(1, model.k)

        k, hol = self.k, self.holomorphic
        e = []
        for j in range(1, k + 1):
            sign = -1 if j % 2 else 1
            terms = {(j, 0): model.alpha[j] / a0 * sign}
            if j == k:
                terms[(0, 1)] = GaussianRational(-sign) / a0
            e.append(TruncatedSeries(hol, order, terms))
        self.e: Tuple[TruncatedSeries, ...] = tuple(e)

        self._power_sums: List[TruncatedSeries] = []
        self._lock = threading.Lock()

    def at_order(self, order: int) -> "FiberData":
        return self if order == self.order else FiberData(self.model, order)

    @property
    def multiplicity(self) -> int:
        return self.k

    def omega(self) -> TruncatedSeries:
        """omega = pbar(zeta, z) in the fiber signature (z, w, zeta)."""
        k = self.k
        return TruncatedSeries(self.fiber_signature, self.order,
                               {(k - i, 0, i): a.conj() for i, a in enumerate(self.model.alpha)})

    def power_sums(self, m: int) -> List[TruncatedSeries]:
        """p_1..p_m of the fiber points."""
        with self._lock:
            if len(self._power_sums) < m:
                self._power_sums = power_sums_from_elementary(self.e, m)
            return self._power_sums[:m]

    def power_sum(self, n: int) -> TruncatedSeries:
        if n == 0:
            return TruncatedSeries.constant(self.holomorphic, self.order, self.k)
        return self.power_sums(n)[n - 1]

    def mixed_power_sum(self, a: int, b: int) -> TruncatedSeries:
        if a < 0 or b < 0:
            raise ValueError(f"mixed power sum needs non-negative exponents, got ({a}, {b})")
        fib = self.fiber_signature
        integrand = TruncatedSeries.monomial(fib, self.order, {"zeta": a}) * self.omega() ** b
        result = TruncatedSeries.zero(self.holomorphic, self.order)
        for (n,), coeff in collect(integrand, ["zeta"], self.holomorphic).items():
            result = result + coeff * self.power_sum(n)
        return result


class ProductFiberData:
    """Fiber data of a product model, given by closed-form mixed power sums."""

    def __init__(self, model: ProductFiberModel, order: int):
        self.model = model
        self.k = model.multiplicity
        self.order = order
        self.signature = model.signature()
        self.holomorphic = model.holomorphic_signature()
        self._e: Optional[Tuple[TruncatedSeries, ...]] = None
        self._lock = threading.Lock()

    def at_order(self, order: int) -> "ProductFiberData":
        return self if order == self.order else ProductFiberData(self.model, order)

    @property
    def multiplicity(self) -> int:
        return self.k

    @staticmethod
    def _root_power_sum(count: int, base: TruncatedSeries, n: int) -> TruncatedSeries:
        if n % count:
            return base.scale(0)
        return (base ** (n // count)).scale(count)

    def mixed_power_sum(self, a: int, b: int) -> TruncatedSeries:
        if a < 0 or b < 0:
            raise ValueError(f"mixed power sum needs non-negative exponents, got ({a}, {b})")
        m = self.model
        zeta_part = self._root_power_sum(m.r, m.a_series(self.order), a)
        omega_part = self._root_power_sum(m.s, m.b_series(self.order), b)
        return zeta_part * omega_part

    def power_sum(self, n: int) -> TruncatedSeries:
        return self.mixed_power_sum(n, 0)

    def power_sums(self, m: int) -> List[TruncatedSeries]:
        return [self.power_sum(n) for n in range(1, m + 1)]

    @property
    def e(self) -> Tuple[TruncatedSeries, ...]:
        with self._lock:
            if self._e is None:
                self._e = tuple(elementary_from_power_sums(self.power_sums(self.k)))
            return self._e


AnyFiberData = Union[FiberData, ProductFiberData]


def fiber_data(m: Model, order: int) -> AnyFiberData:
    if isinstance(m, ProductFiberModel):
        fd = ProductFiberData(m, order)
    else:
        fd = FiberData(m, order)
    emit_log(f"[MODEL] Fiber data for {m.describe()} (multiplicity {fd.k}, order {order})", level="debug")
    return fd


def mixed_power_sum(fd: AnyFiberData, a: int, b: int, order: Optional[int] = None) -> TruncatedSeries:
    if order is not None and order != fd.order:
        fd = fd.at_order(order)
    return fd.mixed_power_sum(a, b)


# ---------------- Standard defining equations ----------------

@dataclass
class StandardDefiningEquations:
    """Phi_gamma for |gamma| = k, keyed by gamma = (zbar exponent, wbar exponent) of the leading term."""

    k: int
    order: int
    equations: Dict[Tuple[int, int], TruncatedSeries] = field(default_factory=dict)
    barred: bool = True

    def __getitem__(self, gamma):
        return self.equations[tuple(gamma)]

    def __iter__(self):
        return iter(sorted(self.equations))

    def items(self):
        return [(gamma, self.equations[gamma]) for gamma in sorted(self.equations)]

    def conjugate_form(self) -> "StandardDefiningEquations":
        return StandardDefiningEquations(
            self.k, self.order,
            {gamma: involution(phi) for gamma, phi in self.equations.items()},
            barred=not self.barred,
        )


def standard_defining_equations(fd: AnyFiberData, order: Optional[int] = None) -> StandardDefiningEquations:
    """Coefficients of u^g1 v^g2 in prod_j (u zbar + v wbar - u zeta^j - v omega^j)."""
    N = fd.order if order is None else order
    fd = fd.at_order(N)
    k = fd.k
    sig = fd.signature
    zw, ww = sig.weight("z"), sig.weight("w")
    wu, wv = ww - zw + 1, 1
    ext = sig.extend(("u", "v"), (wu, wv))
    ext_order = N + k * max(wu, wv)

    T = (TruncatedSeries.monomial(ext, ext_order, {"u": 1, "zbar": 1})
         + TruncatedSeries.monomial(ext, ext_order, {"v": 1, "wbar": 1}))
    power_sums = []
    for n in range(1, k + 1):
        P = TruncatedSeries.zero(ext, ext_order)
        for a in range(n + 1):
            # S is exact up to degree N, which is all that survives the final truncation
            S = embed(fd.mixed_power_sum(a, n - a), ext, order=ext_order)
            P = P + S * TruncatedSeries.monomial(ext, ext_order, {"u": a, "v": n - a}, comb(n, a))
        power_sums.append(P)
    elementary = elementary_from_power_sums(power_sums)

    product = T ** k
    for m, E in enumerate(elementary, start=1):
        term = E * T ** (k - m)
        product = product - term if m % 2 else product + term

    equations = {}
    for (g1, g2), phi in collect(product, ["u", "v"], sig).items():
        if g1 + g2 == k:
            equations[(g1, g2)] = phi.truncate(N)
    for g1 in range(k + 1):
        equations.setdefault((g1, k - g1), TruncatedSeries.zero(sig, N))
    emit_log(f"[MODEL] Standard defining equations: {len(equations)} at order {N}", level="debug")
    return StandardDefiningEquations(k, N, equations)


# ---------------- Config files ----------------

def model_from_config(config: dict) -> Model:
    if not isinstance(config, dict):
        raise ModelConfigError("model config must be a JSON object")
    kind = config.get("kind")
    if kind == "product":
        name = config.get("name")
        if name not in BUILTIN_PRODUCT_MODELS:
            raise UnsupportedModelError(
                f"unknown product model {name!r}; built-in: {sorted(BUILTIN_PRODUCT_MODELS)}")
        return BUILTIN_PRODUCT_MODELS[name]
    if kind == "hypersurface":
        try:
            k = int(config["k"])
            alpha = tuple(GaussianRational.from_pair(pair) for pair in config["alpha"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise ModelConfigError(f"malformed hypersurface config: {e}") from None
        return ModelHypersurface(k, alpha)
    raise ModelConfigError(f"model kind must be 'hypersurface' or 'product', got {kind!r}")


def model_to_config(m: Model) -> dict:
    if isinstance(m, ProductFiberModel):
        return {"kind": "product", "name": m.name}
    return {"kind": "hypersurface", "k": m.k, "alpha": [a.to_pair() for a in m.alpha]}


def load_model_config(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as f:
        config = json.load(f)
    model = model_from_config(config)
    emit_log(f"[MODEL] Loaded {model.describe()} from {path}")
    return model


def require_hypersurface(m: Model, what: str) -> ModelHypersurface:
    if not isinstance(m, ModelHypersurface):
        raise UnsupportedModelError(f"{what} needs a model w = p(z, zbar); got {m.describe()}")
    return m
