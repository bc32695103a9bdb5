"""Hamiltonian models of the coupled Painleve VI family and their fields.

Four model kinds are built from exact transcriptions:

* ``coupled-eta``   -- the four-dimensional coupled system with the extra
  singular point eta, two single-block summands plus a coupling term;
* ``coupled-limit`` -- its eta -> infinity degeneration;
* ``pvi-eta``       -- the single Painleve VI block with the eta parameter;
* ``pvi-limit``     -- the classical Painleve VI block.

The module also provides the second-order reduction of the single blocks,
the component-wise eta -> infinity limit of vector fields, and the
divisibility test behind the invariant-divisor tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .symkernel import (
    Polynomial, PolynomialInVars, RationalFunction, REGISTRY,
    exact_divide, is_polynomial, limit_at_infinity, rf,
)

RF = RationalFunction

COUPLED_PAIRS = (("q1", "p1"), ("q2", "p2"))
PVI_PAIRS = (("q1", "p1"),)

MODEL_KINDS = ("coupled-eta", "coupled-limit", "pvi-eta", "pvi-limit")

#: Coefficients of the parameter normalisation (sum = 1) per family arity.
NORMALIZATION_WEIGHTS = {
    7: (1, 1, 2, 2, 2, 1, 1),
    5: (1, 1, 2, 1, 1),
}


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterVector:
    """Parameter tuple a0..a6 (or a0..a4), symbolic or numeric entries."""

    entries: tuple[RF, ...]
    constrained: bool = False

    def __post_init__(self):
        if len(self.entries) not in NORMALIZATION_WEIGHTS:
            raise ModelError(f"parameter arity must be 5 or 7, got {len(self.entries)}")

    @staticmethod
    def symbolic(arity: int, constrained: bool = False) -> "ParameterVector":
        names = [f"a{i}" for i in range(arity)]
        entries = [RF.variable(n) for n in names]
        if constrained:
            weights = NORMALIZATION_WEIGHTS[arity]
            rest = RF.constant(1)
            for w, e in zip(weights[1:], entries[1:]):
                rest = rest - RF.constant(w) * e
            entries[0] = rest
        return ParameterVector(tuple(entries), constrained)

    @staticmethod
    def numeric(values: Sequence) -> "ParameterVector":
        return ParameterVector(tuple(rf(v) for v in values), constrained=False)

    @property
    def arity(self) -> int:
        return len(self.entries)

    def normalization_residual(self) -> RF:
        weights = NORMALIZATION_WEIGHTS[self.arity]
        total = RF.constant(-1)
        for w, e in zip(weights, self.entries):
            total = total + RF.constant(w) * e
        return total


def alpha_elimination(arity: int, eliminate: int = 0,
                      zeroed: Optional[int] = None) -> dict[str, RF]:
    """Substitution eliminating one parameter through the normalisation
    hyperplane; a parameter already pinned to zero contributes nothing."""
    weights = NORMALIZATION_WEIGHTS[arity]
    expr = RF.constant(1)
    for i, w in enumerate(weights):
        if i == eliminate or i == zeroed:
            continue
        expr = expr - RF.constant(w) * RF.variable(f"a{i}")
    return {f"a{eliminate}": expr / RF.constant(weights[eliminate])}


def equality_mode(f: RF, g: RF, arity: int) -> Optional[str]:
    """'exact' if f == g with free parameters, 'normalized' if only after
    eliminating a0 on the hyperplane, None otherwise."""
    if f.equals(g):
        return "exact"
    elim = alpha_elimination(arity)
    if f.substitute(elim).equals(g.substitute(elim)):
        return "normalized"
    return None


@dataclass(frozen=True)
class HamiltonianModel:
    kind: str
    hamiltonian: RF
    pairs: tuple[tuple[str, str], ...]
    params: ParameterVector

    @property
    def phase_variables(self) -> tuple[str, ...]:
        return tuple(v for pair in self.pairs for v in pair)

    def phase_polynomial_witness(self) -> Optional[PolynomialInVars]:
        return is_polynomial(self.hamiltonian, self.phase_variables)


# ---------------------------------------------------------------------------
# Hamiltonian construction
# ---------------------------------------------------------------------------

def _single_block_eta(q: RF, p: RF, b: Sequence[RF]) -> RF:
    """Painleve VI block with the extra regular-singular location eta.

    The product t(t-1)(t-eta) times the block is polynomial:
      q(q-1)(q-eta)(q-t) p^2
      + { b1 (t-eta) q(q-1) + 2 b2 q(q-1)(q-eta)
          + b3 (t-1) q(q-eta) + b4 t (q-1)(q-eta) } p
      + b2 { (b1+b2)(t-eta) + b2 (q-1) + b3 (t-1) + t b4 } q.
    """
    t = RF.variable("t")
    eta = RF.variable("eta")
    one = RF.one()
    _, b1, b2, b3, b4 = b
    bracket_p = (b1 * (t - eta) * q * (q - one)
                 + RF.constant(2) * b2 * q * (q - one) * (q - eta)
                 + b3 * (t - one) * q * (q - eta)
                 + b4 * t * (q - one) * (q - eta))
    bracket_c = ((b1 + b2) * (t - eta) + b2 * (q - one)
                 + b3 * (t - one) + t * b4)
    numerator = (q * (q - one) * (q - eta) * (q - t) * p * p
                 + bracket_p * p + b2 * bracket_c * q)
    return numerator / (t * (t - one) * (t - eta))


def _single_block_limit(q: RF, p: RF, d: Sequence[RF]) -> RF:
    """Classical Painleve VI block:
      [ p^2 (q-t)(q-1) q
        - { (d0-1)(q-1)q + d3 (q-t)q + d4 (q-t)(q-1) } p
        + d2 (d1+d2) q ] / (t(t-1)).
    """
    t = RF.variable("t")
    one = RF.one()
    d0, d1, d2, d3, d4 = d
    bracket = ((d0 - one) * (q - one) * q
               + d3 * (q - t) * q
               + d4 * (q - t) * (q - one))
    numerator = p * p * (q - t) * (q - one) * q - bracket * p + d2 * (d1 + d2) * q
    return numerator / (t * (t - one))


def build_hamiltonian(kind: str, params: Optional[ParameterVector] = None) -> HamiltonianModel:
    """Construct a model by kind; parameters default to free symbols a0..."""
    if kind in ("pvi-eta", "pvi-limit"):
        arity, pairs = 5, PVI_PAIRS
    elif kind in ("coupled-eta", "coupled-limit"):
        arity, pairs = 7, COUPLED_PAIRS
    else:
        raise ModelError(f"unknown model kind {kind!r}")
    if params is None:
        params = ParameterVector.symbolic(arity)
    if params.arity != arity:
        raise ModelError(f"{kind} needs {arity} parameter slots, got {params.arity}")
    a = params.entries
    q1, p1 = RF.variable("q1"), RF.variable("p1")
    two = RF.constant(2)
    if kind == "pvi-eta":
        h = _single_block_eta(q1, p1, a)
    elif kind == "pvi-limit":
        h = _single_block_limit(q1, p1, a)
    else:
        q2, p2 = RF.variable("q2"), RF.variable("p2")
        t, eta = RF.variable("t"), RF.variable("eta")
        one = RF.one()
        if kind == "coupled-eta":
            slots1 = (a[0], a[1], a[2], a[3] + two * a[4] + a[5], a[3] + a[6])
            slots2 = (a[0] + two * a[2] + a[3], a[1] + a[3], a[4], a[5], a[6])
            coupling = (two * (q1 - eta) * q2
                        * ((q1 - t) * p1 + a[2]) * ((q2 - one) * p2 + a[4])
                        / (t * (t - one) * (t - eta)))
            h = (_single_block_eta(q1, p1, slots1)
                 + _single_block_eta(q2, p2, slots2) + coupling)
        else:
            slots1 = (a[0], a[1], a[2], a[3] + two * a[4] + a[5], a[3] + a[6])
            slots2 = (a[0] + a[3], a[1] + two * a[2] + a[3], a[4], a[5], a[6])
            coupling = (two * (q1 - t) * p1 * q2 * ((q2 - one) * p2 + a[4])
                        / (t * (t - one)))
            h = (_single_block_limit(q1, p1, slots1)
                 + _single_block_limit(q2, p2, slots2) + coupling)
    return HamiltonianModel(kind, h, pairs, params)


def custom_model(expression: str) -> HamiltonianModel:
    """Model from a Hamiltonian in the text expression format."""
    h = rf(expression)
    names = h.variables()
    pairs = COUPLED_PAIRS if ({"q2", "p2"} & names) else PVI_PAIRS
    return HamiltonianModel("custom", h, pairs, ParameterVector.symbolic(7))


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorField:
    """Hamiltonian vector field: components keyed by phase variable, plus
    the independent variable t."""

    pairs: tuple[tuple[str, str], ...]
    components: dict[str, RF]
    kind: str = "custom"

    @property
    def phase_variables(self) -> tuple[str, ...]:
        return tuple(v for pair in self.pairs for v in pair)

    def substitute_parameters(self, bindings: dict[str, RF]) -> "VectorField":
        comps = {v: c.substitute(bindings) for v, c in self.components.items()}
        return VectorField(self.pairs, comps, self.kind)


def vector_field(model: HamiltonianModel) -> VectorField:
    comps: dict[str, RF] = {}
    for q, p in model.pairs:
        comps[q] = model.hamiltonian.diff(p)
        comps[p] = -model.hamiltonian.diff(q)
    return VectorField(model.pairs, comps, model.kind)


def apply_to_function(vf: VectorField, f: RF) -> RF:
    """Total t-derivative of f along the flow: sum v_i df/dx_i + df/dt."""
    total = f.diff("t")
    for var, comp in vf.components.items():
        df = f.diff(var)
        if not df.is_zero:
            total = total + comp * df
    return total


# ---------------------------------------------------------------------------
# Second-order reduction of the single blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarODE:
    """Expression for q'' as a rational function of q1, qd, t, eta, a0..a4."""

    kind: str
    expression: RF


def second_order_reduction(model: HamiltonianModel) -> ScalarODE:
    """Eliminate p from the (q, p) block: solve dq/dt = dH/dp for p and
    differentiate once more along the flow."""
    if model.kind not in ("pvi-eta", "pvi-limit", "custom"):
        raise ModelError("second-order reduction applies to single-block models")
    REGISTRY.register("qd")
    h = model.hamiltonian
    witness = is_polynomial(h, ["p1"])
    if witness is None:
        raise ModelError("Hamiltonian is not polynomial in p1")
    a2_coef = witness.coefficient((2,))
    if a2_coef.is_zero:
        raise ModelError("p^2 coefficient vanishes identically")
    qdot = h.diff("p1")
    pdot = -h.diff("q1")
    # second derivative along the flow, still in (q1, p1)
    qddot = qdot.diff("t") + qdot.diff("q1") * qdot + qdot.diff("p1") * pdot
    # invert the linear relation qd = 2*A2*p + A1
    a1_coef = witness.coefficient((1,))
    qd = RF.variable("qd")
    p_of_qd = (qd - a1_coef) / (RF.constant(2) * a2_coef)
    expr = qddot.substitute({"p1": p_of_qd})
    return ScalarODE(model.kind, expr)


def printed_second_order_ode(kind: str) -> RF:
    """The second-order scalar equation as printed, with q1 standing for q."""
    REGISTRY.register("qd")
    if kind == "pvi-eta":
        text = (
            "(1/2)*(1/q1 + 1/(q1-1) + 1/(q1-t) + 1/(q1-eta))*qd^2"
            " - (1/t + 1/(t-1) + 1/(q1-t) + 1/(t-eta))*qd"
            " + (q1*(q1-1)*(q1-t)*(q1-eta))/(t^2*(t-1)^2*(t-eta)^2)"
            " * ( (a1^2/2)*eta*(eta-1)*(t-eta)/(q1-eta)^2"
            "   + (a4^2/2)*eta*t/q1^2"
            "   + (a3^2/2)*(eta-1)*(1-t)/(q1-1)^2"
            "   + ((1-a0^2)/2)*t*(t-1)*(t-eta)/(q1-t)^2 )"
        )
    elif kind == "pvi-limit":
        text = (
            "(1/2)*(1/q1 + 1/(q1-1) + 1/(q1-t))*qd^2"
            " - (1/t + 1/(t-1) + 1/(q1-t))*qd"
            " + (q1*(q1-1)*(q1-t))/(t^2*(t-1)^2)"
            " * ( a1^2/2 - (a4^2/2)*t/q1^2 - (a3^2/2)*(1-t)/(q1-1)^2"
            "   + ((1-a0^2)/2)*t*(t-1)/(q1-t)^2 )"
        )
    else:
        raise ModelError(f"no printed scalar equation for kind {kind!r}")
    return rf(text)


@dataclass(frozen=True)
class OdeGroupReport:
    group: str
    matches: bool
    mode: Optional[str]
    difference: RF


def compare_reduction_with_printed(kind: str) -> list[OdeGroupReport]:
    """Group-by-group comparison of the derived q'' with the printed one.

    Groups are the coefficients of qd^2, qd and the qd-free remainder;
    mismatches are returned with their exact symbolic difference.
    """
    model = build_hamiltonian(kind)
    derived = second_order_reduction(model).expression
    printed = printed_second_order_ode(kind)
    d_wit = is_polynomial(derived, ["qd"])
    p_wit = is_polynomial(printed, ["qd"])
    if d_wit is None or p_wit is None:
        raise ModelError("scalar equation is not polynomial in qd")
    reports = []
    for power, label in ((2, "qd^2"), (1, "qd"), (0, "rest")):
        d_c = d_wit.coefficient((power,))
        p_c = p_wit.coefficient((power,))
        mode = equality_mode(d_c, p_c, 5)
        reports.append(OdeGroupReport(label, mode is not None, mode, d_c - p_c))
    return reports


# ---------------------------------------------------------------------------
# eta -> infinity degeneration
# ---------------------------------------------------------------------------

class EtaLimitDiverges(ModelError):
    def __init__(self, component: str, f: RF):
        num_deg = f.num.degree_in("eta")
        den_deg = f.den.degree_in("eta")
        leading = f.num.coefficient_of("eta", num_deg)
        super().__init__(
            f"component {component} diverges as eta -> infinity "
            f"(numerator degree {num_deg} > denominator degree {den_deg})")
        self.component = component
        self.leading_term = RationalFunction(leading)


def eta_limit(vf: VectorField) -> VectorField:
    """Component-wise limit as eta -> infinity."""
    comps: dict[str, RF] = {}
    for var, comp in vf.components.items():
        lim = limit_at_infinity(comp, "eta")
        if lim is None:
            raise EtaLimitDiverges(var, comp)
        comps[var] = lim
    kind = {"coupled-eta": "coupled-limit", "pvi-eta": "pvi-limit"}.get(vf.kind, vf.kind)
    return VectorField(vf.pairs, comps, kind)


@dataclass(frozen=True)
class LimitComparison:
    component: str
    mode: Optional[str]


def compare_eta_limit(kind: str) -> list[LimitComparison]:
    """Compare the limit of the eta-model field with the printed limit model.

    The comparison is attempted with free parameters first and then on the
    normalisation hyperplane; the passing mode is recorded per component.
    """
    source = {"coupled-eta": "coupled-limit", "pvi-eta": "pvi-limit"}
    if kind not in source:
        raise ModelError("eta limit comparison needs an eta-model kind")
    lim = eta_limit(vector_field(build_hamiltonian(kind)))
    target = vector_field(build_hamiltonian(source[kind]))
    arity = 7 if kind.startswith("coupled") else 5
    out = []
    for var in lim.phase_variables:
        mode = equality_mode(lim.components[var], target.components[var], arity)
        out.append(LimitComparison(var, mode))
    return out


# ---------------------------------------------------------------------------
# Invariant divisors
# ---------------------------------------------------------------------------

#: parameter index -> divisor polynomial, per model kind
INVARIANT_DIVISORS = {
    "coupled-eta": {
        0: "q1-t", 1: "q1-eta", 2: "p1", 3: "q1-q2",
        4: "p2", 5: "q2-1", 6: "q2",
    },
    "pvi-eta": {
        0: "q1-t", 1: "q1-eta", 2: "p1", 3: "q1-1", 4: "q1",
    },
}


@dataclass(frozen=True)
class DivisorCheck:
    parameter: int
    divisor: str
    passed: bool
    mode: Optional[str] = None
    witness: Optional[str] = None


def _divisible_along_flow(vf: VectorField, divisor: RF,
                          phase_vars: set[str]) -> tuple[bool, Optional[str]]:
    derivative = apply_to_function(vf, divisor)
    if derivative.den.variables() & phase_vars:
        return False, "derivative has a phase-variable denominator"
    if exact_divide(derivative.num, divisor.num * divisor.den) is None:
        return False, "numerator not divisible by the divisor"
    return True, None


def check_invariant_divisor(vf: VectorField, divisor: RF,
                            zeroed: Optional[int],
                            arity: int = 7) -> DivisorCheck:
    """Divisibility form of divisor invariance: with a_zeroed set to zero,
    the derivative of the divisor along the flow must be divisible by it.

    Tried with free parameters first, then on the normalisation hyperplane;
    the passing mode is recorded.
    """
    work = vf
    if zeroed is not None:
        work = vf.substitute_parameters({f"a{zeroed}": RF.zero()})
    phase_vars = set(vf.phase_variables)
    index = zeroed if zeroed is not None else -1
    label = f"a{zeroed}" if zeroed is not None else "free"
    ok, witness = _divisible_along_flow(work, divisor, phase_vars)
    if ok:
        return DivisorCheck(index, label, True, mode="exact")
    eliminate = 0 if zeroed != 0 else 1
    elim = alpha_elimination(arity, eliminate=eliminate, zeroed=zeroed)
    constrained = work.substitute_parameters(elim)
    ok, witness2 = _divisible_along_flow(constrained, divisor.substitute(elim),
                                         phase_vars)
    if ok:
        return DivisorCheck(index, label, True, mode="normalized")
    return DivisorCheck(index, label, False, witness=witness2 or witness)


def divisor_table_checks(kind: str) -> list[DivisorCheck]:
    table = INVARIANT_DIVISORS[kind]
    arity = 7 if kind.startswith("coupled") else 5
    vf = vector_field(build_hamiltonian(kind))
    results = []
    for index, text in sorted(table.items()):
        check = check_invariant_divisor(vf, rf(text), index, arity)
        results.append(DivisorCheck(index, text, check.passed, check.mode,
                                    check.witness))
    return results
