"""Backlund transformations as composable birational symplectic maps.

Two generator families are transcribed: the seven reflections s0..s6 plus
three automorphisms pi1..pi3 acting on the coupled system (family "D6"),
and the five reflections s0..s4 plus pi1..pi3 acting on the single block
(family "D4").  Each map carries its phase-space action, its action on the
base variables (t, eta) and an affine integer action on the parameters.

Verification helpers check symplecticity of the phase Jacobian, the
equivariance of the flow under each map, and the Coxeter relations read
off the Dynkin diagram.  Exact composition is attempted within a monomial
budget; past the budget, relations fall back to exact-rational evaluation
at random points and are flagged as probabilistic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .models import (
    HamiltonianModel, VectorField, alpha_elimination, vector_field,
    INVARIANT_DIVISORS,
)
from .symkernel import (
    RationalFunction, SingularEvaluation, format_expression, rf,
)

RF = RationalFunction

DEFAULT_SIZE_BUDGET = 200_000

D6_PHASE = ("q1", "p1", "q2", "p2")
D4_PHASE = ("q1", "p1")

#: Dynkin diagram adjacency (undirected edges by node index).
DYNKIN_EDGES = {
    "D6": frozenset({frozenset(e) for e in ((0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (4, 6))}),
    "D4": frozenset({frozenset(e) for e in ((0, 2), (1, 2), (2, 3), (2, 4))}),
}

NORMALIZATION_ROW = {"D6": (1, 1, 2, 2, 2, 1, 1), "D4": (1, 1, 2, 1, 1)}


class WeylError(ValueError):
    pass


class SizeBudgetExceeded(WeylError):
    pass


class MapPole(WeylError):
    """The state sits on a pole of the map; carries the vanishing denominator."""

    def __init__(self, map_name: str, variable: str, denominator: str):
        super().__init__(f"{map_name}: denominator {denominator} vanishes "
                         f"while mapping {variable}")
        self.denominator = denominator


@dataclass(frozen=True)
class DynkinGraph:
    family: str
    nodes: tuple[int, ...]
    edges: frozenset

    @staticmethod
    def of(family: str) -> "DynkinGraph":
        n = 7 if family == "D6" else 5
        return DynkinGraph(family, tuple(range(n)), DYNKIN_EDGES[family])

    def adjacent(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.edges


@dataclass(frozen=True)
class BirationalSymplecticMap:
    name: str
    family: str
    phase: dict[str, RF]
    t_image: RF
    eta_image: RF
    alpha_matrix: tuple[tuple[int, ...], ...]
    alpha_offset: tuple[int, ...]

    @property
    def phase_variables(self) -> tuple[str, ...]:
        return D6_PHASE if self.family == "D6" else D4_PHASE

    @property
    def arity(self) -> int:
        return len(self.alpha_matrix)

    def alpha_expressions(self) -> tuple[RF, ...]:
        """Parameter images as rational functions of the symbols a0..a6."""
        out = []
        for row, off in zip(self.alpha_matrix, self.alpha_offset):
            expr = RF.constant(off)
            for j, coef in enumerate(row):
                if coef:
                    expr = expr + RF.constant(coef) * RF.variable(f"a{j}")
            out.append(expr)
        return tuple(out)

    def image_bindings(self) -> dict[str, RF]:
        """Substitution map sending every source symbol to its image."""
        bindings = dict(self.phase)
        bindings["t"] = self.t_image
        bindings["eta"] = self.eta_image
        for i, expr in enumerate(self.alpha_expressions()):
            bindings[f"a{i}"] = expr
        return bindings

    def size(self) -> int:
        total = 0
        for comp in self.phase.values():
            total += len(comp.num.terms) + len(comp.den.terms)
        return total

    def is_identity(self) -> bool:
        if self.alpha_offset != (0,) * self.arity:
            return False
        for i, row in enumerate(self.alpha_matrix):
            if any(c != (1 if j == i else 0) for j, c in enumerate(row)):
                return False
        if not self.t_image.equals(RF.variable("t")):
            return False
        if not self.eta_image.equals(RF.variable("eta")):
            return False
        return all(self.phase[v].equals(RF.variable(v)) for v in self.phase_variables)

    def preserves_normalization(self) -> bool:
        weights = NORMALIZATION_ROW[self.family]
        if sum(w * o for w, o in zip(weights, self.alpha_offset)) != 0:
            return False
        for j in range(self.arity):
            col = sum(weights[i] * self.alpha_matrix[i][j] for i in range(self.arity))
            if col != weights[j]:
                return False
        return True


# ---------------------------------------------------------------------------
# Generator transcription tables
# ---------------------------------------------------------------------------

_D6_TABLE: dict[str, tuple[dict[str, str], str, str, tuple[str, ...]]] = {
    "s0": ({"p1": "p1 - a0/(q1-t)"}, "t", "eta",
           ("-a0", "a1", "a2+a0", "a3", "a4", "a5", "a6")),
    "s1": ({"p1": "p1 - a1/(q1-eta)"}, "t", "eta",
           ("a0", "-a1", "a2+a1", "a3", "a4", "a5", "a6")),
    "s2": ({"q1": "q1 + a2/p1"}, "t", "eta",
           ("a0+a2", "a1+a2", "-a2", "a3+a2", "a4", "a5", "a6")),
    "s3": ({"p1": "p1 - a3/(q1-q2)", "p2": "p2 + a3/(q1-q2)"}, "t", "eta",
           ("a0", "a1", "a2+a3", "-a3", "a4+a3", "a5", "a6")),
    "s4": ({"q2": "q2 + a4/p2"}, "t", "eta",
           ("a0", "a1", "a2", "a3+a4", "-a4", "a5+a4", "a6+a4")),
    "s5": ({"p2": "p2 - a5/(q2-1)"}, "t", "eta",
           ("a0", "a1", "a2", "a3", "a4+a5", "-a5", "a6")),
    "s6": ({"p2": "p2 - a6/q2"}, "t", "eta",
           ("a0", "a1", "a2", "a3", "a4+a6", "a5", "-a6")),
    "pi1": ({
        "q1": "((t-1)*q1)/(t - q1 - eta*t + eta*t*q1)",
        "p1": "((-t + q1 + eta*t - eta*t*q1)"
              "*(t*p1 - q1*p1 - a2 - eta*t*p1 + eta*t*q1*p1 + a2*eta*t))"
              "/(t*(t-1)*(eta-1))",
        "q2": "((t-1)*q2)/(t - q2 - eta*t + eta*t*q2)",
        "p2": "((-t + q2 + eta*t - eta*t*q2)"
              "*(t*p2 - q2*p2 - a4 - eta*t*p2 + eta*t*q2*p2 + a4*eta*t))"
              "/(t*(t-1)*(eta-1))",
    }, "(eta*(t-1))/(t - eta - eta*t + eta^2*t)", "1/eta",
        ("a1", "a0", "a2", "a3", "a4", "a5", "a6")),
    "pi2": ({"q1": "1-q1", "p1": "-p1", "q2": "1-q2", "p2": "-p2"},
            "1-t", "1-eta",
            ("a0", "a1", "a2", "a3", "a4", "a6", "a5")),
    "pi3": ({
        "q1": "t*(q2-eta)/(t*(q2-eta) + eta^2*(t-q2))",
        "p1": "((t*(q2-eta) + eta^2*(t-q2))"
              "*(t*(q2-eta)*p2 + a4*(t-eta^2) + eta^2*(t-q2)*p2))"
              "/(t*eta^2*(t-eta))",
        "q2": "t*(q1-eta)/(t*(q1-eta) + eta^2*(t-q1))",
        "p2": "((t*(q1-eta) + eta^2*(t-q1))"
              "*(t*(q1-eta)*p1 + a2*(t-eta^2) + eta^2*(t-q1)*p1))"
              "/(t*eta^2*(t-eta))",
    }, "-((eta-1)*t)/(t - eta*t + eta^2*(t-1))", "-1/(eta-1)",
        ("a5", "a6", "a4", "a3", "a2", "a0", "a1")),
}

# The s0 line of the single-block family is printed with a stray third phase
# entry; arity forces the two-component transcription used here.
_D4_TABLE: dict[str, tuple[dict[str, str], str, str, tuple[str, ...]]] = {
    "s0": ({"p1": "p1 - a0/(q1-t)"}, "t", "eta",
           ("-a0", "a1", "a2+a0", "a3", "a4")),
    "s1": ({"p1": "p1 - a1/(q1-eta)"}, "t", "eta",
           ("a0", "-a1", "a2+a1", "a3", "a4")),
    "s2": ({"q1": "q1 + a2/p1"}, "t", "eta",
           ("a0+a2", "a1+a2", "-a2", "a3+a2", "a4+a2")),
    "s3": ({"p1": "p1 - a3/(q1-1)"}, "t", "eta",
           ("a0", "a1", "a2+a3", "-a3", "a4")),
    "s4": ({"p1": "p1 - a4/q1"}, "t", "eta",
           ("a0", "a1", "a2+a4", "a3", "-a4")),
    "pi1": ({"q1": "1-q1", "p1": "-p1"}, "1-t", "1-eta",
            ("a0", "a1", "a2", "a4", "a3")),
    "pi2": ({"q1": "(eta-q1)/(eta-1)", "p1": "(1-eta)*p1"},
            "(eta-t)/(eta-1)", "eta/(eta-1)",
            ("a0", "a4", "a2", "a3", "a1")),
    "pi3": ({
        "q1": "((eta-1)^2*(q1-t))/((eta*(t-2)+1)*q1 + (eta-eta^2-1)*t + eta^2)",
        "p1": "(1-t)*p1"
              " + ((q1-1)*((q1-1)*p1+a2)*(eta*(t-2)+1))/((eta-1)^2*(t-1))"
              " + ((q1-t)*((q1-t)*p1+a2)*(eta*(t-2)+1))/(eta*(t-1)*(t-eta))",
    }, "((eta-1)^2*t)/(t - eta*t + eta^2*(t-1))", "1-eta",
        ("a4", "a1", "a2", "a3", "a0")),
}

GENERATOR_NAMES = {"D6": tuple(_D6_TABLE), "D4": tuple(_D4_TABLE)}


def _linear_action(exprs: Sequence[str], arity: int):
    matrix = []
    offset = []
    zero_point = {f"a{j}": Fraction(0) for j in range(arity)}
    for text in exprs:
        e = rf(text)
        row = []
        for j in range(arity):
            c = e.diff(f"a{j}")
            if not c.is_constant:
                raise WeylError(f"parameter action {text!r} is not linear")
            value = c.constant_value()
            if value.denominator != 1:
                raise WeylError(f"parameter action {text!r} is not integral")
            row.append(int(value))
        const = e.evaluate(zero_point)
        if const.denominator != 1:
            raise WeylError(f"parameter offset in {text!r} is not integral")
        matrix.append(tuple(row))
        offset.append(int(const))
    return tuple(matrix), tuple(offset)


def _build(family: str, name: str) -> BirationalSymplecticMap:
    table = _D6_TABLE if family == "D6" else _D4_TABLE
    if name not in table:
        raise WeylError(f"unknown generator {name!r} for family {family}")
    phase_texts, t_text, eta_text, alpha_texts = table[name]
    arity = 7 if family == "D6" else 5
    phase_vars = D6_PHASE if family == "D6" else D4_PHASE
    phase = {v: rf(phase_texts.get(v, v)) for v in phase_vars}
    matrix, offset = _linear_action(alpha_texts, arity)
    return BirationalSymplecticMap(name, family, phase, rf(t_text), rf(eta_text),
                                   matrix, offset)


_CACHE: dict[tuple[str, str], BirationalSymplecticMap] = {}


def generator(family: str, name: str) -> BirationalSymplecticMap:
    key = (family, name)
    if key not in _CACHE:
        _CACHE[key] = _build(family, name)
    return _CACHE[key]


def generators(family: str) -> list[BirationalSymplecticMap]:
    return [generator(family, n) for n in GENERATOR_NAMES[family]]


def identity_map(family: str) -> BirationalSymplecticMap:
    arity = 7 if family == "D6" else 5
    phase_vars = D6_PHASE if family == "D6" else D4_PHASE
    return BirationalSymplecticMap(
        "id", family, {v: RF.variable(v) for v in phase_vars},
        RF.variable("t"), RF.variable("eta"),
        tuple(tuple(1 if i == j else 0 for j in range(arity)) for i in range(arity)),
        (0,) * arity)


# ---------------------------------------------------------------------------
# States and application
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class State:
    """Exact rational phase-space point with base values and parameters."""

    phase: dict[str, Fraction]
    t: Fraction
    eta: Fraction
    alpha: tuple[Fraction, ...]

    def assignment(self) -> dict[str, Fraction]:
        out = dict(self.phase)
        out["t"] = self.t
        out["eta"] = self.eta
        for i, a in enumerate(self.alpha):
            out[f"a{i}"] = a
        return out


def random_state(family: str, rng: random.Random, bound: int = 100,
                 constrained: bool = False) -> State:
    phase_vars = D6_PHASE if family == "D6" else D4_PHASE
    arity = 7 if family == "D6" else 5
    weights = NORMALIZATION_ROW[family]

    def draw() -> Fraction:
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))

    phase = {v: draw() for v in phase_vars}
    alpha = [draw() for _ in range(arity)]
    if constrained:
        rest = sum(w * a for w, a in zip(weights[1:], alpha[1:]))
        alpha[0] = (1 - rest) / weights[0]
    return State(phase, draw(), draw(), tuple(alpha))


def apply_map(m: BirationalSymplecticMap, state: State) -> State:
    """Numeric image of a state; poles raise MapPole with the denominator."""
    assignment = state.assignment()
    new_phase = {}
    for var, comp in m.phase.items():
        try:
            new_phase[var] = comp.evaluate(assignment)
        except SingularEvaluation:
            raise MapPole(m.name, var, format_expression(
                RF.from_polynomial(comp.den))) from None
    try:
        new_t = m.t_image.evaluate(assignment)
        new_eta = m.eta_image.evaluate(assignment)
    except SingularEvaluation:
        raise MapPole(m.name, "t", format_expression(
            RF.from_polynomial(m.t_image.den))) from None
    alpha = tuple(
        sum((Fraction(c) * a for c, a in zip(row, state.alpha)), Fraction(off))
        for row, off in zip(m.alpha_matrix, m.alpha_offset))
    return State(new_phase, new_t, new_eta, alpha)


def apply_word(maps: Sequence[BirationalSymplecticMap], state: State) -> State:
    for m in maps:
        state = apply_map(m, state)
    return state


def compose(first: BirationalSymplecticMap, second: BirationalSymplecticMap,
            budget: int = DEFAULT_SIZE_BUDGET) -> BirationalSymplecticMap:
    """Map applying ``first`` and then ``second``.

    Raises SizeBudgetExceeded when an intermediate component grows past the
    monomial budget; callers then fall back to random-point verification.
    """
    if first.family != second.family:
        raise WeylError("cannot compose maps of different families")
    bindings = first.image_bindings()
    phase = {}
    for var, comp in second.phase.items():
        image = comp.substitute(bindings)
        if len(image.num.terms) + len(image.den.terms) > budget:
            raise SizeBudgetExceeded(f"{first.name};{second.name} at {var}")
        phase[var] = image
    t_image = second.t_image.substitute(bindings)
    eta_image = second.eta_image.substitute(bindings)
    n = first.arity
    matrix = tuple(
        tuple(sum(second.alpha_matrix[i][k] * first.alpha_matrix[k][j]
                  for k in range(n)) for j in range(n))
        for i in range(n))
    offset = tuple(
        sum(second.alpha_matrix[i][k] * first.alpha_offset[k] for k in range(n))
        + second.alpha_offset[i]
        for i in range(n))
    return BirationalSymplecticMap(f"{first.name};{second.name}", first.family,
                                   phase, t_image, eta_image, matrix, offset)


def compose_word(family: str, names: Sequence[str],
                 budget: int = DEFAULT_SIZE_BUDGET) -> BirationalSymplecticMap:
    result = identity_map(family)
    for name in names:
        result = compose(result, generator(family, name), budget)
    return result


def parse_word(text: str) -> list[str]:
    return text.split()


def maps_equal_symbolic(a: BirationalSymplecticMap, b: BirationalSymplecticMap) -> bool:
    if a.alpha_matrix != b.alpha_matrix or a.alpha_offset != b.alpha_offset:
        return False
    if not a.t_image.equals(b.t_image) or not a.eta_image.equals(b.eta_image):
        return False
    return all(a.phase[v].equals(b.phase[v]) for v in a.phase_variables)


def maps_equal_numeric(a: BirationalSymplecticMap, b: BirationalSymplecticMap,
                       rng: random.Random, points: int = 20,
                       bound: int = 100) -> bool:
    if a.alpha_matrix != b.alpha_matrix or a.alpha_offset != b.alpha_offset:
        return False
    hits = 0
    attempts = 0
    while hits < points and attempts < 60 * points:
        attempts += 1
        state = random_state(a.family, rng, bound)
        try:
            left = apply_map(a, state)
            right = apply_map(b, state)
        except MapPole:
            continue
        if left.phase != right.phase or left.t != right.t or left.eta != right.eta:
            return False
        hits += 1
    if hits < points:
        raise SingularEvaluation("not enough pole-free states")
    return True


def words_equal_numeric(family: str, word_a: Sequence[str], word_b: Sequence[str],
                        rng: random.Random, points: int = 20,
                        bound: int = 100) -> bool:
    maps_a = [generator(family, n) for n in word_a]
    maps_b = [generator(family, n) for n in word_b]
    hits = 0
    attempts = 0
    while hits < points and attempts < 60 * points:
        attempts += 1
        state = random_state(family, rng, bound)
        try:
            left = apply_word(maps_a, state)
            right = apply_word(maps_b, state)
        except MapPole:
            continue
        if (left.phase != right.phase or left.t != right.t
                or left.eta != right.eta or left.alpha != right.alpha):
            return False
        hits += 1
    if hits < points:
        raise SingularEvaluation("not enough pole-free states")
    return True


# ---------------------------------------------------------------------------
# Symplecticity
# ---------------------------------------------------------------------------

def _omega(n_pairs: int) -> list[list[RF]]:
    size = 2 * n_pairs
    out = linalg.zero_matrix(size, size)
    for k in range(n_pairs):
        out[2 * k][2 * k + 1] = RF.one()
        out[2 * k + 1][2 * k] = -RF.one()
    return out


@dataclass(frozen=True)
class SymplecticCheck:
    name: str
    passed: bool
    witness: Optional[str] = None


def check_symplectic(m: BirationalSymplecticMap) -> SymplecticCheck:
    """Exact test of J^T Omega J = Omega for the phase Jacobian."""
    phase_vars = m.phase_variables
    jac = [[m.phase[row].diff(col) for col in phase_vars] for row in phase_vars]
    omega = _omega(len(phase_vars) // 2)
    lhs = linalg.mat_mul(linalg.mat_mul(linalg.transpose(jac), omega), jac)
    defects = []
    for i in range(len(phase_vars)):
        for j in range(len(phase_vars)):
            diff = lhs[i][j] - omega[i][j]
            if not diff.is_zero:
                defects.append(f"({phase_vars[i]},{phase_vars[j]}): "
                               f"{format_expression(diff)}")
    if defects:
        return SymplecticCheck(m.name, False, "; ".join(defects))
    return SymplecticCheck(m.name, True)


# ---------------------------------------------------------------------------
# Equivariance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivarianceCheck:
    name: str
    passed: bool
    method: str                 # symbolic | probabilistic
    mode: Optional[str] = None  # exact | normalized
    witness: Optional[str] = None


def _equivariance_residuals(m: BirationalSymplecticMap,
                            vf: VectorField) -> dict[str, tuple[RF, RF]]:
    """Per-slot (lhs, rhs) of the chain-rule identity: the t-derivative of
    each transformed coordinate along the flow must equal dt'/dt times the
    transformed field at the image point."""
    bindings = m.image_bindings()
    dt_factor = m.t_image.diff("t")
    out = {}
    for slot in m.phase_variables:
        x_expr = m.phase[slot]
        lhs = x_expr.diff("t")
        for var in m.phase_variables:
            dx = x_expr.diff(var)
            if not dx.is_zero:
                lhs = lhs + dx * vf.components[var]
        rhs = dt_factor * vf.components[slot].substitute(bindings)
        out[slot] = (lhs, rhs)
    return out


def check_equivariance(m: BirationalSymplecticMap, model: HamiltonianModel,
                       rng: Optional[random.Random] = None,
                       points: int = 20) -> EquivarianceCheck:
    """Exact check for base-fixing generators, random-point exact-rational
    check for the pi maps (whose symbolic images are large)."""
    vf = vector_field(model)
    arity = m.arity
    base_fixing = (m.t_image.equals(RF.variable("t"))
                   and m.eta_image.equals(RF.variable("eta")))
    if base_fixing:
        residuals = _equivariance_residuals(m, vf)
        modes = []
        for slot, (lhs, rhs) in residuals.items():
            diff = lhs - rhs
            if diff.is_zero:
                modes.append("exact")
                continue
            elim = alpha_elimination(arity)
            if diff.substitute(elim).is_zero:
                modes.append("normalized")
            else:
                return EquivarianceCheck(m.name, False, "symbolic",
                                         witness=f"slot {slot} residual non-zero")
        mode = "exact" if all(x == "exact" for x in modes) else "normalized"
        return EquivarianceCheck(m.name, True, "symbolic", mode)
    # pi maps: evaluate the chain-rule identity pointwise instead of
    # composing symbolically -- the field is re-evaluated at the numeric
    # image point, which keeps every evaluation small and exact
    rng = rng or random.Random(0)
    phase_vars = m.phase_variables
    derivatives = {slot: {var: m.phase[slot].diff(var) for var in phase_vars}
                   for slot in phase_vars}
    t_derivatives = {slot: m.phase[slot].diff("t") for slot in phase_vars}
    dt_factor = m.t_image.diff("t")

    def run(constrained: bool) -> Optional[bool]:
        hits = 0
        attempts = 0
        while hits < points and attempts < 80 * points:
            attempts += 1
            state = random_state(m.family, rng, bound=60, constrained=constrained)
            source = state.assignment()
            try:
                image = apply_map(m, state)
                target = image.assignment()
                field_at_source = {v: vf.components[v].evaluate(source)
                                   for v in phase_vars}
                factor = dt_factor.evaluate(source)
                for slot in phase_vars:
                    lhs = t_derivatives[slot].evaluate(source)
                    for var in phase_vars:
                        d = derivatives[slot][var]
                        if not d.is_zero:
                            lhs += d.evaluate(source) * field_at_source[var]
                    rhs = factor * vf.components[slot].evaluate(target)
                    if lhs != rhs:
                        return False
            except (MapPole, SingularEvaluation):
                continue
            hits += 1
        return True if hits >= points else None

    free = run(constrained=False)
    if free:
        return EquivarianceCheck(m.name, True, "probabilistic", "exact")
    constrained = run(constrained=True)
    if constrained:
        return EquivarianceCheck(m.name, True, "probabilistic", "normalized")
    if constrained is None:
        return EquivarianceCheck(m.name, False, "probabilistic",
                                 witness="could not collect enough points")
    return EquivarianceCheck(m.name, False, "probabilistic",
                             witness="identity fails at a random point on the hyperplane")


# ---------------------------------------------------------------------------
# Coxeter relations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationReport:
    relation: str
    holds: bool
    method: str            # symbolic | probabilistic
    detail: Optional[str] = None


def _verify_word_is_identity(family: str, names: Sequence[str],
                             rng: random.Random, budget: int,
                             points: int = 20) -> RelationReport:
    label = " ".join(names)
    try:
        word = compose_word(family, names, budget)
        if word.is_identity():
            return RelationReport(label, True, "symbolic")
        return RelationReport(label, False, "symbolic", "composite is not the identity")
    except SizeBudgetExceeded:
        ok = words_equal_numeric(family, names, [], rng, points)
        return RelationReport(label, ok, "probabilistic",
                              None if ok else "differs from identity at a point")


def check_coxeter(family: str, rng: Optional[random.Random] = None,
                  budget: int = DEFAULT_SIZE_BUDGET,
                  points: int = 20) -> list[RelationReport]:
    """All involution and braid relations read off the Dynkin diagram."""
    rng = rng or random.Random(0)
    graph = DynkinGraph.of(family)
    n = len(graph.nodes)
    reports = []
    for i in range(n):
        reports.append(_verify_word_is_identity(
            family, [f"s{i}"] * 2, rng, budget, points))
    for i in range(n):
        for j in range(i + 1, n):
            order = 3 if graph.adjacent(i, j) else 2
            word = [f"s{i}", f"s{j}"] * order
            reports.append(_verify_word_is_identity(family, word, rng, budget, points))
    return reports


def automorphism_order(family: str, name: str, rng: Optional[random.Random] = None,
                       cap: int = 8, points: int = 10) -> Optional[int]:
    """Smallest k <= cap with pi^k = id, decided by exact random evaluation."""
    rng = rng or random.Random(0)
    for k in range(1, cap + 1):
        try:
            if words_equal_numeric(family, [name] * k, [], rng, points):
                return k
        except SingularEvaluation:
            continue
    return None


@dataclass(frozen=True)
class ConjugationReport:
    automorphism: str
    reflection: str
    image: Optional[str]
    holds: bool
    method: str


def check_pi_conjugations(family: str, rng: Optional[random.Random] = None,
                          points: int = 20) -> list[ConjugationReport]:
    """For each pi and s_i, identify s_k with pi^-1 . s_i . pi = s_k.

    The candidate k is read off the parameter matrices (computed, not
    assumed) and the phase-space identity is then verified at random exact
    states, using pi's numeric order to realise its inverse.
    """
    rng = rng or random.Random(0)
    n = 7 if family == "D6" else 5
    reports = []
    for pi_name in ("pi1", "pi2", "pi3"):
        order = automorphism_order(family, pi_name, rng)
        if order is None:
            reports.append(ConjugationReport(pi_name, "*", None, False,
                                             "order not found"))
            continue
        inverse_word = [pi_name] * (order - 1)
        for i in range(n):
            s_name = f"s{i}"
            conj_word = inverse_word + [s_name, pi_name]
            pi = generator(family, pi_name)
            s = generator(family, s_name)
            conj_matrix = _word_alpha_matrix(family, conj_word)
            image = None
            for k in range(n):
                cand = generator(family, f"s{k}")
                if conj_matrix == cand.alpha_matrix:
                    image = f"s{k}"
                    break
            if image is None:
                reports.append(ConjugationReport(pi_name, s_name, None, False,
                                                 "no reflection matches"))
                continue
            ok = words_equal_numeric(family, conj_word, [image], rng, points)
            reports.append(ConjugationReport(pi_name, s_name, image, ok,
                                             "probabilistic"))
    return reports


def _word_alpha_matrix(family: str, names: Sequence[str]):
    n = 7 if family == "D6" else 5
    matrix = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for name in names:
        g = generator(family, name)
        matrix = [[sum(g.alpha_matrix[i][k] * matrix[k][j] for k in range(n))
                   for j in range(n)] for i in range(n)]
    return tuple(tuple(row) for row in matrix)


def cartan_matrix(family: str) -> list[list[int]]:
    """C[i][j] with s_i(a_j) = a_j - C[i][j] a_i, read off the generators."""
    n = 7 if family == "D6" else 5
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        g = generator(family, f"s{i}")
        for j in range(n):
            row = g.alpha_matrix[j]
            expected = [1 if k == j else 0 for k in range(n)]
            delta = [row[k] - expected[k] for k in range(n)]
            for k in range(n):
                if k != i and delta[k] != 0:
                    raise WeylError(f"s{i} does not act as a reflection on a{j}")
            out[i][j] = -delta[i] if j != i else 1 - row[i]
    return out


# ---------------------------------------------------------------------------
# Divisor permutation under the automorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivisorImageCheck:
    map_name: str
    divisor_index: int
    image_index: Optional[int]
    holds: bool


def _point_on_divisor(family: str, index: int, rng: random.Random,
                      bound: int = 60) -> State:
    state = random_state(family, rng, bound)
    phase = dict(state.phase)
    table = INVARIANT_DIVISORS["coupled-eta" if family == "D6" else "pvi-eta"]
    equation = table[index]
    if equation == "q1-t":
        phase["q1"] = state.t
    elif equation == "q1-eta":
        phase["q1"] = state.eta
    elif equation == "p1":
        phase["p1"] = Fraction(0)
    elif equation == "q1-q2":
        phase["q1"] = phase["q2"]
    elif equation == "p2":
        phase["p2"] = Fraction(0)
    elif equation == "q2-1":
        phase["q2"] = Fraction(1)
    elif equation == "q2":
        phase["q2"] = Fraction(0)
    elif equation == "q1-1":
        phase["q1"] = Fraction(1)
    elif equation == "q1":
        phase["q1"] = Fraction(0)
    return State(phase, state.t, state.eta, state.alpha)


def check_divisor_permutation(family: str, map_name: str,
                              rng: Optional[random.Random] = None,
                              points: int = 10) -> list[DivisorImageCheck]:
    """The permutation part of the parameter action must permute the
    invariant divisors: points on the divisor of a_j map to the divisor of
    a_{sigma(j)}."""
    rng = rng or random.Random(0)
    m = generator(family, map_name)
    table = INVARIANT_DIVISORS["coupled-eta" if family == "D6" else "pvi-eta"]
    n = m.arity
    results = []
    for j in range(n):
        # sigma(j) = k when the new a_k is exactly the old a_j; reflections
        # keep untouched slots, the pi maps permute all of them
        unit = tuple(1 if l == j else 0 for l in range(n))
        sigma = next((k for k in range(n) if m.alpha_matrix[k] == unit), None)
        if sigma is None:
            continue
        divisor = rf(table[sigma])
        ok = True
        hits = 0
        attempts = 0
        while hits < points and attempts < 60 * points:
            attempts += 1
            state = _point_on_divisor(family, j, rng)
            try:
                image = apply_map(m, state)
                value = divisor.evaluate(image.assignment())
            except (MapPole, SingularEvaluation):
                continue
            hits += 1
            if value != 0:
                ok = False
                break
        if hits:
            results.append(DivisorImageCheck(map_name, j, sigma, ok))
    return results
