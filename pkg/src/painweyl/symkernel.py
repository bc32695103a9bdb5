"""Exact multivariate polynomial and rational-function arithmetic over Q.

Everything downstream (Hamiltonians, Backlund maps, coordinate charts,
singularity analysis) is expressed in terms of the two value types defined
here:

* ``Polynomial``  -- sparse map from exponent vectors to exact rational
  coefficients, canonical under graded lexicographic order of the shared
  variable registry.
* ``RationalFunction`` -- quotient of two polynomials with a non-zero
  denominator.  Equality is decided by cross-multiplication; no full
  multivariate GCD is performed, only content removal and opportunistic
  cancellation through exact division.

Values are immutable after construction and all operations are pure, so
they can be shared freely between threads.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import zip_longest
from typing import Iterable, Mapping, Optional, Sequence, Union


class SymkernelError(Exception):
    """Base class for kernel failures."""


class UnknownVariableError(SymkernelError):
    """An identifier is not present in the variable registry."""


class ZeroFunctionDivision(SymkernelError):
    """Division by the identically-zero rational function."""


class SingularSubstitution(SymkernelError):
    """A substitution made a denominator identically zero."""


class SingularEvaluation(SymkernelError):
    """A point evaluation hit a vanishing denominator; retry with a fresh point."""


class ExpressionSyntaxError(SymkernelError):
    """The text expression could not be parsed."""


# ---------------------------------------------------------------------------
# Variable registry
# ---------------------------------------------------------------------------

CANONICAL_VARIABLES = (
    "q1", "p1", "q2", "p2", "t", "eta",
    "a0", "a1", "a2", "a3", "a4", "a5", "a6",
)


class VariableRegistry:
    """Ordered, append-only table of variable names.

    The index of a name never changes once registered; polynomials store
    exponent vectors positionally against this table.
    """

    def __init__(self, names: Sequence[str] = CANONICAL_VARIABLES):
        self._names: list[str] = []
        self._index: dict[str, int] = {}
        for name in names:
            self.register(name)

    def register(self, name: str) -> int:
        if name in self._index:
            return self._index[name]
        if not name or not (name[0].isalpha() or name[0] == "_"):
            raise UnknownVariableError(f"invalid variable name {name!r}")
        self._index[name] = len(self._names)
        self._names.append(name)
        return self._index[name]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def name(self, index: int) -> str:
        return self._names[index]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._names)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)


#: Shared registry used by every value in the package.  Chart variables and
#: formal derivative symbols are registered on demand by the modules that
#: need them.
REGISTRY = VariableRegistry()

Coefficient = Union[int, Fraction]
Exponents = tuple[int, ...]


def _coef(value) -> Coefficient:
    """Normalise a coefficient: Fractions with denominator 1 become ints."""
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, int):
        return value
    raise TypeError(f"coefficient must be exact rational, got {type(value)!r}")


def _trim(exp: Iterable[int]) -> Exponents:
    exp = tuple(exp)
    end = len(exp)
    while end and exp[end - 1] == 0:
        end -= 1
    return exp[:end]


def _exp_add(e1: Exponents, e2: Exponents) -> Exponents:
    if not e1:
        return e2
    if not e2:
        return e1
    return tuple(a + b for a, b in zip_longest(e1, e2, fillvalue=0))


def _exp_sub(e1: Exponents, e2: Exponents) -> Optional[Exponents]:
    """e1 - e2 element-wise, or None if any entry would go negative."""
    if len(e2) > len(e1):
        return None
    out = list(e1)
    for i, b in enumerate(e2):
        out[i] -= b
        if out[i] < 0:
            return None
    return _trim(out)


def _grlex_key(exp: Exponents):
    return (sum(exp), exp)


# ---------------------------------------------------------------------------
# Polynomial
# ---------------------------------------------------------------------------

class Polynomial:
    """Sparse multivariate polynomial with exact rational coefficients.

    Terms are stored as ``{exponent_vector: coefficient}`` with trailing
    zeros trimmed from the exponent vectors, so representation does not
    depend on how many variables were registered at construction time.
    Zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None, _trusted: bool = False):
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            clean: dict[Exponents, Coefficient] = {}
            for exp, c in terms.items():
                c = _coef(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
                if c:
                    key = _trim(exp)
                    prev = clean.get(key)
                    if prev is None:
                        clean[key] = c
                    else:
                        s = prev + c
                        if s:
                            clean[key] = s
                        else:
                            del clean[key]
            self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return _P_ZERO

    @staticmethod
    def constant(value) -> "Polynomial":
        c = _coef(value if isinstance(value, (int, Fraction)) else Fraction(value))
        if not c:
            return _P_ZERO
        return Polynomial({(): c}, _trusted=True)

    @staticmethod
    def variable(name: str) -> "Polynomial":
        i = REGISTRY.index(name)
        exp = (0,) * i + (1,)
        return Polynomial({exp: 1}, _trusted=True)

    # -- basic queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return Fraction(self.terms[()])

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = REGISTRY.index(name)
        deg = 0
        for e in self.terms:
            if len(e) > i and e[i] > deg:
                deg = e[i]
        return deg

    def degree_in_vars(self, names: Iterable[str]) -> int:
        idx = [REGISTRY.index(n) for n in names]
        deg = 0
        for e in self.terms:
            d = sum(e[i] for i in idx if i < len(e))
            if d > deg:
                deg = d
        return deg

    def variables(self) -> set[str]:
        seen: set[str] = set()
        for e in self.terms:
            for i, power in enumerate(e):
                if power:
                    seen.add(REGISTRY.name(i))
        return seen

    def leading(self) -> tuple[Exponents, Coefficient]:
        """Leading term under graded lexicographic order."""
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def sorted_terms(self) -> list[tuple[Exponents, Coefficient]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = prev + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial(out, _trusted=True)

    def __neg__(self) -> "Polynomial":
        return Polynomial({e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _coef(other)
            if not c:
                return _P_ZERO
            return Polynomial({e: _coef(k * c) for e, k in self.terms.items()},
                              _trusted=True)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.terms or not other.terms:
            return _P_ZERO
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (e2, c2), = b.items()
            if not e2:
                return Polynomial({e: c * c2 for e, c in a.items()}, _trusted=True)
            return Polynomial({_exp_add(e, e2): c * c2 for e, c in a.items()},
                              _trusted=True)
        # pad exponent keys to a common length so the inner loop can use a
        # flat element-wise tuple addition; trailing zeros are re-trimmed once
        width = max(max(len(e) for e in a), max(len(e) for e in b))
        a_items = [(e + (0,) * (width - len(e)), c) for e, c in a.items()]
        b_items = [(e + (0,) * (width - len(e)), c) for e, c in b.items()]
        out: dict[Exponents, Coefficient] = {}
        get = out.get
        _add = int.__add__
        for e2, c2 in b_items:
            for e1, c1 in a_items:
                k = tuple(map(_add, e1, e2))
                prev = get(k)
                if prev is None:
                    out[k] = c1 * c2
                else:
                    s = prev + c1 * c2
                    if s:
                        out[k] = s
                    else:
                        del out[k]
        return Polynomial({_trim(k): c for k, c in out.items()}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power must be a non-negative integer")
        result = _P_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Polynomial.constant(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus and substitution -------------------------------------------

    def diff(self, name: str) -> "Polynomial":
        i = REGISTRY.index(name)
        out: dict[Exponents, Coefficient] = {}
        for e, c in self.terms.items():
            if len(e) > i and e[i]:
                new = list(e)
                power = new[i]
                new[i] = power - 1
                out[_trim(new)] = c * power
        return Polynomial(out, _trusted=True)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        """Evaluate at a full rational point (every present variable bound)."""
        idx_value: dict[int, Fraction] = {REGISTRY.index(n): Fraction(v)
                                          for n, v in assignment.items()}
        power_cache: dict[tuple[int, int], Fraction] = {}
        total = Fraction(0)
        for e, c in self.terms.items():
            prod = Fraction(c)
            for i, power in enumerate(e):
                if not power:
                    continue
                key = (i, power)
                cached = power_cache.get(key)
                if cached is None:
                    if i not in idx_value:
                        raise UnknownVariableError(
                            f"no value supplied for {REGISTRY.name(i)!r}")
                    cached = idx_value[i] ** power
                    power_cache[key] = cached
                prod *= cached
            total += prod
        return total

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive over the integers."""
        if not self.terms:
            return Fraction(1)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            f = Fraction(c)
            num_gcd = _gcd(num_gcd, abs(f.numerator))
            den_lcm = _lcm(den_lcm, f.denominator)
        return Fraction(num_gcd, den_lcm) if num_gcd else Fraction(1)

    def monomial_gcd(self) -> Exponents:
        it = iter(self.terms)
        try:
            acc = list(next(it))
        except StopIteration:
            return ()
        for e in it:
            for i in range(len(acc)):
                if i >= len(e):
                    acc[i] = 0
                elif e[i] < acc[i]:
                    acc[i] = e[i]
        return _trim(acc)

    def shift_down(self, mono: Exponents) -> "Polynomial":
        """Divide by the monomial x^mono (must divide every term)."""
        if not mono:
            return self
        out = {}
        for e, c in self.terms.items():
            k = _exp_sub(e, mono)
            if k is None:
                raise ValueError("monomial does not divide every term")
            out[k] = c
        return Polynomial(out, _trusted=True)

    def coefficient_of(self, name: str, power: int) -> "Polynomial":
        """Coefficient of name**power, as a polynomial in the other variables."""
        i = REGISTRY.index(name)
        out = {}
        for e, c in self.terms.items():
            have = e[i] if len(e) > i else 0
            if have == power:
                new = list(e)
                if len(new) > i:
                    new[i] = 0
                out[_trim(new)] = c
        return Polynomial(out, _trusted=True)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _lcm(a: int, b: int) -> int:
    if not a or not b:
        return 0
    return abs(a * b) // _gcd(a, b)


_P_ZERO = Polynomial({}, _trusted=True)
_P_ONE = Polynomial({(): 1}, _trusted=True)


def exact_divide(p: Polynomial, d: Polynomial) -> Optional[Polynomial]:
    """Return q with ``p == d * q`` exactly, or None if d does not divide p.

    Graded-lex division with a single divisor: the leading term of the
    running remainder must stay divisible by the leading term of ``d``;
    the first failure proves non-divisibility, so the loop aborts early.
    """
    if d.is_zero:
        raise ZeroFunctionDivision("division by the zero polynomial")
    if p.is_zero:
        return _P_ZERO
    if d.is_constant:
        inv = Fraction(1) / d.constant_value()
        return p * inv
    d_exp, d_coef = d.leading()
    d_items = list(d.terms.items())
    quotient: dict[Exponents, Coefficient] = {}
    rem = dict(p.terms)
    while rem:
        exp = max(rem, key=_grlex_key)
        q_exp = _exp_sub(exp, d_exp)
        if q_exp is None:
            return None
        q_coef = _coef(Fraction(rem[exp]) / Fraction(d_coef))
        quotient[q_exp] = q_coef
        for e, c in d_items:
            k = _exp_add(e, q_exp)
            prev = rem.get(k)
            if prev is None:
                rem[k] = -c * q_coef
            else:
                s = prev - c * q_coef
                if s:
                    rem[k] = s
                else:
                    del rem[k]
    return Polynomial(quotient, _trusted=True)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

def _as_polynomial(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Polynomial.constant(value)
    raise TypeError(f"cannot coerce {type(value)!r} to Polynomial")


class RationalFunction:
    """Quotient of two polynomials; the universal currency of the package.

    Construction normalises the pair: common monomial factors and rational
    content are removed, the denominator is made integer-primitive with a
    positive leading coefficient, and an exact-division cancellation is
    attempted in both directions.  Full GCD reduction is deliberately not
    performed; equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _trusted: bool = False):
        if den is None:
            den = _P_ONE
        if _trusted:
            self.num = num
            self.den = den
            return
        num = _as_polynomial(num)
        den = _as_polynomial(den)
        if den.is_zero:
            raise ZeroFunctionDivision("denominator is the zero polynomial")
        if num.is_zero:
            self.num = _P_ZERO
            self.den = _P_ONE
            return
        # common monomial factor
        g_num = num.monomial_gcd()
        g_den = den.monomial_gcd()
        if g_num and g_den:
            g = _trim(min(a, b) for a, b in zip_longest(g_num, g_den, fillvalue=0))
            if g:
                num = num.shift_down(g)
                den = den.shift_down(g)
        # scalar normalisation: keep the pair jointly integer-primitive so
        # downstream products stay in plain int arithmetic
        if den.is_constant:
            num = num * (Fraction(1) / den.constant_value())
            den = _P_ONE
        else:
            c_num = num.content()
            c_den = den.content()
            g = Fraction(_gcd(c_num.numerator * c_den.denominator,
                              c_den.numerator * c_num.denominator),
                         c_num.denominator * c_den.denominator)
            lead = Fraction(den.leading()[1])
            scale = g if lead > 0 else -g
            inv = Fraction(1) / scale
            num = num * inv
            den = den * inv
            # opportunistic cancellation (no full GCD)
            q = exact_divide(num, den)
            if q is not None:
                num, den = q, _P_ONE
            elif not num.is_constant:
                q = exact_divide(den, num)
                if q is not None:
                    lead_q = Fraction(q.leading()[1])
                    sign = 1 if lead_q > 0 else -1
                    num = Polynomial.constant(sign)
                    den = q * sign
        self.num = num
        self.den = den

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero() -> "RationalFunction":
        return _R_ZERO

    @staticmethod
    def one() -> "RationalFunction":
        return _R_ONE

    @staticmethod
    def constant(value) -> "RationalFunction":
        return RationalFunction(Polynomial.constant(value))

    @staticmethod
    def variable(name: str) -> "RationalFunction":
        return RationalFunction(Polynomial.variable(name), _P_ONE, _trusted=True)

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p, _P_ONE, _trusted=True)

    # -- queries ---------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial_value(self) -> bool:
        return self.den.is_constant

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    # -- field operations -------------------------------------------------------

    def __add__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den.terms == other.den.terms:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _trusted=True)

    def __sub__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return _R_ZERO
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroFunctionDivision("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> "RationalFunction":
        if not isinstance(n, int):
            raise ValueError("exponent must be an integer")
        if n < 0:
            if self.is_zero:
                raise ZeroFunctionDivision("negative power of the zero function")
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num ** n, self.den ** n)

    def equals(self, other) -> bool:
        """Exact equality by cross-multiplied polynomial comparison."""
        other = _as_rational(other)
        if other is None:
            raise TypeError("cannot compare")
        if self.den.terms == other.den.terms:
            return self.num.terms == other.num.terms
        # try the cheaper one-sided cancellation first
        q = exact_divide(other.den, self.den)
        if q is not None:
            return (self.num * q).terms == other.num.terms
        q = exact_divide(self.den, other.den)
        if q is not None:
            return self.num.terms == (other.num * q).terms
        return (self.num * other.den).terms == (other.num * self.den).terms

    def __eq__(self, other):
        other = _as_rational(other)
        if other is None:
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        # cheap structural hash; equal values in different representations
        # may collide into different buckets, so rational functions are not
        # meant to be used as dict keys outside canonical-form contexts
        return hash((len(self.num.terms), len(self.den.terms),
                     self.num.total_degree(), self.den.total_degree()))

    # -- calculus -----------------------------------------------------------------

    def diff(self, name: str) -> "RationalFunction":
        dn = self.num.diff(name)
        dd = self.den.diff(name)
        if dd.is_zero:
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def substitute(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Simultaneous substitution of rational functions for variables."""
        clean: dict[str, RationalFunction] = {}
        for name, value in bindings.items():
            REGISTRY.index(name)
            r = _as_rational(value)
            if r is None:
                r = parse_expression(value) if isinstance(value, str) else None
            if r is None:
                raise TypeError(f"cannot substitute {type(value)!r} for {name!r}")
            clean[name] = r
        if not clean:
            return self
        num = _substitute_poly(self.num, clean)
        den = _substitute_poly(self.den, clean)
        if den.is_zero:
            raise SingularSubstitution(
                "substitution makes the denominator identically zero")
        return num / den

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        den = self.den.evaluate(assignment)
        if den == 0:
            raise SingularEvaluation("denominator vanishes at the point")
        return self.num.evaluate(assignment) / den

    def __repr__(self):
        return f"RationalFunction({format_expression(self)!r})"


def _as_rational(value) -> Optional[RationalFunction]:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(value)
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return None


_R_ZERO = RationalFunction(_P_ZERO, _P_ONE, _trusted=True)
_R_ONE = RationalFunction(_P_ONE, _P_ONE, _trusted=True)


def _substitute_poly(p: Polynomial, bindings: Mapping[str, RationalFunction]) -> RationalFunction:
    """Substitute into a polynomial, collecting over one uniform denominator."""
    if p.is_zero:
        return _R_ZERO
    idx_binding = {REGISTRY.index(n): r for n, r in bindings.items()}
    degs = {i: 0 for i in idx_binding}
    for e in p.terms:
        for i in degs:
            if len(e) > i and e[i] > degs[i]:
                degs[i] = e[i]
    num_pow: dict[int, list[Polynomial]] = {}
    den_pow: dict[int, list[Polynomial]] = {}
    for i, d in degs.items():
        r = idx_binding[i]
        nums = [_P_ONE]
        dens = [_P_ONE]
        for _ in range(d):
            nums.append(nums[-1] * r.num)
            dens.append(dens[-1] * r.den)
        num_pow[i] = nums
        den_pow[i] = dens
    total_num = _P_ZERO
    for e, c in p.terms.items():
        residual = list(e)
        factor = Polynomial.constant(c)
        for i, d in degs.items():
            k = residual[i] if len(residual) > i else 0
            if len(residual) > i:
                residual[i] = 0
            factor = factor * num_pow[i][k]
            factor = factor * den_pow[i][d - k]
        mono = _trim(residual)
        if mono:
            factor = factor * Polynomial({mono: 1}, _trusted=True)
        total_num = total_num + factor
    total_den = _P_ONE
    for i, d in degs.items():
        total_den = total_den * den_pow[i][d]
    return RationalFunction(total_num, total_den)


# ---------------------------------------------------------------------------
# Spec-level operations
# ---------------------------------------------------------------------------

def arith(a: RationalFunction, b: RationalFunction, kind: str) -> RationalFunction:
    """Field arithmetic dispatcher: kind is one of add/sub/mul/div."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def partial_derivative(f: RationalFunction, name: str) -> RationalFunction:
    return f.diff(name)


def substitute(f: RationalFunction, bindings: Mapping[str, RationalFunction]) -> RationalFunction:
    return f.substitute(bindings)


def rf_sum(values: Iterable[RationalFunction]) -> RationalFunction:
    """Sum many rational functions, grouping by denominator first so that
    common-denominator groups are added without cross-multiplication."""
    groups: dict[frozenset, list] = {}
    for v in values:
        key = frozenset(v.den.terms.items())
        entry = groups.get(key)
        if entry is None:
            groups[key] = [v.num, v.den]
        else:
            entry[0] = entry[0] + v.num
    total = _R_ZERO
    for num, den in groups.values():
        total = total + RationalFunction(num, den)
    return total


class PolynomialInVars:
    """Witness that a rational function is polynomial in a chosen variable set.

    ``terms`` maps exponent vectors over ``vars`` (positional, trimmed) to
    coefficients that are rational functions of the remaining variables.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, names: Sequence[str], terms: dict[Exponents, RationalFunction]):
        self.vars = tuple(names)
        self.terms = {e: c for e, c in terms.items() if not c.is_zero}

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def coefficient(self, exponents: Sequence[int]) -> RationalFunction:
        return self.terms.get(_trim(exponents), _R_ZERO)

    def diff(self, name: str) -> "PolynomialInVars":
        j = self.vars.index(name)
        out: dict[Exponents, RationalFunction] = {}
        for e, c in self.terms.items():
            if len(e) > j and e[j]:
                new = list(e)
                power = new[j]
                new[j] = power - 1
                key = _trim(new)
                scaled = c * RationalFunction.constant(power)
                prev = out.get(key)
                out[key] = scaled if prev is None else prev + scaled
        return PolynomialInVars(self.vars, out)

    def multiply_monomial(self, name: str, power: int = 1) -> "PolynomialInVars":
        j = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            new = list(e) + [0] * (j + 1 - len(e))
            new[j] += power
            out[_trim(new)] = c
        return PolynomialInVars(self.vars, out)

    def scale(self, factor: RationalFunction) -> "PolynomialInVars":
        return PolynomialInVars(self.vars,
                                {e: c * factor for e, c in self.terms.items()})

    def add(self, other: "PolynomialInVars") -> "PolynomialInVars":
        out = dict(self.terms)
        for e, c in other.terms.items():
            prev = out.get(e)
            out[e] = c if prev is None else prev + c
        return PolynomialInVars(self.vars, out)

    def same_as(self, other: "PolynomialInVars") -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(self.coefficient(k).equals(other.coefficient(k)) for k in keys)

    def to_rational_function(self) -> RationalFunction:
        parts = []
        for e, c in self.terms.items():
            mono = _R_ONE
            for name, k in zip(self.vars, e + (0,) * (len(self.vars) - len(e))):
                if k:
                    mono = mono * RationalFunction.variable(name) ** k
            parts.append(c * mono)
        return rf_sum(parts)

    def __repr__(self):
        inner = ", ".join(f"{e}: {format_expression(c)}" for e, c in self.terms.items())
        return f"PolynomialInVars({self.vars}, {{{inner}}})"


def is_polynomial(f: RationalFunction, names: Sequence[str]) -> Optional[PolynomialInVars]:
    """Decide whether f is polynomial in ``names`` with coefficients in the rest.

    Works by single-divisor division of the numerator by the denominator in
    the ring K[names] where K is the rational-function field of the other
    variables; a zero remainder is equivalent to membership.
    """
    idx = [REGISTRY.index(n) for n in names]
    pos = {i: j for j, i in enumerate(idx)}

    def split(p: Polynomial) -> dict[Exponents, Polynomial]:
        groups: dict[Exponents, dict[Exponents, Coefficient]] = {}
        for e, c in p.terms.items():
            vkey = [0] * len(idx)
            rest = list(e)
            for i in idx:
                if len(e) > i and e[i]:
                    vkey[pos[i]] = e[i]
                    rest[i] = 0
            groups.setdefault(_trim(vkey), {})[_trim(rest)] = c
        return {k: Polynomial(v, _trusted=True) for k, v in groups.items()}

    den_split = split(f.den)
    if len(den_split) == 1 and () in den_split:
        d0 = den_split[()]
        terms = {e: RationalFunction(c, d0) for e, c in split(f.num).items()}
        return PolynomialInVars(names, terms)
    d_lead = max(den_split, key=_grlex_key)
    d_lead_coef = RationalFunction.from_polynomial(den_split[d_lead])
    d_items = [(e, RationalFunction.from_polynomial(c)) for e, c in den_split.items()]
    rem: dict[Exponents, RationalFunction] = {
        e: RationalFunction.from_polynomial(c) for e, c in split(f.num).items()}
    quotient: dict[Exponents, RationalFunction] = {}
    while rem:
        exp = max(rem, key=_grlex_key)
        q_exp = _exp_sub(exp, d_lead)
        if q_exp is None:
            return None
        q_coef = rem[exp] / d_lead_coef
        quotient[q_exp] = q_coef
        for e, c in d_items:
            k = _exp_add(e, q_exp)
            prev = rem.get(k)
            value = (prev - q_coef * c) if prev is not None else (-q_coef * c)
            if value.is_zero:
                rem.pop(k, None)
            else:
                rem[k] = value
    return PolynomialInVars(names, quotient)


def limit_at_infinity(f: RationalFunction, name: str) -> Optional[RationalFunction]:
    """Limit as ``name`` tends to infinity; None signals divergence.

    Compares the degrees of numerator and denominator in ``name``: equal
    degrees give the ratio of leading coefficients, a heavier denominator
    gives zero, a heavier numerator diverges.
    """
    deg_num = f.num.degree_in(name)
    deg_den = f.den.degree_in(name)
    if deg_num > deg_den:
        return None
    if deg_num < deg_den:
        return _R_ZERO
    return RationalFunction(f.num.coefficient_of(name, deg_num),
                            f.den.coefficient_of(name, deg_den))


def random_eval(f: RationalFunction, assignment: Mapping[str, Fraction]) -> Fraction:
    """Exact evaluation at a rational point; raises SingularEvaluation on poles."""
    return f.evaluate(assignment)


def random_rational(rng: random.Random, bound: int = 10 ** 4) -> Fraction:
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def random_point(names: Iterable[str], rng: random.Random,
                 bound: int = 10 ** 4) -> dict[str, Fraction]:
    return {n: random_rational(rng, bound) for n in names}


def evaluate_at_random(f: RationalFunction, names: Sequence[str],
                       rng: random.Random, bound: int = 10 ** 4,
                       max_retries: int = 50) -> tuple[dict[str, Fraction], Fraction]:
    """Draw random points until one avoids the poles of f; return point and value."""
    for _ in range(max_retries):
        point = random_point(names, rng, bound)
        try:
            return point, f.evaluate(point)
        except SingularEvaluation:
            continue
    raise SingularEvaluation("could not find a non-singular random point")


def probably_equal(f: RationalFunction, g: RationalFunction, rng: random.Random,
                   points: int = 20, bound: int = 10 ** 4) -> bool:
    """Exact-arithmetic comparison at random rational points.

    A single differing point refutes equality; agreement at all points is
    strong probabilistic evidence, reported as such by callers.
    """
    names = sorted(f.variables() | g.variables())
    hits = 0
    attempts = 0
    while hits < points and attempts < 50 * points:
        attempts += 1
        point = random_point(names, rng, bound)
        try:
            lhs = f.evaluate(point)
            rhs = g.evaluate(point)
        except SingularEvaluation:
            continue
        if lhs != rhs:
            return False
        hits += 1
    if hits < points:
        raise SingularEvaluation("could not collect enough non-singular points")
    return True


# ---------------------------------------------------------------------------
# Text expression format
# ---------------------------------------------------------------------------

_TOKEN_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch == "*" and i + 1 < n and text[i + 1] == "*":
            tokens.append("^")
            i += 2
        elif ch in _TOKEN_OPS:
            tokens.append(ch)
            i += 1
        else:
            raise ExpressionSyntaxError(f"unexpected character {ch!r} at position {i}")
    return tokens


class _Parser:
    """Recursive-descent parser for the infix expression format.

    Grammar: sum of products of signed powers; ``^`` takes a non-negative
    integer exponent; identifiers must be registered variables.
    """

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExpressionSyntaxError("unexpected end of expression")
        self.pos += 1
        return tok

    def parse(self) -> RationalFunction:
        value = self.expr()
        if self.peek() is not None:
            raise ExpressionSyntaxError(f"trailing input at token {self.peek()!r}")
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.signed_factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.signed_factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def signed_factor(self) -> RationalFunction:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        value = self.power()
        return value if sign == 1 else -value

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            neg = False
            if self.peek() == "-":
                self.take()
                neg = True
            tok = self.take()
            if not tok.isdigit():
                raise ExpressionSyntaxError(f"exponent must be an integer, got {tok!r}")
            if neg:
                raise ExpressionSyntaxError("exponents must be non-negative integers")
            return base ** int(tok)
        return base

    def atom(self) -> RationalFunction:
        tok = self.take()
        if tok == "(":
            value = self.expr()
            if self.take() != ")":
                raise ExpressionSyntaxError("missing closing parenthesis")
            return value
        if tok.isdigit():
            return RationalFunction.constant(int(tok))
        if tok[0].isalpha() or tok[0] == "_":
            if tok not in REGISTRY:
                raise ExpressionSyntaxError(f"unknown identifier {tok!r}")
            return RationalFunction.variable(tok)
        raise ExpressionSyntaxError(f"unexpected token {tok!r}")


def parse_expression(text: str) -> RationalFunction:
    """Parse the text expression format into a rational function."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExpressionSyntaxError("empty expression")
    return _Parser(tokens).parse()


def rf(text) -> RationalFunction:
    """Convenience coercion: strings are parsed, numbers become constants."""
    if isinstance(text, RationalFunction):
        return text
    if isinstance(text, str):
        return parse_expression(text)
    if isinstance(text, (int, Fraction)):
        return RationalFunction.constant(text)
    if isinstance(text, Polynomial):
        return RationalFunction(text)
    raise TypeError(f"cannot coerce {type(text)!r} to a rational function")


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    parts: list[str] = []
    for exp, coef in p.sorted_terms():
        frac = Fraction(coef)
        mono_factors = []
        for i, k in enumerate(exp):
            if k == 1:
                mono_factors.append(REGISTRY.name(i))
            elif k > 1:
                mono_factors.append(f"{REGISTRY.name(i)}^{k}")
        mono = "*".join(mono_factors)
        mag = abs(frac)
        if mag.denominator == 1:
            coef_str = str(mag.numerator)
        else:
            coef_str = f"{mag.numerator}/{mag.denominator}"
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{coef_str}*{mono}"
        else:
            body = coef_str
        sign = "-" if frac < 0 else "+"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def format_expression(f: RationalFunction) -> str:
    """Render in the text expression format accepted by the parser."""
    num = format_polynomial(f.num)
    if f.den.is_constant and f.den.constant_value() == 1:
        return num
    den = format_polynomial(f.den)
    num_wrapped = f"({num})" if (" " in num or num.startswith("-")) else num
    den_wrapped = f"({den})" if (" " in den or "*" in den or "^" in den) else den
    return f"{num_wrapped}/{den_wrapped}"
