"""Exact arithmetic in GF(p^k), p odd, and univariate polynomials over it.

Elements are stored by their integer encoding ``sum(a_i * p**i)`` where
``a_0 + a_1 x + ... + a_{k-1} x^{k-1}`` is the canonical representative in
``GF(p)[x] / (modulus)``.  Every object here is immutable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

# Built-in moduli (lowest coefficient first, monic) for the common extensions.
DEFAULT_MODULI = {
    (3, 2): (1, 0, 1),  # x^2 + 1
    (5, 2): (2, 0, 1),  # x^2 + 2
    (3, 3): (1, 2, 0, 1),  # x^3 + 2x + 1
    (7, 2): (1, 0, 1),  # x^2 + 1
}

# Tables are precomputed up to this cardinality; larger fields compute on the fly.
_TABLE_LIMIT = 1024


class FieldMismatchError(ValueError):
    """Operands live in different fields."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class FieldSpec:
    """The finite field GF(p^k) for an odd prime ``p``.

    ``modulus`` lists the residues of a monic irreducible polynomial of
    degree ``k`` over GF(p), lowest coefficient first.  It is ``None`` for
    prime fields and is filled from :data:`DEFAULT_MODULI` when omitted for
    a supported extension.

    >>> F = FieldSpec(3, 2)
    >>> F.q, F.modulus
    (9, (1, 0, 1))
    """

    p: int
    k: int = 1
    modulus: tuple[int, ...] | None = None
    _mul_table: tuple | None = field(default=None, init=False, repr=False, compare=False)
    _inv_table: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        p, k = self.p, self.k
        if not _is_prime(p) or p == 2:
            raise ValueError(f"p must be an odd prime, got {p}")
        if k < 1:
            raise ValueError(f"extension degree must be >= 1, got {k}")
        if k == 1:
            if self.modulus is not None and len(self.modulus) != 2:
                raise ValueError("prime fields take no modulus")
            object.__setattr__(self, "modulus", None)
        else:
            mod = self.modulus
            if mod is None:
                if (p, k) not in DEFAULT_MODULI:
                    raise ValueError(f"GF({p}^{k}) needs an explicit modulus")
                mod = DEFAULT_MODULI[(p, k)]
            mod = tuple(int(c) % p for c in mod)
            if len(mod) != k + 1 or mod[-1] != 1:
                raise ValueError(f"modulus must be monic of degree {k}")
            base = Polynomial(FieldSpec(p), mod)
            if not is_irreducible(base):
                raise ValueError(f"modulus {format_poly(base)} is reducible over GF({p})")
            object.__setattr__(self, "modulus", mod)
        if k > 1 and self.q <= _TABLE_LIMIT:
            q = self.q
            mt = tuple(tuple(self._mul_raw(a, b) for b in range(q)) for a in range(q))
            object.__setattr__(self, "_mul_table", mt)
        if self.q <= _TABLE_LIMIT:
            inv = [0] * self.q
            for a in range(1, self.q):
                inv[a] = self._pow_raw(a, self.q - 2)
            object.__setattr__(self, "_inv_table", tuple(inv))

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def is_prime(self) -> bool:
        return self.k == 1

    def __str__(self):
        return format_field(self)

    # -- encoding-level arithmetic -------------------------------------------
    # All of these take and return integer encodings in [0, q).

    def digits(self, a: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.k):
            a, r = divmod(a, p)
            out.append(r)
        return tuple(out)

    def undigits(self, coeffs: Sequence[int]) -> int:
        p = self.p
        v = 0
        for c in reversed(coeffs):
            v = v * p + (c % p)
        return v

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out, scale = 0, 1
        for _ in range(self.k):
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += ((x + y) % p) * scale
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.undigits([-d for d in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if self._mul_table is not None:
            return self._mul_table[a][b]
        return self._mul_raw(a, b)

    def _mul_raw(self, a: int, b: int) -> int:
        p, k, mod = self.p, self.k, self.modulus
        if k == 1:
            return a * b % p
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (2 * k - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] += xi * yj
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                for i in range(k):
                    prod[d - k + i] -= c * mod[i]
        return self.undigits(prod[:k])

    def _pow_raw(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_raw(result, a)
            a = self._mul_raw(a, a)
            e >>= 1
        return result

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(a), -e)
        if self.k == 1:
            return pow(a, e, self.p)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + str(self))
        if self._inv_table is not None:
            return self._inv_table[a]
        return self.power(a, self.q - 2)

    def from_int(self, n: int) -> int:
        """Encoding of the integer ``n`` in the prime subfield."""
        return n % self.p

    # -- element-level helpers -----------------------------------------------

    def __call__(self, value: Union[int, Sequence[int]]) -> "FieldElement":
        """Element with the given encoding (or residue vector)."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldMismatchError(f"{value.spec} vs {self}")
            return value
        if isinstance(value, int):
            if not 0 <= value < self.q:
                raise ValueError(f"encoding {value} out of range for GF({self.q})")
            return FieldElement(self, value)
        coeffs = list(value)
        if len(coeffs) != self.k:
            raise ValueError(f"expected {self.k} residues, got {len(coeffs)}")
        return FieldElement(self, self.undigits(coeffs))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> list["FieldElement"]:
        return enumerate_field(self)


def gf(q: int, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Field of cardinality ``q`` (odd prime power)."""
    for p in _prime_factors(q)[:1]:
        k, r = 0, q
        while r % p == 0:
            r //= p
            k += 1
        if r == 1:
            return FieldSpec(p, k, tuple(modulus) if modulus is not None else None)
    raise ValueError(f"{q} is not a prime power")


@dataclass(frozen=True)
class FieldElement:
    """An element of ``spec`` held by its integer encoding."""

    spec: FieldSpec
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.digits(self.value)

    @property
    def encoding(self) -> int:
        return self.value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{self.spec} vs {other.spec}")
            return other.value
        if isinstance(other, int):
            return self.spec.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.sub(b, self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.value, b))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(self.value, self.spec.inv(b)))

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.spec, self.spec.mul(b, self.spec.inv(self.value)))

    def __pow__(self, e: int):
        # 0**0 == 1 by convention
        return FieldElement(self.spec, self.spec.power(self.value, e))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.spec.from_int(other)
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}"


def fe_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {add, sub, mul, neg}; ``neg`` ignores ``b``."""
    if a.spec != b.spec:
        raise FieldMismatchError(f"{a.spec} vs {b.spec}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown op {op!r}")


def fe_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def fe_pow(a: FieldElement, e: int) -> FieldElement:
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    return a**e


def enumerate_field(spec: FieldSpec) -> list[FieldElement]:
    """All elements in ascending encoding order."""
    return [FieldElement(spec, v) for v in range(spec.q)]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Univariate polynomial over ``spec``; ``coeffs`` are encodings, lowest first.

    The zero polynomial has ``degree is None``, so it can never be compared
    numerically by accident.
    """

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: FieldSpec, coeffs: Iterable = ()):
        cs = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.spec != spec:
                    raise FieldMismatchError(f"{c.spec} vs {spec}")
                cs.append(c.value)
            else:
                c = int(c)
                if not 0 <= c < spec.q:
                    raise ValueError(f"coefficient encoding {c} out of range")
                cs.append(c)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def x(cls, spec: FieldSpec) -> "Polynomial":
        return cls(spec, (0, 1))

    @classmethod
    def constant(cls, spec: FieldSpec, c) -> "Polynomial":
        return cls(spec, (int(c) if isinstance(c, FieldElement) else spec.from_int(c),))

    @classmethod
    def from_roots(cls, spec: FieldSpec, roots: Iterable) -> "Polynomial":
        """Monic ``prod (x - r)``."""
        f = cls(spec, (1,))
        for r in roots:
            r = r.value if isinstance(r, FieldElement) else spec.from_int(r)
            f = f * cls(spec, (spec.neg(r), 1))
        return f

    # -- basic properties ----------------------------------------------------

    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> FieldElement:
        return FieldElement(self.spec, self.coeffs[-1] if self.coeffs else 0)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __getitem__(self, i: int) -> FieldElement:
        return FieldElement(self.spec, self.coeffs[i] if 0 <= i < len(self.coeffs) else 0)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.spec, self.coeffs))

    def __repr__(self):
        return f"Polynomial({format_poly(self)})"

    def __str__(self):
        return format_poly(self)

    def encoding(self) -> int:
        """Integer ``sum c_i q^i``; total order used for sorting."""
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.spec.q + c
        return v

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise TypeError(f"expected Polynomial, got {type(other).__name__}")
        if other.spec != self.spec:
            raise FieldMismatchError(f"{self.spec} vs {other.spec}")

    def __add__(self, other):
        self._check(other)
        F = self.spec
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Polynomial(F, out)

    def __neg__(self):
        F = self.spec
        return Polynomial(F, [F.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        self._check(other)
        return self + (-other)

    def __mul__(self, other):
        F = self.spec
        if isinstance(other, (int, FieldElement)):
            s = other.value if isinstance(other, FieldElement) else F.from_int(other)
            return Polynomial(F, [F.mul(s, c) for c in self.coeffs])
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Polynomial(F, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = Polynomial(self.spec, (1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.spec
        r = list(self.coeffs)
        g = other.coeffs
        dg = len(g) - 1
        lc_inv = F.inv(g[-1])
        if len(r) <= dg:
            return Polynomial(F), Polynomial(F, r)
        quo = [0] * (len(r) - dg)
        for d in range(len(r) - 1, dg - 1, -1):
            c = r[d]
            if c:
                t = F.mul(c, lc_inv)
                quo[d - dg] = t
                for i, gi in enumerate(g):
                    if gi:
                        r[d - dg + i] = F.sub(r[d - dg + i], F.mul(t, gi))
        return Polynomial(F, quo), Polynomial(F, r[:dg])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic associate")
        return self * FieldElement(self.spec, self.spec.inv(self.coeffs[-1]))

    def derivative(self) -> "Polynomial":
        F = self.spec
        return Polynomial(F, [F.mul(F.from_int(i), c) for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Evaluate at a field element (Horner)."""
        F = self.spec
        xv = x.value if isinstance(x, FieldElement) else F.from_int(x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, xv), c)
        return FieldElement(F, acc)

    def compose(self, g: "Polynomial") -> "Polynomial":
        """``self(g(x))``."""
        self._check(g)
        acc = Polynomial(self.spec)
        for c in reversed(self.coeffs):
            acc = acc * g + Polynomial(self.spec, (c,))
        return acc

    def shift(self, c) -> "Polynomial":
        """``self(x + c)``."""
        cv = c.value if isinstance(c, FieldElement) else self.spec.from_int(c)
        return self.compose(Polynomial(self.spec, (cv, 1)))

    def pow_mod(self, e: int, modulus: "Polynomial") -> "Polynomial":
        result = Polynomial(self.spec, (1,)) % modulus
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result


def poly_arith(f: Polynomial, g: Polynomial, op: str):
    """``op`` in {add, sub, mul, divmod}."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    raise ValueError(f"unknown op {op!r}")


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic gcd; raises if both inputs are zero."""
    f._check(g)
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def poly_lcm(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.is_zero() or g.is_zero():
        return Polynomial(f.spec)
    return (f * g // poly_gcd(f, g)).monic()


def is_squarefree(f: Polynomial) -> bool:
    if f.is_zero():
        return False
    d = f.derivative()
    if d.is_zero():
        return f.degree == 0
    return poly_gcd(f, d).degree == 0


def _frobenius_iterate(f: Polynomial, times: int) -> Polynomial:
    """``x^(q^times) mod f``."""
    q = f.spec.q
    h = Polynomial.x(f.spec) % f
    for _ in range(times):
        h = h.pow_mod(q, f)
    return h


def is_irreducible(f: Polynomial) -> bool:
    """Rabin's test. ``f`` must be monic of degree >= 1."""
    if f.is_zero() or f.degree < 1:
        raise ValueError("irreducibility is defined for degree >= 1")
    if not f.is_monic():
        raise ValueError("is_irreducible expects a monic polynomial")
    d = f.degree
    if d == 1:
        return True
    x = Polynomial.x(f.spec)
    if (_frobenius_iterate(f, d) - x) % f != Polynomial(f.spec):
        return False
    for r in _prime_factors(d):
        h = _frobenius_iterate(f, d // r) - x
        if poly_gcd(h, f).degree != 0:
            return False
    return True


def splits_distinct_linear(f: Polynomial) -> bool:
    """True iff ``f`` divides ``x^q - x``, i.e. has distinct roots all in the field."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.degree == 0:
        return True
    x = Polynomial.x(f.spec)
    return (x.pow_mod(f.spec.q, f) - x) % f == Polynomial(f.spec)


def is_obstructed(f: Polynomial, spec: FieldSpec | None = None) -> bool:
    """Monic irreducible cubic over GF(3) with nonzero x^2 coefficient."""
    spec = spec or f.spec
    if spec.q != 3 or f.spec != spec:
        return False
    if f.degree != 3 or not f.is_monic():
        return False
    return f.coeffs[2] != 0 and is_irreducible(f)


def monic_polynomials(spec: FieldSpec, degree: int) -> Iterator[Polynomial]:
    """All monic polynomials of the given degree, in ascending encoding order."""
    for lower in itertools.product(range(spec.q), repeat=degree):
        yield Polynomial(spec, tuple(reversed(lower)) + (1,))


# ---------------------------------------------------------------------------
# Text forms
# ---------------------------------------------------------------------------


def format_field(spec: FieldSpec) -> str:
    """``"p"`` or ``"p^k:c0,...,ck"``."""
    if spec.k == 1:
        return str(spec.p)
    return f"{spec.p}^{spec.k}:" + ",".join(str(c) for c in spec.modulus)


def parse_field(text: str) -> FieldSpec:
    text = text.strip()
    try:
        if ":" in text:
            head, mod = text.split(":", 1)
            p, k = head.split("^")
            return FieldSpec(int(p), int(k), tuple(int(c) for c in mod.split(",")))
        if "^" in text:
            p, k = text.split("^")
            return FieldSpec(int(p), int(k))
        return FieldSpec(int(text))
    except ValueError as exc:
        raise ValueError(f"bad field spec {text!r}: {exc}") from None


def poly_to_text(f: Polynomial) -> str:
    """Comma-separated coefficient encodings, lowest first (``"0"`` for zero)."""
    return ",".join(str(c) for c in f.coeffs) or "0"


def parse_poly(text: str, spec: FieldSpec) -> Polynomial:
    return Polynomial(spec, [int(t) for t in text.split(",") if t.strip()])


def format_poly(f: Polynomial) -> str:
    """Human form such as ``x^3+2x^2+1``; coefficients print as encodings."""
    if f.is_zero():
        return "0"
    terms = []
    for i in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[i]
        if not c:
            continue
        coef = f"({c})" if c >= f.spec.p else str(c)
        if i == 0:
            terms.append(coef)
        else:
            mono = "x" if i == 1 else f"x^{i}"
            terms.append(mono if c == 1 else f"{coef}{mono}")
    return "+".join(terms)
