"""Arithmetic in finite fields GF(p^n).

Elements are stored as integers ``0 <= a < p**n``: the coefficient vector
``(c_0, ..., c_{n-1})`` of ``c_0 + c_1 x + ... + c_{n-1} x^{n-1}`` packed in
base ``p``.  :class:`FiniteField` exposes integer-level operations for the
hot loops elsewhere in the package; :class:`FieldElement` wraps an integer
for the object-level API.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

FIELD_ORDER_CAP = 1 << 20
LOG_TABLE_CAP = 1 << 16
FULL_TABLE_CAP = 1 << 10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``n == p**e`` and ``p`` prime, else None."""
    if n < 2:
        return None
    ps = prime_factors(n)
    if len(ps) != 1:
        return None
    p, e = ps[0], 0
    while n > 1:
        n //= p
        e += 1
    return p, e


# Polynomials over GF(p): coefficient lists, lowest degree first, no trailing zeros.

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _ppowmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(poly: list[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over GF(p)."""
    poly = _trim(list(poly))
    n = len(poly) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _psub(_ppowmod(x, p**n, poly, p), x, p):
        return False
    for r in prime_factors(n):
        h = _psub(_ppowmod(x, p ** (n // r), poly, p), x, p)
        if len(_pgcd(poly, h, p)) != 1:
            return False
    return True


def lowest_irreducible(p: int, n: int) -> list[int]:
    """Monic irreducible of degree n whose lower coefficients, read as a base-p
    integer, are smallest."""
    for code in range(p**n):
        coeffs = [(code // p**i) % p for i in range(n)] + [1]
        if is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError(f"no irreducible of degree {n} over GF({p})")


class FiniteField:
    """The field GF(p^n) with a fixed modulus.

    Instances are immutable after construction and cached by ``(p, n)`` via
    :func:`make_field`.
    """

    def __init__(self, p: int, n: int):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if n < 1:
            raise ValueError("extension degree must be positive")
        if p**n > FIELD_ORDER_CAP:
            raise ValueError(f"GF({p}^{n}) exceeds the field-order cap {FIELD_ORDER_CAP}")
        self.p = p
        self.n = n
        self.order = p**n
        self.modulus = tuple(lowest_irreducible(p, n)) if n > 1 else (0, 1)
        self._exp = self._log = None
        self._add_t = self._mul_t = None
        if self.order <= LOG_TABLE_CAP:
            self._build_log_tables()
        if self.order <= FULL_TABLE_CAP:
            self._build_full_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.n})" if self.n > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    # -- conversions --------------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        p = self.p
        return tuple((a // p**i) % p for i in range(self.n))

    def from_coeffs(self, cs) -> int:
        cs = list(cs)
        if len(cs) > self.n:
            cs = _pmod(cs, list(self.modulus), self.p)
        return sum((c % self.p) * self.p**i for i, c in enumerate(cs))

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, int):
            if self.n == 1:
                value %= self.p
            elif not 0 <= value < self.order:
                raise ValueError(f"{value} is not an element code of {self!r}")
            return FieldElement(self, value)
        return FieldElement(self, self.from_coeffs(value))

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, a) for a in range(self.order)]

    # -- integer-level arithmetic -------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.n == 1:
            return (a + b) % self.p
        if self._add_t is not None:
            return int(self._add_t[a, b])
        p, out, scale = self.p, 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.n == 1:
            return (-a) % self.p
        p, out, scale = self.p, 0, 1
        while a:
            out += ((-(a % p)) % p) * scale
            a //= p
            scale *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.n == 1:
            return a * b % self.p
        if self._mul_t is not None:
            return int(self._mul_t[a, b])
        if self._log is not None:
            return int(self._exp[(self._log[a] + self._log[b]) % (self.order - 1)])
        return self._poly_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.n == 1:
            return pow(a, self.p - 2, self.p)
        if self._log is not None:
            return int(self._exp[(-int(self._log[a])) % (self.order - 1)])
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self._log is not None:
            return int(self._exp[(int(self._log[a]) * e) % (self.order - 1)])
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def _poly_mul(self, a: int, b: int) -> int:
        prod = _pmulmod(list(self.coeffs(a)), list(self.coeffs(b)), list(self.modulus), self.p)
        return self.from_coeffs(prod)

    # -- tables ---------------------------------------------------------------

    def _build_log_tables(self):
        q = self.order
        if q == 2:
            self._exp = np.array([1], dtype=np.int64)
            self._log = np.zeros(2, dtype=np.int64)
            self.generator = 1
            return
        mul = self._poly_mul if self.n > 1 else (lambda a, b: a * b % self.p)
        factors = prime_factors(q - 1)
        for g in range(2, q):
            if all(self._slow_pow(g, (q - 1) // r, mul) != 1 for r in factors):
                break
        else:  # pragma: no cover - a finite field always has a primitive element
            raise AssertionError("no primitive element")
        self.generator = g
        exp = np.empty(q - 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = mul(x, g)
        self._exp, self._log = exp, log

    @staticmethod
    def _slow_pow(a, e, mul):
        r = 1
        while e:
            if e & 1:
                r = mul(r, a)
            a = mul(a, a)
            e >>= 1
        return r

    def _build_full_tables(self):
        q, p = self.order, self.p
        elems = np.arange(q)
        digits = np.stack([(elems // p**i) % p for i in range(self.n)], axis=1)
        summed = (digits[:, None, :] + digits[None, :, :]) % p
        weights = p ** np.arange(self.n)
        self._add_t = (summed * weights).sum(axis=2).astype(np.int64)
        mt = np.zeros((q, q), dtype=np.int64)
        if q > 1:
            la = self._log[1:]
            mt[1:, 1:] = self._exp[(la[:, None] + la[None, :]) % (q - 1)]
        self._mul_t = mt
        self._neg_t = np.array([self.neg(int(a)) for a in elems], dtype=np.int64)

    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense ``(add, mul, neg)`` lookup tables for vectorised work."""
        if self._add_t is None:
            raise ValueError(f"{self!r} is too large for dense tables")
        return self._add_t, self._mul_t, self._neg_t

    # -- subfield conjugation -------------------------------------------------

    @property
    def has_conjugation(self) -> bool:
        return self.n % 2 == 0

    def conj(self, a: int) -> int:
        if not self.has_conjugation:
            raise ValueError(f"{self!r} is not a quadratic extension of a subfield")
        return self.pow(a, self.p ** (self.n // 2))


@functools.lru_cache(maxsize=None)
def make_field(p: int, n: int = 1) -> FiniteField:
    """Return the (cached) field GF(p^n)."""
    return FiniteField(p, n)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    value: int

    @property
    def rep(self) -> tuple[int, ...]:
        return self.field.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field(other).value
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        if self.field.n == 1:
            return f"{self.value}"
        terms = []
        for i, c in reversed(list(enumerate(self.rep))):
            if c == 0:
                continue
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and i > 0 else (f"{c}" if i == 0 else f"{c}{mono}"))
        return " + ".join(terms) or "0"


def _same(a: FieldElement, b: FieldElement):
    if a.field != b.field:
        raise ValueError(f"field mismatch: {a.field!r} vs {b.field!r}")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _same(a, b)
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _same(a, b)
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, a.field.inv(a.value))


def conjugate(a: FieldElement) -> FieldElement:
    """The involution ``a -> a**(p**(n/2))`` fixing the index-2 subfield."""
    return FieldElement(a.field, a.field.conj(a.value))
