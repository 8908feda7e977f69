"""Explicit finite fields GF(p^n) backed by log/antilog tables.

An element is an integer ``enc`` in ``[0, q)``.  The polynomial
``c_0 + c_1*alpha + ... + c_{n-1}*alpha^{n-1}`` (alpha a root of the modulus)
is stored as ``c_0 + c_1*p + ... + c_{n-1}*p^{n-1}``, so the prime subfield
is simply ``0..p-1`` and small integer constants embed as ``c % p``.

Both structure choices are canonical: the modulus is the monic irreducible
polynomial with the smallest coefficient encoding and the generator is the
primitive element with the smallest encoding.
"""

from __future__ import annotations

import math
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CyclorthError,
    FieldZeroDivisionError,
    NotPrimePowerError,
    OrderTooLargeError,
    ZeroArgumentError,
)

DEFAULT_MAX_ORDER = 1 << 22


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, n)`` with ``q == p**n``, or raise NotPrimePowerError."""
    if not isinstance(q, (int, np.integer)) or q < 2:
        raise NotPrimePowerError(f"{q!r} is not a prime power")
    q = int(q)
    ps = prime_factors(q)
    if len(ps) != 1:
        raise NotPrimePowerError(f"{q} is not a prime power")
    p = ps[0]
    n = round(math.log(q, p))
    while p**n < q:
        n += 1
    while p**n > q:
        n -= 1
    return p, n


def is_prime_power(q: int) -> bool:
    try:
        factor_prime_power(q)
    except NotPrimePowerError:
        return False
    return True


def prime_powers(lo: int, hi: int) -> list[int]:
    """All prime powers ``q`` with ``lo <= q <= hi``."""
    return [q for q in range(max(lo, 2), hi + 1) if is_prime_power(q)]


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


# --- polynomials over F_p, coefficient lists low -> high, no trailing zeros ---


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        f = a[-1] * inv_lead % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        _trim(a)
    return a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _poly_mod(prod, m, p)


def _poly_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(a, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _digits(enc: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        enc, r = divmod(enc, p)
        out.append(r)
    return out


def _from_digits(ds: Iterable[int], p: int) -> int:
    enc = 0
    for c in reversed(list(ds)):
        enc = enc * p + c
    return enc


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial-division irreducibility test for a monic polynomial over F_p."""
    m = list(modulus)
    n = len(m) - 1
    if n < 1 or m[-1] % p != 1:
        return False
    if n == 1:
        return True
    if m[0] % p == 0:
        return False
    for d in range(1, n // 2 + 1):
        for low in range(p**d):
            divisor = _digits(low, p, d) + [1]
            if not _poly_mod(m, divisor, p):
                return False
    return True


def default_modulus(p: int, n: int) -> tuple[int, ...]:
    """Smallest-encoding monic irreducible polynomial of degree ``n``; ``()`` for n=1."""
    if n == 1:
        return ()
    for enc in range(p**n, 2 * p**n):
        m = _digits(enc, p, n + 1)
        if is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """A fully materialised field F_q.

    Immutable after construction; the numpy tables are flagged read-only.
    ``exp`` has length ``2(q-1)`` so that ``exp[log x + log y]`` needs no
    reduction, and ``log[0] == -1``.
    """

    def __init__(self, q: int, p: int, n: int, modulus: tuple[int, ...], generator: int,
                 exp: np.ndarray, log: np.ndarray):
        self.q = q
        self.p = p
        self.n = n
        self.modulus = modulus
        self.generator = generator
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log
        self.order = q - 1
        half = (q - 1) // 2
        # log of -1
        self._log_neg1 = 0 if p == 2 else half
        self._elements = np.arange(q, dtype=np.int64)
        self._elements.setflags(write=False)

    # -- identity --------------------------------------------------------

    def descriptor(self) -> str:
        mod = ",".join(str(c) for c in self.modulus)
        return f"q={self.p}^{self.n};modulus=[{mod}];g={self.generator}"

    def __repr__(self) -> str:
        return f"FieldCtx({self.descriptor()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and self.descriptor() == other.descriptor()

    def __hash__(self) -> int:
        return hash(self.descriptor())

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    # python-list views of the tables; scalar indexing is much faster on lists
    @cached_property
    def _exp_l(self) -> list[int]:
        return self.exp.tolist()

    @cached_property
    def _log_l(self) -> list[int]:
        return self.log.tolist()

    @cached_property
    def _zech_l(self) -> list[int]:
        # zech[t] = log(1 + g^t), or -1 when 1 + g^t == 0
        ones = self.add_v(self.exp[: self.order], np.ones(self.order, dtype=np.int64))
        return self.log[ones].tolist()

    # -- scalar arithmetic ----------------------------------------------

    def elem(self, c: int) -> int:
        """Embed an integer constant via the prime subfield."""
        return int(c) % self.p

    def add(self, x: int, y: int) -> int:
        if self.n == 1:
            return (x + y) % self.p
        if self.p == 2:
            return x ^ y
        if x == 0:
            return y
        if y == 0:
            return x
        lg = self._log_l
        a = lg[x]
        s = self._zech_l[(lg[y] - a) % self.order]
        if s < 0:
            return 0
        return self._exp_l[a + s]

    def neg(self, x: int) -> int:
        if x == 0 or self.p == 2:
            return x
        if self.n == 1:
            return self.p - x
        return self._exp_l[self._log_l[x] + self._log_neg1]

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        lg = self._log_l
        return self._exp_l[lg[x] + lg[y]]

    def inv(self, x: int) -> int:
        if x == 0:
            raise FieldZeroDivisionError("inverse of zero")
        return self._exp_l[(-self._log_l[x]) % self.order]

    def div(self, x: int, y: int) -> int:
        if y == 0:
            raise FieldZeroDivisionError("division by zero")
        if x == 0:
            return 0
        lg = self._log_l
        return self._exp_l[(lg[x] - lg[y]) % self.order]

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            if e < 0:
                raise FieldZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        return self._exp_l[(self._log_l[x] * e) % self.order]

    def dlog(self, x: int) -> int:
        if x == 0:
            raise ZeroArgumentError("discrete log of zero")
        return self._log_l[x]

    def gpow(self, e: int) -> int:
        """``g**e`` for the fixed generator."""
        return self._exp_l[e % self.order]

    def sqrt(self, d: int) -> int | None:
        """A square root of ``d`` (the one with smaller encoding), or None."""
        if d == 0:
            return 0
        if self.p == 2:
            return self.pow(d, self.q // 2)
        lg = self._log_l[d]
        if lg % 2:
            return None
        r = self._exp_l[lg // 2]
        return min(r, self.neg(r))

    def sqrts(self, d: int) -> list[int]:
        """All square roots of ``d``, ascending."""
        r = self.sqrt(d)
        if r is None:
            return []
        return sorted({r, self.neg(r)})

    def digits(self, x: int) -> list[int]:
        return _digits(x, self.p, self.n)

    def wrap(self, x: int) -> "Element":
        """Wrap an encoding for formula-style arithmetic (ints act as constants)."""
        return Element(self, x)

    # -- vectorised arithmetic --------------------------------------------

    def add_v(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.n == 1:
            return (x + y) % self.p
        if self.p == 2:
            return x ^ y
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        scale = 1
        for _ in range(self.n):
            out += ((x % self.p + y % self.p) % self.p) * scale
            x = x // self.p
            y = y // self.p
            scale *= self.p
        return out

    def neg_v(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if self.p == 2:
            return x.copy()
        if self.n == 1:
            return (self.p - x) % self.p
        out = self.exp[(self.log[x] + self._log_neg1) % self.order]
        return np.where(x == 0, 0, out)

    def sub_v(self, x, y) -> np.ndarray:
        return self.add_v(x, self.neg_v(y))

    def mul_v(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        lx, ly = self.log[x], self.log[y]
        out = self.exp[(lx + ly) % self.order]
        return np.where((x == 0) | (y == 0), 0, out)

    def div_v(self, x, y) -> np.ndarray:
        """Elementwise ``x / y``; positions with ``y == 0`` yield ``-1``."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        out = self.exp[(self.log[x] - self.log[y]) % self.order]
        out = np.where(x == 0, 0, out)
        return np.where(y == 0, -1, out)

    # -- subfields ---------------------------------------------------------

    def embedding_from(self, small: "FieldCtx") -> list[int]:
        """Field homomorphism ``small -> self`` as a lookup list.

        The image of the small field's adjoined root is the smallest-encoding
        root of the small modulus in this field.
        """
        if small.p != self.p or self.n % small.n:
            raise CyclorthError(f"F_{small.q} is not a subfield of F_{self.q}")
        if small.n == 1:
            return list(range(small.q))
        root = None
        for h in range(self.q):
            acc = 0
            for c in reversed(small.modulus):
                acc = self.add(self.mul(acc, h), c)
            if acc == 0:
                root = h
                break
        assert root is not None
        powers = [self.pow(root, i) for i in range(small.n)]
        out = []
        for x in range(small.q):
            acc = 0
            for c, hp in zip(small.digits(x), powers):
                acc = self.add(acc, self.mul(c, hp))
            out.append(acc)
        return out


class Element:
    """Operator sugar over a field encoding.

    Plain ``int`` operands are read as integer constants of the prime
    subfield, so ``(x + 1) / 2`` means what it says.
    """

    __slots__ = ("F", "v")

    def __init__(self, F: FieldCtx, v: int):
        self.F = F
        self.v = int(v)

    def _c(self, o) -> int:
        return o.v if isinstance(o, Element) else self.F.elem(o)

    def __add__(self, o):
        return Element(self.F, self.F.add(self.v, self._c(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return Element(self.F, self.F.sub(self.v, self._c(o)))

    def __rsub__(self, o):
        return Element(self.F, self.F.sub(self._c(o), self.v))

    def __mul__(self, o):
        return Element(self.F, self.F.mul(self.v, self._c(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return Element(self.F, self.F.div(self.v, self._c(o)))

    def __rtruediv__(self, o):
        return Element(self.F, self.F.div(self._c(o), self.v))

    def __neg__(self):
        return Element(self.F, self.F.neg(self.v))

    def __pow__(self, e: int):
        return Element(self.F, self.F.pow(self.v, e))

    def __eq__(self, o) -> bool:
        return self.v == self._c(o)

    def __hash__(self) -> int:
        return hash(self.v)

    def __int__(self) -> int:
        return self.v

    __index__ = __int__

    def __repr__(self) -> str:
        return f"<{self.v} in F_{self.F.q}>"


def _mul_matrix(h: int, p: int, n: int, modulus: tuple[int, ...]) -> np.ndarray:
    """Matrix of ``v -> h*v`` on digit vectors (column j is h * alpha^j)."""
    if n == 1:
        return np.array([[h % p]], dtype=np.int64)
    hd = _digits(h, p, n)
    cols = []
    for j in range(n):
        prod = _poly_mulmod(hd, [0] * j + [1], modulus, p)
        cols.append(prod + [0] * (n - len(prod)))
    return np.array(cols, dtype=np.int64).T


def _elem_pow(h: int, e: int, p: int, n: int, modulus: tuple[int, ...]) -> int:
    if n == 1:
        return pow(h, e, p)
    return _from_digits(_poly_powmod(_digits(h, p, n), e, modulus, p), p)


def _is_primitive(h: int, q: int, p: int, n: int, modulus: tuple[int, ...], factors) -> bool:
    if h == 0:
        return False
    if _elem_pow(h, q - 1, p, n, modulus) != 1:
        return False
    return all(_elem_pow(h, (q - 1) // r, p, n, modulus) != 1 for r in factors)


def _power_table(g: int, q: int, p: int, n: int, modulus: tuple[int, ...]) -> np.ndarray:
    """Encodings of g^0 .. g^(q-2), built by block doubling."""
    order = q - 1
    weights = p ** np.arange(n, dtype=np.int64)
    block = np.zeros((1, n), dtype=np.int64)
    block[0, 0] = 1
    length = 1
    while length < order:
        step = _mul_matrix(_elem_pow(g, length, p, n, modulus), p, n, modulus)
        block = np.vstack([block, (block @ step.T) % p])
        length *= 2
    return (block[:order] @ weights).astype(np.int64)


def build_field(q: int, *, modulus: Sequence[int] | None = None, generator: int | None = None,
                max_order: int = DEFAULT_MAX_ORDER) -> FieldCtx:
    """Construct F_q without caching.  See :func:`make_field`."""
    p, n = factor_prime_power(q)
    if q > max_order:
        raise OrderTooLargeError(f"q={q} exceeds the table limit {max_order}")
    if modulus is None or (n == 1 and len(modulus) == 0):
        mod = default_modulus(p, n)
    else:
        mod = tuple(int(c) % p for c in modulus)
        if n == 1:
            raise CyclorthError("prime fields take no modulus", code="bad-modulus")
        if len(mod) != n + 1 or not is_irreducible(mod, p):
            raise CyclorthError(
                f"modulus {list(modulus)} is not a monic irreducible of degree {n} over F_{p}",
                code="bad-modulus",
            )
    factors = prime_factors(q - 1)
    if generator is None:
        g = next(h for h in range(1, q) if _is_primitive(h, q, p, n, mod, factors))
    else:
        g = int(generator)
        if not 0 < g < q or not _is_primitive(g, q, p, n, mod, factors):
            raise CyclorthError(f"{generator} is not a primitive element of F_{q}",
                                code="bad-generator")
    powers = _power_table(g, q, p, n, mod)
    if len(np.unique(powers)) != q - 1:
        raise AssertionError("generator powers are not distinct")
    log = np.full(q, -1, dtype=np.int64)
    log[powers] = np.arange(q - 1, dtype=np.int64)
    exp = np.concatenate([powers, powers])
    return FieldCtx(q, p, n, mod, g, exp, log)


@lru_cache(maxsize=512)
def _cached_field(q, modulus, generator, max_order):
    return build_field(q, modulus=modulus, generator=generator, max_order=max_order)


def make_field(q: int, *, modulus: Sequence[int] | None = None, generator: int | None = None,
               max_order: int = DEFAULT_MAX_ORDER) -> FieldCtx:
    """Return the canonical F_q (cached; the context is immutable and shareable).

    ``modulus`` and ``generator`` override the default choices and are
    validated.  Raises NotPrimePowerError or OrderTooLargeError.
    """
    mod = tuple(modulus) if modulus is not None else None
    return _cached_field(int(q), mod, generator, max_order)


def parse_descriptor(text: str) -> FieldCtx:
    """Inverse of :meth:`FieldCtx.descriptor`."""
    try:
        parts = dict(item.split("=", 1) for item in text.strip().split(";"))
        p, n = (int(v) for v in parts["q"].split("^"))
        body = parts["modulus"].strip()[1:-1]
        mod = [int(c) for c in body.split(",")] if body.strip() else None
        g = int(parts["g"])
    except (KeyError, ValueError) as exc:
        raise CyclorthError(f"malformed field descriptor {text!r}", code="bad-descriptor") from exc
    return make_field(p**n, modulus=mod, generator=g)
