"""Independent oracles shared by the tests.

Nothing here imports the package's arithmetic: fields are re-implemented
with schoolbook polynomial multiplication and maps are checked with sets.
"""

from __future__ import annotations

import pytest


def digits(x: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        out.append(x % p)
        x //= p
    return out


def undigits(ds, p: int) -> int:
    return sum(c * p**i for i, c in enumerate(ds))


def slow_add(x: int, y: int, p: int, n: int) -> int:
    return undigits([(a + b) % p for a, b in zip(digits(x, p, n), digits(y, p, n))], p)


def slow_neg(x: int, p: int, n: int) -> int:
    return undigits([(-a) % p for a in digits(x, p, n)], p)


def slow_mul(x: int, y: int, p: int, n: int, modulus) -> int:
    """Product of encodings via polynomial multiplication and long division."""
    if n == 1:
        return x * y % p
    a, b = digits(x, p, n), digits(y, p, n)
    prod = [0] * (2 * n - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            prod[i + j] = (prod[i + j] + u * v) % p
    for deg in range(2 * n - 2, n - 1, -1):
        c = prod[deg]
        if c:
            for i, m in enumerate(modulus):
                prod[deg - n + i] = (prod[deg - n + i] - c * m) % p
    return undigits(prod[:n], p)


class SlowField:
    """Reference arithmetic for a FieldCtx's structure (same modulus, same encoding)."""

    def __init__(self, F):
        self.q, self.p, self.n = F.q, F.p, F.n
        self.modulus = list(F.modulus) if F.n > 1 else []

    def add(self, x, y):
        return slow_add(x, y, self.p, self.n)

    def sub(self, x, y):
        return slow_add(x, slow_neg(y, self.p, self.n), self.p, self.n)

    def mul(self, x, y):
        return slow_mul(x, y, self.p, self.n, self.modulus)

    def pow(self, x, e):
        r = 1
        for _ in range(e):
            r = self.mul(r, x)
        return r


def is_bijection(values, q: int) -> bool:
    return sorted(values) == list(range(q))


def brute_orthomorphism(table, slow: SlowField) -> bool:
    q = slow.q
    return is_bijection(table, q) and is_bijection([slow.sub(table[x], x) for x in range(q)], q)


def brute_strong(table, slow: SlowField) -> bool:
    q = slow.q
    return brute_orthomorphism(table, slow) and is_bijection(
        [slow.add(table[x], x) for x in range(q)], q)


def brute_orthogonal(t1, t2, slow: SlowField) -> bool:
    return is_bijection([slow.sub(a, b) for a, b in zip(t1, t2)], slow.q)


def cyclotomic_table(F, multipliers, slow: SlowField) -> list[int]:
    """Evaluate a multiplier list by walking powers of the generator directly."""
    k = len(multipliers)
    out = [0] * F.q
    x = 1
    for e in range(F.q - 1):
        out[x] = slow.mul(multipliers[e % k], x)
        x = slow.mul(x, F.generator)
    return out


@pytest.fixture
def slow_field():
    return SlowField


# -- acceptance report -----------------------------------------------------------

ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Append-only list of PASS/FAIL lines, echoed in the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_LINES, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[0][2:].rstrip("ab:"))):
            terminalreporter.write_line(line)
