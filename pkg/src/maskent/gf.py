"""Small finite fields GF(p^m) with dense lookup-table arithmetic.

Elements are plain integers in ``[0, q)``.  The base-p digits of an
element's index are its coefficients as a polynomial in the field
generator: digit ``i`` is the coefficient of ``generator**i``, so index 0
is the additive identity and index 1 the multiplicative identity.  For a
prime field (m = 1) the index is simply the residue mod p.

Construction picks the lexicographically least monic irreducible of
degree m, ordered by the integer whose base-p digits are the non-leading
coefficients (constant term least significant).  This makes every table
reproducible bit for bit.  Fields are immutable once built and safe to
share between threads.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

#: Largest field order build_field accepts by default.
MAX_FIELD_ORDER = 4096


def is_prime(value: int) -> bool:
    if value < 2:
        return False
    d = 2
    while d * d <= value:
        if value % d == 0:
            return False
        d += 1
    return True


def _int_digits(value: int, base: int, width: int) -> list[int]:
    digits = []
    for _ in range(width):
        value, r = divmod(value, base)
        digits.append(r)
    return digits


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a mod b over GF(p); coefficients low to high, b monic."""
    r = list(a)
    db = len(b) - 1
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        lead = r[-1]
        shift = len(r) - 1 - db
        for i, coeff in enumerate(b):
            r[shift + i] = (r[shift + i] - lead * coeff) % p
    while r and r[-1] == 0:
        r.pop()
    return r


def _is_irreducible(coeffs: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg//2."""
    m = len(coeffs) - 1
    for d in range(1, m // 2 + 1):
        for key in range(p**d):
            divisor = _int_digits(key, p, d) + [1]
            if not _poly_rem(coeffs, divisor, p):
                return False
    return True


def _least_irreducible(p: int, m: int) -> tuple[int, ...]:
    if m == 1:
        return (0, 1)  # the polynomial x; reduction mod x is arithmetic mod p
    for key in range(p**m):
        coeffs = _int_digits(key, p, m) + [1]
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError(f"no irreducible of degree {m} over GF({p})")


class FieldSpec:
    """A concrete GF(p^m) with precomputed add/mul/inv tables.

    Tables are numpy int64 arrays, write-protected after construction:
    ``add_table[a, b]``, ``mul_table[a, b]`` and ``inv_table[a]`` with
    ``inv_table[0] == 0`` as an "undefined" sentinel (``inv(0)`` raises).
    """

    def __init__(self, p: int, m: int, irreducible: tuple[int, ...]):
        self.p = p
        self.m = m
        self.q = p**m
        self.irreducible = irreducible

        q = self.q
        pows = p ** np.arange(m, dtype=np.int64)
        digits = np.zeros((q, m), dtype=np.int64)
        rest = np.arange(q, dtype=np.int64)
        for i in range(m):
            digits[:, i] = rest % p
            rest //= p

        add = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            add[a] = ((digits[a] + digits) % p) @ pows

        # alpha**s reduced mod the irreducible, for s = 0..2m-2
        reduced = np.zeros((2 * m - 1, m), dtype=np.int64)
        power = [1] + [0] * (m - 1)
        for s in range(2 * m - 1):
            reduced[s] = power
            carry = power[-1]
            power = [0] + power[:-1]
            if carry:
                for i in range(m):
                    power[i] = (power[i] - carry * irreducible[i]) % p

        mul = np.zeros((q, q), dtype=np.int64)
        conv = np.zeros((q, 2 * m - 1), dtype=np.int64)
        for a in range(q):
            conv[:] = 0
            for i in range(m):
                di = int(digits[a, i])
                if di:
                    conv[:, i : i + m] += di * digits
            mul[a] = ((conv @ reduced) % p) @ pows

        inv = np.argmax(mul == 1, axis=1)
        inv[0] = 0
        assert bool((mul[np.arange(1, q), inv[1:]] == 1).all()), "reducible modulus"

        neg = ((p - digits) % p) @ pows

        for table in (digits, add, mul, inv, neg):
            table.setflags(write=False)
        self._digits = digits
        self.add_table = add
        self.mul_table = mul
        self.inv_table = inv
        self._neg_table = neg

    def __repr__(self) -> str:
        return f"FieldSpec(GF({self.q}) = GF({self.p}^{self.m}))"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.m, self.irreducible) == (other.p, other.m, other.irreducible)

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.irreducible))

    def _check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise ValueError(f"element index {a} out of range for GF({self.q})")
        return a

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[self._check(a), self._check(b)])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[self._check(a), self._check(b)])

    def neg(self, a: int) -> int:
        return int(self._neg_table[self._check(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def inv(self, a: int) -> int:
        """Multiplicative inverse; a = 0 is a domain error."""
        if self._check(a) == 0:
            raise ValueError("0 has no multiplicative inverse")
        return int(self.inv_table[a])

    def scalar(self, value: int) -> int:
        """The prime-subfield element value * 1 (i.e. value mod p)."""
        return value % self.p

    def element_digits(self, a: int) -> tuple[int, ...]:
        return tuple(int(d) for d in self._digits[self._check(a)])

    def element_from_digits(self, digits) -> int:
        if len(digits) != self.m:
            raise ValueError(f"expected {self.m} digits, got {len(digits)}")
        index = 0
        for i, d in enumerate(digits):
            if not 0 <= d < self.p:
                raise ValueError(f"digit {d} out of range for GF({self.p})")
            index += d * self.p**i
        return index

    def elements(self) -> range:
        return range(self.q)


@functools.lru_cache(maxsize=None)
def _build_field(p: int, m: int) -> FieldSpec:
    return FieldSpec(p, m, _least_irreducible(p, m))


def build_field(p: int, m: int, *, limit: int = MAX_FIELD_ORDER) -> FieldSpec:
    """Construct GF(p^m) with the least monic irreducible of degree m.

    Raises ValueError for a non-prime p, for m < 1, and for p**m above
    the limit; each case gets its own message.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"characteristic must be prime, got {p}")
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"extension degree must be >= 1, got {m}")
    if p**m > limit:
        raise ValueError(f"field order {p**m} exceeds limit {limit}")
    return _build_field(p, m)


def prime_power_parts(q: int) -> tuple[int, int]:
    """Decompose q as p^m with p prime; raise ValueError otherwise."""
    if not isinstance(q, int) or q < 2:
        raise ValueError(f"field order must be an integer >= 2, got {q}")
    p = 2
    while q % p != 0:
        p += 1
        if p * p > q:
            p = q
            break
    m = 0
    rest = q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, m


def field_for_order(q: int, *, limit: int = MAX_FIELD_ORDER) -> FieldSpec:
    """Resolve an order q to GF(p^m); q must be a prime power."""
    p, m = prime_power_parts(q)
    return build_field(p, m, limit=limit)


@dataclass(frozen=True)
class FieldVector:
    """An element of GF(q)^n: a tuple of element indices over one field."""

    spec: FieldSpec
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) < 1:
            raise ValueError("vectors must have at least one coordinate")
        for e in self.entries:
            if not 0 <= e < self.spec.q:
                raise ValueError(f"entry {e} out of range for GF({self.spec.q})")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]


def zero_vector(spec: FieldSpec, n: int) -> FieldVector:
    return FieldVector(spec, (0,) * n)


def _check_pair(x: FieldVector, y: FieldVector) -> None:
    if x.spec != y.spec:
        raise ValueError("vectors live in different fields")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")


def mask_product(x: FieldVector, y: FieldVector) -> FieldVector:
    """Coordinate-wise product (x_1 y_1, ..., x_n y_n)."""
    _check_pair(x, y)
    mul = x.spec.mul_table
    return FieldVector(x.spec, tuple(int(mul[a, b]) for a, b in zip(x.entries, y.entries)))


def vector_add(x: FieldVector, y: FieldVector) -> FieldVector:
    _check_pair(x, y)
    add = x.spec.add_table
    return FieldVector(x.spec, tuple(int(add[a, b]) for a, b in zip(x.entries, y.entries)))


def hamming_distance(x: FieldVector, y: FieldVector) -> int:
    """Number of coordinates where x and y differ."""
    _check_pair(x, y)
    return sum(1 for a, b in zip(x.entries, y.entries) if a != b)


def hamming_weight(x: FieldVector) -> int:
    """Number of nonzero coordinates; equals the distance to the zero vector."""
    return sum(1 for a in x.entries if a != 0)


def field_to_json_dict(spec: FieldSpec) -> dict:
    """Dump format: {p, m, q, irreducible: [c0..cm], add, mul} row-major."""
    return {
        "p": spec.p,
        "m": spec.m,
        "q": spec.q,
        "irreducible": list(spec.irreducible),
        "add": spec.add_table.tolist(),
        "mul": spec.mul_table.tolist(),
    }
