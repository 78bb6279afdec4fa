"""The diagonal masking family g_k(x) = f(x) + k*x and its statistics.

For a function f: GF(q)^n -> GF(q)^n and a mask k in GF(q)^n, the masked
function adds the coordinate-wise product k*x to f(x).  Averaging over
uniform k, the exact mean collision probability obeys

    avg_cp <= (2q - 1)^n / q^(2n),

with equality exactly on the coordinate-wise functions, and hence the
mean Renyi-2 entropy obeys avg_h2 >= n log2 q - n log2(2 - 1/q).  This
module computes the averages exactly (rationals from integer histogram
counts), the bound pair, the pair-shell decomposition behind it, and the
closed forms for the square family that attains the entropy bound.
"""

from __future__ import annotations

import functools
import hashlib
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from maskent import _backend
from maskent.dist import float15, rational_str
from maskent.gf import FieldSpec, FieldVector, build_field, field_for_order, prime_power_parts

DEFAULT_BUDGET = 2**32
TRIPLE_AUTO_CAP = 2**14


class BudgetExceededError(RuntimeError):
    """Raised when a computation would exceed the work budget."""


def resolve_budget(budget: int | None = None) -> int:
    """Explicit budget, else MASKENT_BUDGET from the environment, else 2**32."""
    if budget is not None:
        if not isinstance(budget, int) or budget < 1:
            raise ValueError(f"budget must be a positive integer, got {budget}")
        return budget
    raw = os.environ.get("MASKENT_BUDGET")
    if raw is None or not raw.strip():
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"MASKENT_BUDGET must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"MASKENT_BUDGET must be a positive integer, got {raw!r}")
    return value


def _require_budget(estimate: int, budget: int, what: str) -> None:
    if estimate > budget:
        raise BudgetExceededError(
            f"{what} needs {estimate} units but the budget is {budget}; "
            "raise MASKENT_BUDGET or pass a larger budget to allow it"
        )


def vector_code(x: FieldVector) -> int:
    """Canonical integer code: sum x_i * q^i, coordinate 0 least significant."""
    q = x.spec.q
    code = 0
    for i, e in enumerate(x.entries):
        code += e * q**i
    return code


def vector_from_code(spec: FieldSpec, n: int, code: int) -> FieldVector:
    q = spec.q
    if not 0 <= code < q**n:
        raise ValueError(f"vector code {code} out of range for GF({q})^{n}")
    entries = []
    for _ in range(n):
        entries.append(code % q)
        code //= q
    return FieldVector(spec, tuple(entries))


@functools.lru_cache(maxsize=None)
def _coords_matrix(q: int, n: int):
    """(q^n, n) int64 matrix of base-q digits for all vector codes."""
    size = q**n
    coords = np.zeros((size, n), dtype=np.int64)
    rest = np.arange(size, dtype=np.int64)
    for i in range(n):
        coords[:, i] = rest % q
        rest //= q
    coords.setflags(write=False)
    return coords


class FunctionTable:
    """A total function GF(q)^n -> GF(q)^n stored as output codes.

    ``codes[x]`` is the output vector code for input code x, an int64
    array of length q^n, write-protected after construction.
    """

    __slots__ = ("spec", "n", "codes")

    def __init__(self, spec: FieldSpec, n: int, codes):
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        size = spec.q**n
        arr = np.asarray(codes)
        if arr.ndim != 1 or arr.shape[0] != size:
            raise ValueError(f"expected {size} output codes, got shape {arr.shape}")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"output codes must be integers, got dtype {arr.dtype}")
        arr = arr.astype(np.int64, copy=True)
        if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= size):
            raise ValueError(f"output codes must lie in [0, {size})")
        arr.setflags(write=False)
        self.spec = spec
        self.n = n
        self.codes = arr

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def size(self) -> int:
        """Domain size q^n."""
        return self.codes.shape[0]

    def __call__(self, x: FieldVector) -> FieldVector:
        if x.spec != self.spec or len(x) != self.n:
            raise ValueError("input vector does not match the table's domain")
        return vector_from_code(self.spec, self.n, int(self.codes[vector_code(x)]))

    def __eq__(self, other: object):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.n == other.n
            and bool(np.array_equal(self.codes, other.codes))
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.n, self.codes.tobytes()))

    def __repr__(self) -> str:
        return f"FunctionTable(GF({self.q})^{self.n}, digest={self.digest()})"

    def output_vectors(self) -> Iterator[FieldVector]:
        """Outputs in input-code order."""
        for code in self.codes:
            yield vector_from_code(self.spec, self.n, int(code))

    def digest(self) -> str:
        """Short stable identifier of (p, m, n, outputs)."""
        text = f"{self.spec.p};{self.spec.m};{self.n};" + ",".join(
            str(int(c)) for c in self.codes
        )
        return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]

    @classmethod
    def from_outputs(cls, spec: FieldSpec, n: int, outputs: Sequence[FieldVector]) -> "FunctionTable":
        codes = []
        for out in outputs:
            if out.spec != spec or len(out) != n:
                raise ValueError("output vector does not match the table's codomain")
            codes.append(vector_code(out))
        return cls(spec, n, codes)

    @classmethod
    def from_callable(
        cls, spec: FieldSpec, n: int, fn: Callable[[FieldVector], FieldVector]
    ) -> "FunctionTable":
        outs = [fn(vector_from_code(spec, n, code)) for code in range(spec.q**n)]
        return cls.from_outputs(spec, n, outs)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "FunctionTable":
        return cls(spec, n, np.arange(spec.q**n, dtype=np.int64))

    @classmethod
    def constant(cls, spec: FieldSpec, n: int, value: FieldVector) -> "FunctionTable":
        if value.spec != spec or len(value) != n:
            raise ValueError("constant value does not match the table's codomain")
        return cls(spec, n, np.full(spec.q**n, vector_code(value), dtype=np.int64))

    def to_json_dict(self) -> dict:
        """Format: {p, m, n, outputs} with outputs[x] a list of n indices."""
        coords = _coords_matrix(self.q, self.n)
        return {
            "p": self.spec.p,
            "m": self.spec.m,
            "n": self.n,
            "outputs": coords[self.codes].tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FunctionTable":
        if not isinstance(doc, dict):
            raise ValueError("function table document must be a JSON object")
        for key in ("p", "m", "n", "outputs"):
            if key not in doc:
                raise ValueError(f"function table document is missing {key!r}")
        p, m, n = doc["p"], doc["m"], doc["n"]
        if not all(isinstance(v, int) for v in (p, m, n)):
            raise ValueError("p, m and n must be integers")
        spec = build_field(p, m)
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        outputs = doc["outputs"]
        size = spec.q**n
        if not isinstance(outputs, list) or len(outputs) != size:
            raise ValueError(f"expected {size} outputs, got {len(outputs) if isinstance(outputs, list) else type(outputs).__name__}")
        codes = np.zeros(size, dtype=np.int64)
        powq = spec.q ** np.arange(n, dtype=np.int64)
        for x, row in enumerate(outputs):
            if (
                not isinstance(row, list)
                or len(row) != n
                or not all(isinstance(e, int) and 0 <= e < spec.q for e in row)
            ):
                raise ValueError(f"output {x} must be a list of {n} indices in [0, {spec.q})")
            codes[x] = int(np.asarray(row, dtype=np.int64) @ powq)
        return cls(spec, n, codes)


def coordinatewise_table(spec: FieldSpec, maps: Sequence[Sequence[int]]) -> FunctionTable:
    """f(x) = (h_0(x_0), ..., h_{n-1}(x_{n-1})) from per-coordinate maps."""
    n = len(maps)
    if n < 1:
        raise ValueError("need at least one coordinate map")
    q = spec.q
    cols = []
    for i, h in enumerate(maps):
        col = np.asarray(list(h), dtype=np.int64)
        if col.shape != (q,):
            raise ValueError(f"coordinate map {i} must have {q} entries")
        if int(col.min()) < 0 or int(col.max()) >= q:
            raise ValueError(f"coordinate map {i} has values outside [0, {q})")
        cols.append(col)
    coords = _coords_matrix(q, n)
    codes = np.zeros(q**n, dtype=np.int64)
    for i in range(n):
        codes += cols[i][coords[:, i]] * q**i
    return FunctionTable(spec, n, codes)


def square_family(q: int, n: int) -> FunctionTable:
    """The coordinate-wise squaring map x |-> (x_0^2, ..., x_{n-1}^2)."""
    spec = field_for_order(q)
    sq = [spec.mul(v, v) for v in range(q)]
    return coordinatewise_table(spec, [sq] * n)


def diagonal_quadratic(
    spec: FieldSpec, a: Sequence[int], b: Sequence[int], c: Sequence[int]
) -> FunctionTable:
    """f(x)_i = a_i x_i^2 + b_i x_i + c_i with every a_i nonzero."""
    a, b, c = list(a), list(b), list(c)
    if not len(a) == len(b) == len(c):
        raise ValueError("coefficient vectors must share one length")
    maps = []
    for i, (ai, bi, ci) in enumerate(zip(a, b, c)):
        if spec._check(ai) == 0:
            raise ValueError(f"quadratic coefficient a_{i} must be nonzero")
        maps.append(
            [spec.add(spec.add(spec.mul(ai, spec.mul(v, v)), spec.mul(bi, v)), ci) for v in range(spec.q)]
        )
    return coordinatewise_table(spec, maps)


def _masked_codes(f: FunctionTable, k_digits) -> np.ndarray:
    """Output codes of g_k = f + k*x for one mask, given k's digit row."""
    q, n = f.q, f.n
    coords = _coords_matrix(q, n)
    fcoords = coords[f.codes]
    add, mul = f.spec.add_table, f.spec.mul_table
    out = np.zeros(f.size, dtype=np.int64)
    for i in range(n):
        out += add[fcoords[:, i], mul[int(k_digits[i]), coords[:, i]]] * q**i
    return out


def masked_table(f: FunctionTable, k: FieldVector) -> FunctionTable:
    """The family member g_k(x) = f(x) + k*x as a table."""
    if k.spec != f.spec or len(k) != f.n:
        raise ValueError("mask does not match the table's domain")
    return FunctionTable(f.spec, f.n, _masked_codes(f, k.entries))


def is_coordinatewise(f: FunctionTable) -> bool:
    """True when every output coordinate depends only on its input coordinate."""
    coords = _coords_matrix(f.q, f.n)
    fcoords = coords[f.codes]
    for i in range(f.n):
        for v in range(f.q):
            sel = fcoords[coords[:, i] == v, i]
            if sel.size > 1 and bool((sel != sel[0]).any()):
                return False
    return True


@dataclass(frozen=True)
class FamilyBounds:
    """The collision bound (2q-1)^n / q^(2n) and its entropy counterpart."""

    cp_bound: Fraction
    h2_bound: float


def average_bounds(q: int, n: int) -> FamilyBounds:
    if q < 2 or n < 1:
        raise ValueError(f"need q >= 2 and n >= 1, got q={q}, n={n}")
    cp_bound = Fraction((2 * q - 1) ** n, q ** (2 * n))
    h2_bound = n * (2 * math.log2(q) - math.log2(2 * q - 1))
    return FamilyBounds(cp_bound, h2_bound)


@dataclass(frozen=True)
class MaskStats:
    """Exact statistics of one family member g_k."""

    k: FieldVector
    cp: Fraction
    h2: float
    shannon: float
    image_size: int

    def to_json_dict(self) -> dict:
        return {
            "k": list(self.k.entries),
            "cp": rational_str(self.cp),
            "h2": float15(self.h2),
            "shannon": float15(self.shannon),
            "image_size": self.image_size,
        }


@dataclass(frozen=True)
class TheoremReport:
    """Family averages for one base function, with the bounds they obey."""

    q: int
    n: int
    f_digest: str
    avg_cp: Fraction
    cp_bound: Fraction
    equality: bool
    coordinatewise: bool
    avg_h2: float
    h2_bound: float
    avg_shannon: float
    per_k: tuple[MaskStats, ...] | None = None

    def cp_slack(self) -> Fraction:
        """cp_bound - avg_cp, exactly; nonnegative when the bound holds."""
        return self.cp_bound - self.avg_cp

    def h2_slack(self) -> float:
        """avg_h2 - h2_bound; nonnegative (up to float error) when the bound holds."""
        return self.avg_h2 - self.h2_bound

    def to_json_dict(self, *, include_per_k: bool = True) -> dict:
        doc = {
            "q": self.q,
            "n": self.n,
            "f_digest": self.f_digest,
            "avg_cp": rational_str(self.avg_cp),
            "avg_cp_float": float15(self.avg_cp),
            "cp_bound": rational_str(self.cp_bound),
            "cp_bound_float": float15(self.cp_bound),
            "equality": self.equality,
            "coordinatewise": self.coordinatewise,
            "avg_h2": float15(self.avg_h2),
            "h2_bound": float15(self.h2_bound),
            "avg_shannon": float15(self.avg_shannon),
        }
        if include_per_k and self.per_k is not None:
            doc["per_k"] = [stats.to_json_dict() for stats in self.per_k]
        return doc


def family_averages(
    f: FunctionTable, *, keep_per_k: bool = False, budget: int | None = None
) -> TheoremReport:
    """Exact family averages of g_k = f + k*x over all q^n masks.

    avg_cp is an exact rational assembled from integer collision counts;
    the entropy averages take one float log per mask.  Work is q^(2n)
    table operations, guarded by the budget.
    """
    q, n, size = f.q, f.n, f.size
    limit = resolve_budget(budget)
    _require_budget(size * size, limit, f"family averages over GF({q})^{n}")
    coords = _coords_matrix(q, n)
    sumsq, clog, image = _backend.family_stats(
        f.codes, coords, f.spec.add_table, f.spec.mul_table, q, n
    )
    total = sum(int(v) for v in sumsq)
    avg_cp = Fraction(total, size**3)
    bounds = average_bounds(q, n)
    log2q = math.log2(q)
    avg_h2 = 2 * n * log2q - float(np.log2(sumsq.astype(np.float64)).sum()) / size
    avg_shannon = n * log2q - float(clog.sum()) / (size * size)
    per_k = None
    if keep_per_k:
        per_k = tuple(
            MaskStats(
                k=FieldVector(f.spec, tuple(int(d) for d in coords[k])),
                cp=Fraction(int(sumsq[k]), size * size),
                h2=2 * n * log2q - math.log2(int(sumsq[k])),
                shannon=n * log2q - float(clog[k]) / size,
                image_size=int(image[k]),
            )
            for k in range(size)
        )
    return TheoremReport(
        q=q,
        n=n,
        f_digest=f.digest(),
        avg_cp=avg_cp,
        cp_bound=bounds.cp_bound,
        equality=avg_cp == bounds.cp_bound,
        coordinatewise=is_coordinatewise(f),
        avg_h2=avg_h2,
        h2_bound=bounds.h2_bound,
        avg_shannon=avg_shannon,
        per_k=per_k,
    )


def joint_collision(
    f: FunctionTable, *, method: str = "auto", budget: int | None = None
) -> Fraction:
    """Pr[g_K(A) = g_K(A')] for jointly uniform (K, A, A'), exactly.

    This equals the family-average collision probability.  "triple"
    enumerates all (k, a, a') directly; "pairs" counts compatible pairs
    per distance shell and weights them by q^(n-d).  "auto" picks triple
    only when q^(3n) is tiny, else pairs.
    """
    q, n, size = f.q, f.n, f.size
    limit = resolve_budget(budget)
    if method == "auto":
        method = "triple" if size**3 <= min(limit, TRIPLE_AUTO_CAP) else "pairs"
    if method == "triple":
        _require_budget(size**3, limit, f"triple enumeration over GF({q})^{n}")
        coords = _coords_matrix(q, n)
        total = 0
        for k in range(size):
            g = _masked_codes(f, coords[k])
            total += int((g[:, None] == g[None, :]).sum())
        return Fraction(total, size**3)
    if method == "pairs":
        _require_budget(size * size, limit, f"pair enumeration over GF({q})^{n}")
        coords = _coords_matrix(q, n)
        pairs, compat = _backend.pair_stats(f.codes, coords, q, n)
        num = sum(int(compat[d]) * q ** (n - d) for d in range(n + 1))
        return Fraction(num, size**3)
    raise ValueError(f"unknown method {method!r}; use 'auto', 'triple' or 'pairs'")


@dataclass(frozen=True)
class ShellTerm:
    """One input-distance shell of the pair decomposition.

    shell_mass is the probability that a uniform ordered input pair lies
    at this distance; conditional_collision is Pr[g_K(A) = g_K(A')]
    conditioned on that shell, at most q^(-distance).
    """

    distance: int
    shell_mass: Fraction
    conditional_collision: Fraction


def shell_decomposition(f: FunctionTable, *, budget: int | None = None) -> tuple[ShellTerm, ...]:
    """Split the joint collision probability over input-distance shells.

    The masses sum to 1 and sum(mass * conditional) recovers the joint
    collision probability exactly.
    """
    q, n, size = f.q, f.n, f.size
    limit = resolve_budget(budget)
    _require_budget(size * size, limit, f"pair enumeration over GF({q})^{n}")
    coords = _coords_matrix(q, n)
    pairs, compat = _backend.pair_stats(f.codes, coords, q, n)
    terms = []
    for d in range(n + 1):
        mass = Fraction(int(pairs[d]), size * size)
        conditional = Fraction(int(compat[d]) * q ** (n - d), int(pairs[d]) * size)
        terms.append(ShellTerm(d, mass, conditional))
    return tuple(terms)


@dataclass(frozen=True)
class TightnessPrediction:
    """Closed-form family averages for the square map on GF(q)^n."""

    q: int
    n: int
    avg_shannon: float
    avg_h2: float


def tightness_predictions(q: int, n: int) -> TightnessPrediction:
    """Predicted averages for the squaring map.

    avg Shannon is n log2 q - n (1 - 1/q) for every prime power q; avg
    Renyi-2 matches it for even q and drops to the family bound
    n log2 q - n log2(2 - 1/q) for odd q.
    """
    prime_power_parts(q)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    log2q = math.log2(q)
    shannon = n * log2q - n * (1 - 1 / q)
    if q % 2 == 0:
        h2 = shannon
    else:
        h2 = n * (2 * log2q - math.log2(2 * q - 1))
    return TightnessPrediction(q, n, shannon, h2)


@dataclass(frozen=True)
class PreimageProfile:
    """Fiber sizes of one scalar family member x |-> x^2 + k x on GF(q)."""

    q: int
    k: int
    sizes: tuple[int, ...]

    def histogram(self) -> dict[int, int]:
        """How many outputs have each fiber size (0 included)."""
        out: dict[int, int] = {}
        for s in self.sizes:
            out[s] = out.get(s, 0) + 1
        return dict(sorted(out.items()))


def preimage_profile(q: int, k: int) -> PreimageProfile:
    """Exhaustive fiber sizes of x |-> x^2 + k x over GF(q).

    For even q: k = 0 is a bijection and any other k yields fibers of
    size 0 or 2 only.  For odd q: one singleton fiber at y = -k^2/4 and
    (q - 1)/2 doubletons.
    """
    spec = field_for_order(q)
    k = spec._check(k)
    sizes = [0] * q
    for x in range(q):
        y = spec.add(spec.mul(x, x), spec.mul(k, x))
        sizes[y] += 1
    return PreimageProfile(q, k, tuple(sizes))


def total_weight(q: int, n: int) -> int:
    """Sum of Hamming weights over all of GF(q)^n.

    Computed by the shell recurrence and checked against the closed form
    n q^n - n q^(n-1); the two must agree.
    """
    if q < 2 or n < 1:
        raise ValueError(f"need q >= 2 and n >= 1, got q={q}, n={n}")
    weight = q - 1
    for d in range(2, n + 1):
        weight = weight + (q - 1) * (weight + q ** (d - 1))
    closed = n * q**n - n * q ** (n - 1)
    if weight != closed:
        raise AssertionError(f"weight recurrence {weight} disagrees with closed form {closed}")
    return weight


@dataclass(frozen=True)
class ImageStats:
    """Image sizes of all family members g_k, with the n = 1 corollaries."""

    sizes: tuple[int, ...]
    max_size: int
    avg_size: Fraction
    max_exceeds_half: bool | None
    avg_meets_bound: bool | None


def image_stats(f: FunctionTable, *, budget: int | None = None) -> ImageStats:
    """Image size of g_k for every mask code k.

    For n = 1 the flags check the scalar corollaries: some mask image
    exceeds q/2, and the average image is at least q^2 / (2q - 1).
    """
    q, n, size = f.q, f.n, f.size
    limit = resolve_budget(budget)
    _require_budget(size * size, limit, f"family images over GF({q})^{n}")
    coords = _coords_matrix(q, n)
    _, _, image = _backend.family_stats(
        f.codes, coords, f.spec.add_table, f.spec.mul_table, q, n
    )
    sizes = tuple(int(v) for v in image)
    avg = Fraction(sum(sizes), size)
    if n == 1:
        max_exceeds_half = 2 * max(sizes) > q
        avg_meets_bound = avg >= Fraction(q * q, 2 * q - 1)
    else:
        max_exceeds_half = None
        avg_meets_bound = None
    return ImageStats(sizes, max(sizes), avg, max_exceeds_half, avg_meets_bound)
