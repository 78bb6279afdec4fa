"""Verification campaigns over the masking family.

Three campaign styles: exhaustive sweeps over every function on a small
domain, random sampling at fixed seeds, and hill-climbing searches for
high average collision probability.  Each checks the bound pair on
every instance and returns a CampaignResult whose serialized form is
byte-identical across reruns with the same configuration.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from maskent import _backend
from maskent._rng import SplitMix64
from maskent.dist import float15, rational_str
from maskent.family import (
    FunctionTable,
    TheoremReport,
    _coords_matrix,
    _require_budget,
    average_bounds,
    family_averages,
    image_stats,
    joint_collision,
    resolve_budget,
    shell_decomposition,
    tightness_predictions,
)
from maskent.gf import FieldSpec, field_for_order

H2_ATOL = 1e-9

CSV_HEADER = "f_digest,avg_cp,avg_h2,avg_shannon,coordinatewise,equality"


@dataclass(frozen=True)
class CampaignConfig:
    """Parameters of one campaign; seed drives every random draw."""

    q: int
    n: int
    mode: str
    samples: int = 0
    iters: int = 0
    restarts: int = 0
    seed: int = 0
    budget: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "mode": self.mode,
            "samples": self.samples,
            "iters": self.iters,
            "restarts": self.restarts,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class InstanceRow:
    """One verified function, summarized."""

    f_digest: str
    avg_cp: Fraction
    avg_h2: float
    avg_shannon: float
    coordinatewise: bool
    equality: bool

    @classmethod
    def from_report(cls, report: TheoremReport) -> "InstanceRow":
        return cls(
            f_digest=report.f_digest,
            avg_cp=report.avg_cp,
            avg_h2=report.avg_h2,
            avg_shannon=report.avg_shannon,
            coordinatewise=report.coordinatewise,
            equality=report.equality,
        )

    def to_json_dict(self) -> dict:
        return {
            "f_digest": self.f_digest,
            "avg_cp": rational_str(self.avg_cp),
            "avg_h2": float15(self.avg_h2),
            "avg_shannon": float15(self.avg_shannon),
            "coordinatewise": self.coordinatewise,
            "equality": self.equality,
        }

    def to_csv_row(self) -> str:
        return ",".join(
            [
                self.f_digest,
                rational_str(self.avg_cp),
                repr(float15(self.avg_h2)),
                repr(float15(self.avg_shannon)),
                "true" if self.coordinatewise else "false",
                "true" if self.equality else "false",
            ]
        )


@dataclass(frozen=True)
class CampaignResult:
    """Everything a campaign produced.

    wall_time is informational only and deliberately left out of the
    serialized forms, which must be byte-identical across reruns.
    """

    config: CampaignConfig
    rows: tuple[InstanceRow, ...]
    summary: dict
    max_avg_cp: Fraction
    argmax: tuple[FunctionTable, ...] | None
    trajectories: tuple[dict, ...] | None
    violations: tuple[str, ...]
    wall_time: float

    def to_json_dict(self) -> dict:
        doc = {
            "config": self.config.to_json_dict(),
            "summary": self.summary,
            "max_avg_cp": rational_str(self.max_avg_cp),
            "max_avg_cp_float": float15(self.max_avg_cp),
            "violations": list(self.violations),
            "instances": [row.to_json_dict() for row in self.rows],
        }
        if self.argmax is not None:
            doc["argmax"] = [table.to_json_dict() for table in self.argmax]
        if self.trajectories is not None:
            doc["trajectories"] = [
                {
                    "restart": t["restart"],
                    "best_cp": rational_str(t["best_cp"]),
                    "steps": [[step, rational_str(cp)] for step, cp in t["steps"]],
                    "codes": list(t["codes"]),
                }
                for t in self.trajectories
            ]
        return doc

    def to_csv_text(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(row.to_csv_row() for row in self.rows)
        return "\n".join(lines) + "\n"


def random_table(spec: FieldSpec, n: int, rng: SplitMix64) -> FunctionTable:
    """Uniform function table: one independent output code per input."""
    size = spec.q**n
    codes = np.fromiter((rng.below(size) for _ in range(size)), dtype=np.int64, count=size)
    return FunctionTable(spec, n, codes)


def verify_instance(
    f: FunctionTable, *, keep_per_k: bool = False, budget: int | None = None
) -> TheoremReport:
    """Exact family averages plus the bounds, for one base function."""
    return family_averages(f, keep_per_k=keep_per_k, budget=budget)


def instance_violations(
    f: FunctionTable,
    report: TheoremReport,
    *,
    h2_atol: float = H2_ATOL,
    check_identities: bool = False,
    check_images: bool = False,
    budget: int | None = None,
) -> list[str]:
    """Every way this instance contradicts the claims; empty when clean.

    Always checked: the exact collision bound, equality for
    coordinate-wise functions, the entropy bound (within h2_atol), and
    the Jensen relation avg_h2 >= -log2(avg_cp).  Identity checks
    (pair-shell decomposition) and the n = 1 image corollaries are
    opt-in since they rerun the kernels.
    """
    out = []
    who = f"f {report.f_digest} on GF({report.q})^{report.n}"
    if report.avg_cp > report.cp_bound:
        out.append(
            f"{who}: avg_cp {rational_str(report.avg_cp)} exceeds bound "
            f"{rational_str(report.cp_bound)}"
        )
    if report.coordinatewise and not report.equality:
        out.append(
            f"{who}: coordinate-wise but avg_cp {rational_str(report.avg_cp)} "
            f"misses the bound {rational_str(report.cp_bound)}"
        )
    if report.avg_h2 < report.h2_bound - h2_atol:
        out.append(f"{who}: avg_h2 {report.avg_h2!r} below bound {report.h2_bound!r}")
    neg_log_avg_cp = math.log2(report.avg_cp.denominator) - math.log2(report.avg_cp.numerator)
    if report.avg_h2 < neg_log_avg_cp - h2_atol:
        out.append(
            f"{who}: avg_h2 {report.avg_h2!r} below -log2(avg_cp) {neg_log_avg_cp!r}"
        )
    if check_identities:
        joint = joint_collision(f, method="pairs", budget=budget)
        if joint != report.avg_cp:
            out.append(
                f"{who}: joint collision {rational_str(joint)} differs from "
                f"avg_cp {rational_str(report.avg_cp)}"
            )
        terms = shell_decomposition(f, budget=budget)
        if sum(t.shell_mass for t in terms) != 1:
            out.append(f"{who}: shell masses do not sum to 1")
        recombined = sum(t.shell_mass * t.conditional_collision for t in terms)
        if recombined != joint:
            out.append(
                f"{who}: shell recombination {rational_str(Fraction(recombined))} "
                f"differs from joint collision {rational_str(joint)}"
            )
        for t in terms:
            ceiling = Fraction(1, report.q**t.distance)
            if t.conditional_collision > ceiling:
                out.append(
                    f"{who}: shell {t.distance} conditional collision "
                    f"{rational_str(t.conditional_collision)} exceeds q^-d"
                )
            if report.coordinatewise and t.conditional_collision != ceiling:
                out.append(
                    f"{who}: coordinate-wise shell {t.distance} conditional collision "
                    f"{rational_str(t.conditional_collision)} is not exactly q^-d"
                )
    if check_images and report.n == 1:
        stats = image_stats(f, budget=budget)
        if not stats.max_exceeds_half:
            out.append(
                f"{who}: max image size {stats.max_size} does not exceed q/2"
            )
        if not stats.avg_meets_bound:
            out.append(
                f"{who}: average image {rational_str(stats.avg_size)} below q^2/(2q-1)"
            )
    return out


def tightness_violations(report: TheoremReport, *, atol: float = H2_ATOL) -> list[str]:
    """Compare a square-map report against the closed-form averages."""
    pred = tightness_predictions(report.q, report.n)
    out = []
    if abs(report.avg_shannon - pred.avg_shannon) > atol:
        out.append(
            f"square map on GF({report.q})^{report.n}: avg_shannon "
            f"{report.avg_shannon!r} differs from predicted {pred.avg_shannon!r}"
        )
    if abs(report.avg_h2 - pred.avg_h2) > atol:
        out.append(
            f"square map on GF({report.q})^{report.n}: avg_h2 "
            f"{report.avg_h2!r} differs from predicted {pred.avg_h2!r}"
        )
    return out


def exhaustive_campaign(config: CampaignConfig) -> CampaignResult:
    """Sweep every function GF(q)^n -> GF(q)^n and verify all claims.

    Checks, per function: the exact bound, equality exactly for the
    coordinate-wise functions (both directions), the entropy bounds, the
    pair-shell identities, and for n = 1 the image corollaries.  Also
    checks that the maximum over all functions attains the bound and
    that the argmax set is exactly the coordinate-wise set.
    """
    if config.mode != "exhaustive":
        raise ValueError(f"config mode must be 'exhaustive', got {config.mode!r}")
    spec = field_for_order(config.q)
    n = config.n
    size = spec.q**n
    limit = resolve_budget(config.budget)
    function_count = size**size
    _require_budget(function_count, limit, f"exhaustive sweep over GF({config.q})^{n}")
    _require_budget(size * size, limit, f"family averages over GF({config.q})^{n}")
    bound = average_bounds(config.q, n).cp_bound
    start = time.perf_counter()
    rows = []
    violations = []
    max_cp: Fraction | None = None
    argmax: list[FunctionTable] = []
    equality_count = 0
    coordinatewise_count = 0
    for codes in itertools.product(range(size), repeat=size):
        f = FunctionTable(spec, n, codes)
        report = family_averages(f, budget=config.budget)
        rows.append(InstanceRow.from_report(report))
        violations.extend(
            instance_violations(
                f,
                report,
                check_identities=True,
                check_images=(n == 1),
                budget=config.budget,
            )
        )
        if report.equality != report.coordinatewise:
            violations.append(
                f"f {report.f_digest} on GF({config.q})^{n}: equality "
                f"{report.equality} but coordinatewise {report.coordinatewise}"
            )
        equality_count += bool(report.equality)
        coordinatewise_count += bool(report.coordinatewise)
        if max_cp is None or report.avg_cp > max_cp:
            max_cp = report.avg_cp
            argmax = [f]
        elif report.avg_cp == max_cp:
            argmax.append(f)
    assert max_cp is not None
    if max_cp != bound:
        violations.append(
            f"GF({config.q})^{n}: max avg_cp {rational_str(max_cp)} does not attain "
            f"the bound {rational_str(bound)}"
        )
    summary = {
        "function_count": function_count,
        "coordinatewise_count": coordinatewise_count,
        "equality_count": equality_count,
        "argmax_count": len(argmax),
        "bound": rational_str(bound),
        "bound_attained": max_cp == bound,
    }
    return CampaignResult(
        config=config,
        rows=tuple(rows),
        summary=summary,
        max_avg_cp=max_cp,
        argmax=tuple(argmax),
        trajectories=None,
        violations=tuple(violations),
        wall_time=time.perf_counter() - start,
    )


def random_campaign(config: CampaignConfig) -> CampaignResult:
    """Verify the bounds on seeded uniform random function tables."""
    if config.mode != "random":
        raise ValueError(f"config mode must be 'random', got {config.mode!r}")
    if config.samples < 1:
        raise ValueError(f"need at least one sample, got {config.samples}")
    spec = field_for_order(config.q)
    n = config.n
    size = spec.q**n
    _require_budget(size * size, resolve_budget(config.budget),
                    f"family averages over GF({config.q})^{n}")
    start = time.perf_counter()
    rng = SplitMix64(config.seed)
    rows = []
    violations = []
    max_cp: Fraction | None = None
    cp_slacks = []
    h2_slacks = []
    for _ in range(config.samples):
        f = random_table(spec, n, rng)
        report = family_averages(f, budget=config.budget)
        rows.append(InstanceRow.from_report(report))
        violations.extend(instance_violations(f, report, budget=config.budget))
        cp_slacks.append(report.cp_slack())
        h2_slacks.append(report.h2_slack())
        if max_cp is None or report.avg_cp > max_cp:
            max_cp = report.avg_cp
    assert max_cp is not None
    mean_cp_slack = sum(cp_slacks, Fraction(0)) / len(cp_slacks)
    summary = {
        "sample_count": config.samples,
        "min_cp_slack": rational_str(min(cp_slacks)),
        "mean_cp_slack": rational_str(mean_cp_slack),
        "min_cp_slack_float": float15(min(cp_slacks)),
        "mean_cp_slack_float": float15(mean_cp_slack),
        "min_h2_slack": float15(min(h2_slacks)),
        "mean_h2_slack": float15(sum(h2_slacks) / len(h2_slacks)),
    }
    return CampaignResult(
        config=config,
        rows=tuple(rows),
        summary=summary,
        max_avg_cp=max_cp,
        argmax=None,
        trajectories=None,
        violations=tuple(violations),
        wall_time=time.perf_counter() - start,
    )


def _collision_total(spec: FieldSpec, codes: np.ndarray, n: int) -> int:
    """Integer sum over masks of the per-mask collision counts."""
    coords = _coords_matrix(spec.q, n)
    sumsq, _, _ = _backend.family_stats(
        codes, coords, spec.add_table, spec.mul_table, spec.q, n
    )
    return sum(int(v) for v in sumsq)


def hillclimb_search(config: CampaignConfig) -> CampaignResult:
    """Greedy single-coordinate search for large average collision.

    Each restart starts from a fresh random table and proposes one
    output change per iteration, accepting exact strict improvements of
    the integer collision total.  The accepted trajectory is recorded;
    the bound must never be exceeded along the way.
    """
    if config.mode != "hillclimb":
        raise ValueError(f"config mode must be 'hillclimb', got {config.mode!r}")
    if config.iters < 1:
        raise ValueError(f"need at least one iteration, got {config.iters}")
    if config.restarts < 1:
        raise ValueError(f"need at least one restart, got {config.restarts}")
    spec = field_for_order(config.q)
    n = config.n
    size = spec.q**n
    _require_budget(size * size, resolve_budget(config.budget),
                    f"family averages over GF({config.q})^{n}")
    bound = average_bounds(config.q, n).cp_bound
    start = time.perf_counter()
    rng = SplitMix64(config.seed)
    rows = []
    violations = []
    trajectories = []
    max_cp: Fraction | None = None
    denom = size**3
    for restart in range(config.restarts):
        codes = np.fromiter(
            (rng.below(size) for _ in range(size)), dtype=np.int64, count=size
        )
        total = _collision_total(spec, codes, n)
        steps = [(0, Fraction(total, denom))]
        for step in range(1, config.iters + 1):
            pos = rng.below(size)
            val = rng.below(size)
            old = int(codes[pos])
            if val == old:
                continue
            codes[pos] = val
            candidate = _collision_total(spec, codes, n)
            if candidate > total:
                total = candidate
                steps.append((step, Fraction(total, denom)))
            else:
                codes[pos] = old
        f = FunctionTable(spec, n, codes)
        report = family_averages(f, budget=config.budget)
        rows.append(InstanceRow.from_report(report))
        violations.extend(instance_violations(f, report, budget=config.budget))
        best_cp = Fraction(total, denom)
        if best_cp != report.avg_cp:
            violations.append(
                f"restart {restart}: trajectory best {rational_str(best_cp)} "
                f"disagrees with report {rational_str(report.avg_cp)}"
            )
        trajectories.append(
            {
                "restart": restart,
                "best_cp": best_cp,
                "steps": steps,
                "codes": tuple(int(c) for c in codes),
            }
        )
        if max_cp is None or best_cp > max_cp:
            max_cp = best_cp
    assert max_cp is not None
    summary = {
        "restarts": config.restarts,
        "iters": config.iters,
        "bound": rational_str(bound),
        "bound_attained": max_cp == bound,
    }
    return CampaignResult(
        config=config,
        rows=tuple(rows),
        summary=summary,
        max_avg_cp=max_cp,
        argmax=None,
        trajectories=tuple(trajectories),
        violations=tuple(violations),
        wall_time=time.perf_counter() - start,
    )
