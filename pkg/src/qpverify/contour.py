"""Derivative-free argument-principle engine on period parallelograms.

The number of zeros of an entire function inside a closed contour equals
the winding number of its image around 0.  Instead of integrating f'/f,
the engine samples f along the parallelogram boundary and tracks a
continuous branch of arg f; every phase step is kept below pi/2 by adaptive
bisection, which makes the branch choice unambiguous, and the total change
divided by 2*pi is the winding number.

`locate_zeros` refines the count into locations by four-way subdivision:
sub-cells with winding 0 are discarded, the rest are split until smaller
than the tolerance, and each surviving cell center is polished by a few
secant steps.  Everything is deterministic for fixed options and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import median
from typing import Callable

from .errors import (
    BoundaryZeroError,
    BudgetExceededError,
    DomainError,
    InconsistentWindingError,
    NoAdmissibleBaseError,
)
from .rng import Lcg

ComplexFn = Callable[[complex], complex]

TWO_PI = 2 * math.pi
_MAX_STEP = math.pi / 2
_MAG_RATIO = 8.0  # adjacent |f| ratio that forces a bisection


@dataclass(frozen=True)
class Parallelogram:
    """Cell with vertices base, base+gen1, base+gen1+gen2, base+gen2."""

    base: complex
    gen1: complex
    gen2: complex

    def __post_init__(self):
        ratio = self.gen2 / self.gen1
        if not (ratio.imag > 0):
            raise DomainError(f"Im(gen2/gen1)={ratio.imag} must be positive")

    def vertices(self) -> tuple[complex, complex, complex, complex]:
        b, g1, g2 = self.base, self.gen1, self.gen2
        return (b, b + g1, b + g1 + g2, b + g2)

    def point(self, s: float) -> complex:
        """Boundary point at global parameter s in [0, 4), one unit per edge."""
        v = self.vertices()
        edge = min(int(s), 3)
        t = s - edge
        nxt = v[(edge + 1) % 4]
        return v[edge] + t * (nxt - v[edge])

    @property
    def diameter(self) -> float:
        return abs(self.gen1) + abs(self.gen2)

    def center(self) -> complex:
        return self.base + (self.gen1 + self.gen2) / 2


@dataclass(frozen=True)
class WindingOptions:
    init_samples: int = 256  # per edge
    max_samples: int = 1 << 20  # total f evaluations
    min_abs_threshold: float | None = None  # default: 1e-10 * boundary median |f|


DEFAULT_OPTIONS = WindingOptions()


@dataclass(frozen=True)
class WindingCertificate:
    winding: int
    min_abs_on_boundary: float
    max_phase_step: float
    samples_used: int


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(f"sample budget {self.limit} exhausted")


def winding_count(
    f: ComplexFn,
    p: Parallelogram,
    opts: WindingOptions = DEFAULT_OPTIONS,
    _budget: _Budget | None = None,
) -> WindingCertificate:
    """Winding number of f around the parallelogram boundary, certified.

    Adaptive: any segment whose phase step reaches pi/2 is bisected until
    the budget runs out; any sample with |f| below the threshold raises
    BoundaryZeroError (the caller should pick a different base point).
    Deterministic for fixed inputs.
    """
    budget = _budget or _Budget(opts.max_samples)
    n0 = 4 * opts.init_samples
    params = [4.0 * i / n0 for i in range(n0)]
    params.append(4.0)
    budget.spend(n0)
    values = [f(p.point(s)) for s in params[:-1]]
    values.append(values[0])  # closed path: s=4 is the base point again

    mags = [abs(v) for v in values[:-1]]
    med = median(mags)
    threshold = opts.min_abs_threshold if opts.min_abs_threshold is not None else 1e-10 * med
    low = min(mags)
    if low <= threshold:
        raise BoundaryZeroError(
            f"|f| = {low:.3e} <= threshold {threshold:.3e} on the boundary; re-base the cell"
        )

    # Refine until all phase steps are < pi/2.  A large magnitude ratio
    # between neighbours also forces a bisection: near a zero the image arc
    # can sweep almost a full turn while the endpoint phases barely differ,
    # and the |f| dip is the observable symptom.
    i = 0
    while i < len(params) - 1:
        a, b = values[i], values[i + 1]
        ma, mb = abs(a), abs(b)
        needs_split = abs(_phase_step(a, b)) >= _MAX_STEP or (
            max(ma, mb) > _MAG_RATIO * min(ma, mb)
        )
        if not needs_split:
            i += 1
            continue
        budget.spend()
        mid = (params[i] + params[i + 1]) / 2
        vmid = f(p.point(mid))
        if abs(vmid) <= threshold:
            raise BoundaryZeroError(
                f"|f| = {abs(vmid):.3e} <= threshold {threshold:.3e} near s={mid:.4f}"
            )
        params.insert(i + 1, mid)
        values.insert(i + 1, vmid)

    min_abs = min(abs(v) for v in values[:-1])
    total = 0.0
    max_step = 0.0
    for i in range(len(values) - 1):
        d = _phase_step(values[i], values[i + 1])
        max_step = max(max_step, abs(d))
        total += d
    winding = round(total / TWO_PI)
    drift = abs(total / TWO_PI - winding)
    if drift >= 0.25:
        raise InconsistentWindingError(
            f"accumulated argument {total / TWO_PI:.3f} turns is not near an integer"
        )
    return WindingCertificate(winding, min_abs, max_step, len(values))


def _phase_step(a: complex, b: complex) -> float:
    """Principal argument of b/a in (-pi, pi]."""
    return math.atan2((b / a).imag, (b / a).real)


def choose_admissible_base(
    f: ComplexFn,
    gen1: complex,
    gen2: complex,
    seed: int,
    *,
    abs_floor: float = 0.0,
    retries: int = 16,
    scan_points: int = 64,
) -> complex:
    """Deterministic base point whose cell boundary stays away from zeros.

    Draws (u, v) in (0, 1)^2 from the seeded generator, bases the cell at
    -(gen1+gen2)/2 + u*gen1 + v*gen2, and accepts once a coarse boundary
    scan has min |f| > 1e-6 * median |f| (and above `abs_floor`, which
    callers use to detect functions that are numerically identically zero).
    """
    rng = Lcg(seed)
    anchor = -(gen1 + gen2) / 2
    last = ""
    for _ in range(retries):
        u, v = rng.uniform(), rng.uniform()
        base = anchor + u * gen1 + v * gen2
        cell = Parallelogram(base, gen1, gen2)
        mags = [abs(f(cell.point(4.0 * i / scan_points))) for i in range(scan_points)]
        med = median(mags)
        low = min(mags)
        if med > abs_floor and low > max(1e-6 * med, abs_floor):
            return base
        last = f"min |f| = {low:.3e}, median = {med:.3e}"
    raise NoAdmissibleBaseError(
        f"no admissible base after {retries} tries ({last}); "
        "f may be identically ~0, in which case zero counting does not apply"
    )


@dataclass(frozen=True)
class LocatedZero:
    zero: complex
    multiplicity: int


_CHILD_SAMPLES = 64
_SPLIT_RETRIES = 6


def _split_fractions(cell: Parallelogram) -> list[tuple[float, float]]:
    """Midpoint split plus cell-dependent ~1% perturbations.

    Deriving the retry offsets from the cell geometry keeps the scheme
    deterministic while preventing a zero that sits on one level's split
    line from hitting the same fraction on every deeper level.
    """
    import zlib

    seed = zlib.crc32(repr((cell.base, cell.gen1, cell.gen2)).encode())
    rng = Lcg(seed)
    out = [(0.5, 0.5)]
    for _ in range(_SPLIT_RETRIES - 1):
        out.append((rng.uniform_in(0.47, 0.53), rng.uniform_in(0.47, 0.53)))
    return out


def locate_zeros(
    f: ComplexFn,
    p: Parallelogram,
    expected: int,
    tol: float,
    opts: WindingOptions = DEFAULT_OPTIONS,
) -> list[LocatedZero]:
    """Locate the `expected` zeros of f inside p by recursive subdivision.

    Pre: winding_count(f, p) = expected already succeeded for this cell.
    Sub-cell windings must sum to the parent winding at every split; when a
    zero sits on (or hugs) a split line -- detected as a boundary-zero hit,
    a sum mismatch, or an irreconcilable subtree -- the split lines are
    perturbed by about 1% of the cell size and the split retried, with
    failures backtracking to the ancestor whose split caused them.
    Multiplicity is the sub-cell winding at tolerance scale; confluent
    zeros closer than `tol` are not separated.  Zeros are polished by 5
    secant iterations.
    """
    budget = _Budget(opts.max_samples)
    child_opts = WindingOptions(_CHILD_SAMPLES, opts.max_samples, opts.min_abs_threshold)

    def descend(cell: Parallelogram, count: int) -> list[LocatedZero]:
        if count == 0:
            return []
        if cell.diameter < tol:
            return [LocatedZero(_polish(f, cell.center(), tol), count)]
        last_exc: Exception | None = None
        for fu, fv in _split_fractions(cell):
            try:
                children = _split(cell, fu, fv)
                windings = [winding_count(f, c, child_opts, budget).winding for c in children]
                if sum(windings) != count:
                    raise InconsistentWindingError(
                        f"child windings {windings} do not sum to parent {count}"
                    )
                out: list[LocatedZero] = []
                for child, w in zip(children, windings):
                    out.extend(descend(child, w))
                return out
            except BudgetExceededError:
                raise
            except (BoundaryZeroError, InconsistentWindingError) as exc:
                # this split (or a decomposition it forced further down)
                # put a zero too close to a contour; try shifted split lines
                last_exc = exc
                continue
        raise last_exc if last_exc is not None else BoundaryZeroError(
            "all split-line perturbations failed"
        )

    found = descend(p, expected)
    total = sum(z.multiplicity for z in found)
    if total != expected:
        raise InconsistentWindingError(f"located multiplicities sum to {total}, expected {expected}")
    return sorted(found, key=lambda z: (z.zero.real, z.zero.imag))


def _split(cell: Parallelogram, fu: float, fv: float) -> list[Parallelogram]:
    b, g1, g2 = cell.base, cell.gen1, cell.gen2
    a1, b1 = g1 * fu, g1 * (1 - fu)
    a2, b2 = g2 * fv, g2 * (1 - fv)
    return [
        Parallelogram(b, a1, a2),
        Parallelogram(b + a1, b1, a2),
        Parallelogram(b + a2, a1, b2),
        Parallelogram(b + a1 + a2, b1, b2),
    ]


def _polish(f: ComplexFn, z0: complex, tol: float) -> complex:
    """5 secant iterations from the cell center; keeps the best |f| seen."""
    z_prev, z = z0, z0 + tol
    f_prev, f_cur = f(z_prev), f(z)
    best, best_mag = (z_prev, abs(f_prev)) if abs(f_prev) < abs(f_cur) else (z, abs(f_cur))
    for _ in range(5):
        denom = f_cur - f_prev
        if denom == 0:
            break
        z_next = z - f_cur * (z - z_prev) / denom
        z_prev, f_prev = z, f_cur
        z, f_cur = z_next, f(z_next)
        if abs(f_cur) < best_mag:
            best, best_mag = z, abs(f_cur)
    return best
