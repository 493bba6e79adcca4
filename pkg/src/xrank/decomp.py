"""Decompositions: irredundancy verification, envelopes, fiber condition.

A decomposition is a finite set of variety points plus a target tensor.
It irredundantly spans the target when the target lies in the span of the
embedded points but in no proper subset's span; for an independent point
set this is equivalent to all coordinates being nonzero, and dependent
sets are never irredundant (the target would already lie in the span of
an independent subset).  Both routes are implemented; the subset route is
the cross-testing fallback.
"""

import itertools
from dataclasses import dataclass

from .errors import (DimensionMismatch, EmptySet, InvalidInput, NotContained,
                     SpaceMismatch, UnsupportedDegree)
from .exactlin import Scalar, rank_rows, solve_columns
from .geometry import (MppPoint, MultiProjectiveSpace, SubspaceSpec, Tensor,
                       canonical_basis_rows, embed)


@dataclass(frozen=True)
class IrredundancyReport:
    independent: bool
    in_span: bool
    coefficients: tuple | None
    irredundant: bool

    def to_json(self) -> dict:
        return {
            "independent": self.independent,
            "in_span": self.in_span,
            "coefficients": (None if self.coefficients is None
                             else [str(c) for c in self.coefficients]),
            "irredundant": self.irredundant,
        }


@dataclass(frozen=True)
class Envelope:
    """Minimal per-factor subspaces: a sub-multiprojective space."""

    subspace: SubspaceSpec
    dims: tuple

    @property
    def is_full(self) -> bool:
        return self.dims == self.subspace.space.factor_dims

    def to_json(self) -> dict:
        d = self.subspace.to_json()
        d["dims"] = list(self.dims)
        return d


@dataclass(frozen=True)
class FiberViolation:
    i: int
    j: int
    free_factor: int


@dataclass(frozen=True)
class FiberReport:
    holds: bool
    violations: tuple

    def to_json(self) -> dict:
        return {"holds": self.holds,
                "violations": [{"i": v.i, "j": v.j,
                                "free_factor": v.free_factor}
                               for v in self.violations]}


class Decomposition:
    """Point list plus target tensor on one space; caches verification."""

    def __init__(self, space: MultiProjectiveSpace, points, target: Tensor,
                 provenance: dict | None = None):
        points = tuple(points)
        for p in points:
            if p.space != space:
                raise SpaceMismatch("point on a different space")
        if target.space != space:
            raise SpaceMismatch("target on a different space")
        if len(set(p.coords for p in points)) != len(points):
            raise InvalidInput("points are not pairwise distinct")
        self.space = space
        self.points = points
        self.target = target
        self.provenance = provenance
        self._columns = None
        self._report = None

    def __eq__(self, other):
        return (isinstance(other, Decomposition)
                and self.space == other.space
                and self.points == other.points
                and self.target == other.target)

    def __hash__(self):
        return hash((self.space, self.points, self.target))

    @property
    def embedded_columns(self):
        if self._columns is None:
            self._columns = [embed(self.space, p).coords
                             for p in self.points]
        return self._columns

    def to_json(self) -> dict:
        d = {"space": self.space.to_json(),
             "points": [p.to_json() for p in self.points],
             "target": self.target.to_json()}
        if self.provenance is not None:
            d["provenance"] = self.provenance
        return d

    @classmethod
    def from_json(cls, data: dict) -> "Decomposition":
        try:
            space = MultiProjectiveSpace.from_json(data["space"])
            points = [MppPoint.from_json(space, p) for p in data["points"]]
            target = Tensor.from_json(space, data["target"])
            prov = data.get("provenance")
        except (KeyError, TypeError) as e:
            raise InvalidInput("bad decomposition document: %s" % e)
        return cls(space, points, target, prov)


def verify_irredundant(d: Decomposition) -> IrredundancyReport:
    """Coefficient-criterion verification (the fast route).

    Independent and in span with all coefficients nonzero <=> irredundant.
    Coefficients are reported whenever the target is in the span, even for
    dependent sets (then they are one valid choice, not unique).
    """
    if d._report is not None:
        return d._report
    if not d.points:
        raise EmptySet("decomposition has no points")
    field = d.space.field
    sol = solve_columns(field, d.embedded_columns, d.target.coords)
    in_span = sol.coefficients is not None
    coeffs = (tuple(Scalar(field, c) for c in sol.coefficients)
              if in_span else None)
    irr = (sol.independent and in_span
           and all(c != 0 for c in sol.coefficients))
    d._report = IrredundancyReport(sol.independent, in_span, coeffs, irr)
    return d._report


def verify_irredundant_exhaustive(d: Decomposition) -> IrredundancyReport:
    """Definition-based fallback: the target must be in the span and out of
    the span of every cardinality-(n-1) subset.  Cross-testing oracle for
    verify_irredundant; exponential only in the subset count n."""
    if not d.points:
        raise EmptySet("decomposition has no points")
    field = d.space.field
    cols = d.embedded_columns
    sol = solve_columns(field, cols, d.target.coords)
    in_span = sol.coefficients is not None
    irr = in_span
    if in_span and len(cols) > 1:
        for drop in range(len(cols)):
            rows = [cols[i] for i in range(len(cols)) if i != drop]
            sub = solve_columns(field, rows, d.target.coords)
            if sub.coefficients is not None:
                irr = False
                break
    coeffs = (tuple(Scalar(field, c) for c in sol.coefficients)
              if in_span else None)
    return IrredundancyReport(sol.independent, in_span, coeffs, irr)


def set_envelope(space: MultiProjectiveSpace, points) -> Envelope:
    """Per-factor spans of the point projections (minimal containing
    sub-multiprojective space of the set)."""
    points = tuple(points)
    if not points:
        raise EmptySet("envelope of an empty set")
    for p in points:
        if p.space != space:
            raise SpaceMismatch("point on a different space")
    bases = []
    for i in range(space.k):
        rows = [p.coords[i] for p in points]
        bases.append(canonical_basis_rows(space.field, rows))
    sub = SubspaceSpec.of(space, bases)
    return Envelope(sub, sub.dims)


def _flattening_rows(q: Tensor, mode: int):
    """Rows of the mode-i flattening transpose: one row per index combo of
    the other factors, entries running over factor-i coordinates."""
    space = q.space
    counts = [n + 1 for n in space.factor_dims]
    strides = [1] * space.k
    for i in range(space.k - 2, -1, -1):
        strides[i] = strides[i + 1] * counts[i + 1]
    other = [i for i in range(space.k) if i != mode]
    rows = []

    def rec(pos, base):
        if pos == len(other):
            rows.append(tuple(q.coords[base + a * strides[mode]]
                              for a in range(counts[mode])))
            return
        f = other[pos]
        for a in range(counts[f]):
            rec(pos + 1, base + a * strides[f])

    rec(0, 0)
    return rows


def tensor_envelope(q: Tensor) -> Envelope:
    """Minimal sub-Segre containing the tensor: per-mode column spans of
    the flattenings.  Degree-one (Segre) spaces only."""
    space = q.space
    if not space.is_segre:
        raise UnsupportedDegree("tensor envelope needs a Segre space")
    bases = []
    for i in range(space.k):
        rows = _flattening_rows(q, i)
        bases.append(canonical_basis_rows(space.field, rows))
    sub = SubspaceSpec.of(space, bases)
    return Envelope(sub, sub.dims)


def restrict_to_envelope(q: Tensor, env: Envelope) -> Tensor:
    """Coordinates of the tensor on the envelope's reduced space."""
    sub = env.subspace
    if sub.space != q.space:
        raise SpaceMismatch("envelope on a different space")
    sol = solve_columns(q.space.field, sub.span_columns(), q.coords)
    if sol.coefficients is None:
        raise NotContained("tensor is not in the envelope span")
    return Tensor.of(sub.reduced_space(), sol.coefficients)


def extend_from_envelope(reduced: Tensor, env: Envelope) -> Tensor:
    """Inverse of restrict_to_envelope: reduced coordinates back to the
    ambient tensor space."""
    sub = env.subspace
    f = sub.space.field
    cols = sub.span_columns()
    if len(cols) != len(reduced.coords):
        raise DimensionMismatch("reduced tensor does not match the envelope")
    n = len(cols[0])
    out = [f.zero()] * n
    for c, col in zip(reduced.coords, cols):
        if c != 0:
            for i in range(n):
                out[i] = f.add(out[i], f.mul(c, col[i]))
    return Tensor.of(sub.space, out)


def fiber_condition(d: Decomposition) -> FiberReport:
    """Minimal decompositions meet every fiber (one factor free, the others
    fixed) at most once; combinatorially, no two points may agree on all
    factors but one.  Segre spaces only."""
    if not d.space.is_segre:
        raise UnsupportedDegree("fiber condition needs a Segre space")
    if not d.points:
        raise EmptySet("fiber condition of an empty set")
    violations = []
    pts = d.points
    for i, j in itertools.combinations(range(len(pts)), 2):
        diffs = [f for f in range(d.space.k)
                 if pts[i].coords[f] != pts[j].coords[f]]
        if len(diffs) == 1:
            violations.append(FiberViolation(i, j, diffs[0]))
    return FiberReport(not violations, tuple(violations))
