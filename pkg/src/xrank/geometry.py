"""Multiprojective spaces, points, tensors and monomial embeddings.

A space is a product P^{n_1} x ... x P^{n_k} with a multidegree
(d_1, ..., d_k); the embedding evaluates, per factor, all degree-d_i
monomials (exponent vectors in leading-first lexicographic order) and
nests factors left to right, so the last factor's index moves fastest.
Projective representatives are canonical: first nonzero coordinate 1.
"""

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import (DimensionMismatch, FieldNotFinite, InvalidInput,
                     SpaceMismatch, ZeroFactor)
from .exactlin import FieldSpec, rank_rows, rref

DEFAULT_COORD_BOX = 50


@dataclass(frozen=True)
class MultiProjectiveSpace:
    """P^{n_1} x ... x P^{n_k} with multidegree and coefficient field."""

    factor_dims: tuple
    multidegree: tuple
    field: FieldSpec

    def __post_init__(self):
        dims = tuple(int(n) for n in self.factor_dims)
        degs = tuple(int(d) for d in self.multidegree)
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "multidegree", degs)
        if len(dims) == 0 or len(dims) != len(degs):
            raise InvalidInput("need matching nonempty dims and degrees")
        if any(n < 0 for n in dims):
            raise InvalidInput("factor dims must be >= 0")
        if any(d < 1 for d in degs):
            raise InvalidInput("degrees must be >= 1")

    @classmethod
    def segre(cls, dims, field: FieldSpec) -> "MultiProjectiveSpace":
        dims = tuple(dims)
        return cls(dims, (1,) * len(dims), field)

    @classmethod
    def veronese(cls, n: int, d: int, field: FieldSpec) -> "MultiProjectiveSpace":
        return cls((n,), (d,), field)

    @property
    def k(self) -> int:
        return len(self.factor_dims)

    @property
    def is_segre(self) -> bool:
        return all(d == 1 for d in self.multidegree)

    @property
    def is_veronese(self) -> bool:
        return self.k == 1

    def factor_monomial_counts(self) -> tuple:
        return tuple(math.comb(n + d, n)
                     for n, d in zip(self.factor_dims, self.multidegree))

    def to_json(self) -> dict:
        return {"dims": list(self.factor_dims),
                "degrees": list(self.multidegree),
                "field": str(self.field)}

    @classmethod
    def from_json(cls, data: dict) -> "MultiProjectiveSpace":
        try:
            return cls(tuple(data["dims"]), tuple(data["degrees"]),
                       FieldSpec.parse(data["field"]))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInput("bad space document: %s" % e)


def ambient_dim(space: MultiProjectiveSpace) -> int:
    """Projective dimension N of the embedding target: prod binom(n_i+d_i, n_i) - 1."""
    total = 1
    for c in space.factor_monomial_counts():
        total *= c
    return total - 1


@lru_cache(maxsize=None)
def monomial_exponents(n_vars: int, degree: int) -> tuple:
    """Exponent vectors of all degree-`degree` monomials in `n_vars`
    variables, leading variable first: (d,0,..) down to (0,..,d)."""
    if n_vars == 1:
        return ((degree,),)
    out = []
    for e0 in range(degree, -1, -1):
        for rest in monomial_exponents(n_vars - 1, degree - e0):
            out.append((e0,) + rest)
    return tuple(out)


def canonical_vector(field: FieldSpec, vec):
    """Scale so the first nonzero coordinate is 1; raises ZeroFactor."""
    vec = tuple(field.coerce(v) for v in vec)
    lead = None
    for v in vec:
        if v != 0:
            lead = v
            break
    if lead is None:
        raise ZeroFactor("zero vector has no projective class")
    if lead == field.one():
        return vec
    inv = field.inv(lead)
    return tuple(field.mul(inv, v) for v in vec)


@dataclass(frozen=True)
class MppPoint:
    """A point of a multiprojective space, one canonical vector per factor."""

    space: MultiProjectiveSpace
    coords: tuple

    @classmethod
    def of(cls, space: MultiProjectiveSpace, vectors) -> "MppPoint":
        vectors = tuple(tuple(v) for v in vectors)
        if len(vectors) != space.k:
            raise DimensionMismatch("expected %d factors, got %d"
                                    % (space.k, len(vectors)))
        canon = []
        for n, v in zip(space.factor_dims, vectors):
            if len(v) != n + 1:
                raise DimensionMismatch("factor vector length %d, want %d"
                                        % (len(v), n + 1))
            canon.append(canonical_vector(space.field, v))
        return cls(space, tuple(canon))

    def replace_factor(self, i: int, vector) -> "MppPoint":
        vecs = list(self.coords)
        vecs[i] = vector
        return MppPoint.of(self.space, vecs)

    def to_json(self) -> list:
        f = self.space.field
        return [[f.format_scalar(v) for v in vec] for vec in self.coords]

    @classmethod
    def from_json(cls, space: MultiProjectiveSpace, data) -> "MppPoint":
        try:
            vecs = [[space.field.parse_scalar(s) for s in vec] for vec in data]
        except (TypeError, ValueError) as e:
            raise InvalidInput("bad point document: %s" % e)
        return cls.of(space, vecs)


@dataclass(frozen=True)
class Tensor:
    """A point of the ambient projective space, canonical scaling."""

    space: MultiProjectiveSpace
    coords: tuple

    @classmethod
    def of(cls, space: MultiProjectiveSpace, coords) -> "Tensor":
        coords = tuple(coords)
        want = ambient_dim(space) + 1
        if len(coords) != want:
            raise DimensionMismatch("tensor length %d, ambient wants %d"
                                    % (len(coords), want))
        return cls(space, canonical_vector(space.field, coords))

    def to_json(self) -> list:
        f = self.space.field
        return [f.format_scalar(v) for v in self.coords]

    @classmethod
    def from_json(cls, space: MultiProjectiveSpace, data) -> "Tensor":
        try:
            coords = [space.field.parse_scalar(s) for s in data]
        except (TypeError, ValueError) as e:
            raise InvalidInput("bad tensor document: %s" % e)
        return cls.of(space, coords)


def _evaluate_monomials(field: FieldSpec, vec, degree: int):
    """Values of all degree-`degree` monomials at vec, embedding order."""
    n_vars = len(vec)
    powers = []
    for v in vec:
        row = [field.one()]
        for _ in range(degree):
            row.append(field.mul(row[-1], v))
        powers.append(row)
    out = []
    for expo in monomial_exponents(n_vars, degree):
        acc = field.one()
        for var, e in zip(range(n_vars), expo):
            if e:
                acc = field.mul(acc, powers[var][e])
        out.append(acc)
    return out


def embed(space: MultiProjectiveSpace, point: MppPoint) -> Tensor:
    """Segre-Veronese embedding of a point, canonical scaling."""
    if point.space != space:
        raise SpaceMismatch("point does not live on the given space")
    field = space.field
    coords = [field.one()]
    for vec, d in zip(point.coords, space.multidegree):
        vals = _evaluate_monomials(field, vec, d)
        coords = [field.mul(c, v) for c in coords for v in vals]
    return Tensor.of(space, coords)


def line_point(field: FieldSpec, a, w, t):
    """The vector a + t*w, unnormalized; a and w must have equal length."""
    if len(a) != len(w):
        raise DimensionMismatch("vector lengths %d vs %d" % (len(a), len(w)))
    tv = field.coerce(t.value if hasattr(t, "value") else t)
    return tuple(field.add(x, field.mul(tv, y)) for x, y in zip(a, w))


def random_point(space: MultiProjectiveSpace, rng_seed=0,
                 box: int = DEFAULT_COORD_BOX) -> MppPoint:
    """Deterministic pseudo-random point.

    rng_seed: an int seed or a random.Random instance (shared streams let
    callers draw sequences).  Over GF(p) each factor class is uniform;
    over Q raw coordinates are uniform integers in [-box, box], nonzero
    vectors only, then canonicalized.
    """
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    field = space.field
    vecs = []
    for n in space.factor_dims:
        while True:
            v = [field.random_element(rng, box) for _ in range(n + 1)]
            if any(x != 0 for x in v):
                break
        vecs.append(v)
    return MppPoint.of(space, vecs)


def _projective_vectors(field: FieldSpec, n: int):
    """All canonical representatives of P^n(GF(p)), ascending lex order."""
    p = field.modulus
    out = []
    for first in range(n + 1):
        # first nonzero at position `first`, later coordinates free
        free = n - first
        for tail in range(p ** free):
            digits = []
            t = tail
            for _ in range(free):
                digits.append(t % p)
                t //= p
            digits.reverse()
            out.append((0,) * first + (1,) + tuple(digits))
    out.sort()
    return out


def enumerate_points(space: MultiProjectiveSpace):
    """All points of a finite-field space, deterministic lexicographic order
    (factor-major, each factor's canonical vectors ascending)."""
    if not space.field.is_finite:
        raise FieldNotFinite("point enumeration needs GF(p)")
    per_factor = [_projective_vectors(space.field, n)
                  for n in space.factor_dims]
    points = []

    def rec(i, acc):
        if i == space.k:
            points.append(MppPoint(space, tuple(acc)))
            return
        for v in per_factor[i]:
            acc.append(v)
            rec(i + 1, acc)
            acc.pop()

    rec(0, [])
    return points


def count_points(space: MultiProjectiveSpace) -> int:
    if not space.field.is_finite:
        raise FieldNotFinite("point counting needs GF(p)")
    p = space.field.modulus
    total = 1
    for n in space.factor_dims:
        total *= (p ** (n + 1) - 1) // (p - 1)
    return total


# -- linear subspaces of a product space --------------------------------


def _poly_from_vector(vec):
    """Linear form sum vec[i]*x_i as {exponent tuple: coeff}."""
    n = len(vec)
    poly = {}
    for i, c in enumerate(vec):
        if c != 0:
            expo = tuple(1 if j == i else 0 for j in range(n))
            poly[expo] = c
    return poly


def _poly_mul(field, f, g):
    out = {}
    for ea, ca in f.items():
        for eb, cb in g.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = field.mul(ca, cb)
            if e in out:
                c = field.add(out[e], c)
            if c == 0:
                out.pop(e, None)
            else:
                out[e] = c
    return out


def substitution_columns(field: FieldSpec, basis, degree: int):
    """Degree-d monomials of the subspace, expanded in ambient monomials.

    basis: raw vectors spanning a subspace of K^{n+1}.  Returns one ambient
    coefficient column per reduced monomial (reduced monomials over the
    basis vectors, embedding order), i.e. the matrix through which the
    degree-d Veronese of the subspace factors.
    """
    n_amb = len(basis[0])
    amb_monos = monomial_exponents(n_amb, degree)
    amb_index = {e: i for i, e in enumerate(amb_monos)}
    lin = [_poly_from_vector(b) for b in basis]
    cols = []
    for expo in monomial_exponents(len(basis), degree):
        poly = {tuple(0 for _ in range(n_amb)): field.one()}
        for j, e in enumerate(expo):
            for _ in range(e):
                poly = _poly_mul(field, poly, lin[j])
        col = [field.zero()] * len(amb_monos)
        for e, c in poly.items():
            col[amb_index[e]] = c
        cols.append(tuple(col))
    return cols


@dataclass(frozen=True)
class SubspaceSpec:
    """Per-factor linear subspaces of a product space.

    factor_bases: one tuple of independent raw vectors per factor; the
    represented sub-multiprojective space is the product of their spans.
    """

    space: MultiProjectiveSpace
    factor_bases: tuple

    @classmethod
    def of(cls, space: MultiProjectiveSpace, factor_bases) -> "SubspaceSpec":
        bases = []
        if len(tuple(factor_bases)) != space.k:
            raise DimensionMismatch("expected %d factor bases" % space.k)
        for n, basis in zip(space.factor_dims, factor_bases):
            basis = tuple(tuple(space.field.coerce(v) for v in b)
                          for b in basis)
            if not basis:
                raise InvalidInput("empty factor basis")
            for b in basis:
                if len(b) != n + 1:
                    raise DimensionMismatch("basis vector length %d, want %d"
                                            % (len(b), n + 1))
            if rank_rows(space.field, basis) != len(basis):
                raise InvalidInput("factor basis is dependent")
            bases.append(basis)
        return cls(space, tuple(bases))

    @classmethod
    def full(cls, space: MultiProjectiveSpace) -> "SubspaceSpec":
        bases = []
        for n in space.factor_dims:
            bases.append(tuple(tuple(space.field.one() if i == j
                                     else space.field.zero()
                                     for j in range(n + 1))
                               for i in range(n + 1)))
        return cls(space, tuple(bases))

    @property
    def dims(self) -> tuple:
        """Projective dimension of each factor subspace."""
        return tuple(len(b) - 1 for b in self.factor_bases)

    @property
    def is_full(self) -> bool:
        return self.dims == self.space.factor_dims

    def reduced_space(self) -> MultiProjectiveSpace:
        return MultiProjectiveSpace(self.dims, self.space.multidegree,
                                    self.space.field)

    def contains_point(self, p: MppPoint) -> bool:
        if p.space != self.space:
            raise SpaceMismatch("point on a different space")
        f = self.space.field
        for basis, vec in zip(self.factor_bases, p.coords):
            if rank_rows(f, list(basis) + [vec]) != len(basis):
                return False
        return True

    def lift_point(self, reduced: MppPoint) -> MppPoint:
        """Map a point of the reduced space through the factor bases."""
        f = self.space.field
        vecs = []
        for basis, rv in zip(self.factor_bases, reduced.coords):
            if len(rv) != len(basis):
                raise DimensionMismatch("reduced factor length mismatch")
            amb = [f.zero()] * len(basis[0])
            for c, b in zip(rv, basis):
                for i, bv in enumerate(b):
                    amb[i] = f.add(amb[i], f.mul(c, bv))
            vecs.append(amb)
        return MppPoint.of(self.space, vecs)

    def span_columns(self):
        """Columns spanning the embedded image's linear span in the ambient
        tensor space (Kronecker product of per-factor substitution columns)."""
        f = self.space.field
        per_factor = [substitution_columns(f, basis, d)
                      for basis, d in zip(self.factor_bases,
                                          self.space.multidegree)]
        cols = [(f.one(),)]
        for fac in per_factor:
            cols = [tuple(f.mul(cv, fv) for cv in col for fv in fcol)
                    for col in cols for fcol in fac]
        return cols

    def to_json(self) -> dict:
        f = self.space.field
        return {"space": self.space.to_json(),
                "bases": [[[f.format_scalar(v) for v in b] for b in basis]
                          for basis in self.factor_bases]}

    @classmethod
    def from_json(cls, data: dict) -> "SubspaceSpec":
        try:
            space = MultiProjectiveSpace.from_json(data["space"])
            bases = [[[space.field.parse_scalar(s) for s in b]
                      for b in basis] for basis in data["bases"]]
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInput("bad subspace document: %s" % e)
        return cls.of(space, bases)


def canonical_basis_rows(field: FieldSpec, rows):
    """RREF nonzero rows: a deterministic canonical basis of a row span."""
    red, pivots = rref(field, rows)
    return tuple(tuple(r) for r in red[:len(pivots)])
