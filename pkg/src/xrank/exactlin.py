"""Exact scalars and dense linear algebra over Q and GF(p).

Raw scalar values are `fractions.Fraction` over the rationals and plain
ints in [0, p) over a prime field; `FieldSpec` owns the raw arithmetic.
`Scalar` wraps a raw value with its field for the public surface and for
serialization ("a/b" or "a" over Q, a decimal residue over GF(p)).

Rank over Q runs fraction-free (Bareiss) on denominator-cleared integer
rows; over GF(p) it is plain elimination mod p.  Pivoting is deterministic:
first nonzero entry, scanning rows in order.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import DimensionMismatch, DivisionByZero, MixedFields


def is_prime(n: int) -> bool:
    """Trial-division primality check; moduli here are desk scale."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


_FIELD_RE = re.compile(r"^GF\((\d+)\)$")


@dataclass(frozen=True)
class FieldSpec:
    """The rationals (modulus None) or the prime field GF(modulus)."""

    modulus: int | None = None

    def __post_init__(self):
        if self.modulus is not None and not is_prime(self.modulus):
            raise ValueError("modulus %r is not prime" % (self.modulus,))

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        if text == "QQ":
            return cls(None)
        m = _FIELD_RE.match(text)
        if m:
            return cls(int(m.group(1)))
        raise ValueError("unrecognized field %r (want 'QQ' or 'GF(p)')" % (text,))

    @property
    def is_finite(self) -> bool:
        return self.modulus is not None

    def __str__(self):
        return "QQ" if self.modulus is None else "GF(%d)" % self.modulus

    # -- raw-value arithmetic -------------------------------------------

    def zero(self):
        return 0 if self.modulus else Fraction(0)

    def one(self):
        return 1 if self.modulus else Fraction(1)

    def coerce(self, value):
        """Normalize an int/Fraction into this field's raw representation."""
        p = self.modulus
        if p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise DivisionByZero("denominator divisible by %d" % p)
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def add(self, a, b):
        return (a + b) % self.modulus if self.modulus else a + b

    def sub(self, a, b):
        return (a - b) % self.modulus if self.modulus else a - b

    def mul(self, a, b):
        return (a * b) % self.modulus if self.modulus else a * b

    def neg(self, a):
        return (-a) % self.modulus if self.modulus else -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero in %s" % self)
        return pow(a, -1, self.modulus) if self.modulus else 1 / a

    def div(self, a, b):
        if b == 0:
            raise DivisionByZero("division by zero in %s" % self)
        return a * pow(b, -1, self.modulus) % self.modulus if self.modulus else a / b

    def parse_scalar(self, text: str):
        """Parse "a" or "a/b" (decimal residue over GF(p))."""
        if self.modulus is None:
            return Fraction(text)
        return self.coerce(Fraction(text))

    def format_scalar(self, value) -> str:
        return str(value)

    def random_element(self, rng, box: int = 50, nonzero: bool = False):
        """Uniform raw element; over Q an integer from [-box, box]."""
        while True:
            if self.modulus is not None:
                v = rng.randrange(self.modulus)
            else:
                v = Fraction(rng.randint(-box, box))
            if v != 0 or not nonzero:
                return v


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field."""

    field: FieldSpec
    value: Fraction | int

    @classmethod
    def of(cls, field: FieldSpec, value) -> "Scalar":
        return cls(field, field.coerce(value))

    @classmethod
    def parse(cls, field: FieldSpec, text: str) -> "Scalar":
        return cls(field, field.parse_scalar(text))

    def _check(self, other: "Scalar"):
        if self.field != other.field:
            raise MixedFields("%s vs %s" % (self.field, other.field))

    def __add__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other):
        self._check(other)
        return Scalar(self.field, self.field.div(self.value, other.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inv(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.value))

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self):
        return self.field.format_scalar(self.value)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, _b: -a,
    "inv": lambda a, _b: a.inv(),
}


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    """Dispatch one arithmetic step: op in add/sub/mul/div/neg/inv."""
    try:
        f = _OPS[op]
    except KeyError:
        raise ValueError("unknown op %r" % (op,))
    return f(a, b)


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix of raw values over one field."""

    field: FieldSpec
    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_rows(cls, field: FieldSpec, rows) -> "Matrix":
        rows = [tuple(field.coerce(v) for v in r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
        flat = tuple(v for r in rows for v in r)
        return cls(field, len(rows), ncols, flat)

    @classmethod
    def from_columns(cls, field: FieldSpec, cols) -> "Matrix":
        cols = [tuple(c) for c in cols]
        if cols:
            n = len(cols[0])
            rows = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
        else:
            rows = []
        return cls.from_rows(field, rows)

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.field, self.entries[i * self.cols + j])


# -- elimination kernels on raw rows ------------------------------------


def rref(field: FieldSpec, rows):
    """Reduced row echelon form.

    Returns (new_rows, pivot_cols).  Deterministic: for each column the
    first remaining row with a nonzero entry pivots.  Exact over both
    fields; over Q this is plain Fraction arithmetic (solving wants the
    actual reduced system, rank alone uses the Bareiss path below).
    """
    work = [list(r) for r in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if work[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        piv = work[r][c]
        if piv != field.one():
            inv = field.inv(piv)
            work[r] = [field.mul(v, inv) for v in work[r]]
        for i in range(nrows):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                ri, rr = work[i], work[r]
                work[i] = [field.sub(ri[j], field.mul(f, rr[j]))
                           for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return work, pivots


def _rank_bareiss(int_rows) -> int:
    """Fraction-free rank of integer rows (Bareiss one-step elimination)."""
    work = [list(r) for r in int_rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    prev = 1
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if work[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        piv = work[r][c]
        for i in range(r + 1, nrows):
            lead = work[i][c]
            row_i, row_r = work[i], work[r]
            work[i] = [(piv * row_i[j] - lead * row_r[j]) // prev
                       for j in range(ncols)]
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def rank_rows(field: FieldSpec, rows) -> int:
    """Rank of a list of raw-value row vectors."""
    rows = [r for r in rows if any(v != 0 for v in r)]
    if not rows:
        return 0
    if field.modulus is None:
        cleared = []
        for r in rows:
            r = [Fraction(v) for v in r]
            den = 1
            for v in r:
                den = den * v.denominator // _gcd(den, v.denominator)
            cleared.append([int(v * den) for v in r])
        return _rank_bareiss(cleared)
    # GF(p): plain elimination.
    p = field.modulus
    work = [list(r) for r in rows]
    nrows, ncols = len(work), len(work[0])
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if work[i][c] % p != 0:
                pr = i
                break
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = pow(work[r][c], -1, p)
        work[r] = [v * inv % p for v in work[r]]
        for i in range(r + 1, nrows):
            f = work[i][c] % p
            if f:
                row_i, row_r = work[i], work[r]
                work[i] = [(row_i[j] - f * row_r[j]) % p for j in range(ncols)]
        r += 1
        if r == nrows:
            break
    return r


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def mat_rank(m: Matrix) -> int:
    return rank_rows(m.field, [m.row(i) for i in range(m.rows)])


class CoordinateSolution(NamedTuple):
    """Solve result: coefficient list (None when inconsistent) and whether
    the generators were linearly independent."""

    coefficients: tuple | None
    independent: bool


def solve_columns(field: FieldSpec, columns, target) -> CoordinateSolution:
    """Express target as a combination of the given raw column vectors.

    Free variables (dependent generators) are set to zero, so the returned
    combination is one valid choice; it is unique iff independent.
    """
    ncols = len(columns)
    dim = len(target)
    for c in columns:
        if len(c) != dim:
            raise DimensionMismatch("column length %d vs target %d"
                                    % (len(c), dim))
    aug = [[columns[j][i] for j in range(ncols)] + [target[i]]
           for i in range(dim)]
    red, pivots = rref(field, aug)
    independent = sum(1 for pc in pivots if pc < ncols) == ncols
    if any(pc == ncols for pc in pivots):
        return CoordinateSolution(None, independent)
    coeffs = [field.zero()] * ncols
    for i, pc in enumerate(pivots):
        coeffs[pc] = red[i][ncols]
    return CoordinateSolution(tuple(coeffs), independent)


def coordinates(generators: Matrix, target) -> CoordinateSolution:
    """Coordinates of target in the span of the matrix columns.

    target: sequence of Scalars or raw values in the matrix field.
    """
    field = generators.field
    tv = []
    for v in target:
        if isinstance(v, Scalar):
            if v.field != field:
                raise MixedFields("%s target vs %s matrix" % (v.field, field))
            tv.append(v.value)
        else:
            tv.append(field.coerce(v))
    if len(tv) != generators.rows:
        raise DimensionMismatch("target length %d vs %d rows"
                                % (len(tv), generators.rows))
    cols = [generators.column(j) for j in range(generators.cols)]
    return solve_columns(field, cols, tv)


# -- small vector helpers used across modules ---------------------------


def vec_add(field, a, b):
    if len(a) != len(b):
        raise DimensionMismatch("vector lengths %d vs %d" % (len(a), len(b)))
    return tuple(field.add(x, y) for x, y in zip(a, b))


def vec_sub(field, a, b):
    if len(a) != len(b):
        raise DimensionMismatch("vector lengths %d vs %d" % (len(a), len(b)))
    return tuple(field.sub(x, y) for x, y in zip(a, b))


def vec_scale(field, c, a):
    return tuple(field.mul(c, x) for x in a)


def in_span(field, rows, vec) -> bool:
    """Whether vec lies in the row span of rows."""
    base = [r for r in rows if any(v != 0 for v in r)]
    if not any(v != 0 for v in vec):
        return True
    return rank_rows(field, base + [list(vec)]) == rank_rows(field, base)
