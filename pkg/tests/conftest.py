"""Shared builders for the test suite."""
import random

from xrank.exactlin import FieldSpec, vec_add, vec_scale
from xrank.geometry import MppPoint, MultiProjectiveSpace, Tensor, embed, random_point

QQ = FieldSpec.parse("QQ")


def gf(p):
    return FieldSpec(p)


def segre(dims, field=QQ):
    return MultiProjectiveSpace.segre(tuple(dims), field)


def veronese(n, d, field=QQ):
    return MultiProjectiveSpace.veronese(n, d, field)


def pt(space, *vecs):
    return MppPoint.of(space, list(vecs))


def lin_comb(space, points, coeffs=None):
    """Tensor with coordinates sum_i c_i * embed(points[i]); c_i default 1."""
    field = space.field
    if coeffs is None:
        coeffs = [1] * len(points)
    acc = None
    for c, p in zip(coeffs, points):
        term = vec_scale(field, field.coerce(c), embed(space, p).coords)
        acc = term if acc is None else vec_add(field, acc, term)
    return Tensor.of(space, acc)


def distinct_points(space, count, rng, box=9):
    """Pairwise distinct canonical points.  No independence promise."""
    seen, out = set(), []
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 400 * count:
            raise RuntimeError("point sampling starved")
        p = random_point(space, rng_seed=rng.getrandbits(32), box=box)
        if p.coords not in seen:
            seen.add(p.coords)
            out.append(p)
    return out


def fresh_rng(seed):
    return random.Random(seed)
