"""Randomize-and-verify constructions that grow irredundant decompositions.

Each operation draws random data under explicit non-degeneracy constraints,
builds a candidate, runs the exact verifier, and retries with fresh
randomness up to max_retries.  Outputs therefore never rely on genericity
arguments alone; every returned decomposition has been checked.  All draws
come from one seeded stream, so identical (input, seed, config) give
identical outputs.
"""

import random
from dataclasses import dataclass

from .decomp import Decomposition, set_envelope, verify_irredundant
from .errors import (BadM, DegenerateSpace, FieldTooSmall, GenericityExhausted,
                     InvalidInput, MinimalityNotCertified, NoEscapingFiber,
                     NotConcise, NotContainedInY, NotIrredundantInput,
                     NotVeronese, SpaceMismatch, TargetTooSmall,
                     UnsupportedDegree, YEqualsW)
from .exactlin import in_span, rank_rows, solve_columns
from .geometry import (MppPoint, SubspaceSpec, canonical_vector, embed,
                       line_point)


@dataclass(frozen=True)
class ConstructionConfig:
    rng_seed: int = 0
    max_retries: int = 64
    coord_box: int = 50

    def __post_init__(self):
        if self.max_retries < 1:
            raise InvalidInput("max_retries must be >= 1")
        if self.coord_box < 2:
            raise InvalidInput("coord_box must be >= 2")


def _draw_vector_off_span(field, rng, box, length, span_rows, tries=128):
    """Random nonzero vector outside the row span (rejection sampling)."""
    for _ in range(tries):
        v = tuple(field.random_element(rng, box) for _ in range(length))
        if any(x != 0 for x in v) and not in_span(field, span_rows, v):
            return v
    raise GenericityExhausted("no direction off the span after %d draws"
                              % tries)


def _line_candidates(field, rng, box, a_vec, w_vec, count):
    """`count` distinct points of the line through a and w, all differing
    from a.  Over GF(p) the line carries p such points; over Q distinct
    nonzero parameters are sampled from the coordinate box."""
    if field.is_finite:
        p = field.modulus
        if count > p:
            raise FieldTooSmall(
                "need %d distinct points on a line off its base point; "
                "GF(%d) offers %d" % (count, p, p))
        cands = [line_point(field, a_vec, w_vec, t) for t in range(1, p)]
        cands.append(tuple(w_vec))
        return rng.sample(cands, count)
    pop = [t for t in range(-box, box + 1) if t != 0]
    ts = rng.sample(pop, count)
    return [line_point(field, a_vec, w_vec, t) for t in ts]


def _certify_minimal_via_oracle(d, within=None):
    """Finite-field minimality certification (on demand; oracle import is
    local to keep this module usable without numpy)."""
    from .oracle import brute_rank
    cert = brute_rank(d.target, within=within)
    if cert.rank != len(d.points):
        raise MinimalityNotCertified(
            "oracle rank %d, input cardinality %d"
            % (cert.rank, len(d.points)))


def _base_provenance(name, cfg, assert_minimal, certified):
    return {"construction": name, "seed": cfg.rng_seed,
            "assert_minimal": bool(assert_minimal),
            "certified_minimal": bool(certified)}


def plus_one(d: Decomposition, cfg: ConstructionConfig | None = None, *,
             assert_minimal: bool = False,
             certify_minimal: bool = False) -> Decomposition:
    """Grow a minimal decomposition by one: replace one point by two points
    of a fiber line through it whose span escapes the current span.

    Scans (point, factor) pairs in deterministic order for a fiber with
    span not inside U = span of the embedded input; the replacement points
    sit on a random line through the chosen point inside that fiber, differ
    from all remaining points in the chosen factor, and embed outside U.
    The result is verified irredundant with cardinality #A + 1.
    """
    cfg = cfg or ConstructionConfig()
    space = d.space
    if not space.is_segre:
        raise UnsupportedDegree("plus_one needs a Segre space")
    if not all(n >= 1 for n in space.factor_dims):
        raise DegenerateSpace("plus_one needs positive factor dims")
    report = verify_irredundant(d)
    if not report.irredundant:
        raise NotIrredundantInput("input decomposition is not irredundant")
    if certify_minimal:
        _certify_minimal_via_oracle(d)
    field = space.field
    rng = random.Random(cfg.rng_seed)
    u_rows = [list(c) for c in d.embedded_columns]

    viable = []
    for ai, a in enumerate(d.points):
        for i in range(space.k):
            n = space.factor_dims[i]
            for j in range(n + 1):
                e = tuple(field.one() if t == j else field.zero()
                          for t in range(n + 1))
                fv = embed(space, a.replace_factor(i, e)).coords
                if not in_span(field, u_rows, fv):
                    viable.append((ai, i))
                    break
    if not viable:
        raise NoEscapingFiber(
            "every fiber span lies inside the input span; the input cannot "
            "be a minimal decomposition of a desk-scale target")

    for attempt in range(cfg.max_retries):
        ai, i = viable[attempt % len(viable)]
        a = d.points[ai]
        others = [p for idx, p in enumerate(d.points) if idx != ai]
        excluded = {p.coords[i] for p in others}
        try:
            w = _draw_vector_off_span(field, rng, cfg.coord_box,
                                      space.factor_dims[i] + 1,
                                      [a.coords[i]])
        except GenericityExhausted:
            continue
        if field.is_finite:
            # enumerate the whole line so exclusions cannot starve the draw
            p = field.modulus
            cands = [line_point(field, a.coords[i], w, t)
                     for t in range(1, p)] + [tuple(w)]
        else:
            cands = _line_candidates(field, rng, cfg.coord_box,
                                     a.coords[i], w, 4)
        usable = []
        for vvec in cands:
            cv = canonical_vector(field, vvec)
            if cv not in excluded and cv != a.coords[i]:
                usable.append(cv)
        if len(usable) < 2:
            continue
        u_vec, v_vec = (rng.sample(usable, 2) if field.is_finite
                        else usable[:2])
        u = a.replace_factor(i, u_vec)
        v = a.replace_factor(i, v_vec)
        if in_span(field, u_rows, embed(space, u).coords):
            continue
        if in_span(field, u_rows, embed(space, v).coords):
            continue
        prov = _base_provenance("plus_one", cfg, assert_minimal,
                                certify_minimal)
        prov.update({"replaced_point": ai, "factor": i,
                     "retries_used": attempt})
        try:
            cand = Decomposition(space, others + [u, v], d.target, prov)
        except InvalidInput:
            continue
        if verify_irredundant(cand).irredundant:
            return cand
    raise GenericityExhausted("plus_one failed after %d retries"
                              % cfg.max_retries)


def escape(d: Decomposition, ysub: SubspaceSpec,
           cfg: ConstructionConfig | None = None, *,
           assert_minimal: bool = False,
           certify_minimal: bool = False) -> Decomposition:
    """From a minimal decomposition inside a proper sub-space Y, build an
    irredundant decomposition of cardinality #A + 1 not contained in Y.

    Works in the first factor where Y is deficient (that factor must have
    degree one): one point is replaced by two points off Y's factor
    subspace on a line through it, so their span recovers the dropped
    point.  Output is verified irredundant and leaves Y by construction.
    """
    cfg = cfg or ConstructionConfig()
    space = d.space
    if ysub.space != space:
        raise SpaceMismatch("subspace spec is for a different space")
    if ysub.dims == space.factor_dims:
        raise YEqualsW("Y equals the ambient space")
    report = verify_irredundant(d)
    if not report.irredundant:
        raise NotIrredundantInput("input decomposition is not irredundant")
    for p in d.points:
        if not ysub.contains_point(p):
            raise NotContainedInY("input point outside Y")
    field = space.field
    span_cols = ysub.span_columns()
    if solve_columns(field, span_cols, d.target.coords).coefficients is None:
        raise NotContainedInY("target outside the span of Y's image")
    if certify_minimal:
        _certify_minimal_via_oracle(d, within=ysub)

    istar = next(i for i in range(space.k)
                 if ysub.dims[i] < space.factor_dims[i])
    if space.multidegree[istar] != 1:
        raise UnsupportedDegree(
            "the deficient factor must have degree one")
    h_rows = [list(b) for b in ysub.factor_bases[istar]]
    rng = random.Random(cfg.rng_seed)

    for attempt in range(cfg.max_retries):
        ai = attempt % len(d.points)
        a = d.points[ai]
        others = [p for idx, p in enumerate(d.points) if idx != ai]
        try:
            w = _draw_vector_off_span(field, rng, cfg.coord_box,
                                      space.factor_dims[istar] + 1, h_rows)
        except GenericityExhausted:
            continue
        cands = _line_candidates(field, rng, cfg.coord_box,
                                 a.coords[istar], w, 2)
        u = a.replace_factor(istar, cands[0])
        v = a.replace_factor(istar, cands[1])
        prov = _base_provenance("escape", cfg, assert_minimal,
                                certify_minimal)
        prov.update({"replaced_point": ai, "factor": istar,
                     "retries_used": attempt})
        try:
            cand = Decomposition(space, others + [u, v], d.target, prov)
        except InvalidInput:
            continue
        if not verify_irredundant(cand).irredundant:
            continue
        if all(ysub.contains_point(pt) for pt in cand.points):
            continue
        return cand
    raise GenericityExhausted("escape failed after %d retries"
                              % cfg.max_retries)


def concise_plus_m(d: Decomposition, m: int,
                   cfg: ConstructionConfig | None = None, *,
                   assert_minimal: bool = False,
                   certify_minimal: bool = False) -> Decomposition:
    """From a decomposition on Y' x {o} inside W = Y' x P^m (m >= 2),
    build an irredundant decomposition of cardinality #A + m whose set
    envelope is all of W.

    One point is replaced by m+1 points that copy its Y' part and carry
    spanning last-factor points c_0..c_m chosen so o avoids the span of
    every m of them; that keeps all coefficients nonzero.  The input's
    set envelope must already be full on the retained factors (tensor
    concision of the target for Y implies this).
    """
    cfg = cfg or ConstructionConfig()
    space = d.space
    if not space.is_segre:
        raise UnsupportedDegree("concise_plus_m needs a Segre space")
    if space.k < 2:
        raise InvalidInput("need a last factor separate from Y'")
    last = space.k - 1
    if m < 2 or space.factor_dims[last] != m:
        raise BadM("m must be >= 2 and equal the last factor dimension")
    report = verify_irredundant(d)
    if not report.irredundant:
        raise NotIrredundantInput("input decomposition is not irredundant")
    o = d.points[0].coords[last]
    if any(p.coords[last] != o for p in d.points):
        raise InvalidInput("input points do not share one last-factor point")
    field = space.field
    full = SubspaceSpec.full(space)
    ybases = list(full.factor_bases[:last]) + [(o,)]
    ysub = SubspaceSpec.of(space, ybases)
    if solve_columns(field, ysub.span_columns(),
                     d.target.coords).coefficients is None:
        raise NotContainedInY("target outside the span of Y' x {o}")
    env = set_envelope(space, d.points)
    if env.dims[:last] != space.factor_dims[:last]:
        raise NotConcise(
            "input envelope is deficient on the retained factors: %s"
            % (env.dims,))
    if certify_minimal:
        _certify_minimal_via_oracle(d, within=ysub)
    rng = random.Random(cfg.rng_seed)

    for attempt in range(cfg.max_retries):
        ai = attempt % len(d.points)
        a = d.points[ai]
        others = [p for idx, p in enumerate(d.points) if idx != ai]
        cs = []
        ok = True
        for _ in range(m + 1):
            for _try in range(64):
                v = tuple(field.random_element(rng, cfg.coord_box)
                          for _ in range(m + 1))
                if any(x != 0 for x in v):
                    break
            else:
                ok = False
                break
            cs.append(canonical_vector(field, v))
        if not ok or len(set(cs)) != m + 1:
            continue
        if rank_rows(field, cs) != m + 1:
            continue
        bad = False
        for drop in range(m + 1):
            sub = [cs[t] for t in range(m + 1) if t != drop]
            if in_span(field, sub, o):
                bad = True
                break
        if bad:
            continue
        new_pts = [a.replace_factor(last, c) for c in cs]
        prov = _base_provenance("concise_plus_m", cfg, assert_minimal,
                                certify_minimal)
        prov.update({"replaced_point": ai, "factor": last,
                     "retries_used": attempt})
        try:
            cand = Decomposition(space, others + new_pts, d.target, prov)
        except InvalidInput:
            continue
        if not verify_irredundant(cand).irredundant:
            continue
        if not set_envelope(space, cand.points).is_full:
            continue
        return cand
    raise GenericityExhausted("concise_plus_m failed after %d retries"
                              % cfg.max_retries)


def _extend_one_factor(d, factor, cfg, deg, construction, extra_prov):
    """Shared single-step line extension in one degree-d factor: replace a
    point by deg+1 distinct points of a line meeting the current factor
    span only at it; the factor envelope must grow by one and the result
    must verify.  Returns the new decomposition."""
    space = d.space
    field = space.field
    rng = random.Random(cfg.rng_seed)
    steps = extra_prov.get("steps", [])
    cur = d
    prev_dim = set_envelope(space, cur.points).dims[factor]
    for attempt in range(cfg.max_retries):
        ai = attempt % len(cur.points)
        a = cur.points[ai]
        others = [p for idx, p in enumerate(cur.points) if idx != ai]
        span_rows = [p.coords[factor] for p in cur.points]
        try:
            w = _draw_vector_off_span(field, rng, cfg.coord_box,
                                      space.factor_dims[factor] + 1,
                                      span_rows)
        except GenericityExhausted:
            continue
        gvecs = _line_candidates(field, rng, cfg.coord_box,
                                 a.coords[factor], w, deg + 1)
        new_pts = others + [a.replace_factor(factor, g) for g in gvecs]
        prov = dict(extra_prov)
        prov["steps"] = steps + [{"replaced_point": ai, "factor": factor,
                                  "retries_used": attempt}]
        try:
            cand = Decomposition(space, new_pts, cur.target, prov)
        except InvalidInput:
            continue
        if not verify_irredundant(cand).irredundant:
            continue
        if set_envelope(space, cand.points).dims[factor] != prev_dim + 1:
            continue
        return cand
    raise GenericityExhausted("%s step failed after %d retries"
                              % (construction, cfg.max_retries))


def veronese_extend(d: Decomposition, target_n: int,
                    cfg: ConstructionConfig | None = None) -> Decomposition:
    """Raise the span of a Veronese decomposition one dimension at a time
    until it has projective dimension target_n.

    Each step replaces one point by d+1 distinct points of a line that
    meets the current span only at it; cardinality grows by the degree per
    step, ending at #A + d*(target_n - m).  Minimality of the input is not
    required, only irredundance.
    """
    cfg = cfg or ConstructionConfig()
    space = d.space
    if space.k != 1:
        raise NotVeronese("veronese_extend needs a single-factor space")
    deg = space.multidegree[0]
    n = space.factor_dims[0]
    report = verify_irredundant(d)
    if not report.irredundant:
        raise NotIrredundantInput("input decomposition is not irredundant")
    m_cur = set_envelope(space, d.points).dims[0]
    if not (m_cur <= target_n <= n):
        raise TargetTooSmall(
            "target_n=%d outside [current span %d, ambient %d]"
            % (target_n, m_cur, n))
    if space.field.is_finite and space.field.modulus < deg + 1:
        raise FieldTooSmall(
            "need %d distinct line points; GF(%d) offers %d"
            % (deg + 1, space.field.modulus, space.field.modulus))
    prov = {"construction": "veronese_extend", "seed": cfg.rng_seed,
            "target_n": target_n, "steps": []}
    cur = Decomposition(space, d.points, d.target, prov)
    for step in range(target_n - m_cur):
        step_cfg = ConstructionConfig(rng_seed=cfg.rng_seed + 7919 * step,
                                      max_retries=cfg.max_retries,
                                      coord_box=cfg.coord_box)
        cur = _extend_one_factor(cur, 0, step_cfg, deg, "veronese_extend",
                                 cur.provenance or prov)
    return cur


def sv_extend(d: Decomposition, cfg: ConstructionConfig | None = None, *,
              assert_minimal: bool = False,
              certify_minimal: bool = False) -> Decomposition:
    """Extend a decomposition concentrated at one last-factor point to full
    last-factor envelope on a Segre-Veronese space.

    Last-factor degree 1 delegates to escape (cardinality +1); degree
    e > 1 runs m line-extension steps in the last factor (cardinality
    + e*m, full last-factor envelope).
    """
    cfg = cfg or ConstructionConfig()
    space = d.space
    if space.k < 2:
        raise InvalidInput("need at least two factors")
    last = space.k - 1
    e = space.multidegree[last]
    m = space.factor_dims[last]
    report = verify_irredundant(d)
    if not report.irredundant:
        raise NotIrredundantInput("input decomposition is not irredundant")
    o = d.points[0].coords[last]
    if any(p.coords[last] != o for p in d.points):
        raise InvalidInput("input points do not share one last-factor point")
    field = space.field
    full = SubspaceSpec.full(space)
    ysub = SubspaceSpec.of(space,
                           list(full.factor_bases[:last]) + [(o,)])
    if solve_columns(field, ysub.span_columns(),
                     d.target.coords).coefficients is None:
        raise NotContainedInY("target outside the span of Y x {o}")
    if certify_minimal:
        _certify_minimal_via_oracle(d, within=ysub)
    if e == 1:
        out = escape(d, ysub, cfg, assert_minimal=assert_minimal)
        prov = dict(out.provenance or {})
        prov["construction"] = "sv_extend"
        prov["route"] = "escape"
        return Decomposition(space, out.points, out.target, prov)
    if field.is_finite and field.modulus < e + 1:
        raise FieldTooSmall("need %d distinct line points; GF(%d) offers %d"
                            % (e + 1, field.modulus, field.modulus))
    prov = {"construction": "sv_extend", "route": "line_steps",
            "seed": cfg.rng_seed,
            "assert_minimal": bool(assert_minimal),
            "certified_minimal": bool(certify_minimal), "steps": []}
    cur = Decomposition(space, d.points, d.target, prov)
    for step in range(m):
        step_cfg = ConstructionConfig(rng_seed=cfg.rng_seed + 7919 * step,
                                      max_retries=cfg.max_retries,
                                      coord_box=cfg.coord_box)
        cur = _extend_one_factor(cur, last, step_cfg, e, "sv_extend",
                                 cur.provenance or prov)
    return cur
