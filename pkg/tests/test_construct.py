"""The four constructive procedures: contracts, determinism, error paths."""
import random

import pytest

from conftest import QQ, gf, lin_comb, pt, segre, veronese

from xrank.construct import (ConstructionConfig, concise_plus_m, escape,
                             plus_one, sv_extend, veronese_extend)
from xrank.decomp import (Decomposition, fiber_condition, set_envelope,
                          verify_irredundant)
from xrank.errors import (BadM, DegenerateSpace, FieldTooSmall, InvalidInput,
                          NotConcise, NotContainedInY, NotIrredundantInput,
                          NotVeronese, TargetTooSmall, UnsupportedDegree,
                          YEqualsW)
from xrank.geometry import (MppPoint, MultiProjectiveSpace, SubspaceSpec,
                            Tensor, embed)

E0, E1 = (1, 0), (0, 1)


def _diag(field=QQ):
    S = segre((1, 1), field)
    A = [pt(S, E0, E0), pt(S, E1, E1)]
    return Decomposition(S, A, Tensor.of(S, (1, 0, 0, 1)))


# ----------------------------------------------------------------- plus_one

def test_plus_one_on_rank_one_point():
    S = segre((1, 1))
    a = pt(S, E0, E0)
    out = plus_one(Decomposition(S, [a], embed(S, a)),
                   ConstructionConfig(rng_seed=1))
    assert len(out.points) == 2
    assert verify_irredundant(out).irredundant
    # the two fresh points live in one fiber through a
    u, v = out.points
    assert sum(1 for i in range(2) if u.coords[i] != v.coords[i]) == 1


def test_plus_one_on_diagonal_pair():
    out = plus_one(_diag(), ConstructionConfig(rng_seed=5))
    assert len(out.points) == 3
    assert verify_irredundant(out).irredundant
    assert out.provenance["construction"] == "plus_one"
    assert out.provenance["retries_used"] <= 64


def test_plus_one_output_always_breaks_the_fiber_condition():
    for seed in range(20):
        out = plus_one(_diag(), ConstructionConfig(rng_seed=seed))
        assert not fiber_condition(out).holds


def test_plus_one_deterministic():
    a = plus_one(_diag(), ConstructionConfig(rng_seed=12))
    b = plus_one(_diag(), ConstructionConfig(rng_seed=12))
    assert a.points == b.points and a.provenance == b.provenance


def test_plus_one_over_gf11():
    d = _diag(gf(11))
    out = plus_one(d, ConstructionConfig(rng_seed=3))
    assert len(out.points) == 3
    assert verify_irredundant(out).irredundant


def test_plus_one_rejects_redundant_input():
    S = segre((1, 1))
    A = [pt(S, E0, E0), pt(S, E1, E1)]
    d = Decomposition(S, A, Tensor.of(S, (1, 0, 0, 0)))
    with pytest.raises(NotIrredundantInput):
        plus_one(d)


def test_plus_one_rejects_degenerate_space():
    Z = segre((0, 0))
    p = MppPoint.of(Z, [(1,), (1,)])
    with pytest.raises(DegenerateSpace):
        plus_one(Decomposition(Z, [p], embed(Z, p)))


def test_plus_one_rejects_veronese():
    V = veronese(1, 2)
    p = pt(V, (1, 1))
    with pytest.raises(UnsupportedDegree):
        plus_one(Decomposition(V, [p], embed(V, p)))


def test_plus_one_chains_with_verification():
    """Iterating on non-minimal inputs is best-effort but always verified."""
    S = segre((1, 1, 1))
    A = [pt(S, E0, E0, E0), pt(S, E1, E1, E1)]
    cur = Decomposition(S, A, lin_comb(S, A))
    for step in range(3):
        cur = plus_one(cur, ConstructionConfig(rng_seed=step))
        assert verify_irredundant(cur).irredundant
    assert len(cur.points) == 5


def test_plus_one_stops_when_the_span_is_everything():
    """Once the embedded set spans the ambient space no fiber can escape."""
    from xrank.errors import NoEscapingFiber
    cur = _diag()
    cur = plus_one(cur, ConstructionConfig(rng_seed=0))
    cur = plus_one(cur, ConstructionConfig(rng_seed=0))
    assert len(cur.points) == 4
    with pytest.raises(NoEscapingFiber):
        plus_one(cur, ConstructionConfig(rng_seed=0))


# ------------------------------------------------------------------- escape

def _slice_instance(field=QQ):
    S = segre((1, 1), field)
    y = SubspaceSpec.of(S, [(E0, E1), (E0,)])
    a = pt(S, (1, 1), E0)
    d = Decomposition(S, [a], embed(S, a))
    return S, y, d


def test_escape_leaves_the_subspace():
    S, y, d = _slice_instance()
    out = escape(d, y, ConstructionConfig(rng_seed=3))
    assert len(out.points) == 2
    assert verify_irredundant(out).irredundant
    assert any(not y.contains_point(p) for p in out.points)
    assert out.provenance["construction"] == "escape"


def test_escape_over_gf7():
    S, y, d = _slice_instance(gf(7))
    out = escape(d, y, ConstructionConfig(rng_seed=8))
    assert len(out.points) == 2
    assert any(not y.contains_point(p) for p in out.points)


def test_escape_deterministic():
    S, y, d = _slice_instance()
    a = escape(d, y, ConstructionConfig(rng_seed=21))
    b = escape(d, y, ConstructionConfig(rng_seed=21))
    assert a.points == b.points


def test_escape_rejects_target_off_the_subspace():
    S = segre((1, 1))
    y = SubspaceSpec.of(S, [(E0, E1), (E0,)])
    d = Decomposition(S, [pt(S, E1, E1)], Tensor.of(S, (0, 0, 0, 1)))
    with pytest.raises(NotContainedInY):
        escape(d, y)


def test_escape_rejects_full_subspace():
    S = segre((1, 1))
    p = pt(S, E0, E0)
    with pytest.raises(YEqualsW):
        escape(Decomposition(S, [p], embed(S, p)), SubspaceSpec.full(S))


# ----------------------------------------------------------- concise_plus_m

def _slice_pair(field=QQ):
    W = segre((1, 2), field)
    o = (1, 0, 0)
    A = [pt(W, E0, o), pt(W, E1, o)]
    return W, Decomposition(W, A, lin_comb(W, A))


def test_concise_plus_m_fills_the_new_factor():
    W, d = _slice_pair()
    out = concise_plus_m(d, 2, ConstructionConfig(rng_seed=9))
    assert len(out.points) == 4
    assert verify_irredundant(out).irredundant
    assert set_envelope(W, out.points).is_full


def test_concise_plus_m_rank_one_needs_point_base():
    # the retained factors must already be spanned, so a rank-1 target
    # lives on a degenerate first factor
    W0 = segre((0, 2))
    o = (1, 0, 0)
    a = MppPoint.of(W0, [(1,), o])
    out = concise_plus_m(Decomposition(W0, [a], embed(W0, a)), 2,
                         ConstructionConfig(rng_seed=4))
    assert len(out.points) == 3
    assert set_envelope(W0, out.points).dims == (0, 2)


def test_concise_plus_m_rejects_deficient_retained_envelope():
    W = segre((1, 2))
    o = (1, 0, 0)
    a = pt(W, E0, o)
    with pytest.raises(NotConcise):
        concise_plus_m(Decomposition(W, [a], embed(W, a)), 2)


def test_concise_plus_m_rejects_bad_m():
    W, d = _slice_pair()
    with pytest.raises(BadM):
        concise_plus_m(d, 1)
    with pytest.raises(BadM):
        concise_plus_m(d, 3)


def test_concise_plus_m_needs_shared_base_point():
    W = segre((1, 2))
    A = [pt(W, E0, (1, 0, 0)), pt(W, E1, (0, 1, 0))]
    d = Decomposition(W, A, lin_comb(W, A))
    with pytest.raises(InvalidInput):
        concise_plus_m(d, 2)


def test_concise_plus_m_over_gf5():
    W, d = _slice_pair(gf(5))
    out = concise_plus_m(d, 2, ConstructionConfig(rng_seed=2))
    assert len(out.points) == 4
    assert set_envelope(W, out.points).is_full


# ---------------------------------------------------------- veronese_extend

def test_veronese_extend_line_to_plane_degree_two():
    V = veronese(2, 2)
    A = [pt(V, (1, 0, 0)), pt(V, (0, 1, 0))]
    d = Decomposition(V, A, lin_comb(V, A))
    out = veronese_extend(d, 2, ConstructionConfig(rng_seed=11))
    assert len(out.points) == 4
    assert verify_irredundant(out).irredundant
    assert set_envelope(V, out.points).dims == (2,)


def test_veronese_extend_line_to_plane_degree_three():
    V = veronese(2, 3)
    A = [pt(V, (1, 0, 0)), pt(V, (0, 1, 0))]
    d = Decomposition(V, A, lin_comb(V, A))
    out = veronese_extend(d, 2, ConstructionConfig(rng_seed=7))
    assert len(out.points) == 5
    assert set_envelope(V, out.points).dims == (2,)


def test_veronese_extend_zero_steps():
    V = veronese(2, 2)
    A = [pt(V, (1, 0, 0)), pt(V, (0, 1, 0))]
    d = Decomposition(V, A, lin_comb(V, A))
    out = veronese_extend(d, 1, ConstructionConfig(rng_seed=1))
    assert out.points == d.points
    assert out.provenance["steps"] == []


def test_veronese_extend_two_steps_from_a_point():
    V = veronese(2, 2)
    a = pt(V, (1, 0, 0))
    d = Decomposition(V, [a], embed(V, a))
    out = veronese_extend(d, 2, ConstructionConfig(rng_seed=11))
    assert len(out.points) == 5  # 1 + 2 steps of d new points each
    assert len(out.provenance["steps"]) == 2
    assert set_envelope(V, out.points).dims == (2,)


def test_veronese_extend_deterministic():
    V = veronese(2, 2)
    a = pt(V, (1, 0, 0))
    d = Decomposition(V, [a], embed(V, a))
    one = veronese_extend(d, 2, ConstructionConfig(rng_seed=6))
    two = veronese_extend(d, 2, ConstructionConfig(rng_seed=6))
    assert one.points == two.points


def test_veronese_extend_rejects_segre():
    with pytest.raises(NotVeronese):
        veronese_extend(_diag(), 1)


def test_veronese_extend_rejects_small_target():
    V = veronese(2, 2)
    A = [pt(V, (1, 0, 0)), pt(V, (0, 1, 0))]
    d = Decomposition(V, A, lin_comb(V, A))
    with pytest.raises(TargetTooSmall):
        veronese_extend(d, 0)


def test_veronese_extend_needs_enough_line_points():
    V = veronese(2, 2, gf(2))
    a = pt(V, (1, 0, 0))
    with pytest.raises(FieldTooSmall):
        veronese_extend(Decomposition(V, [a], embed(V, a)), 1)


def test_veronese_extend_works_over_gf5_degree_four():
    # p = d + 1 exactly: the line has just enough points
    V = veronese(1, 4, gf(5))
    a = pt(V, (1, 0))
    out = veronese_extend(Decomposition(V, [a], embed(V, a)), 1,
                          ConstructionConfig(rng_seed=3))
    assert len(out.points) == 5
    assert set_envelope(V, out.points).dims == (1,)


# ---------------------------------------------------------------- sv_extend

def test_sv_extend_degree_one_delegates_to_escape():
    S = segre((1, 1))
    o = E0
    A = [pt(S, E0, o), pt(S, E1, o)]
    d = Decomposition(S, A, lin_comb(S, A))
    out = sv_extend(d, ConstructionConfig(rng_seed=2))
    assert len(out.points) == 3
    assert out.provenance["construction"] == "sv_extend"
    assert out.provenance["route"] == "escape"


def test_sv_extend_degree_two_line_steps():
    SV = MultiProjectiveSpace((1, 1), (1, 2), QQ)
    o = E0
    A = [pt(SV, E0, o), pt(SV, E1, o)]
    d = Decomposition(SV, A, lin_comb(SV, A))
    out = sv_extend(d, ConstructionConfig(rng_seed=2))
    assert len(out.points) == 4  # rho + e * m = 2 + 2
    assert verify_irredundant(out).irredundant
    assert set_envelope(SV, out.points).dims[-1] == 1
    assert out.provenance["route"] == "line_steps"


def test_sv_extend_rejects_spread_out_input():
    # points off a common last-factor slice cannot define Y x {o}; the
    # shape check fires before any containment question can arise
    SV = MultiProjectiveSpace((1, 1), (1, 2), QQ)
    A = [pt(SV, E0, E0), pt(SV, E1, E1)]
    d = Decomposition(SV, A, lin_comb(SV, A))
    with pytest.raises(InvalidInput):
        sv_extend(d)


def test_sv_extend_deterministic():
    SV = MultiProjectiveSpace((1, 1), (1, 2), QQ)
    A = [pt(SV, E0, E0), pt(SV, E1, E0)]
    d = Decomposition(SV, A, lin_comb(SV, A))
    runs = [sv_extend(d, ConstructionConfig(rng_seed=13)) for _ in range(2)]
    assert runs[0].points == runs[1].points


# ------------------------------------------------------------------- config

def test_config_validation():
    with pytest.raises(InvalidInput):
        ConstructionConfig(max_retries=0)


def test_json_round_trip_keeps_provenance():
    out = plus_one(_diag(), ConstructionConfig(rng_seed=5))
    back = Decomposition.from_json(out.to_json())
    assert back == out and back.provenance == out.provenance
