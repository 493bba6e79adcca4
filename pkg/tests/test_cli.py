"""End-to-end runs of the command line frontend (in process)."""
import csv
import json

import pytest

from conftest import QQ, gf, lin_comb, pt, segre, veronese

from xrank.cli import main
from xrank.decomp import Decomposition
from xrank.geometry import (MppPoint, MultiProjectiveSpace, SubspaceSpec,
                            Tensor, embed)

E0, E1 = (1, 0), (0, 1)


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _diag_doc(field=QQ):
    S = segre((1, 1), field)
    A = [pt(S, E0, E0), pt(S, E1, E1)]
    return Decomposition(S, A, Tensor.of(S, (1, 0, 0, 1))).to_json()


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


# ----------------------------------------------------------------- commands

def test_verify_round_trip(tmp_path, capsys):
    path = _write(tmp_path, "d.json", _diag_doc())
    code, payload = _run(capsys, ["verify", "--in", path])
    assert code == 0
    assert payload["irredundant"] is True
    assert payload["coefficients"] == ["1", "1"]


def test_out_file_matches_stdout(tmp_path, capsys):
    path = _write(tmp_path, "d.json", _diag_doc())
    out = tmp_path / "res.json"
    code, payload = _run(capsys, ["verify", "--in", path, "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text()) == payload


def test_envelope_command(tmp_path, capsys):
    path = _write(tmp_path, "d.json", _diag_doc())
    code, payload = _run(capsys, ["envelope", "--in", path])
    assert code == 0
    assert payload["dims"] == [1, 1]


def test_tensor_envelope_command(tmp_path, capsys):
    # matrix of rank 2 inside P^1 x P^2: proper envelope (1, 1)
    S = segre((1, 2), gf(5))
    q = lin_comb(S, [pt(S, E0, (1, 0, 0)), pt(S, E1, (0, 1, 0))])
    path = _write(tmp_path, "t.json",
                  {"space": S.to_json(), "coords": q.to_json()})
    code, payload = _run(capsys, ["tensor-envelope", "--in", path])
    assert code == 0
    assert payload["dims"] == [1, 1]


def test_fiber_check_command(tmp_path, capsys):
    S = segre((1, 1))
    A = [pt(S, E0, E0), pt(S, E0, E1)]
    doc = Decomposition(S, A, lin_comb(S, A)).to_json()
    path = _write(tmp_path, "d.json", doc)
    code, payload = _run(capsys, ["fiber-check", "--in", path])
    assert code == 0
    assert payload["holds"] is False
    assert payload["violations"] == [{"i": 0, "j": 1, "free_factor": 1}]


def test_rank_command(tmp_path, capsys):
    doc = _diag_doc(gf(5))
    path = _write(tmp_path, "d.json",
                  {"space": doc["space"], "coords": doc["target"]})
    code, payload = _run(capsys, ["rank", "--in", path])
    assert code == 0
    assert payload["rank"] == 2
    assert payload["search_space_size"] > 0


def test_spanning_sets_requires_t(tmp_path, capsys):
    doc = _diag_doc(gf(3))
    path = _write(tmp_path, "t.json",
                  {"space": doc["space"], "coords": doc["target"]})
    code, payload = _run(capsys, ["spanning-sets", "--in", path])
    assert code == 2
    assert payload["error"] == "InvalidInput"
    code, payload = _run(capsys, ["spanning-sets", "--in", path, "--t", "2"])
    assert code == 0
    assert payload["count"] > 0 and payload["t"] == 2


def test_gaps_csv_export(tmp_path, capsys):
    V = veronese(1, 4, gf(5))
    path = _write(tmp_path, "t.json",
                  {"space": V.to_json(),
                   "coords": ["1", "0", "0", "0", "1"]})
    out = tmp_path / "gaps.csv"
    code, payload = _run(capsys, ["gaps", "--in", path, "--out", str(out)])
    assert code == 0
    assert payload["gaps"] == [3]
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["t", "nonempty", "witness_count_or_bound"]
    assert rows[1:] == [["2", "true", "1"], ["3", "false", "0"],
                        ["4", "true", "1"], ["5", "false", "0"]]


def test_min_concise_t_command(tmp_path, capsys):
    S = segre((1, 1), gf(3))
    path = _write(tmp_path, "t.json",
                  {"space": S.to_json(), "coords": ["1", "0", "0", "0"]})
    code, payload = _run(capsys, ["min-concise-t", "--in", path])
    assert code == 0
    assert payload["t"] == 3 and payload["rank"] == 1
    assert payload["non_concise_ts"] == [1, 2]


def test_plus_one_command_is_deterministic(tmp_path, capsys):
    path = _write(tmp_path, "d.json", _diag_doc())
    code, first = _run(capsys, ["plus-one", "--in", path, "--seed", "7"])
    assert code == 0
    assert len(first["points"]) == 3
    code, second = _run(capsys, ["plus-one", "--in", path, "--seed", "7"])
    assert second == first
    back = Decomposition.from_json(first)
    assert back.provenance["construction"] == "plus_one"


def test_escape_command(tmp_path, capsys):
    S = segre((1, 1))
    y = SubspaceSpec.of(S, [(E0, E1), (E0,)])
    a = pt(S, (1, 1), E0)
    doc = Decomposition(S, [a], embed(S, a)).to_json()
    doc["subspace"] = y.to_json()
    path = _write(tmp_path, "d.json", doc)
    code, payload = _run(capsys, ["escape", "--in", path, "--seed", "3"])
    assert code == 0
    assert len(payload["points"]) == 2


def test_concise_plus_m_command(tmp_path, capsys):
    W = segre((1, 2))
    o = (1, 0, 0)
    A = [pt(W, E0, o), pt(W, E1, o)]
    path = _write(tmp_path, "d.json",
                  Decomposition(W, A, lin_comb(W, A)).to_json())
    code, payload = _run(capsys, ["concise-plus-m", "--in", path, "--m", "2"])
    assert code == 0
    assert len(payload["points"]) == 4


def test_veronese_extend_command(tmp_path, capsys):
    V = veronese(2, 2)
    a = pt(V, (1, 0, 0))
    path = _write(tmp_path, "d.json",
                  Decomposition(V, [a], embed(V, a)).to_json())
    code, payload = _run(capsys,
                         ["veronese-extend", "--in", path, "--target-n", "2"])
    assert code == 0
    assert len(payload["points"]) == 5


def test_sv_extend_command(tmp_path, capsys):
    SV = MultiProjectiveSpace((1, 1), (1, 2), QQ)
    A = [pt(SV, E0, E0), pt(SV, E1, E0)]
    path = _write(tmp_path, "d.json",
                  Decomposition(SV, A, lin_comb(SV, A)).to_json())
    code, payload = _run(capsys, ["sv-extend", "--in", path])
    assert code == 0
    assert len(payload["points"]) == 4


def test_chain_command(tmp_path, capsys):
    doc = {"decomposition": _diag_doc(),
           "steps": [{"op": "plus-one"}, {"op": "plus-one"}]}
    path = _write(tmp_path, "c.json", doc)
    code, payload = _run(capsys, ["chain", "--in", path])
    assert code == 0
    assert len(payload["points"]) == 4
    assert payload["provenance"]["construction"] == "chain"
    assert len(payload["provenance"]["steps"]) == 2


# -------------------------------------------------------------- field swaps

def test_field_override_changes_the_arithmetic(tmp_path, capsys):
    path = _write(tmp_path, "d.json", _diag_doc())
    code, payload = _run(capsys,
                         ["verify", "--in", path, "--field", "GF(7)"])
    assert code == 0
    assert payload["irredundant"] is True


def test_field_override_rejects_composite(tmp_path, capsys):
    path = _write(tmp_path, "d.json", _diag_doc())
    code, payload = _run(capsys,
                         ["verify", "--in", path, "--field", "GF(9)"])
    assert code == 2
    assert payload["error"] == "InvalidInput"


# --------------------------------------------------------------- exit codes

def test_missing_file_is_io_failure(tmp_path, capsys):
    code = main(["verify", "--in", str(tmp_path / "nope.json")])
    captured = capsys.readouterr()
    assert code == 1
    assert captured.out.strip() == ""
    assert json.loads(captured.err)["error"] == "io"


def test_unparseable_file_is_io_failure(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code = main(["verify", "--in", str(p)])
    assert code == 1
    assert json.loads(capsys.readouterr().err)["error"] == "io"


def test_domain_error_payload(tmp_path, capsys):
    # rank over the rationals is outside the oracle's reach
    S = segre((1, 1))
    path = _write(tmp_path, "t.json",
                  {"space": S.to_json(), "coords": ["1", "0", "0", "1"]})
    code, payload = _run(capsys, ["rank", "--in", path])
    assert code == 2
    assert payload["error"] == "FieldNotFinite"


def test_malformed_document_is_a_domain_error(tmp_path, capsys):
    path = _write(tmp_path, "b.json", {"space": {"dims": [1, 1]}})
    code, payload = _run(capsys, ["verify", "--in", path])
    assert code == 2
    assert payload["error"] == "InvalidInput"


def test_scalar_strings_round_trip_through_the_cli(tmp_path, capsys):
    from fractions import Fraction
    S = segre((1, 1))
    A = [pt(S, (1, -2), (3, 1)), pt(S, (2, 1), (1, 5))]
    d = Decomposition(S, A, lin_comb(S, A, [1, "1/2"]))
    path = _write(tmp_path, "d.json", d.to_json())
    code, payload = _run(capsys, ["verify", "--in", path])
    assert code == 0
    # canonical tensor scaling rescales both coefficients by one constant,
    # so only their ratio is pinned down
    c0, c1 = (Fraction(x) for x in payload["coefficients"])
    assert c0 == 2 * c1 and c1 != 0
