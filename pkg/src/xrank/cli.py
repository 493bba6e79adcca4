"""Command line frontend.

One subcommand per library operation, JSON in and JSON out.  Input
documents carry their field spec inside every space object, so commands
cannot silently mix fields; --field rewrites the field of every space in
the input document before parsing.  Exit codes: 0 success, 1 input or
output failure, 2 domain error (stable error code in the JSON payload).
"""

import argparse
import csv
import json
import sys

from .construct import (ConstructionConfig, concise_plus_m, escape, plus_one,
                        sv_extend, veronese_extend)
from .decomp import (Decomposition, fiber_condition, set_envelope,
                     tensor_envelope, verify_irredundant)
from .errors import InvalidInput, XrankError
from .geometry import MultiProjectiveSpace, SubspaceSpec, Tensor
from .oracle import (DEFAULT_BUDGET, brute_rank, gap_profile, min_concise_t,
                     spanning_sets)

_COMMANDS = ("verify", "envelope", "tensor-envelope", "fiber-check", "rank",
             "spanning-sets", "gaps", "min-concise-t", "plus-one", "escape",
             "concise-plus-m", "veronese-extend", "sv-extend", "chain")


class _InputFailure(Exception):
    pass


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="infile", required=True,
                        help="input JSON document")
    common.add_argument("--out", dest="outfile",
                        help="also write the result here (.csv for gaps "
                             "writes the table instead)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-retries", type=int, default=64)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--t", type=int, default=None)
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--target-n", dest="target_n", type=int, default=None)
    common.add_argument("--field", default=None,
                        help="override the field of every space in the input")
    p = argparse.ArgumentParser(
        prog="xrank",
        description="exact tensor decomposition toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise _InputFailure("cannot read %s: %s" % (path, e))


def _override_field(node, field):
    if isinstance(node, dict):
        out = {}
        for k, v in node.items():
            if k == "field" and isinstance(v, str):
                out[k] = field
            else:
                out[k] = _override_field(v, field)
        return out
    if isinstance(node, list):
        return [_override_field(v, field) for v in node]
    return node


def _decomp_from(doc):
    if isinstance(doc, dict) and "decomposition" in doc:
        doc = doc["decomposition"]
    if not isinstance(doc, dict):
        raise InvalidInput("expected a decomposition document")
    return Decomposition.from_json(doc)


def _tensor_from(doc):
    if isinstance(doc, dict) and "tensor" in doc:
        doc = doc["tensor"]
    if not isinstance(doc, dict) or "space" not in doc or "coords" not in doc:
        raise InvalidInput(
            "expected a tensor document with 'space' and 'coords'")
    space = MultiProjectiveSpace.from_json(doc["space"])
    return Tensor.from_json(space, doc["coords"])


def _within_from(doc):
    if isinstance(doc, dict) and "within" in doc:
        return SubspaceSpec.from_json(doc["within"])
    return None


def _need(value, flag):
    if value is None:
        raise InvalidInput("%s is required for this subcommand" % flag)
    return value


def _cfg(args):
    return ConstructionConfig(rng_seed=args.seed,
                              max_retries=args.max_retries)


def _chain_step(cur, step, cfg):
    if not isinstance(step, dict) or "op" not in step:
        raise InvalidInput("each chain step needs an 'op'")
    op = step["op"]
    if op == "plus-one":
        return plus_one(cur, cfg)
    if op == "escape":
        if "subspace" not in step:
            raise InvalidInput("chain escape step needs a 'subspace'")
        return escape(cur, SubspaceSpec.from_json(step["subspace"]), cfg)
    if op == "concise-plus-m":
        if "m" not in step:
            raise InvalidInput("chain concise-plus-m step needs 'm'")
        return concise_plus_m(cur, int(step["m"]), cfg)
    if op == "veronese-extend":
        if "target_n" not in step:
            raise InvalidInput("chain veronese-extend step needs 'target_n'")
        return veronese_extend(cur, int(step["target_n"]), cfg)
    if op == "sv-extend":
        return sv_extend(cur, cfg)
    raise InvalidInput("unknown chain op %r" % op)


def _dispatch(args, doc):
    """Returns (payload, csv_rows or None)."""
    cmd = args.command
    if cmd == "verify":
        return verify_irredundant(_decomp_from(doc)).to_json(), None
    if cmd == "envelope":
        d = _decomp_from(doc)
        return set_envelope(d.space, d.points).to_json(), None
    if cmd == "tensor-envelope":
        return tensor_envelope(_tensor_from(doc)).to_json(), None
    if cmd == "fiber-check":
        return fiber_condition(_decomp_from(doc)).to_json(), None
    if cmd == "rank":
        cert = brute_rank(_tensor_from(doc), within=_within_from(doc),
                          budget=args.budget)
        return cert.to_json(), None
    if cmd == "spanning-sets":
        t = _need(args.t, "--t")
        mode = doc.get("mode", "all") if isinstance(doc, dict) else "all"
        ss = spanning_sets(_tensor_from(doc), t, mode,
                           within=_within_from(doc), budget=args.budget)
        return ss.to_json(), None
    if cmd == "gaps":
        prof = gap_profile(_tensor_from(doc), within=_within_from(doc),
                           budget=args.budget)
        return prof.to_json(), prof.csv_rows()
    if cmd == "min-concise-t":
        res = min_concise_t(_tensor_from(doc), budget=args.budget)
        return res.to_json(), None
    if cmd == "plus-one":
        return plus_one(_decomp_from(doc), _cfg(args)).to_json(), None
    if cmd == "escape":
        if not isinstance(doc, dict) or "subspace" not in doc:
            raise InvalidInput("escape needs a 'subspace' member")
        ysub = SubspaceSpec.from_json(doc["subspace"])
        return escape(_decomp_from(doc), ysub, _cfg(args)).to_json(), None
    if cmd == "concise-plus-m":
        m = _need(args.m, "--m")
        return concise_plus_m(_decomp_from(doc), m, _cfg(args)).to_json(), None
    if cmd == "veronese-extend":
        n = _need(args.target_n, "--target-n")
        out = veronese_extend(_decomp_from(doc), n, _cfg(args))
        return out.to_json(), None
    if cmd == "sv-extend":
        return sv_extend(_decomp_from(doc), _cfg(args)).to_json(), None
    if cmd == "chain":
        if not isinstance(doc, dict) or "steps" not in doc:
            raise InvalidInput("chain needs 'decomposition' and 'steps'")
        cur = _decomp_from(doc)
        provs = []
        for i, step in enumerate(doc["steps"]):
            cfg = ConstructionConfig(rng_seed=args.seed + i,
                                     max_retries=args.max_retries)
            cur = _chain_step(cur, step, cfg)
            provs.append(cur.provenance)
        final = Decomposition(cur.space, cur.points, cur.target,
                              {"construction": "chain", "steps": provs})
        return final.to_json(), None
    raise InvalidInput("unknown subcommand %r" % cmd)


def _write(args, payload, csv_rows):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.outfile:
        if csv_rows is not None and args.outfile.endswith(".csv"):
            with open(args.outfile, "w", newline="") as fh:
                csv.writer(fh).writerows(csv_rows)
        else:
            with open(args.outfile, "w") as fh:
                fh.write(text + "\n")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        doc = _load(args.infile)
        if args.field:
            doc = _override_field(doc, args.field)
    except _InputFailure as e:
        print(json.dumps({"error": "io", "message": str(e)}),
              file=sys.stderr)
        return 1
    try:
        payload, csv_rows = _dispatch(args, doc)
    except XrankError as e:
        print(json.dumps({"error": e.code, "message": str(e)}, indent=2))
        return 2
    except (KeyError, TypeError, ValueError) as e:
        # malformed document shapes surface as plain exceptions deep in
        # the parsers; keep the exit-code contract instead of a traceback
        print(json.dumps({"error": "InvalidInput", "message": str(e)},
                         indent=2))
        return 2
    try:
        _write(args, payload, csv_rows)
    except OSError as e:
        print(json.dumps({"error": "io", "message": str(e)}),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
