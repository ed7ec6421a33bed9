"""Command-line front end.

Exit codes: 0 success, 1 mathematical refusal (bad tuple, work budget),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .arith import ArithmeticError_
from .budget import BudgetExceeded
from .descent import LOCAL_OBSTRUCTION, RATIONAL_POINT, decide, witness_search
from .localsolve import analyzed_primes, real_soluble, torsor_exponent_set, torsor_real_signs
from .model import ModelError, canonicalize

__all__ = ["run", "main", "iskovskikh_expected"]


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _emit(payload, as_json: bool, out) -> None:
    if as_json:
        out.write(json.dumps(payload) + "\n")
        return
    _human(payload, out, "")


def _human(obj, out, indent):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                out.write(f"{indent}{k}:\n")
                _human(v, out, indent + "  ")
            else:
                out.write(f"{indent}{k}: {v}\n")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict):
                out.write(f"{indent}-\n")
                _human(item, out, indent + "  ")
            else:
                out.write(f"{indent}- {item}\n")
    else:
        out.write(f"{indent}{obj}\n")


# ---------------------------------------------------------------------------
# decide


def _explain(s) -> dict:
    info = {
        "m": s.m,
        "n": s.n,
        "primed": list(s.primed),
        "delta": s.delta,
        "delta_prime": s.delta_prime,
    }
    if real_soluble(s):
        info["real_signs"] = sorted(torsor_real_signs(s))
        try:
            info["exponent_sets"] = {
                str(p): sorted(list(x) for x in torsor_exponent_set(s, p)) for p in analyzed_primes(s)
            }
        except AssertionError:
            pass
    return info


def _cmd_decide(args) -> tuple[int, dict]:
    raw = (args.a, args.b, args.c, args.d)
    s = canonicalize(raw)
    dec = decide(s)
    payload = {"input": list(raw), "representative": list(s.coefficients)}
    payload.update(dec.to_json())
    payload.setdefault("epsilon", None)
    if args.witness_height and dec.status == RATIONAL_POINT:
        w = witness_search(s, args.witness_height)
        payload["witness"] = None if w is None else dict(zip("uvtyz", w))
    if args.explain:
        payload["explain"] = _explain(s)
    return 0, payload


# ---------------------------------------------------------------------------
# census


def _cmd_census(args) -> tuple[int, object]:
    from .census import decay_fit, run_census, write_csv

    reports = [
        run_census(P, mode=args.mode, samples=args.samples, seed=args.seed, workers=args.workers)
        for P in args.pmax
    ]
    docs = [r.to_json(timing=args.timing) for r in reports]
    payload = docs[0] if len(docs) == 1 else {"reports": docs}
    if args.fit:
        payload = {"reports": docs, "decay_fit": decay_fit(reports).to_json()}
    if args.out:
        if args.out.endswith(".csv"):
            write_csv(reports, args.out)
        else:
            with open(args.out, "w") as fh:
                json.dump(payload, fh)
                fh.write("\n")
    return 0, payload


# ---------------------------------------------------------------------------
# constants


def _exact_doc(name: str, q: Fraction, digits: int = 20) -> dict:
    from mpmath import mpf, nstr, workdps

    with workdps(digits + 10):
        value = nstr(mpf(q.numerator) / q.denominator, digits, strip_zeros=False)
    return {"name": name, "exact": _q(q), "value": value, "prime_bound": None, "tail_bound": 0.0}


def _cmd_constants(args) -> tuple[int, object]:
    from . import constants as K

    what = args.what
    if what == "tau-loc-2":
        return 0, _exact_doc("tau_loc_2", K.tau_loc2_exact())
    if what == "table6":
        rows = [_exact_doc(f"tau2({i},{j})", K.tau2_component(i, j)) for i in (1, 3) for j in range(4)]
        return 0, {"components": rows, "total": _exact_doc("tau_loc_2", K.tau_loc2_exact())}
    kind = what.replace("-", "_")
    return 0, K.euler_product(kind, args.prime_bound).to_json()


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> tuple[int, object]:
    from . import constants as K

    if args.target == "two-adic":
        box = K.density_bruteforce(2, args.k, workers=args.workers)
        dec = K.density_bruteforce(2, args.k, method="decider")
        exact = K.tau_loc2_exact()
        return 0, {
            "p": 2,
            "k": args.k,
            "box_search": box,
            "decider": dec,
            "exact": _q(exact),
            "exact_value": float(exact),
        }
    if args.target == "p-adic":
        p = args.p
        dens = K.density_bruteforce(p, args.k, workers=args.workers)
        doc = {"p": p, "k": args.k, "density": dens}
        if p % 4 == 1:
            ref = K.local_factor(p, "a_p")
        elif p % 4 == 3:
            ref = K.local_factor(p, "loc_p")
        else:
            ref = K.tau_loc2_exact()
        doc.update({"reference": _q(ref), "reference_value": float(ref), "difference": dens - float(ref)})
        return 0, doc
    return _verify_tables(args)


def _verify_tables(args) -> tuple[int, dict]:
    from .twoadic import InvalidTuple, TwoAdicTuple, certify_tuple, decide_pair

    rng = random.Random(args.seed)
    bound = args.bound
    checked = disagreements = inconclusive = 0
    examples = []
    while checked < args.samples:
        t = tuple(rng.randint(-bound, bound) for _ in range(4))
        if t[0] % 2 == 0 or 0 in t:
            continue
        try:
            TwoAdicTuple.from_coefficients(*t)
        except InvalidTuple:
            continue
        checked += 1
        t1, t2 = decide_pair(*t)
        v1 = certify_tuple(t, "single_form_pair_in_D", args.depth)
        v2 = certify_tuple(t, "product_in_D", args.depth)
        for want, got in ((t1, v1), (t2, v2)):
            if got.status == "inconclusive":
                inconclusive += 1
            elif want != got.soluble:
                disagreements += 1
                if len(examples) < 10:
                    examples.append(list(t))
    code = 1 if disagreements else 0
    return code, {
        "checked": checked,
        "depth": args.depth,
        "disagreements": disagreements,
        "inconclusive": inconclusive,
        "examples": examples,
    }


# ---------------------------------------------------------------------------
# family


def iskovskikh_expected(k: int) -> tuple[bool, bool]:
    """(locally soluble, has a rational point) predicted for (1, 1-k, -1, k)."""

    def shape(k, nmin):
        n = 0
        while k % 4 == 0:
            k //= 4
            n += 1
        return n >= nmin and k % 8 == 7

    local = not (k < 0 or shape(k, 2))
    rational = not (k < 0 or k % 4 == 3 or shape(k, 1))
    return local, rational


def _cmd_family(args) -> tuple[int, dict]:
    from .model import CanonicalSurface

    rows = []
    mismatches = 0
    for k in range(args.kmin, args.kmax + 1):
        if k in (0, 1):
            continue
        t = (1, 1 - k, -1, k)
        dec = decide(CanonicalSurface.from_tuple(t))
        local, rational = iskovskikh_expected(k)
        got_local = dec.status != LOCAL_OBSTRUCTION
        got_rational = dec.status == RATIONAL_POINT
        ok = (local, rational) == (got_local, got_rational)
        mismatches += not ok
        rows.append({"k": k, "tuple": list(t), "status": dec.status, "matches_prediction": ok})
    return 0, {"family": "iskovskikh", "kmin": args.kmin, "kmax": args.kmax, "results": rows, "mismatches": mismatches}


# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON")

    p = argparse.ArgumentParser(prog="chatelet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", parents=[common], help="classify one surface")
    for name in "abcd":
        d.add_argument(name, type=int)
    d.add_argument("--explain", action="store_true")
    d.add_argument("--witness-height", type=int, default=0)
    d.set_defaults(func=_cmd_decide)

    c = sub.add_parser("census", parents=[common], help="count surfaces in a height box")
    c.add_argument("--pmax", type=int, nargs="+", required=True)
    c.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    c.add_argument("--samples", type=int, default=0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out")
    c.add_argument("--fit", action="store_true", help="add the normalised N_Br sequence")
    c.add_argument("--timing", action="store_true", help="include wall time")
    c.set_defaults(func=_cmd_census)

    k = sub.add_parser("constants", parents=[common], help="evaluate density constants")
    k.add_argument(
        "--what", required=True, choices=["tau", "tau-loc", "thm12-ratio", "hasse-ratio", "tau-loc-2", "table6"]
    )
    k.add_argument("--prime-bound", type=int, default=10**6)
    k.set_defaults(func=_cmd_constants)

    v = sub.add_parser("verify", help="brute-force cross-checks")
    vs = v.add_subparsers(dest="target", required=True)
    v2 = vs.add_parser("two-adic", parents=[common])
    v2.add_argument("--k", type=int, required=True)
    v2.add_argument("--workers", type=int, default=1)
    vp = vs.add_parser("p-adic", parents=[common])
    vp.add_argument("--p", type=int, required=True)
    vp.add_argument("--k", type=int, required=True)
    vp.add_argument("--workers", type=int, default=1)
    vt = vs.add_parser("tables", parents=[common])
    vt.add_argument("--samples", type=int, required=True)
    vt.add_argument("--depth", type=int, default=20)
    vt.add_argument("--seed", type=int, default=0)
    vt.add_argument("--bound", type=int, default=1000)
    v.set_defaults(func=_cmd_verify)

    f = sub.add_parser("family", help="worked example families")
    fs = f.add_subparsers(dest="family", required=True)
    fi = fs.add_parser("iskovskikh", parents=[common])
    fi.add_argument("--kmin", type=int, required=True)
    fi.add_argument("--kmax", type=int, required=True)
    fi.set_defaults(func=_cmd_family)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    as_json = getattr(args, "json", False)
    try:
        code, payload = args.func(args)
    except BudgetExceeded as exc:
        _emit({"error": "budget", "message": str(exc), "estimated_cost": exc.cost}, as_json, out)
        return 1
    except (ModelError, ArithmeticError_) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, as_json, out)
        return 1
    _emit(payload, as_json, out)
    return code


def main() -> None:
    sys.exit(run())
