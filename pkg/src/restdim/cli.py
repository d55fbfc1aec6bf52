"""Batch front end: ``dim``, ``content``, ``construct``, ``verify``, ``report``.

Sets, scales and trees are given either by a short name or as inline JSON
(``'{"kind": ...}'``) or a JSON file (``@path``).  Short names:

sets
    ``evens``, ``odds``, ``naturals``, ``empty``, ``multiples:M``,
    ``periodic:T:M:r1,r2``, ``finite:a,b,c``, ``blocks:u,v,R`` (geometric
    blocks, default ``1,2,4``), ``zero_one:I``, ``prime_factorial:I``,
    ``guard:I``, ``holder`` / ``holder:R`` (every index, ``n_k = ceil(R^k)``,
    default ``R = 4``), ``phi:P:Q:<set>``, ``not:<set>``
families
    ``zero_one``, ``prime_factorial`` (infinite), ``list:<set>;<set>;...``
scales
    ``all``, ``arith:A:D``, ``geom:C:RHO``, ``ends:<set>``, ``starts:<set>``,
    ``darboux:ALPHA:<set>``, ``prefix:a,b,c:<scales>``
trees
    ``full:N``, ``digit:<set>``, ``family:<family>``, ``rdim_not_pdim:STAGES``

Every rational is printed as ``"p/q"``.  Exit status: 0 success, 1 failed
verification, 2 bad command line, 3 infeasible query (the reason is printed
as JSON).  Defaults: ``--depth`` 64 for dimensions and 12 for contents,
``--seed`` 0, ``--format json``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import constructions as cons
from . import coveroracle as co
from . import digitsets as ds
from . import dimcalc as dc
from . import scales as sc
from . import treesets as ts
from ._exact import Pow2Sum, fmt_fraction

VERBS = ("dim", "content", "construct", "verify", "report")


class UsageError(ValueError):
    pass


# -- argument parsing -------------------------------------------------------------


def _json_arg(text: str) -> Optional[dict]:
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    if text.startswith("{"):
        return json.loads(text)
    return None


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def parse_set(text: str) -> ds.DigitSet:
    obj = _json_arg(text)
    if obj is not None:
        return ds.from_json(obj)
    name, _, rest = text.partition(":")
    simple = {"evens": ds.evens, "odds": ds.odds, "naturals": ds.naturals, "empty": ds.empty}
    if name in simple and not rest:
        return simple[name]()
    if name == "multiples":
        return ds.multiples(int(rest))
    if name == "periodic":
        t, m, res = rest.split(":")
        return ds.EventuallyPeriodic(int(t), int(m), _ints(res))
    if name == "finite":
        return ds.Finite(_ints(rest))
    if name == "blocks":
        return ds.GeometricBlocks(*_ints(rest)) if rest else ds.GeometricBlocks(1, 2, 4)
    if name == "zero_one":
        return cons.ZeroOneBlocks(int(rest))
    if name == "prime_factorial":
        return cons.PrimeFactorialBlocks(int(rest))
    if name == "guard":
        return cons.GuardBlocks(int(rest))
    if name == "holder":
        return cons.HolderSet(ds.naturals(), sc.SuperGeometric(1, Fraction(rest or 4)))
    if name == "phi":
        p, q, inner = rest.split(":", 2)
        return ds.phi_image(parse_set(inner), int(p), int(q))
    if name == "not":
        return ~parse_set(rest)
    raise UsageError(f"unknown set {text!r}")


def parse_family(text: str) -> ds.DigitSetFamily:
    obj = _json_arg(text)
    if obj is not None:
        return ds.family_from_json(obj)
    if text == "zero_one":
        return cons.zero_one_family()
    if text == "prime_factorial":
        return cons.prime_factorial_family()
    if text.startswith("list:"):
        return ds.ListFamily([parse_set(x) for x in text[5:].split(";")])
    raise UsageError(f"unknown family {text!r}")


def parse_scales(text: str) -> sc.ScaleSequence:
    obj = _json_arg(text)
    if obj is not None:
        return sc.from_json(obj)
    name, _, rest = text.partition(":")
    if name == "all" and not rest:
        return sc.all_levels()
    if name == "arith":
        a, d = rest.split(":")
        return sc.Arithmetic(int(a), int(d))
    if name == "geom":
        c, rho = rest.split(":")
        return sc.SuperGeometric(Fraction(c), Fraction(rho))
    if name in ("ends", "starts"):
        return sc.BlockEndpoints(parse_set(rest), "end" if name == "ends" else "start")
    if name == "darboux":
        alpha, inner = rest.split(":", 1)
        return cons.darboux_scale(parse_set(inner), Fraction(alpha))
    if name == "prefix":
        head, inner = rest.split(":", 1)
        return sc.Concat(_ints(head), parse_scales(inner))
    raise UsageError(f"unknown scales {text!r}")


def parse_tree(text: str) -> ts.TreeSet:
    obj = _json_arg(text)
    if obj is not None:
        return ts.from_json(obj)
    name, _, rest = text.partition(":")
    if name == "full":
        return ts.FullTree(int(rest or 1))
    if name == "digit":
        return ts.from_digitset(parse_set(rest))
    if name == "family":
        return ts.family_assemble(parse_family(rest))
    if name == "rdim_not_pdim":
        return cons.rdim_not_pdim_construct(cons.PowerPhi(2), 1, int(rest or 4))
    raise UsageError(f"unknown tree {text!r}")


def _parse(kind: str, fn: Callable, text: Optional[str]):
    if text is None:
        raise UsageError(f"--{kind} is required")
    try:
        return fn(text)
    except UsageError:
        raise
    except (ValueError, KeyError, TypeError, json.JSONDecodeError, OSError) as e:
        raise UsageError(f"bad --{kind} {text!r}: {e}") from None


def _fraction(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --{name} {text!r}") from None


# -- output ---------------------------------------------------------------------


def _plain(x):
    if isinstance(x, Fraction):
        return fmt_fraction(x)
    if isinstance(x, Pow2Sum):
        return co._pow2_text(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def emit_json(obj, out) -> None:
    out.write(json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")


def _bounds(b: dc.LimitBounds, exact_only: bool) -> dict:
    if exact_only and not b.exact:
        raise co.InfeasibleCover(f"value not certified; evidence gives [{fmt_fraction(b.lower)}, "
                                 f"{fmt_fraction(b.upper)}] at depth {b.evidence_depth}")
    return b.to_json()


# -- verbs ----------------------------------------------------------------------


def cmd_dim(a, out) -> int:
    if a.what not in ("drdim", "hdim", "pdim", "rdim", "adim"):
        raise UsageError(f"unknown dimension {a.what!r}")
    depth = a.depth or dc.DEFAULT_DEPTH
    if a.family is not None:
        if a.what != "drdim":
            raise UsageError("--family is only supported for drdim")
        fam = _parse("family", parse_family, a.family)
        d = _parse("scales", parse_scales, a.scales)
        emit_json(_bounds(dc.drdim_family(fam, d, a.truncation, depth), a.exact_only), out)
        return 0
    s = _parse("set", parse_set, a.set)
    if a.what == "drdim":
        d = _parse("scales", parse_scales, a.scales)
        b = dc.drdim_AS(s, d, depth)
    elif a.what == "hdim":
        b = dc.hdim_pdim(s, depth)[0]
    elif a.what == "pdim":
        b = dc.hdim_pdim(s, depth)[1]
    elif a.what == "rdim":
        b = dc.rdim_AS(s, depth)
    else:
        b = co.window_assouad_estimate(s, depth, 4 * depth)
    emit_json(_bounds(b, a.exact_only), out)
    return 0


def cmd_content(a, out) -> int:
    if a.tree is None and a.set is None:
        raise UsageError("--tree or --set is required")
    tree = _parse("tree", parse_tree, a.tree) if a.tree else ts.from_digitset(_parse("set", parse_set, a.set))
    s = _fraction(a.s, "s")
    d = _parse("scales", parse_scales, a.scales or "all")
    if a.what == "decay":
        depths = _ints(a.depths) if a.depths else list(range(2, (a.depth or 12) + 1, 2))
        vals = co.content_decay_profile(tree, s, d, depths)
        if a.format == "csv":
            out.write(co.decay_csv(depths, vals))
        else:
            emit_json([{"depth": k, "content": v} for k, v in zip(depths, vals)], out)
        return 0
    depth = a.depth or co.DEFAULT_DEPTH.get(tree.n, 8)
    q = co.ContentQuery(tree, s, d, depth)
    fn = {"dp": co.min_cover_content_dp, "brute": co.brute_force_content,
          "naive": co.naive_content}.get(a.what)
    if a.what == "single":
        val = co.single_level_content(tree, s, d, depth)
    elif fn is None:
        raise UsageError(f"unknown content method {a.what!r}")
    else:
        val = fn(q)
    res = {"depth": depth, "s": s, "content": val, "approx": float(val)}
    if a.mass:
        if not isinstance(tree, ts.DigitTree):
            raise UsageError("--mass needs a digit-restriction tree")
        rep = co.mass_check(ts.uniform_measure(tree), s, d, depth)
        res["mass"] = rep.to_json()
        res["mass_consistent"] = co.mass_consistent(val, 1, rep)
    emit_json(res, out)
    return 0


def cmd_construct(a, out) -> int:
    w = a.what
    if w == "darboux":
        s = _parse("set", parse_set, a.set)
        if a.alpha is None:
            raise UsageError("--alpha is required")
        d = cons.darboux_scale(s, _fraction(a.alpha, "alpha"))
        res = {"scales": d.to_json(), "n_k": d.prefix(a.count)}
    elif w == "rdim_not_pdim":
        t = cons.rdim_not_pdim_construct(cons.PowerPhi(a.power), a.n, a.stages)
        s = _fraction(a.s or "1/5", "s")
        res = {"ledger": t.ledger.to_json(),
               "certificates": [_with_approx(t.certificate(k, s)) for k in range(1, len(t.ledger.m_seq) + 1)]}
    elif w == "holder":
        d = _parse("scales", parse_scales, a.scales or "geom:1:3/2")
        k_rule = _parse("set", parse_set, a.set) if a.set else None
        S, T = cons.holder_witness(k_rule, d, a.p, a.q)
        scan = cons.holder_ratio_scan(T, a.p, a.q, a.depth or 40, a.pairs, a.seed)
        res = {"S": S.to_json(), "first_members": S.members(min(200, d.level_at(4))),
               "ratio_scan": scan, "valid_constant": cons.holder_valid_constant(a.p, a.q)}
    elif w == "regular_cover":
        K = _parse("tree", parse_tree, a.tree) if a.tree else ts.from_digitset(_parse("set", parse_set, a.set))
        t = _fraction(a.t, "t")
        bound = _fraction(a.bound, "bound") if a.bound else _adim_bound(a)
        L, (k, l) = cons.regular_cover(K, t, bound, a.depth or 18)
        res = {"k": k, "l": l, "s_approx": cons.regular_exponent(k, l), "bound": bound, "t": t,
               "subtree": ts.is_subtree(K, L, a.depth or 18)}
    elif w in ("zero_one", "prime_factorial"):
        fam = parse_family(w)
        res = {"members": [{"i": i, "set": fam.member(i).to_json(),
                            "blocks": [list(b) for b in fam.member(i).blocks_upto(10**12)]}
                           for i in range(1, a.count + 1)]}
    elif w == "canonicalize":
        u = sc.SorgenfreyUnion.from_json(_json_arg(a.union or "") or {})
        res = {"n_k": sc.canonicalize(u).prefix(a.count)}
    else:
        raise UsageError(f"unknown construction {w!r}")
    if a.emit:
        Path(a.emit).write_text(json.dumps(_plain(res), indent=2, sort_keys=True) + "\n")
        emit_json({"written": a.emit}, out)
    else:
        emit_json(res, out)
    return 0


def _with_approx(cert: dict) -> dict:
    out = dict(cert)
    for key in ("cover_cost", "bound", "literal"):
        out[key + "_approx"] = f"{float(cert[key]):.6g}"
    return out


def _adim_bound(a) -> Fraction:
    if not a.set:
        raise UsageError("--bound is required for trees")
    b = co.window_assouad_estimate(parse_set(a.set), 64, 256)
    return b.upper if b.exact else b.lower


def cmd_report(a, out) -> int:
    w = a.what
    if w == "density":
        s = _parse("set", parse_set, a.set)
        d = _parse("scales", parse_scales, a.scales or "all")
        rows = dc.density_rows(s, d, a.count)
        if a.format == "csv":
            out.write(dc.rows_to_csv(["k", "n_k", "count", "density"], rows))
        else:
            emit_json([{"k": k, "n_k": n, "count": c, "density": m} for k, n, c, m in rows], out)
    elif w == "decay":
        a.what = "decay"
        return cmd_content(a, out)
    elif w == "ledger":
        t = cons.rdim_not_pdim_construct(cons.PowerPhi(a.power), a.n, a.stages)
        emit_json(t.ledger.to_json(), out)
    else:
        raise UsageError(f"unknown report {w!r}")
    return 0


# -- invariant suites -------------------------------------------------------------


def suite_sandwich(cases: int, seed: int) -> dict:
    rng = random.Random(seed)
    failures, exact = [], 0
    for c in range(cases):
        s, d = dc.random_rule_pair(rng)
        b = dc.drdim_AS(s, d)
        exact += b.exact
        if not dc.sandwich_holds(s, d):
            failures.append({"case": c, "set": s.to_json(), "scales": d.to_json()})
    return {"cases": cases, "exact": exact, "failures": failures}


def suite_oracle(cases: int, seed: int) -> dict:
    rng = random.Random(seed)
    failures = []
    for c in range(cases):
        n = 1 if c % 5 else 2
        depth = rng.randint(1, 6 if n == 1 else 4)
        tree = ts.random_tree(rng, n, depth)
        s = Fraction(rng.randint(0, 4 * n), 4)
        levels = sorted(rng.sample(range(1, depth + 1), rng.randint(1, depth)))
        q = co.ContentQuery(tree, s, sc.Concat(levels, sc.Arithmetic(depth + 1, 1)), depth)
        try:
            same = co.min_cover_content_dp(q) == co.brute_force_content(q)
        except co.InfeasibleCover:
            try:
                co.brute_force_content(q)
                same = False
            except co.InfeasibleCover:
                same = True
        if not same:
            failures.append({"case": c, "tree": tree.to_json()})
    return {"cases": cases, "failures": failures}


def suite_survivors(cases: int, seed: int) -> dict:
    rng = random.Random(seed)
    failures = []
    for c in range(cases):
        s, _ = dc.random_rule_pair(rng)
        t = ts.from_digitset(s)
        for lv in range(0, 65):
            if t.count_below((), lv) != 2 ** s.count(lv):
                failures.append({"case": c, "set": s.to_json(), "level": lv})
                break
    return {"cases": cases, "failures": failures}


def suite_phi(cases: int, seed: int) -> dict:
    rng = random.Random(seed)
    failures = []
    for c in range(cases):
        q = rng.randint(2, 9)
        p = rng.randint(1, q - 1)
        i = rng.randint(1, 10**6)
        v, r = ds.phi(i, p, q), Fraction(p, q)
        if not Fraction(i - p) / r < v < Fraction(i + p) / r or v < i / r:
            failures.append({"case": c, "i": i, "p": p, "q": q})
    return {"cases": cases, "failures": failures}


SUITES = {"sandwich": suite_sandwich, "oracle": suite_oracle,
          "survivors": suite_survivors, "phi": suite_phi}


def cmd_verify(a, out) -> int:
    if a.what not in SUITES:
        raise UsageError(f"unknown suite {a.what!r}; choose from {', '.join(sorted(SUITES))}")
    rep = SUITES[a.what](a.cases, a.seed)
    rep["suite"], rep["seed"] = a.what, a.seed
    rep["ok"] = not rep["failures"]
    emit_json(rep, out)
    return 0 if rep["ok"] else 1


# -- entry point ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="restdim", description="Restricted dimensions of digit-restriction sets.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("what", nargs="?", default=None,
                   help="dim: drdim|hdim|pdim|rdim|adim; content: dp|brute|naive|single|decay; "
                        "construct: darboux|rdim_not_pdim|holder|regular_cover|zero_one|"
                        "prime_factorial|canonicalize; verify: suite name; report: density|decay|ledger")
    p.add_argument("--set")
    p.add_argument("--family")
    p.add_argument("--scales")
    p.add_argument("--tree")
    p.add_argument("--union", help="JSON Sorgenfrey union for canonicalize")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--depths", help="comma-separated depths for decay profiles")
    p.add_argument("--truncation", type=int, default=8)
    p.add_argument("--exact-only", action="store_true", help="fail (status 3) on non-certified values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--alpha")
    p.add_argument("--s")
    p.add_argument("--t")
    p.add_argument("--bound")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--pairs", type=int, default=10_000)
    p.add_argument("--power", type=int, default=2, help="rdim_not_pdim uses Phi(d) = d^power")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--stages", type=int, default=4)
    p.add_argument("--mass", action="store_true")
    p.add_argument("--emit", help="write the construction to this file")
    return p


_DEFAULT_WHAT = {"dim": "drdim", "content": "dp", "construct": None, "verify": None, "report": "density"}
_HANDLERS = {"dim": cmd_dim, "content": cmd_content, "construct": cmd_construct,
             "verify": cmd_verify, "report": cmd_report}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
        a.what = a.what or _DEFAULT_WHAT[a.verb]
        if a.what is None:
            raise UsageError(f"{a.verb} needs a target")
        return _HANDLERS[a.verb](a, out)
    except UsageError as e:
        err.write(f"restdim: {e}\n")
        return 2
    except co.InfeasibleCover as e:
        emit_json(e.to_json(), out)
        return 3
    except (cons.OutOfRange, sc.NotAdmissible, ts.DepthExceeded, ValueError) as e:
        emit_json({"status": "infeasible", "reason": str(e)}, out)
        return 3


def main() -> None:
    sys.exit(run())
