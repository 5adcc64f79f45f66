"""Command line front end.

Exit status: 0 on success, 1 when the answer is negative (not derivable,
not equivalent, a bound or obligation fails, Eve loses), 2 on usage, I/O
or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from . import gen
from .eliminate import VerificationError, eliminate_all
from .formula import Formula, conj, iterate, var
from .heyting import PosetError, all_valuations, evaluate, lfp_iterate, parse_poset, upset_algebra
from .normal_form import head_side, split, to_normal_form
from .ordinals import (BoundViolation, CapExceeded, applicable_bounds, closure_ordinal,
                       family_atop, family_chain_conj, family_phi_n, family_side_phi_n,
                       generic_atop, ruitenburg_number, verify_bounds)
from .prover import default_prover
from .syntax import FormulaSyntaxError, parse, parse_lines, to_text
from .words import GameBudgetExceeded, adversarial_family, branches, closed_form, play_game

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _show(f: Formula, args) -> str:
    return to_text(f, tight=getattr(args, "tight", False))


def _inputs(args) -> list[Formula]:
    if getattr(args, "file", None) and getattr(args, "formula", None):
        raise UsageError("give either a formula or --file, not both")
    if getattr(args, "file", None):
        try:
            with open(args.file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        fs = parse_lines(text)
        if not fs:
            raise UsageError(f"{args.file} contains no formula")
        return fs
    if not getattr(args, "formula", None):
        raise UsageError("no formula given")
    return [parse(args.formula)]


def _emit(args, rows: list[dict], text_lines: list[str]) -> None:
    fmt = getattr(args, "format", "text")
    if fmt == "json":
        print(json.dumps(rows if len(rows) != 1 else rows[0], indent=2))
    elif fmt == "csv":
        buf = io.StringIO()
        keys = list(rows[0].keys()) if rows else []
        w = csv.DictWriter(buf, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
        print(buf.getvalue(), end="")
    else:
        for line in text_lines:
            print(line)


def _batch(fn: Callable, items: list) -> list:
    """Apply ``fn`` to the batch on a thread pool; results keep input order."""
    if len(items) < 2:
        return [fn(i) for i in items]
    workers = int(os.environ.get("MUIPC_WORKERS", min(8, os.cpu_count() or 1)))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def cmd_eliminate(args) -> int:
    rows, lines, status = [], [], EXIT_OK
    fs = _inputs(args)
    try:
        results = _batch(lambda f: eliminate_all(f, verify=args.verify, simplify=args.simplify), fs)
    except VerificationError as exc:
        print(f"verification failed: {exc.obligation}", file=sys.stderr)
        return EXIT_FAIL
    for f, (out, trace) in zip(fs, results):
        row = {"input": to_text(f), "output": to_text(out)}
        if args.trace:
            row["trace"] = trace.to_json()
        rows.append(row)
        lines.append(_show(out, args))
        if args.trace:
            lines.append(trace.to_text())
    _emit(args, rows, lines)
    return status


def cmd_prove(args) -> int:
    hyps = [_fp_free(parse(h)) for h in args.assume or []]
    rows, lines, status = [], [], EXIT_OK
    for f in _inputs(args):
        f = _fp_free(f)
        outcome = default_prover.prove_sequent(hyps, f)
        rows.append({"sequent": f"{', '.join(to_text(h) for h in hyps)} |- {to_text(f)}".strip(),
                     "derivable": outcome.derivable, "nodes": outcome.nodes})
        lines.append("derivable" if outcome.derivable else "not derivable")
        if not outcome.derivable:
            status = EXIT_FAIL
    _emit(args, rows, lines)
    return status


def cmd_check_equiv(args) -> int:
    f, g = parse(args.left), parse(args.right)
    if not (f.fp_free and g.fp_free):
        f = eliminate_all(f)[0]
        g = eliminate_all(g)[0]
    lr, rl = default_prover.leq(f, g), default_prover.leq(g, f)
    ok = lr and rl
    row = {"left": to_text(f), "right": to_text(g), "left_entails_right": lr,
           "right_entails_left": rl, "equivalent": ok}
    _emit(args, [row], ["equivalent" if ok else "not equivalent"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_normalize(args) -> int:
    rows, lines = [], []
    x = args.var
    for f in _inputs(args):
        sp = split(f, x)
        row: dict = {"input": to_text(f), "renamed": to_text(sp.renamed),
                     "weakly_negative_copy": sp.wneg_var if sp.uses_wneg else None}
        lines.append(f"split: {_show(sp.renamed, args)}"
                     + (f"   ({sp.wneg_var} replaces weakly negative {x})" if sp.uses_wneg else ""))
        if x in sp.renamed.free:
            nf = to_normal_form(sp.renamed, x)
            row["x_free_part"] = to_text(nf.x_free_part)
            row["disjuncts"] = []
            lines.append(f"x-free part: {_show(nf.x_free_part, args)}")
            for d in nf.disjuncts:
                hs = head_side(d)
                row["disjuncts"].append({"formula": to_text(d.formula),
                                         "head": [to_text(h) for h in hs.sorted_head()],
                                         "side": [to_text(s) for s in hs.sorted_side()]})
                lines.append(f"disjunct: {_show(d.formula, args)}   head {{{', '.join(_show(h, args) for h in hs.sorted_head())}}}"
                             f"   side {{{', '.join(_show(s, args) for s in hs.sorted_side())}}}")
        rows.append(row)
    _emit(args, rows, lines)
    return EXIT_OK


def _fp_free(f: Formula) -> Formula:
    return f if f.fp_free else eliminate_all(f)[0]


def cmd_closure_ordinal(args) -> int:
    rows, lines = [], []
    compact = _compactor(args)
    fs = _inputs(args)
    results = _batch(lambda f: closure_ordinal(_fp_free(f), args.var, cap=args.cap, compact=compact), fs)
    for f, r in zip(fs, results):
        rows.append({"formula": to_text(f), "cl": r.value, "wall_time": round(r.wall_time, 6)})
        lines.append(str(r.value))
    _emit(args, rows, lines)
    return EXIT_OK


def cmd_ruitenburg(args) -> int:
    rows, lines = [], []
    compact = _compactor(args)

    def one(f):
        t0 = time.perf_counter()
        return ruitenburg_number(_fp_free(f), args.var, cap=args.cap, compact=compact), time.perf_counter() - t0

    fs = _inputs(args)
    for f, (r, dt) in zip(fs, _batch(one, fs)):
        rows.append({"formula": to_text(f), "rho": r, "wall_time": round(dt, 6)})
        lines.append(str(r))
    _emit(args, rows, lines)
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    rows, lines, status = [], [], EXIT_OK
    fs = _inputs(args)
    reps = _batch(lambda f: verify_bounds(_fp_free(f), args.var, with_rho=not args.no_rho,
                                          cap=args.cap, strict=False), fs)
    for rep in reps:
        rows.append(rep.to_json())
        mark = "ok" if rep.ok() else "VIOLATED"
        bounds = ", ".join(f"{k}={v}" for k, v in rep.bounds.items())
        lines.append(f"{mark}: cl={rep.cl} rho={rep.rho} bounds[{bounds}]")
        if not rep.ok():
            status = EXIT_FAIL
    _emit(args, rows, lines)
    return status


def _param_range(text: str) -> list[int]:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise UsageError(f"bad --param {text!r}; use K or LO-HI") from None


def _bench_formulas(args) -> list[tuple[str, Formula, Callable | None]]:
    fam = args.family
    out = []
    if fam in ("random-disjunctive", "random-atop", "random"):
        rng = random.Random(args.seed)
        for k in _param_range(args.param):
            for _ in range(args.count):
                if fam == "random-disjunctive":
                    f = gen.random_disjunctive(rng, depth=k)
                elif fam == "random-atop":
                    f = family_atop(gen.random_atop_pairs(rng, k))
                else:
                    f = gen.random_positive(rng, size=k)
                out.append((f"{fam}:{k}", f, None))
        return out
    for k in _param_range(args.param):
        if fam == "phi_n":
            out.append((f"phi_n:{k}", family_phi_n(k), None))
        elif fam == "side_phi_n":
            out.append((f"side_phi_n:{k}", family_side_phi_n(k), None))
        elif fam == "atop":
            out.append((f"atop:{k}", generic_atop(k), None))
        elif fam == "chain":
            f, h, v = family_chain_conj(k)
            out.append((f"chain:{k}", f, lambda f=f, h=h, v=v: lfp_iterate(f, "x", h, v)[1]))
    return out


def cmd_bench(args) -> int:
    rows, lines = [], []
    for label, f, model in _bench_formulas(args):
        t0 = time.perf_counter()
        cl = closure_ordinal(f, "x", cap=args.cap).value
        rho = None if args.no_rho else ruitenburg_number(f, "x", cap=args.cap)
        cl_b, rho_b, _ = applicable_bounds(f, "x")
        row = {"family": label, "formula": to_text(f), "cl": cl, "rho": rho,
               "bounds": {**cl_b, **{f"rho:{k}": v for k, v in rho_b.items()}}}
        if model is not None:
            row["model_steps"] = model()
        row["wall_time"] = round(time.perf_counter() - t0, 6)
        rows.append(row)
        lines.append(f"{label}\tcl={cl}\trho={rho}\t{row['wall_time']:.4f}s\t{to_text(f)}")
    _emit(args, rows, lines)
    return EXIT_OK


def cmd_game(args) -> int:
    x = args.var
    if args.adversarial:
        rows_ = adversarial_family(args.adversarial)
        formulas = None
    else:
        if not args.conjuncts:
            raise UsageError("give --conjuncts FILE or --adversarial N")
        try:
            with open(args.conjuncts) as fh:
                formulas = parse_lines(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.conjuncts}: {exc.strerror}") from None
        rows_ = [sorted(branches(f, x), key=str) for f in formulas]
    K = args.rounds
    if K is None:
        letters = [l for row in rows_ for w in row for l in w.letters]
        N = len(set().union(*(l.A for l in letters))) if letters else 0
        M = len(set().union(*(l.B for l in letters))) if letters else 0
        K = (N + 1) * (M + 1)
    res = play_game(rows_, K, budget=args.budget)
    rep = res.to_json()
    lines = [f"rounds={K}: " + ("Eve wins every play" if res.eve_wins_all else "Adam wins")]
    if res.losing_play is not None:
        lines.append("losing play (i, j): " + " ".join(f"({i},{j})" for i, j in res.losing_play))
    if formulas is not None and args.check:
        phi = conj(formulas)
        holds = default_prover.leq(closed_form(formulas, x), iterate(phi, x, K, var(x)))
        rep["closed_form_below_iterate"] = holds
        lines.append(f"closed form <= phi^{K}: {holds}")
    _emit(args, [rep], lines)
    return EXIT_OK if res.eve_wins_all else EXIT_FAIL


def cmd_model_check(args) -> int:
    try:
        with open(args.poset) as fh:
            p = parse_poset(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.poset}: {exc.strerror}") from None
    h = upset_algebra(p)
    rows, lines, status = [], [], EXIT_OK
    for f in _inputs(args):
        names = sorted(f.free)
        vals = all_valuations(names, h)
        res = np.asarray(evaluate(f, h, vals)).reshape(-1)
        bad = np.nonzero(res != h.top)[0]
        row = {"formula": to_text(f), "algebra_size": h.n, "valid": not bad.size}
        if bad.size:
            k = int(bad[0])
            row["countermodel"] = {n: h.labels[int(vals[n][k])] for n in names}
            row["value"] = h.labels[int(res[k])]
            status = EXIT_FAIL
            lines.append("not valid: " + ", ".join(f"{n}={v}" for n, v in row["countermodel"].items())
                         + f" gives {row['value']}")
        else:
            lines.append("valid")
        rows.append(row)
    _emit(args, rows, lines)
    return status


def _compactor(args):
    if not getattr(args, "compact", False):
        return None
    from .simplify import simplify
    return simplify


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="muipc", description="Fixed-point elimination for the intuitionistic mu-calculus.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, formula=True, var_opt=False, cap=False):
        if formula:
            p.add_argument("formula", nargs="?", help="inline formula (or use --file)")
            p.add_argument("--file", help="file with one formula per line")
        if var_opt:
            p.add_argument("--var", default="x", help="iteration variable (default x)")
        if cap:
            p.add_argument("--cap", type=int, help="iteration cap (default 2*size+2)")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--tight", action="store_true", help="print formulas without blanks")

    p = sub.add_parser("eliminate", help="remove every fixed point")
    common(p)
    p.add_argument("--verify", action="store_true", help="discharge every trace obligation")
    p.add_argument("--simplify", action="store_true", help="prover-guided pruning")
    p.add_argument("--trace", action="store_true", help="print the elimination trace")
    p.set_defaults(run=cmd_eliminate)

    p = sub.add_parser("prove", help="decide derivability in IPC")
    common(p)
    p.add_argument("--assume", action="append", help="hypothesis (repeatable)")
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("check-equiv", help="decide provable equivalence")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(run=cmd_check_equiv)

    p = sub.add_parser("normalize", help="split and normal form")
    common(p, var_opt=True)
    p.set_defaults(run=cmd_normalize)

    for name, fn, doc in (("closure-ordinal", cmd_closure_ordinal, "least n with phi^(n+1)(F) = phi^n(F)"),
                          ("ruitenburg", cmd_ruitenburg, "least n with phi^(n+2) = phi^n")):
        p = sub.add_parser(name, help=doc)
        common(p, var_opt=True, cap=True)
        p.add_argument("--compact", action="store_true", help="simplify iterates with the prover")
        p.set_defaults(run=fn)

    p = sub.add_parser("verify-bounds", help="compare cl and rho with every applicable bound")
    common(p, var_opt=True, cap=True)
    p.add_argument("--no-rho", action="store_true")
    p.set_defaults(run=cmd_verify_bounds)

    p = sub.add_parser("bench", help="closure ordinals on a family")
    p.add_argument("--family", required=True,
                   choices=("phi_n", "chain", "atop", "side_phi_n", "random-disjunctive", "random-atop", "random"))
    p.add_argument("--param", default="1-3", help="K or LO-HI")
    p.add_argument("--count", type=int, default=5, help="formulas per parameter for random families")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int)
    p.add_argument("--no-rho", action="store_true")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(run=cmd_bench)

    p = sub.add_parser("game", help="Eve's memory strategy against every Adam")
    p.add_argument("--conjuncts", help="file with one star formula per line")
    p.add_argument("--adversarial", type=int, metavar="N", help="use the adversarial family of size N")
    p.add_argument("--rounds", type=int, help="K (default (N+1)(M+1))")
    p.add_argument("--var", default="x")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--check", action="store_true", help="also prove closed form <= phi^K")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(run=cmd_game)

    p = sub.add_parser("model-check", help="validity on the upset algebra of a poset")
    common(p)
    p.add_argument("--poset", required=True, help="file: element count, then one i<j per line")
    p.set_defaults(run=cmd_model_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if getattr(args, "cap", None) is not None and args.cap < 1:
        print("error: --cap must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.run(args)
    except (UsageError, FormulaSyntaxError, PosetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BoundViolation, CapExceeded, GameBudgetExceeded) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
