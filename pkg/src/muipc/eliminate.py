"""Fixed-point elimination.

``mu_eliminate`` follows the four-step pipeline: split the occurrences of
``x`` by strength, put the strongly positive part in normal form, take the
least fixed point of each disjunctive conjunct in closed form, then
eliminate the weakly negative copy ``y`` by rolling the formula into a
system of greatest fixed points.  ``nu_eliminate`` is substitution of T.

Every step is logged in an :class:`EliminationTrace` together with the
sequents that justify it.  With ``verify=True`` each obligation is sent to
the prover as soon as it is produced and a failure raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .formula import (IMP, MU, NU, TOP, VAR, Formula, PositivityError, all_names, conj, disj,
                      fresh_name, imp, is_positive, rebuild, substitute, substitute_many, var)
from .normal_form import (DisjunctiveFormula, NormalFormError, head_side, is_disjunctive, split,
                          to_normal_form)
from .prover import Prover, default_prover
from .syntax import to_text

__all__ = [
    "RULES", "Obligation", "TraceStep", "EliminationTrace", "VerificationError",
    "WnDecomposition", "GfpSystem", "nu_eliminate", "mu_disjunctive", "wn_decompose",
    "solve_gfp_system", "mu_weakly_negative", "mu_eliminate", "eliminate_all",
]

RULES = ("Split", "NormalForm", "DisjunctiveMu", "WnDecompose", "BekicStep", "NuTop",
         "Rolling", "Recurse")


class VerificationError(AssertionError):
    def __init__(self, obligation: "Obligation"):
        super().__init__(f"obligation failed: {obligation}")
        self.obligation = obligation


@dataclass
class Obligation:
    """``kind`` is ``equiv`` (lhs and rhs interderivable), ``entails``
    (context proves rhs) or ``same`` (structural identity)."""

    kind: str
    lhs: tuple[Formula, ...]
    rhs: Formula
    note: str = ""
    holds: bool | None = None

    def check(self, prover: Prover) -> bool:
        if self.kind == "same":
            self.holds = self.lhs[0] is self.rhs
        elif self.kind == "equiv":
            self.holds = prover.equiv(self.lhs[0], self.rhs)
        else:
            self.holds = prover.entails(self.lhs, self.rhs)
        return self.holds

    def __str__(self) -> str:
        lhs = ", ".join(to_text(f) for f in self.lhs)
        op = {"same": "==", "equiv": "-||-", "entails": "|-"}[self.kind]
        tail = f"  [{self.note}]" if self.note else ""
        return f"{lhs} {op} {to_text(self.rhs)}{tail}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "lhs": [to_text(f) for f in self.lhs],
                "rhs": to_text(self.rhs), "note": self.note, "holds": self.holds}


@dataclass
class TraceStep:
    rule: str
    input: Formula
    output: Formula
    obligations: list[Obligation] = field(default_factory=list)
    detail: str = ""

    @property
    def verified(self) -> bool | None:
        if not self.obligations or any(o.holds is None for o in self.obligations):
            return None
        return all(o.holds for o in self.obligations)


@dataclass
class EliminationTrace:
    verify: bool = False
    prover: Prover = field(default_factory=lambda: default_prover)
    steps: list[TraceStep] = field(default_factory=list)

    def add(self, rule: str, inp: Formula, out: Formula, obligations: Sequence[Obligation] = (),
            detail: str = "") -> TraceStep:
        assert rule in RULES, rule
        step = TraceStep(rule, inp, out, list(obligations), detail)
        self.steps.append(step)
        for ob in step.obligations:
            if ob.kind == "same" or self.verify:
                if not ob.check(self.prover) and (self.verify or ob.kind == "same"):
                    raise VerificationError(ob)
        return step

    @property
    def obligations(self) -> list[Obligation]:
        return [o for s in self.steps for o in s.obligations]

    def discharge(self, prover: Prover | None = None) -> bool:
        p = prover or self.prover
        return all([o.check(p) for o in self.obligations])

    def to_json(self) -> list[dict]:
        return [{"step": i, "rule": s.rule, "input": to_text(s.input), "output": to_text(s.output),
                 "obligations": [o.to_json() for o in s.obligations], "verified": s.verified}
                for i, s in enumerate(self.steps)]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def to_text(self) -> str:
        lines = []
        for i, s in enumerate(self.steps):
            extra = f" ({s.detail})" if s.detail else ""
            lines.append(f"{i:3d} {s.rule}{extra}: {to_text(s.input)}  =>  {to_text(s.output)}")
            for o in s.obligations:
                mark = {True: "ok", False: "FAILED", None: "--"}[o.holds]
                lines.append(f"      [{mark}] {o}")
        return "\n".join(lines)


def _trace(trace: EliminationTrace | None) -> EliminationTrace:
    return trace if trace is not None else EliminationTrace()


def _fixpoint_obligations(f: Formula, x: str, result: Formula, least: bool) -> list[Obligation]:
    obs = [Obligation("equiv", (result,), substitute(f, x, result), "fixed point")]
    if least:
        # with f(p) -> p in the context, result -> p is derivable for a least fixed point
        p = var(fresh_name("p", all_names(f) | result.free | {x}, always_suffix=True))
        obs.append(Obligation("entails", (imp(substitute(f, x, p), p),), imp(result, p),
                              "least among prefixed points"))
    return obs


def _check_input(f: Formula, x: str) -> None:
    if not f.fp_free:
        raise ValueError(f"expected a fixed-point free formula, got {to_text(f)}")
    if not is_positive(f, x):
        raise PositivityError(f"{x} is not positive in {to_text(f)}")


# ---------------------------------------------------------------------------
# greatest fixed points


def nu_eliminate(f: Formula, x: str, trace: EliminationTrace | None = None) -> Formula:
    """The greatest fixed point of a positive polynomial is its value at T."""
    _check_input(f, x)
    out = substitute(f, x, TOP)
    if x in f.free:
        _trace(trace).add("NuTop", f, out, [
            Obligation("equiv", (out,), substitute(f, x, out), "f(T) is a fixed point")])
    return out


# ---------------------------------------------------------------------------
# strongly positive case


def mu_disjunctive(d: Formula | DisjunctiveFormula, x: str | None = None,
                   trace: EliminationTrace | None = None) -> Formula:
    """Least fixed point of a disjunctive formula: the conjunction of its
    heads implies the disjunction of its sides."""
    if isinstance(d, DisjunctiveFormula):
        f, x = d.formula, d.var
    else:
        f = d
        if x is None:
            raise TypeError("variable required")
        if not is_disjunctive(f, x):
            raise NormalFormError(f"{to_text(f)} is not disjunctive in {x}")
    hs = head_side(f, x)
    out = imp(conj(hs.sorted_head()), disj(hs.sorted_side()))
    if trace is not None:
        trace.add("DisjunctiveMu", f, out, _fixpoint_obligations(f, x, out, True))
    return out


# ---------------------------------------------------------------------------
# weakly negative case


@dataclass(frozen=True)
class WnDecomposition:
    """``f = psi0[psis / ys]`` with each ``ys[i]`` negative in ``psi0`` and
    ``x`` negative in each ``psis[i]``."""

    psi0: Formula
    ys: tuple[str, ...]
    psis: tuple[Formula, ...]
    var: str

    def recompose(self) -> Formula:
        return substitute_many(self.psi0, dict(zip(self.ys, self.psis)))


def wn_decompose(f: Formula, x: str, avoid: Sequence[str] = ()) -> WnDecomposition:
    """Cut out the outermost implication antecedents that contain ``x``.
    Identical antecedents share one variable."""
    if not is_positive(f, x):
        raise PositivityError(f"{x} is not positive in {to_text(f)}")
    used = all_names(f) | set(f.free) | {x} | set(avoid)
    cut: dict[Formula, str] = {}
    memo: dict[Formula, Formula] = {}

    def name_for(a: Formula) -> Formula:
        if a not in cut:
            y = fresh_name("y", used, always_suffix=True)
            used.add(y)
            cut[a] = y
        return var(cut[a])

    def go(g: Formula) -> Formula:
        if x not in g.free:
            return g
        hit = memo.get(g)
        if hit is not None:
            return hit
        if g.tag == VAR:
            raise NormalFormError(f"{x} has a strongly positive occurrence in {to_text(f)}")
        if g.tag == IMP:
            a, b = g.args
            r = imp(name_for(a) if x in a.free else a, go(b))
        elif g.tag in (MU, NU):
            raise ValueError("wn_decompose expects a fixed-point free formula")
        else:
            r = rebuild(g, [go(c) for c in g.args])
        memo[g] = r
        return r

    psi0 = go(f)
    ys = tuple(cut.values())
    return WnDecomposition(psi0, ys, tuple(cut.keys()), x)


@dataclass(frozen=True)
class GfpSystem:
    """Equations ``vars[i] = rhs[i]``, each right side monotone in every variable."""

    vars: tuple[str, ...]
    rhs: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.vars) != len(self.rhs):
            raise ValueError("a system needs one right-hand side per variable")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("system variables must be distinct")
        for y in self.vars:
            for r in self.rhs:
                if not is_positive(r, y):
                    raise ValueError(f"{y} is not positive in {to_text(r)}")


def solve_gfp_system(system: GfpSystem, trace: EliminationTrace | None = None) -> list[Formula]:
    """Greatest solution by Bekic elimination.

    The last variable is solved first as a parametrized greatest fixed point
    (substitute T for it), its solution is plugged into the other equations,
    the smaller system is solved recursively, and the back-substitution gives
    the last component.
    """
    sol = _bekic(list(system.vars), list(system.rhs), trace)
    if trace is not None and sol:
        env = dict(zip(system.vars, sol))
        obs = [Obligation("equiv", (s,), substitute_many(r, env), f"equation for {v}")
               for v, r, s in zip(system.vars, system.rhs, sol)]
        trace.add("BekicStep", conj(system.rhs), conj(sol), obs,
                  detail=f"greatest solution for {', '.join(system.vars)}")
    return sol


def _bekic(ys: list[str], rhs: list[Formula], trace: EliminationTrace | None) -> list[Formula]:
    if not ys:
        return []
    y = ys[-1]
    g = substitute(rhs[-1], y, TOP)
    if trace is not None:
        trace.add("BekicStep", rhs[-1], g, detail=f"nu {y}, parametric in {', '.join(ys[:-1]) or 'nothing'}")
    head = _bekic(ys[:-1], [substitute(r, y, g) for r in rhs[:-1]], trace)
    return head + [substitute_many(g, dict(zip(ys[:-1], head)))]


def _system_of(dec: WnDecomposition) -> GfpSystem:
    return GfpSystem(dec.ys, tuple(substitute(p, dec.var, dec.psi0) for p in dec.psis))


def mu_weakly_negative(f: Formula, x: str, trace: EliminationTrace | None = None) -> Formula:
    """Least fixed point of a weakly negative formula via its gfp system."""
    _check_input(f, x)
    dec = wn_decompose(f, x)
    if trace is not None:
        trace.add("WnDecompose", f, dec.psi0, [Obligation("same", (dec.recompose(),), f, "recomposition")],
                  detail=", ".join(f"{y} := {to_text(p)}" for y, p in zip(dec.ys, dec.psis)))
    system = _system_of(dec)
    nus = solve_gfp_system(system, trace)
    out = substitute_many(dec.psi0, dict(zip(dec.ys, nus)))
    if trace is not None:
        trace.add("Rolling", dec.psi0, out, _fixpoint_obligations(f, x, out, True))
    return out


# ---------------------------------------------------------------------------
# the pipeline


def _mu(f: Formula, x: str, trace: EliminationTrace) -> Formula:
    _check_input(f, x)
    if x not in f.free:
        return f
    sp = split(f, x)
    if x not in sp.renamed.free:
        # only weakly negative occurrences: go straight to the last step
        out = mu_weakly_negative(f, x, trace)
        return out
    trace.add("Split", f, sp.renamed, [Obligation("same", (sp.restore(),), f, f"{sp.wneg_var} := {x}")],
              detail=f"weakly negative copy {sp.wneg_var}" if sp.uses_wneg else "strongly positive")
    nf = to_normal_form(sp.renamed, x)
    trace.add("NormalForm", sp.renamed, nf.as_formula(),
              [Obligation("equiv", (nf.as_formula(),), sp.renamed, "normal form")])
    parts = [nf.x_free_part] + [mu_disjunctive(d, trace=trace) for d in nf.disjuncts]
    chi = conj(parts)
    if not sp.uses_wneg:
        out = chi
    else:
        y = sp.wneg_var
        out = mu_weakly_negative(chi, y, trace) if y in chi.free else chi
    trace.add("Recurse", f, out, _fixpoint_obligations(f, x, out, True), detail=f"mu {x}")
    return out


def mu_eliminate(f: Formula, x: str, verify: bool = False,
                 trace: EliminationTrace | None = None) -> tuple[Formula, EliminationTrace]:
    """A fixed-point free formula equivalent to ``mu x. f``."""
    trace = trace if trace is not None else EliminationTrace(verify=verify)
    return _mu(f, x, trace), trace


def eliminate_all(f: Formula, verify: bool = False, simplify: bool = False,
                  trace: EliminationTrace | None = None) -> tuple[Formula, EliminationTrace]:
    """Remove every binder, innermost first."""
    trace = trace if trace is not None else EliminationTrace(verify=verify)
    if simplify:
        from .simplify import simplify as _simp
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g.fp_free:
            return g
        hit = memo.get(g)
        if hit is not None:
            return hit
        if g.tag in (MU, NU):
            x = g.name
            body = go(g.args[0])
            if simplify:
                body = _simp(body, trace.prover)
            if not is_positive(body, x):
                raise AssertionError(f"positivity of {x} lost in {to_text(body)}")
            r = _mu(body, x, trace) if g.tag == MU else nu_eliminate(body, x, trace)
            if simplify:
                r = _simp(r, trace.prover)
        else:
            r = rebuild(g, [go(c) for c in g.args])
        memo[g] = r
        return r

    return go(f), trace
