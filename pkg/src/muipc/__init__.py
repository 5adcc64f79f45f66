"""Fixed-point elimination for the intuitionistic propositional mu-calculus."""

from .formula import (BOT, TOP, Formula, PositivityError, VarClass, classify, conj, disj,
                      imp, iterate, mu, neg, nu, size, substitute, var)
from .syntax import FormulaSyntaxError, parse, to_text

__all__ = [
    "BOT", "TOP", "Formula", "PositivityError", "VarClass", "classify", "conj", "disj",
    "imp", "iterate", "mu", "neg", "nu", "size", "substitute", "var",
    "FormulaSyntaxError", "parse", "to_text",
]
