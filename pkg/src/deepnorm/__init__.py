"""Quasipolynomial normalisation of deep-inference SKS proofs."""

from .formula import (
    F,
    T,
    And,
    Atom,
    Context,
    Formula,
    Or,
    ParseError,
    Unit,
    canonical,
    conj,
    disj,
    dual,
    equivalent,
    evaluate,
    parse,
    render,
    size,
    substitute,
    substitute_at,
)
from .derivation import Builder, Derivation, Rule, Step, check_derivation, load, to_json, to_text
from .flow import Flow, extract_flow, validate
from .normalise import normalise, to_analytic, to_cut_free, to_simple_form
from .threshold import gamma, theta

__all__ = [
    "F", "T", "And", "Atom", "Context", "Formula", "Or", "ParseError", "Unit",
    "canonical", "conj", "disj", "dual", "equivalent", "evaluate", "parse",
    "render", "size", "substitute", "substitute_at",
    "Builder", "Derivation", "Rule", "Step", "check_derivation", "load", "to_json", "to_text",
    "Flow", "extract_flow", "validate",
    "normalise", "to_analytic", "to_cut_free", "to_simple_form",
    "gamma", "theta",
]
