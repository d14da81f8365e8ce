"""Graphviz export of resolution proofs."""

from __future__ import annotations

from typing import Optional, Sequence

from ..inference.prover import ASSUMPTION, GOAL, Proof, check_proof


class ProofCheckError(ValueError):
    """The proof does not re-verify, so it is not exported."""


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_proof_dot(proof: Proof, axioms: Optional[Sequence] = None, name: str = "proof") -> str:
    """DOT text for a proof DAG, after re-checking every step.

    ``axioms`` defaults to the assumptions recorded in the proof itself, which
    still checks every inference between them.
    """
    if axioms is None:
        axioms = [s.formula if s.is_formula else s.clause for s in proof.steps if s.rule == ASSUMPTION]
    if not check_proof(proof, axioms):
        raise ProofCheckError("proof failed verification; refusing to export")
    lines = [
        f"digraph {name} {{",
        "  rankdir=TB;",
        '  node [shape=box, fontname="Helvetica"];',
    ]
    last = proof.steps[-1].id
    for s in sorted(proof.steps, key=lambda s: s.id):
        label = _escape(f"{{{s.id}}} {s.text()} [{s.justification()}]")
        style = ""
        if s.id == last and s.clause is not None and s.clause.is_empty:
            style = ', shape=doubleoctagon, style=filled, fillcolor="#f4cccc"'
        elif s.rule in (ASSUMPTION, GOAL):
            style = ", style=rounded"
        lines.append(f'  s{s.id} [label="{label}"{style}];')
    for s in sorted(proof.steps, key=lambda s: s.id):
        for p in s.parents:
            lines.append(f"  s{p} -> s{s.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"
