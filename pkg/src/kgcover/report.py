"""The JSON report document: schema-stable, deterministic for fixed input.

Groups are always reported as canonical invariants plus the presentation
matrix so downstream tools can recompute; maps carry both the ambient and
the canonical matrix.
"""

from __future__ import annotations

import hashlib
import json

from .abgroups import FgAbGroup, FgAbMap
from .ktheory import GradedKMap, GradedKPair

SCHEMA = "kgcover-report/1"
TOOL_VERSION = "0.1.0"


def group_json(g: FgAbGroup) -> dict:
    free, tors = g.invariants()
    return {"ambient": g.ambient, "free_rank": free, "torsion": list(tors),
            "describe": g.describe(),
            "relations": g.relations.tolist()}


def map_json(f: FgAbMap) -> dict:
    can, so, to = f.canonical_matrix()
    return {"matrix": f.matrix.tolist(),
            "canonical_matrix": can.tolist(),
            "source_orders": list(so), "target_orders": list(to)}


def pair_json(p: GradedKPair) -> dict:
    out = {"K0": group_json(p.k0), "K1": group_json(p.k1),
           "provenance": p.provenance}
    if p.unit_class is not None:
        out["unit_class"] = list(p.unit_class)
        out["unit_canonical"] = list(p.unit_coords())
    return out


def kmap_json(m: GradedKMap) -> dict:
    return {"K0": map_json(m.k0), "K1": map_json(m.k1),
            "multiplicity": m.multiplicity}


def input_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_report(command: str, inputs, status: str, result,
                errors=None, figures=None) -> dict:
    report = {"schema": SCHEMA,
              "tool": {"name": "kgcover", "version": TOOL_VERSION},
              "command": command,
              "inputs": [{"path": p, "sha256": d} for (p, d) in inputs],
              "status": status,
              "result": result}
    if errors:
        report["errors"] = errors
    if figures:
        report["figures"] = list(figures)
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2,
                      separators=(",", ": ")) + "\n"
