"""JSON exports of complexes and schema access."""

from __future__ import annotations

import json
from importlib import resources

from .engine import LevelComplex, census

__all__ = ["complex_to_dict", "complex_text", "load_schema", "SCHEMAS"]

SCHEMAS = ("complex.v1", "verdict.v1", "probe.v1")


def _parent(p: tuple[int, int]) -> dict:
    return {"dim": p[0], "index": p[1]}


def _opt(x: int) -> int | None:
    return None if x < 0 else x


def complex_to_dict(cx: LevelComplex) -> dict:
    """``complex.v1`` document for one level of a sphere or tile tower.

    Images are indices into the previous sphere level (``null`` at level 0);
    parents are ``(dim, index)`` cells of the previous level of the same tower.
    """
    rule = cx.rule
    c = census(cx)
    return {
        "schema": "complex.v1",
        "rule": rule.name,
        "kind": cx.kind,
        "tile": None if cx.tile is None else rule.tile_ids[cx.tile],
        "level": cx.level,
        "census": {**c.to_dict(), "euler": cx.euler_characteristic()},
        "vertices": [
            {
                "id": v,
                "label": rule.vertex_ids[cx.vlabel[v]],
                "image": _opt(cx.vimg[v]),
                "parent": _parent(cx.vpar[v]),
                "base": cx.is_base_vertex(v),
            }
            for v in range(cx.n_vertices)
        ],
        "edges": [
            {
                "id": e,
                "tail": cx.etail[e],
                "head": cx.ehead[e],
                "label": rule.edge_ids[cx.elabel[e]],
                "image": _opt(cx.eimg[e]),
                "parent": _parent(cx.epar[e]),
                "root": None if cx.eroot[e] < 0 else rule.edge_ids[cx.eroot[e]],
            }
            for e in range(cx.n_edges)
        ],
        "faces": [
            {
                "id": f,
                "type": rule.tile_ids[cx.ftype[f]],
                "sides": [
                    {"edge": e, "sign": "+" if s > 0 else "-"}
                    for e, s in zip(cx.fedges[f], rule.slot_sign[cx.ftype[f]])
                ],
                "corners": list(cx.fcorners[f]),
                "image": _opt(cx.fimg[f]),
                "parent": cx.fpar[f],
            }
            for f in range(cx.n_faces)
        ],
    }


def complex_text(cx: LevelComplex) -> str:
    rule = cx.rule
    c = census(cx)
    where = "S²" if cx.tile is None else f"tile {rule.tile_ids[cx.tile]}"
    lines = [
        f"{rule.name}: level {cx.level} of {where}",
        f"  V={c.vertices} E={c.edges} F={c.faces} euler={cx.euler_characteristic()}",
        "  faces by type: " + ", ".join(f"{k}={v}" for k, v in c.faces_by_type.items()),
    ]
    val = cx.valences()
    if val:
        lines.append(f"  max valence {max(val)}")
    return "\n".join(lines) + "\n"


def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}; available: {', '.join(SCHEMAS)}")
    return json.loads((resources.files("fsrlab") / "schemas" / f"{name}.json").read_text(encoding="utf-8"))
