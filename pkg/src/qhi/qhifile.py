"""The QHI text format: one JSON object per line, complex parts as decimal strings.

Line 1 is a header, then one line per tetrahedron, then one line per edge
class. Floats are written with ``repr``, the shortest string that reads back
to the same double, so parse/serialize round-trips bit for bit. See README
for the field table.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .decoration import BCocycle, IntegralCharge
from .errors import ParseError, UnknownVersion
from .triangulation import EDGES, Branching, SingularTriangulation

FORMAT = "qhi"
VERSION = 1


@dataclass(frozen=True)
class QHIDocument:
    name: str
    tri: SingularTriangulation
    H: tuple[int, ...]
    branching: Branching | None = None
    cocycle: BCocycle | None = None
    charge: IntegralCharge | None = None
    provenance: tuple = ()
    metadata: dict = field(default_factory=dict)
    curves: tuple = ()  # (kind "alpha" | "sigma", steps) for the curve charge conditions


def _num(v: float) -> str:
    return repr(float(v))


def _cplx(z: complex) -> list[str]:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def serialize(doc: QHIDocument) -> bytes:
    tri = doc.tri
    lines = [{"format": FORMAT, "version": VERSION, "name": doc.name, "n_tets": tri.n_tets,
              "n_edges": tri.r1, "H": list(doc.H), "provenance": [list(p) for p in doc.provenance],
              "metadata": doc.metadata}]
    if doc.curves:
        lines[0]["curves"] = [{"kind": k, "steps": [list(st) for st in steps]} for k, steps in doc.curves]
    for t in range(tri.n_tets):
        rec = {"tet": t, "orientation": tri.orientation[t],
               "gluing": [None if s is None else [s[0], list(s[1])] for s in tri.gluings[t]]}
        if doc.charge is not None:
            rec["charge"] = list(doc.charge.values[t])
        lines.append(rec)
    for ec in tri.edge_classes:
        t, k = ec.representative
        rec = {"edge": ec.index, "rep": [t, list(EDGES[k])]}
        if doc.branching is not None:
            rec["direction"] = doc.branching.directions[ec.index]
        if doc.cocycle is not None:
            tv, xv = doc.cocycle.values[ec.index]
            rec["t"] = _cplx(tv)
            rec["x"] = _cplx(xv)
        lines.append(rec)
    return "".join(json.dumps(rec, separators=(",", ":")) + "\n" for rec in lines).encode()


def _complex(rec, key, line):
    try:
        re, im = rec[key]
        if not (isinstance(re, str) and isinstance(im, str)):
            raise TypeError
        return complex(float(re), float(im))
    except (KeyError, TypeError, ValueError):
        raise ParseError(f"field {key!r} must be two decimal strings", line, 1) from None


def parse_text(text: str) -> QHIDocument:
    rows = []
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            rows.append((n, json.loads(raw)))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", n, exc.colno) from None
    if not rows:
        raise ParseError("empty document", 1, 1)
    n0, head = rows[0]
    if head.get("format") != FORMAT:
        raise ParseError("missing 'format': 'qhi' header", n0, 1)
    if head.get("version") != VERSION:
        raise UnknownVersion(f"unsupported version {head.get('version')!r}", n0, 1)
    try:
        n_tets, n_edges = int(head["n_tets"]), int(head["n_edges"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("header needs integer n_tets and n_edges", n0, 1) from None
    tets = [r for r in rows[1:] if "tet" in r[1]]
    edges = [r for r in rows[1:] if "edge" in r[1]]
    if len(tets) != n_tets:
        raise ParseError(f"expected {n_tets} tetrahedron lines, found {len(tets)}", n0, 1)
    gluings, orient, charges = [], [], []
    for k, (n, rec) in enumerate(tets):
        if rec.get("tet") != k:
            raise ParseError(f"tetrahedron lines out of order at id {rec.get('tet')!r}", n, 1)
        g = rec.get("gluing")
        if not isinstance(g, list) or len(g) != 4:
            raise ParseError(f"tetrahedron {k}: gluing needs four slots", n, 1)
        row = []
        for f, s in enumerate(g):
            if s is None:
                row.append(None)
                continue
            try:
                u, perm = int(s[0]), tuple(int(v) for v in s[1])
            except (TypeError, ValueError, IndexError):
                raise ParseError(f"tetrahedron {k} face {f}: malformed gluing", n, 1) from None
            if not (0 <= u < n_tets):
                raise ParseError(f"tetrahedron {k} face {f}: gluing id {s[0]!r} is not a tetrahedron",
                                 n, 1)
            if sorted(perm) != [0, 1, 2, 3]:
                raise ParseError(f"tetrahedron {k} face {f}: {list(perm)} is not a permutation", n, 1)
            row.append((u, perm))
        gluings.append(tuple(row))
        orient.append(int(rec.get("orientation", 1)))
        if "charge" in rec:
            charges.append(tuple(int(v) for v in rec["charge"]))
    for k, row in enumerate(gluings):
        for f, s in enumerate(row):
            if s is None:
                continue
            u, perm = s
            back = gluings[u][perm[f]]
            if back is None or back[0] != k or tuple(back[1][perm[v]] for v in range(4)) != (0, 1, 2, 3):
                raise ParseError(f"tetrahedron {k} face {f}: gluing to {u} is not symmetric",
                                 tets[k][0], 1)
    tri = SingularTriangulation(tuple(gluings), tuple(orient))
    if len(edges) != n_edges or tri.r1 != n_edges:
        raise ParseError(f"expected {tri.r1} edge lines, found {len(edges)}", n0, 1)
    dirs, vals = [], []
    for k, (n, rec) in enumerate(edges):
        if rec.get("edge") != k:
            raise ParseError(f"edge lines out of order at id {rec.get('edge')!r}", n, 1)
        t, k2 = tri.edge_classes[k].representative
        if rec.get("rep") != [t, list(EDGES[k2])]:
            raise ParseError(f"edge {k}: representative {rec.get('rep')!r} does not match the gluings",
                             n, 1)
        if "direction" in rec:
            dirs.append(int(rec["direction"]))
        if "t" in rec or "x" in rec:
            vals.append((_complex(rec, "t", n), _complex(rec, "x", n)))
    branching = Branching(tuple(dirs)) if len(dirs) == n_edges else None
    cocycle = BCocycle(tuple(vals)) if len(vals) == n_edges else None
    charge = IntegralCharge(tuple(charges)) if len(charges) == n_tets else None
    H = tuple(int(e) for e in head.get("H", []))
    prov = tuple(tuple(p) if isinstance(p, list) else p for p in head.get("provenance", []))
    prov = tuple(tuple(tuple(q) if isinstance(q, list) else q for q in p) for p in prov)
    curves = []
    for k, cv in enumerate(head.get("curves", [])):
        try:
            kind, steps = cv["kind"], tuple(tuple(int(v) for v in st) for st in cv["steps"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"curve {k}: needs 'kind' and integer 'steps'", n0, 1) from None
        width = {"alpha": 3, "sigma": 4}.get(kind)
        if width is None or any(len(st) != width or not (0 <= st[0] < n_tets) for st in steps):
            raise ParseError(f"curve {k}: malformed {kind!r} steps", n0, 1)
        curves.append((kind, steps))
    return QHIDocument(str(head.get("name", "")), tri, H, branching, cocycle, charge, prov,
                       dict(head.get("metadata", {})), tuple(curves))


def parse(path) -> QHIDocument:
    return parse_text(Path(path).read_text())


def write(doc: QHIDocument, path) -> None:
    Path(path).write_bytes(serialize(doc))
