"""Shipped fixtures: a two-tetrahedron seed and complexes grown from it by moves.

The seed is a closed, orientable, one-vertex triangulation with H_1 = Z,
found by enumerating two-tetrahedron gluings. Its loop edge 0 carries the
two H-germs at the vertex. The cocycle is ``z(e) = g^u(e)`` for the integral
class u = (3, 2, 1) and a generic g in B, which is full. Every other fixture
is the seed after a logged sequence of positive moves, with the decoration
carried along by transit. A 2 -> 3 directly on the seed always creates a
loop edge with trivial holonomy, so every recipe with a 2 -> 3 starts with a
1 -> 4.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .decoration import cocycle_from_abelian, curve_alpha, curve_sigma, gauge_transform, \
    random_gauge, solve_charges, transit_decoration, validate_charge, validate_cocycle
from .errors import NotApplicable, TransitFailure
from .moves import apply_move, candidate_sites
from .qhifile import QHIDocument
from .triangulation import Diagnostic, SingularTriangulation, find_branching, validate

SEED_GLUINGS = (
    ((0, (1, 2, 3, 0)), (0, (3, 0, 1, 2)), (1, (3, 2, 0, 1)), (1, (3, 2, 0, 1))),
    ((0, (2, 3, 1, 0)), (0, (2, 3, 1, 0)), (1, (2, 0, 3, 1)), (1, (1, 3, 0, 2))),
)
SEED_CLASS = (3, 2, 1)
SEED_GENERATOR = (1.2 + 0.3j, 0.8 - 0.5j)

# name -> move kinds applied in order from the seed (first applicable site each time)
RECIPES = {
    "seed": (),
    "s02": ("0-2",),
    "s14": ("1-4",),
    "s14_23": ("1-4", "2-3"),
    "s02_02": ("0-2", "0-2"),
    "s14_02": ("1-4", "0-2"),
    "s14_14": ("1-4", "1-4"),
    "s14_23_02": ("1-4", "2-3", "0-2"),
}


def seed_document() -> QHIDocument:
    tri = SingularTriangulation(SEED_GLUINGS, (1, 1))
    H = (0,)
    b = find_branching(tri)
    z, _ = cocycle_from_abelian(tri, "power", SEED_CLASS, generator=SEED_GENERATOR)
    c = solve_charges(tri, H)
    return QHIDocument("seed", tri, H, b, z, c, (),
                       {"class": list(SEED_CLASS), "H1": "Z", "homeomorphism_type": "uncertified"})


def grow(doc: QHIDocument, kind: str, rng: np.random.Generator, name: str | None = None
         ) -> QHIDocument:
    """Apply the first site of ``kind`` whose transit succeeds."""
    for site in candidate_sites(doc.tri, doc.H, kind):
        try:
            move = apply_move(doc.tri, doc.H, doc.branching, kind, site)
            z, c = transit_decoration(move, doc.cocycle, doc.charge, rng)
        except (NotApplicable, TransitFailure):
            continue
        prov = doc.provenance + ((kind,) + tuple(site),)
        return QHIDocument(name or f"{doc.name}+{kind}", move.tri, tuple(move.H), move.branching,
                           z, c, prov, dict(doc.metadata))
    raise NotApplicable(f"no {kind} site with a successful transit on {doc.name}")


def check_document(doc: QHIDocument) -> list:
    """All validator diagnostics for a decorated closed document."""
    out = list(validate(doc.tri, doc.H, doc.branching))
    if doc.cocycle is not None:
        out += validate_cocycle(doc.tri, doc.branching, doc.cocycle)
    if doc.charge is not None:
        out += validate_charge(doc.tri, doc.H, doc.charge)
        out += curve_diagnostics(doc)
    return out


def curve_diagnostics(doc: QHIDocument) -> list:
    """sigma(s) = 0 on link curves and alpha(s) even on tetrahedral curves."""
    out = []
    for k, (kind, steps) in enumerate(doc.curves):
        try:
            if kind == "sigma":
                v = curve_sigma(doc.tri, doc.charge, steps)
                if v != 0:
                    out.append(Diagnostic("curve", (k,), f"sigma = {v}, expected 0"))
            else:
                v = curve_alpha(doc.tri, doc.charge, steps)
                if v % 2:
                    out.append(Diagnostic("curve", (k,), f"alpha = {v} is odd"))
        except ValueError as exc:
            out.append(Diagnostic("curve", (k,), str(exc)))
    return out


@lru_cache(maxsize=None)
def _catalog() -> tuple[QHIDocument, ...]:
    out = []
    for name, kinds in RECIPES.items():
        rng = np.random.default_rng(20240 + len(out))
        doc = seed_document()
        for kind in kinds:
            doc = grow(doc, kind, rng)
            # a vertex gauge keeps new vertices generic
            v = int(rng.integers(doc.tri.r0))
            doc = QHIDocument(doc.name, doc.tri, doc.H, doc.branching,
                              gauge_transform(doc.tri, doc.cocycle, {v: random_gauge(rng)}),
                              doc.charge, doc.provenance, doc.metadata)
        doc = QHIDocument(name, doc.tri, doc.H, doc.branching, doc.cocycle, doc.charge,
                          doc.provenance, dict(doc.metadata, recipe=list(kinds)))
        out.append(doc)
    return tuple(out)


def fixture_catalog() -> list[QHIDocument]:
    return list(_catalog())


def get_fixture(name: str) -> QHIDocument:
    for doc in _catalog():
        if doc.name == name:
            return doc
    raise KeyError(f"unknown fixture {name!r}; known: {', '.join(RECIPES)}")
