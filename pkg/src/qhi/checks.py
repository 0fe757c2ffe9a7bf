"""Check suites shared by the CLI, the scripts and the acceptance tests.

Every suite returns a list of ``Check`` records; ``Report`` bundles them into
the JSON schema ``{command, seed, N, residual_max, pass, per_check}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cyclotomic import RootContext, RootDetermination, five_term_residual
from .decoration import (charge_lattice_vector, edge_sums, charge_targets, gauge_transform,
                         is_full, lattice_delta, random_gauge, solve_charges, transit_decoration)
from .errors import BoundExceeded, NotApplicable, TransitFailure
from .local import local_mirror_residual, local_move_residual, bipyramid, single_tetrahedron, \
    three_star
from .moves import apply_move, candidate_sites
from .qhifile import QHIDocument
from .sixj import (build_symmetry_matrices, check_duality, check_inverse, check_orthogonality,
                   check_pentagon, check_sixj_relation, check_symmetry, compare, perturbed,
                   random_regular_reps, six_x, solve_zeta_prime, symmetry_relations)
from .statesum import (assemble_network, contract, evaluate_cutopen, evaluate_KN,
                       evaluate_KN_cutopen, greedy_plan, linear_plan, naive_sum, to_cutopen)
from .triangulation import all_branchings, mirror

MOVES = ("2-3", "0-2", "1-4")


@dataclass
class Check:
    name: str
    residual: float
    tol: float
    passed: bool
    info: dict = field(default_factory=dict)
    above: bool = False  # a control: passes when the residual exceeds tol

    @classmethod
    def below(cls, name, residual, tol, **info) -> "Check":
        residual = float(residual)
        return cls(name, residual, tol, bool(residual < tol), info)

    @classmethod
    def over(cls, name, residual, tol, **info) -> "Check":
        residual = float(residual)
        return cls(name, residual, tol, bool(residual > tol), info, above=True)


@dataclass
class Report:
    command: str
    seed: int | None
    N: tuple[int, ...]
    per_check: list[Check]

    @property
    def residual_max(self) -> float:
        return max((c.residual for c in self.per_check if not c.above), default=0.0)

    @property
    def passed(self) -> bool:
        return bool(self.per_check) and all(c.passed for c in self.per_check)

    def to_dict(self) -> dict:
        return {"command": self.command, "seed": self.seed, "N": list(self.N),
                "residual_max": self.residual_max, "pass": self.passed,
                "per_check": [asdict(c) for c in self.per_check]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ---------------------------------------------------------------- algebraic identities


def _charges(rng, N, k):
    return [int(v) for v in rng.integers(0, N, k)]


def pentagon_checks(N: int, draws: int, seed: int, tol: float = 1e-9) -> list[Check]:
    ctx, d = RootContext(N), RootDetermination(N)
    rng = np.random.default_rng(seed)
    out = []
    for n in range(draws):
        reps = random_regular_reps(ctx, d, rng, 4)
        labels = _charges(rng, N, 5)
        r = check_pentagon(ctx, d, *reps, *labels, tol=tol)
        out.append(Check.below(f"pentagon[N={N},{n}]", r.residual, tol, root_index=r.root_index))
    return out


def orthogonality_checks(N: int, draws: int, seed: int, tol: float = 1e-9) -> list[Check]:
    ctx, d = RootContext(N), RootDetermination(N)
    rng = np.random.default_rng(seed)
    out = []
    for n in range(draws):
        reps = random_regular_reps(ctx, d, rng, 3)
        orth, bub = check_orthogonality(ctx, d, *reps, *_charges(rng, N, 2), tol=tol)
        out.append(Check.below(f"orthogonality[N={N},{n}]", orth.residual, tol))
        out.append(Check.below(f"bubble[N={N},{n}]", bub.residual, tol))
    return out


def symmetry_checks(N: int, draws: int, seed: int, tol: float = 1e-8) -> list[Check]:
    ctx, d = RootContext(N), RootDetermination(N)
    sm = build_symmetry_matrices(ctx)
    rng = np.random.default_rng(seed)
    out = []
    for n in range(draws):
        reps = random_regular_reps(ctx, d, rng, 3)
        for r in check_symmetry(ctx, d, *reps, *_charges(rng, N, 2), tol=tol, sm=sm):
            out.append(Check.below(f"{r.name}[N={N},{n}]", r.residual, tol, root_index=r.root_index))
    return out


def perturbed_zeta_controls(N: int, draws: int, seed: int, threshold: float = 0.1) -> list[Check]:
    """Multiply zeta by omega (exact residual) and by -1 (residual up to roots).

    Each control reports its smallest residual over the draws and passes when
    that exceeds ``threshold``.
    """
    ctx, d = RootContext(N), RootDetermination(N)
    sm = build_symmetry_matrices(ctx)
    controls = {"omega": perturbed(sm, ctx.omega), "minus": perturbed(sm, -1)}
    rng = np.random.default_rng(seed)
    worst = {"omega": math.inf, "minus": math.inf}
    used = 0
    for _ in range(draws):
        reps = random_regular_reps(ctx, d, rng, 3)
        a, c = _charges(rng, N, 2)
        X = six_x(ctx, d, *reps)
        L, R = symmetry_relations(ctx, X, a, c, sm)[1]
        if compare(ctx, L, R, up_to_root=False)[0] > 1e-8:
            continue  # this draw sits on a cut of h, so only roots are comparable
        used += 1
        L, R = symmetry_relations(ctx, X, a, c, controls["omega"])[1]
        worst["omega"] = min(worst["omega"], compare(ctx, L, R, up_to_root=False)[0])
        L, R = symmetry_relations(ctx, X, a, c, controls["minus"])[1]
        worst["minus"] = min(worst["minus"], compare(ctx, L, R)[0])
    return [Check.over(f"perturbed_zeta_{k}[N={N}]", v, threshold, draws_used=used)
            for k, v in worst.items()]


def duality_checks(N: int, draws: int, seed: int, tol: float = 1e-9) -> list[Check]:
    ctx, d = RootContext(N), RootDetermination(N)
    rng = np.random.default_rng(seed)
    out = []
    for n in range(draws):
        reps = random_regular_reps(ctx, d, rng, 3)
        r = check_duality(ctx, d, *reps, *_charges(rng, N, 2), tol=tol)
        out.append(Check.below(f"duality[N={N},{n}]", r.residual, tol))
        r = check_sixj_relation(ctx, d, *reps, tol=tol)
        out.append(Check.below(f"sixj_relation[N={N},{n}]", r.residual, tol,
                               root_index=r.root_index))
        r = check_inverse(ctx, d, *reps, tol=tol)
        out.append(Check.below(f"inverse[N={N},{n}]", r.residual, tol))
    return out


def st_algebra_checks(N: int) -> list[Check]:
    ctx = RootContext(N)
    sm = build_symmetry_matrices(ctx)
    S = sm.S_lower
    s4 = float(np.abs(np.linalg.matrix_power(S, 4) - np.eye(N)).max())
    zp, res = solve_zeta_prime(sm)
    return [Check.below(f"S4_identity[N={N}]", s4, 1e-12),
            Check.below(f"S2_vs_ST3[N={N}]", res, 1e-9, zeta_prime=[zp.real, zp.imag]),
            Check.below(f"zeta_prime_modulus[N={N}]", abs(abs(zp) - 1), 1e-9)]


def five_term_checks(points: int = 100, tol: float = 1e-8) -> list[Check]:
    side = int(round(math.sqrt(points)))
    grid = np.linspace(0.05, 0.45, side)
    out = []
    for x in grid:
        for y in grid:
            out.append(Check.below(f"five_term[{x:.3f},{y:.3f}]", five_term_residual(x, y), tol))
    return out


def identity_suite(N: int, draws: int, seed: int, tol: float = 1e-9) -> list[Check]:
    """Every algebraic relation at one N; symmetry uses its own 1e-8 threshold."""
    return (pentagon_checks(N, draws, seed, tol) + orthogonality_checks(N, draws, seed + 1, tol)
            + symmetry_checks(N, draws, seed + 2, max(tol, 1e-8))
            + perturbed_zeta_controls(N, draws, seed + 3)
            + duality_checks(N, draws, seed + 4, tol) + st_algebra_checks(N))


# ---------------------------------------------------------------- state sums on documents


def K_of(doc: QHIDocument, N: int, *, d: RootDetermination | None = None, **over) -> complex:
    ctx = RootContext(N)
    d = RootDetermination(N) if d is None else d
    args = dict(tri=doc.tri, H=doc.H, b=doc.branching, z=doc.cocycle, c=doc.charge)
    args.update(over)
    return evaluate_KN(ctx, d, args["tri"], args["H"], args["b"], args["z"], args["c"]).K


def oracle_checks(doc: QHIDocument, N: int, budget: float = 1e8, tol: float = 1e-10
                  ) -> list[Check]:
    """contract against naive enumeration, and against a second plan."""
    if N ** doc.tri.r2 > budget:
        return []
    ctx, d = RootContext(N), RootDetermination(N)
    net = assemble_network(ctx, to_cutopen(ctx, d, doc.tri, doc.H, doc.branching, doc.cocycle,
                                           doc.charge))
    a = contract(net)
    b = naive_sum(net, budget)
    c = contract(net, linear_plan(range(len(net.tensors))[::-1]))
    scale = max(abs(b), 1e-300)
    return [Check.below(f"contract_vs_naive[{doc.name},N={N}]", abs(a - b) / scale, tol,
                        contraction=[a.real, a.imag], states=N ** doc.tri.r2),
            Check.below(f"plan_independence[{doc.name},N={N}]", abs(a - c) / scale, 1e-9)]


def move_sites(doc: QHIDocument, kind: str, rng: np.random.Generator, limit: int = 2):
    """Up to ``limit`` (site, transited document) pairs with a successful transit."""
    out = []
    for site in candidate_sites(doc.tri, doc.H, kind):
        try:
            move = apply_move(doc.tri, doc.H, doc.branching, kind, site)
            z, c = transit_decoration(move, doc.cocycle, doc.charge, rng)
        except (NotApplicable, TransitFailure):
            continue
        new = QHIDocument(f"{doc.name}+{kind}", move.tri, tuple(move.H), move.branching, z, c,
                          doc.provenance + ((kind,) + tuple(site),), doc.metadata)
        out.append((tuple(site), new))
        if len(out) >= limit:
            break
    return out


def move_invariance_checks(doc: QHIDocument, kinds, Ns, seed: int, limit: int = 2,
                           tol: float = 1e-8, cutopen: bool = False, site=None) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for kind in kinds:
        if site is not None:
            pairs = [(tuple(site), _transited(doc, kind, site, rng))]
        else:
            pairs = move_sites(doc, kind, rng, limit)
        for s, new in pairs:
            for N in Ns:
                K0 = _K_mode(doc, N, cutopen)
                K1 = _K_mode(new, N, cutopen)
                out.append(Check.below(f"move[{doc.name},{kind},{list(s)},N={N}]", rel(K0, K1), tol,
                                       K_before=[K0.real, K0.imag], K_after=[K1.real, K1.imag]))
    return out


def _transited(doc, kind, site, rng):
    move = apply_move(doc.tri, doc.H, doc.branching, kind, site)
    z, c = transit_decoration(move, doc.cocycle, doc.charge, rng)
    return QHIDocument(f"{doc.name}+{kind}", move.tri, tuple(move.H), move.branching, z, c,
                       doc.provenance, doc.metadata)


def _K_mode(doc: QHIDocument, N: int, cutopen: bool) -> complex:
    if not cutopen:
        return K_of(doc, N)
    ctx, d = RootContext(N), RootDetermination(N)
    inp = to_cutopen(ctx, d, doc.tri, doc.H, doc.branching, doc.cocycle, doc.charge)
    return evaluate_KN_cutopen(ctx, inp.tets, inp.n_bonds, inp.weights, inp.r0).K


def local_move_checks(Ns, draws: int, seed: int, tol: float = 1e-8) -> list[Check]:
    """Non-abelian move checks on open balls (boundary tensors up to an N-th root)."""
    out = []
    for N in Ns:
        ctx, d = RootContext(N), RootDetermination(N)
        rng = np.random.default_rng(seed + N)
        for kind in MOVES:
            for n in range(draws):
                out.append(Check.below(f"local_move[{kind},N={N},{n}]",
                                       local_move_residual(ctx, d, kind, rng), tol))
    return out


def decoration_checks(doc: QHIDocument, N: int, seed: int, tol: float = 1e-8,
                      max_branchings: int = 3) -> list[Check]:
    """Branching, charge lattice, vertex gauge, root determination and x-scaling."""
    rng = np.random.default_rng(seed)
    tri, b = doc.tri, doc.branching
    K0 = K_of(doc, N)
    out = []

    def add(kind, K, **info):
        out.append(Check.below(f"{kind}[{doc.name},N={N}]", rel(K0, K), tol, **info))

    try:
        others = [bb for bb in all_branchings(tri, limit=max_branchings + 1) if bb != b]
    except BoundExceeded:
        others = []
    for bb in others[:max_branchings]:
        add("branching", K_of(doc, N, b=bb))
    for e in range(tri.r1):
        w = charge_lattice_vector(tri, b, e)
        add("charge_lattice", K_of(doc, N, c=doc.charge + lattice_delta(tri, b, w)), edge=e)
    for v in range(tri.r0):
        z = gauge_transform(tri, doc.cocycle, {v: random_gauge(rng)})
        if is_full(z):
            add("gauge", K_of(doc, N, z=z), vertex=v)
    for s in (1, 2):
        add("root_determination", K_of(doc, N, d=RootDetermination(N, seed=s)), seed=s)
    for lam in (0.7 + 0.2j, -1.3j):
        add("lambda_scaling", K_of(doc, N, z=doc.cocycle.scaled(lam)), lam=[lam.real, lam.imag])
    Km = K_of(doc, N, tri=mirror(tri), z=doc.cocycle.conjugate())
    out.append(Check.below(f"mirror_duality[{doc.name},N={N}]", rel(np.conj(K0), Km), tol))
    return out


def local_mirror_checks(Ns, seed: int, tol: float = 1e-8) -> list[Check]:
    out = []
    for N in Ns:
        ctx, d = RootContext(N), RootDetermination(N)
        rng = np.random.default_rng(seed + N)
        for name, build in (("tet", single_tetrahedron), ("bipyramid", bipyramid),
                            ("star", three_star)):
            out.append(Check.below(f"local_mirror[{name},N={N}]",
                                   local_mirror_residual(ctx, d, build(), rng), tol))
    return out


def cutopen_checks(doc: QHIDocument, N: int) -> list[Check]:
    """Coherent cut-open input against closed evaluation, bit for bit."""
    ctx, d = RootContext(N), RootDetermination(N)
    closed = evaluate_KN(ctx, d, doc.tri, doc.H, doc.branching, doc.cocycle, doc.charge)
    inp = to_cutopen(ctx, d, doc.tri, doc.H, doc.branching, doc.cocycle, doc.charge)
    cut = evaluate_KN_cutopen(ctx, inp.tets, inp.n_bonds, inp.weights, inp.r0)
    same = closed.K == cut.K and closed.pre_power == cut.pre_power
    return [Check(f"cutopen_exact[{doc.name},N={N}]", 0.0 if same else abs(closed.K - cut.K),
                  0.0, same)]


def charge_checks(doc: QHIDocument) -> list[Check]:
    """Solve afresh, audit edge sums with integer equality, solve again for reproducibility."""
    c1 = solve_charges(doc.tri, doc.H)
    c2 = solve_charges(doc.tri, doc.H)
    faces_ok = all(sum(v) == 1 for v in c1.values)
    sums_ok = edge_sums(doc.tri, c1) == charge_targets(doc.tri, doc.H)
    return [Check(f"charge_audit[{doc.name}]", 0.0 if faces_ok and sums_ok else 1.0, 0.0,
                  faces_ok and sums_ok),
            Check(f"charge_reproducible[{doc.name}]", 0.0 if c1 == c2 else 1.0, 0.0, c1 == c2)]


def evaluate_doc(doc: QHIDocument, N: int, *, plan: str = "greedy", mode: str = "closed") -> dict:
    ctx, d = RootContext(N), RootDetermination(N)
    inp = to_cutopen(ctx, d, doc.tri, doc.H, doc.branching, doc.cocycle, doc.charge)
    pl = None
    if plan == "given":
        pl = linear_plan(range(len(inp.tets)))
    elif plan == "greedy":
        pl = greedy_plan(assemble_network(ctx, inp))
    if mode == "cutopen":
        res = evaluate_KN_cutopen(ctx, inp.tets, inp.n_bonds, inp.weights, inp.r0, pl)
    else:
        res = evaluate_cutopen(ctx, inp, pl)
    return {"name": doc.name, "N": N, "mode": mode, "plan": plan, **res.to_dict()}


