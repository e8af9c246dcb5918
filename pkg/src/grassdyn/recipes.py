"""Bundled multi-step experiments with pinned seeds and thresholds.

Each recipe returns ``(verdicts, payload)``.  Verdicts are booleans; a recipe
passes when all of them hold.  Exploratory recipes report measurements and a
single ``completed`` verdict, never a claim about density.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict

import numpy as np

from .delta import check_L_identity, delta_leading_law, delta_poly
from .errors import InvarianceViolationError, InvalidInputError
from .grassmann import Subspace, complement, grassmann_distance, random_subspace, random_unit_vectors
from .jordan import JordanStructure, assemble, bounds, example_blocks, example_operator, quotient_operator
from .matrix_core import BlockSpec, jordan_block, jordan_block_power, matrix_power
from .orbits import (annulus_clearance, circular_distance, duality_check, esp2sup_membership,
                     kronecker_find, norm_ratio_invariant, orbit_point_density, projection_rank_lock)
from .reduction import ChiView, reduce, verify_reduction

SQRT2 = math.sqrt(2.0)


# -- generators shared by several recipes --------------------------------------

def random_blockspec(rng: np.random.Generator, max_rho: int = 8, max_dim: int = 64) -> BlockSpec:
    real = bool(rng.integers(2))
    cap = max(1, min(max_rho, max_dim // (2 if real else 1)))
    rho = int(rng.integers(1, cap + 1))
    mod = float(rng.uniform(0.3, 2.0)) * (1 if real or rng.integers(2) else -1)
    if real:
        return BlockSpec.real(mod, float(rng.uniform(0.1, math.pi - 0.1)), rho)
    return BlockSpec.classical(mod, rho)


def random_structure(rng: np.random.Generator, max_N: int = 12, max_rho: int = 4) -> JordanStructure:
    N = int(rng.integers(2, max_N + 1))
    blocks, used = [], 0
    while used < N:
        b = random_blockspec(rng, max_rho, N - used)
        if b.dim > N - used:
            b = BlockSpec.classical(b.modulus, N - used)
        blocks.append(b)
        used += b.dim
    return JordanStructure(tuple(blocks))


def conditioned_operator(rng: np.random.Generator, N: int, cond: float = 50.0) -> np.ndarray:
    """``U diag(s) V^T`` with singular values spread over ``[1, cond]``."""
    u = np.linalg.qr(rng.standard_normal((N, N)))[0]
    v = np.linalg.qr(rng.standard_normal((N, N)))[0]
    s = rng.uniform(1.0, cond, N)
    s[0], s[-1] = 1.0, cond
    return u @ np.diag(s) @ v.T


def esp2sup_member(rng: np.random.Generator, min_gap: float = 0.01) -> tuple:
    """Random ``span{(x, a y), (b x, y)}`` with ``|1 - ab| >= min_gap``."""
    while True:
        x, y = rng.standard_normal(2), rng.standard_normal(2)
        a, b = rng.standard_normal(2)
        if abs(1 - a * b) >= min_gap:
            return Subspace.span(np.r_[x, a * y], np.r_[b * x, y]), (x, y, a, b)


# -- recipes -------------------------------------------------------------------

def delta_leading_coefficients(n_max: int = 25, seed: int = 0):
    rows = []
    ok = True
    for n in range(1, n_max + 1):
        p = delta_poly(n)
        good = p.degree == n and p.leading == delta_leading_law(n)
        ok &= good
        rows.append({"n": n, "degree": p.degree, "leading": str(p.leading)})
    return {"degree_and_leading": ok}, {"rows": rows}


def telescoping_identity(cases: int = 500, seed: int = 2):
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(1, 11))
        i = int(rng.integers(n, 41))
        u = [Fraction(int(rng.integers(-100, 101)), int(rng.integers(1, 101))) for _ in range(n)]
        if not check_L_identity(u, i).holds:
            failures += 1
    return {"exact_identity": failures == 0}, {"cases": cases, "failures": failures, "seed": seed}


def block_power_closed_form(specs: int = 100, seed: int = 3, tol: float = 1e-9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(specs):
        b = random_blockspec(rng, max_rho=8)
        J = jordan_block(b)
        for n in (0, 1, 2, 7, 31, 64):
            ref = matrix_power(J, n)
            got = jordan_block_power(b, n)
            scale = max(float(np.max(np.abs(ref))), 1e-300)
            worst = max(worst, float(np.max(np.abs(got - ref))) / scale)
    return {"closed_form_matches": worst <= tol}, {"worst_relative_error": worst, "seed": seed}


def reduction_properties(pairs: int = 200, seed: int = 4):
    rng = np.random.default_rng(seed)
    failed = []
    worst_angle = 0.0
    for t in range(pairs):
        st = random_structure(rng)
        N = st.ambient_dim
        m = int(rng.integers(1, N))
        basis = rng.standard_normal((m, N))
        view = ChiView.of(st)
        chk = verify_reduction(reduce(view, basis), view, basis)
        worst_angle = max(worst_angle, chk.span_angle)
        if not chk.passed:
            failed.append({"case": t, "details": list(chk.details)})
    return {"reduction_properties": not failed}, {"pairs": pairs, "failures": failed,
                                                  "worst_span_angle": worst_angle, "seed": seed}


def rotation_witness_density(K: int = 100_000, eps: float = 0.05, targets: int = 100, seed: int = 42,
                             threads=None):
    rng = np.random.default_rng(seed)
    T = example_operator([1.0, SQRT2])
    even = orbit_point_density(T, Subspace.coordinate(4, [0, 2]), random_unit_vectors(rng, 4, targets),
                               K, eps, seed=seed, threads=threads)
    T3 = example_operator([1.0], odd=True)
    odd = orbit_point_density(T3, Subspace.coordinate(3, [0, 2]), random_unit_vectors(rng, 3, targets),
                              K, eps, seed=seed, threads=threads)
    verdicts = {"even_all_hit": even.all_hit, "odd_all_hit": odd.all_hit}
    payload = {"even": {"hits": even.hits, "worst": float(even.min_distances.max())},
               "odd": {"hits": odd.hits, "worst": float(odd.min_distances.max())},
               "K": K, "eps": eps, "seed": seed, "empirical": True}
    return verdicts, payload


def norm_ratio_floor(K: int = 100_000, floor: float = 1.40):
    T = example_operator([1.0, SQRT2])
    x = np.array([1.0, 0.0, 1.0, 0.0]) / SQRT2
    target = np.array([2.0, 0.0, 0.0, 0.0])
    scan = orbit_point_density(T, Subspace.span(x), [target], K, eps=floor)
    inv = norm_ratio_invariant(T, x, min(K, 10_000), target=target)
    d = scan.per_target[0][0]
    verdicts = {"scan_above_floor": d >= floor, "invariant_holds": inv.holds,
                "certified_floor_above_pin": inv.distance_floor is not None and inv.distance_floor >= floor}
    return verdicts, {"min_distance": d, "certified_floor": inv.distance_floor, "pinned": floor, "K": K}


def strong_failure_lock(K: int = 10_000):
    T = example_operator([1.0, SQRT2])
    rep = projection_rank_lock(T, Subspace.coordinate(4, [0, 2]), K)
    return {"lock_holds": rep.holds}, rep.to_dict()


def membership_family(cases: int = 1000, seed: int = 8):
    rng = np.random.default_rng(seed)
    pos = sum(bool(esp2sup_membership(esp2sup_member(rng)[0])) for _ in range(cases))
    neg_pass, drawn = 0, 0
    while drawn < cases:
        S = random_subspace(rng, 4, 2)
        F = S.frame
        if min(np.linalg.svd(F[:2], compute_uv=False)[-1], np.linalg.svd(F[2:], compute_uv=False)[-1]) < 1e-6:
            continue
        drawn += 1
        neg_pass += bool(esp2sup_membership(S))
    return ({"family_members_accepted": pos == cases, "generic_planes_rejected": neg_pass == 0},
            {"members_accepted": pos, "generic_accepted": neg_pass, "cases": cases, "seed": seed})


def duality_random(operators: int = 50, i_max: int = 200, pairs: int = 500, seed: int = 9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(operators):
        N = int(rng.integers(2, 11))
        T = conditioned_operator(rng, N)
        M = random_subspace(rng, N, int(rng.integers(1, N)))
        worst = max(worst, duality_check(T, M, i_max))
    worst_gap = 0.0
    for _ in range(pairs):
        N = int(rng.integers(2, 11))
        n = int(rng.integers(1, N))
        A, B = random_subspace(rng, N, n), random_subspace(rng, N, n)
        gap = abs(grassmann_distance(A, B).max_angle - grassmann_distance(complement(A), complement(B)).max_angle)
        worst_gap = max(worst_gap, gap)
    return ({"duality_residual": worst < 1e-8, "complement_isometry": worst_gap < 1e-9},
            {"worst_residual": worst, "worst_angle_gap": worst_gap, "seed": seed})


def bound_table(seed: int = 10):
    rng = np.random.default_rng(seed)
    ok_u = ok_s = True
    rows = []
    for N in range(2, 13):
        for _ in range(5):
            blocks, used = [], 0
            while used < N:
                b = random_blockspec(rng, max_rho=4, max_dim=N - used)
                if b.dim > N - used:
                    b = BlockSpec.classical(b.modulus, N - used)
                blocks.append(b)
                used += b.dim
            rep = bounds(JordanStructure(tuple(blocks)))
            ok_u &= rep.lower_bound_universal == (N + 1) // 2
            ok_s &= rep.lower_bound_specific == sum(b.rho for b in blocks)
        rows.append({"N": N, "universal": (N + 1) // 2})
    ok_e = True
    for k in range(1, 7):
        angles = list(rng.uniform(0.1, 3.0, k))
        ok_e &= bounds(JordanStructure(tuple(example_blocks(angles)))).lower_bound_specific == k
        ok_e &= bounds(JordanStructure(tuple(example_blocks(angles, odd=True)))).lower_bound_specific == k + 1
    return {"universal": ok_u, "specific": ok_s, "example_operators": ok_e}, {"rows": rows}


def kronecker_witness(K: int = 10_000_000, eps: float = 0.01):
    angles, phases = [1.0, SQRT2], [2.0, 1.0]
    k = kronecker_find(angles, phases, eps, K)
    if k is None:
        return {"found": False, "reverified": False}, {"k": None}
    d = [float(circular_distance(k * t, p)) for t, p in zip(angles, phases)]
    return {"found": True, "reverified": all(v < eps for v in d)}, {"k": k, "distances": d}


def quotient_leading_block():
    blocks = [BlockSpec.classical(1.5, 2), BlockSpec.real(0.8, 1.0, 1), BlockSpec.classical(-0.5)]
    T = assemble(blocks)
    N = T.shape[0]
    Q = quotient_operator(T, Subspace.coordinate(N, [0]))
    exact = bool(np.array_equal(Q, T[1:, 1:]))
    try:
        quotient_operator(T, Subspace.coordinate(N, [1]))
        rejected, resid = False, 0.0
    except InvarianceViolationError as exc:
        rejected, resid = exc.residual > 1e-6, exc.residual
    return {"quotient_exact": exact, "non_invariant_rejected": rejected}, {"rejection_residual": resid}


def real_block_2_scan(K: int = 20_000, targets: int = 50, subspaces: int = 5, seed: int = 22):
    """Size-2 real Jordan block on R^4: empirical scan plus the annulus geometry.

    The orbit scan only reports distances.  The geometric verdict checks on
    random instances that the line family keeps clear of the annulus.
    """
    rng = np.random.default_rng(seed)
    T = jordan_block(BlockSpec.real(1.0, 1.0, 2))
    tg = random_unit_vectors(rng, 4, targets)
    worst = []
    for _ in range(subspaces):
        rep = orbit_point_density(T, random_subspace(rng, 4, 2), tg, K, 0.05, seed=seed)
        worst.append(float(rep.min_distances.max()))
    clear = True
    for _ in range(200):
        x12, x34 = rng.standard_normal(2), rng.standard_normal(2)
        r = float(rng.uniform(1.1, 3.0))
        e = float(rng.uniform(0.01, 0.9))
        c, a, outer = annulus_clearance(x12, x34, r, e)
        s = np.linspace(-50, 50, 2001)[:, None]
        cc = np.linspace(r - e, r + e, 21)[None, :]
        pts = s[..., None] * x34 + cc[..., None] * x12
        clear &= float(np.min(np.linalg.norm(pts, axis=-1))) > outer
    return {"annulus_clear": clear}, {"worst_target_distance_per_subspace": worst, "K": K,
                                      "seed": seed, "empirical": True}


def jordan_block_open_question(N_values=(2, 3), K: int = 5_000, targets: int = 30, seed: int = 23):
    """Density scans for a real Jordan block ``J_N`` on R^{2N} with ``n = 2N - 2``. Exploratory."""
    rng = np.random.default_rng(seed)
    rows = []
    for N in N_values:
        T = jordan_block(BlockSpec.real(1.0, 1.0, N))
        n = 2 * N - 2
        M = random_subspace(rng, 2 * N, n)
        rep = orbit_point_density(T, M, random_unit_vectors(rng, 2 * N, targets), K, 0.05, seed=seed)
        rows.append({"N": N, "n": n, "hits": rep.hits, "targets": targets,
                     "worst": float(rep.min_distances.max())})
    return {"completed": True}, {"rows": rows, "K": K, "seed": seed, "empirical": True,
                                 "claim": "none"}


RECIPES: Dict[str, Callable] = {
    "delta-leading-coefficients": delta_leading_coefficients,
    "telescoping-identity": telescoping_identity,
    "block-power-closed-form": block_power_closed_form,
    "reduction-properties": reduction_properties,
    "example-2-1-density": rotation_witness_density,
    "norm-ratio-floor": norm_ratio_floor,
    "strong-failure-lock": strong_failure_lock,
    "membership-family": membership_family,
    "duality-random": duality_random,
    "bound-table": bound_table,
    "kronecker-witness": kronecker_witness,
    "quotient-leading-block": quotient_leading_block,
    "real-block-2-scan": real_block_2_scan,
    "jordan-block-open-question": jordan_block_open_question,
}


def run_recipe(name: str, **kwargs):
    try:
        fn = RECIPES[name]
    except KeyError:
        raise InvalidInputError(f"unknown recipe {name!r}; known: {', '.join(sorted(RECIPES))}") from None
    return fn(**kwargs)
