"""Numeric verifiers for the toolkit's claim catalog.

Each verifier reruns one claim at desk scale and returns a
VerificationReport.  The no-go claims (prop1, prop2, theorem1, theorem2)
are theorems; the verifiers produce one-sided numeric evidence (failure to
find a counterexample at the tested sizes), and their evidence says so.
A verdict is never "refuted" from numeric noise alone: refutation requires
a violation exceeding ten times the claim's tolerance.

Claim catalog:

* prop1    -- no Hardy-type point (one positive cell, three zero cells) is
              reachable by two dichotomic projective measurements on n
              maximally entangled qubit pairs (tested n = 1..n_max).
* prop2    -- correlations of the Hardy-optimal partially entangled pair
              cannot reproduce the maximally-entangled-pair box from any
              number of copies: the reduced-spectrum matching condition
              fails for every tested n.
* theorem1 -- conjunction of prop1 and prop2 (two-way incomparability of
              the Tsirelson and Hardy boxes).
* theorem2 -- the same incomparability for every partially entangled
              tilted-CHSH box on a theta grid, both directions, via the
              spectrum obstruction.
* lemma1   -- the ricochet identity (X (x) Y)|phi~+> = (I (x) Y X^T)|phi~+>
              over random operator pairs.
* appendix_a -- the single-copy protocol census: 64 nonlocality-preserving
              relabelings, exactly 8 fixing each nonlocal vertex, and the
              64 permute the nonlocal vertices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import box_core as bc
from . import quantum as qm
from . import wiring as wr

CLAIM_IDS = ("prop1", "prop2", "theorem1", "theorem2", "lemma1", "appendix_a")

_TITLES = {
    "prop1": "Hardy point unreachable from maximally entangled pairs",
    "prop2": "Tsirelson box unreachable from Hardy-optimal pairs",
    "theorem1": "Tsirelson and Hardy boxes are two-way unreachable",
    "theorem2": "Maximally vs partially entangled boxes are two-way unreachable",
    "lemma1": "Ricochet identity on maximally entangled vectors",
    "appendix_a": "Single-copy protocol census (64 total, 8 per vertex)",
}


@dataclass(frozen=True)
class VerificationReport:
    claim_id: str
    parameters: dict
    verdict: str  # supported | inconclusive | refuted
    evidence: dict
    title: str = ""

    def __post_init__(self):
        if self.claim_id not in CLAIM_IDS:
            raise ValueError(f"unknown claim id {self.claim_id!r}")
        if self.verdict not in ("supported", "inconclusive", "refuted"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if not self.title:
            object.__setattr__(self, "title", _TITLES[self.claim_id])

    def to_json_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "title": self.title,
            "parameters": _plain(self.parameters),
            "verdict": self.verdict,
            "evidence": _plain(self.evidence),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            claim_id=data["claim_id"],
            parameters=data["parameters"],
            verdict=data["verdict"],
            evidence=data["evidence"],
            title=data.get("title", ""),
        )


def _plain(value):
    """Recursively convert numpy scalars/arrays for JSON serialization."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return str(value)


def _graded_verdict(violation: float, tol: float, well_sampled: bool = True) -> str:
    """supported within tol; refuted only beyond 10x tol; inconclusive
    in between or when under-sampled."""
    if violation <= tol:
        return "supported" if well_sampled else "inconclusive"
    if violation <= 10.0 * tol:
        return "inconclusive"
    return "refuted"


# ---------------------------------------------------------------------------
# prop1: Hardy point unreachable from maximally entangled pairs
# ---------------------------------------------------------------------------


def _support_chain_residuals(realization: qm.QuantumRealization) -> dict:
    """Numeric replay of the support-inclusion chain on the best projectors.

    If the three zero cells vanish on a maximally entangled pair, the
    transposed first-measurement projector must sit inside a chain of
    supports that ends orthogonal to the success cell, forcing it to zero.
    Residuals are spectral norms of the excluded components (rank counted
    at the 1e-8 eigenvalue cutoff).
    """
    x0 = realization.a_measurements[0].projectors[0]
    x1 = realization.a_measurements[1].projectors[0]
    y0 = realization.b_measurements[0].projectors[0]
    y1 = realization.b_measurements[1].projectors[0]
    d = x0.shape[0]
    eye = np.eye(d)
    x0t = x0.T
    x1t = x1.T

    def rank(p):
        return int(np.sum(np.linalg.eigvalsh(p) > 1e-8))

    def norm(m):
        return float(np.linalg.norm(m, ord=2))

    # h2: Supp(X0bar^0) inside Supp(Y1^1); h3: Supp(X1bar^0) inside Supp(Y0^1)
    # h4: Supp(Y1^1) inside Supp(X1bar^0); chain: Supp(X0bar^0) inside Supp(Y0^1)
    r_h2 = norm(y1 @ x0t)
    r_h3 = norm(y0 @ x1t)
    r_h4 = norm((eye - x1t) @ (eye - y1))
    r_chain = norm(y0 @ x0t)
    q_from_trace = float(np.trace(y0 @ x0t).real) / d
    return {
        "ranks": {"x0": rank(x0), "x1": rank(x1), "y0": rank(y0), "y1": rank(y1)},
        "residual_h2": r_h2,
        "residual_h3": r_h3,
        "residual_h4": r_h4,
        "residual_chain": r_chain,
        "q_from_trace": q_from_trace,
        "chain_consistent": bool(
            max(r_h2, r_h3, r_h4) <= 1e-3 and r_chain <= 1e-2
        ),
    }


def verify_prop1(n_max: int = 2, restarts: int = 200, seed: int = 0) -> VerificationReport:
    """Seesaw search for Hardy points on n maximally entangled qubit pairs.

    Supported iff the best feasible success cell stays below 1e-6 for every
    n <= n_max; a positive control on the Hardy-optimal pair confirms the
    instrument finds Hardy points where they exist.  Evidence is one-sided
    (absence of a counterexample at the tested sizes).
    """
    if n_max > 5:
        raise ValueError("n_max above 5 is outside the desk-scale envelope")
    tol = 1e-6
    per_n = {}
    chains = {}
    worst = 0.0
    for n in range(1, n_max + 1):
        best_q, realization = qm.seesaw_hardy(
            qm.phi_plus(2**n), restarts=restarts, seed=seed + n
        )
        per_n[n] = best_q
        chains[n] = _support_chain_residuals(realization)
        worst = max(worst, best_q)

    control_state = qm.hardy_optimum().realization.state
    control_q, _ = qm.seesaw_hardy(control_state, restarts=max(40, restarts // 5),
                                   seed=seed + 1009)

    well_sampled = restarts >= 100
    verdict = _graded_verdict(worst, tol, well_sampled)
    control_ok = abs(control_q - qm.HARDY_MAX) <= 2e-3
    if not control_ok and verdict == "supported":
        verdict = "inconclusive"  # instrument failed its positive control
    return VerificationReport(
        claim_id="prop1",
        parameters={"n_max": n_max, "restarts": restarts, "seed": seed},
        verdict=verdict,
        evidence={
            "tolerance": tol,
            "best_q_per_n": {str(n): q for n, q in per_n.items()},
            "support_chain": {str(n): c for n, c in chains.items()},
            "control_q": control_q,
            "control_expected_positive": True,
            "control_target": qm.HARDY_MAX,
            "control_ok": control_ok,
            "one_sided": "absence of counterexample at tested n; weaker Hardy "
                         "points are covered implicitly since the search "
                         "maximizes the success cell",
        },
    )


# ---------------------------------------------------------------------------
# prop2 / theorem2: spectrum obstructions
# ---------------------------------------------------------------------------


def verify_prop2(n_max: int = 20) -> VerificationReport:
    """Reduced-spectrum obstruction from the Hardy-optimal pair.

    The computed Hardy-optimal state has unequal Schmidt weights, so the
    product of n copies can never match the evenly degenerate spectrum that
    a maximally entangled qubit pair forces; checked by brute-force
    exponent enumeration for every n <= n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    opt = qm.hardy_optimum()
    s = qm.schmidt(opt.realization.state).largest_square
    obstructed = {n: qm.spectrum_obstruction(s, n) for n in range(1, n_max + 1)}
    boundary = {n: qm.spectrum_obstruction(0.5, n) for n in range(1, n_max + 1)}
    all_ok = all(obstructed.values())
    return VerificationReport(
        claim_id="prop2",
        parameters={"n_max": n_max},
        verdict="supported" if all_ok else "refuted",
        evidence={
            "schmidt_weight": s,
            "hardy_q": opt.q,
            "family_parameter": opt.family_parameter,
            "obstructed_per_n": {str(n): bool(v) for n, v in obstructed.items()},
            "boundary_control_s_half": {
                str(n): bool(v) for n, v in boundary.items()
            },
            "one_sided": "spectral necessary condition checked at tested n",
        },
    )


def verify_theorem1(n_max: int = 2, restarts: int = 200, seed: int = 0,
                    spectrum_n_max: int = 20) -> VerificationReport:
    """Both unreachability directions for the Tsirelson/Hardy pair."""
    r1 = verify_prop1(n_max=n_max, restarts=restarts, seed=seed)
    r2 = verify_prop2(n_max=spectrum_n_max)
    order = {"refuted": 0, "inconclusive": 1, "supported": 2}
    verdict = min((r1.verdict, r2.verdict), key=order.get)
    return VerificationReport(
        claim_id="theorem1",
        parameters={"n_max": n_max, "restarts": restarts, "seed": seed,
                    "spectrum_n_max": spectrum_n_max},
        verdict=verdict,
        evidence={"prop1": r1.to_json_dict(), "prop2": r2.to_json_dict()},
    )


def verify_theorem2(theta_grid, n_max: int = 20) -> VerificationReport:
    """Spectrum obstruction in both directions for every theta in the grid.

    Direction 1: n maximally entangled pairs have a flat reduced spectrum,
    while any target containing a cos(theta)^2 factor cannot be flat unless
    theta = pi/4.  Direction 2: products of the partially entangled state
    can never be evenly degenerate.  Each theta's realization is also built
    to confirm it is a genuine quantum box, and its tilt is recorded.
    """
    thetas = [float(t) for t in theta_grid]
    if any(not 0.0 < t < math.pi / 4 for t in thetas):
        raise ValueError("theta grid must lie strictly inside (0, pi/4)")
    per_theta = []
    all_ok = True
    for theta in thetas:
        s = math.cos(theta) ** 2
        dir2 = all(qm.spectrum_obstruction(s, n) for n in range(1, n_max + 1))
        dir1 = abs(s - 0.5) > 1e-12  # flat target would force equal weights
        realization, alpha = qm.tilted_realization(theta)
        box = qm.realize_box(realization)
        tilted_value = bc.evaluate(bc.tilted_chsh(alpha), box)
        ok = dir1 and dir2
        all_ok = all_ok and ok
        per_theta.append(
            {
                "theta": theta,
                "alpha": alpha,
                "schmidt_weight": s,
                "direction_to_partial": bool(dir1),
                "direction_to_maxent": bool(dir2),
                "tilted_value": tilted_value,
                "box_valid": True,
            }
        )
    return VerificationReport(
        claim_id="theorem2",
        parameters={"theta_count": len(thetas), "n_max": n_max},
        verdict="supported" if all_ok else "refuted",
        evidence={
            "per_theta": per_theta,
            "one_sided": "spectral necessary condition checked at tested n",
        },
    )


# ---------------------------------------------------------------------------
# lemma1: ricochet identity
# ---------------------------------------------------------------------------


def verify_lemma1(trials: int = 100, d_list=(2, 4, 8), seed: int = 0) -> VerificationReport:
    """Random-matrix property test of the ricochet identity, with a
    deliberately transposed negative control."""
    tol = 1e-12
    rng = np.random.default_rng(seed)
    worst = 0.0
    per_d = {}
    for d in d_list:
        local_worst = 0.0
        for _ in range(trials):
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            local_worst = max(local_worst, qm.ricochet_check(x, y))
        per_d[d] = local_worst
        worst = max(worst, local_worst)

    # negative control: moving the transpose to the wrong factor must break
    d = int(d_list[0])
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    phi = np.eye(d, dtype=complex).reshape(-1)
    wrong = np.max(
        np.abs(np.kron(x, y) @ phi - np.kron(np.eye(d, dtype=complex), x.T @ y) @ phi)
    )
    return VerificationReport(
        claim_id="lemma1",
        parameters={"trials": trials, "d_list": list(d_list), "seed": seed},
        verdict=_graded_verdict(worst, tol),
        evidence={
            "tolerance": tol,
            "max_deviation": worst,
            "max_deviation_per_d": {str(d): v for d, v in per_d.items()},
            "negative_control_deviation": float(wrong),
            "negative_control_broken": bool(wrong > 1e-6),
        },
    )


# ---------------------------------------------------------------------------
# appendix_a: single-copy protocol census
# ---------------------------------------------------------------------------


def verify_appendix_a() -> VerificationReport:
    """Counts and closure of the single-copy protocol set: 64 protocols,
    exactly 8 fixing each nonlocal vertex, and every protocol permutes the
    nonlocal vertices."""
    protocols = wr.enumerate_single_copy()
    vertices = [bc.make_vertex(v) for v in bc.nonlocal_vertices()]
    labels = [v.bits for v in bc.nonlocal_vertices()]

    fix_counts = {}
    permutation_ok = True
    for label, vertex in zip(labels, vertices):
        fixers = sum(1 for w in protocols if wr.fixes_box(w, vertex))
        fix_counts["".join(map(str, label))] = fixers
    for w in protocols:
        for vertex in vertices:
            child = wr.apply_single_copy(w, vertex)
            if not any(child.allclose(u, 1e-12) for u in vertices):
                permutation_ok = False

    counts_ok = len(protocols) == 64 and all(c == 8 for c in fix_counts.values())
    return VerificationReport(
        claim_id="appendix_a",
        parameters={},
        verdict="supported" if counts_ok and permutation_ok else "refuted",
        evidence={
            "protocol_count": len(protocols),
            "fixers_per_vertex": fix_counts,
            "nonlocal_vertices_permuted": permutation_ok,
        },
    )


# ---------------------------------------------------------------------------
# Aggregate runner
# ---------------------------------------------------------------------------


def run_all(seed: int = 0, restarts: int = 200, n_max: int = 2,
            theta_count: int = 50, spectrum_n_max: int = 20) -> dict:
    """Run every verifier; returns {claim_id: report}."""
    thetas = np.linspace(0.02, math.pi / 4 - 0.01, theta_count)
    reports = {}
    reports["lemma1"] = verify_lemma1(seed=seed)
    reports["appendix_a"] = verify_appendix_a()
    reports["prop1"] = verify_prop1(n_max=n_max, restarts=restarts, seed=seed)
    reports["prop2"] = verify_prop2(n_max=spectrum_n_max)
    reports["theorem2"] = verify_theorem2(thetas, n_max=spectrum_n_max)
    order = {"refuted": 0, "inconclusive": 1, "supported": 2}
    verdict = min(
        (reports["prop1"].verdict, reports["prop2"].verdict), key=order.get
    )
    reports["theorem1"] = VerificationReport(
        claim_id="theorem1",
        parameters={"n_max": n_max, "restarts": restarts, "seed": seed,
                    "spectrum_n_max": spectrum_n_max},
        verdict=verdict,
        evidence={
            "prop1": reports["prop1"].to_json_dict(),
            "prop2": reports["prop2"].to_json_dict(),
        },
    )
    return reports


def exit_code(reports: dict) -> int:
    """0 iff every verdict is supported."""
    return 0 if all(r.verdict == "supported" for r in reports.values()) else 1
