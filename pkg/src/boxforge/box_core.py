"""Boxes, Bell functionals, and the local polytope of the 2-party,
2-input, 2-output (222) scenario.

Conventions used throughout the package:

* A box table is a float array of shape ``(2, 2, 2, 2)`` indexed
  ``table[x, y, a, b]`` = p(ab|xy), with x/a on the first party and y/b
  on the second.  Flat (file) order is row-major over (x, y, a, b), so
  the flat index is ``((x*2 + y)*2 + a)*2 + b``.
* Outcome bit a corresponds to observable eigenvalue (-1)**a, so the
  correlator is <X_x Y_y> = sum_ab (-1)**(a xor b) p(ab|xy).
* n-copy tables use integer-encoded bit strings per axis, copy 1 in the
  most significant bit; tensoring appends copies on the low side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

TOL_NORM = 1e-9
TOL_NS = 1e-9
TOL_ZERO = 1e-9
TOL_LP = 1e-8

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


class BoxError(ValueError):
    """Raised when a probability table violates box invariants."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Box types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box222:
    """A no-signaling conditional distribution p(ab|xy) for the 222 scenario."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2, 2, 2, 2):
            raise BoxError(f"expected table shape (2,2,2,2), got {t.shape}")
        object.__setattr__(self, "table", _readonly(t))
        _validate_table(self.table, n=1)

    @classmethod
    def from_flat(cls, values) -> "Box222":
        return cls(np.asarray(values, dtype=float).reshape(2, 2, 2, 2))

    def to_flat(self) -> np.ndarray:
        return self.table.reshape(-1)

    def as_ncopy(self) -> "NCopyBox":
        return NCopyBox(n=1, table=self.table)

    def __eq__(self, other):
        if not isinstance(other, Box222):
            return NotImplemented
        return np.array_equal(self.table, other.table)

    def allclose(self, other: "Box222", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.table - other.table)) <= tol)


@dataclass(frozen=True)
class NCopyBox:
    """Joint table for n copies; each axis indexed by an n-bit string."""

    n: int
    table: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise BoxError("copy count must be >= 1")
        d = 2 ** self.n
        t = np.asarray(self.table, dtype=float)
        if t.shape != (d, d, d, d):
            raise BoxError(f"expected table shape {(d,) * 4}, got {t.shape}")
        object.__setattr__(self, "table", _readonly(t))
        _validate_table(self.table, n=self.n)

    def as_box222(self) -> Box222:
        if self.n != 1:
            raise BoxError("only a 1-copy table converts to Box222")
        return Box222(self.table)


def _validate_table(t: np.ndarray, n: int) -> None:
    if np.any(t < -TOL_NORM) or np.any(t > 1 + TOL_NORM):
        raise BoxError("probabilities outside [0, 1]")
    norms = t.sum(axis=(2, 3))
    if np.max(np.abs(norms - 1.0)) > TOL_NORM:
        raise BoxError("normalization violated beyond tolerance")
    # marginal of party A must not depend on y, and vice versa
    marg_a = t.sum(axis=3)  # [x, y, a]
    if np.max(np.abs(marg_a - marg_a[:, :1, :])) > TOL_NS:
        raise BoxError("no-signaling violated: A's marginal depends on y")
    marg_b = t.sum(axis=2)  # [x, y, b]
    if np.max(np.abs(marg_b - marg_b[:1, :, :])) > TOL_NS:
        raise BoxError("no-signaling violated: B's marginal depends on x")


# ---------------------------------------------------------------------------
# Polytope vertices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexLabel:
    """Label of an extremal box: 'local' with bits (alpha, beta, gamma, eta)
    or 'nonlocal' with bits (alpha, beta, gamma)."""

    kind: str
    bits: tuple

    def __post_init__(self):
        if self.kind not in ("local", "nonlocal"):
            raise ValueError(f"unknown vertex kind {self.kind!r}")
        need = 4 if self.kind == "local" else 3
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != need or any(b not in (0, 1) for b in bits):
            raise ValueError(f"{self.kind} vertex needs {need} bits in {{0,1}}")
        object.__setattr__(self, "bits", bits)


def local_vertices() -> list:
    """The 16 deterministic labels, lexicographic in (alpha, beta, gamma, eta)."""
    return [VertexLabel("local", bits) for bits in itertools.product((0, 1), repeat=4)]


def nonlocal_vertices() -> list:
    """The 8 extremal nonlocal labels, lexicographic in (alpha, beta, gamma)."""
    return [VertexLabel("nonlocal", bits) for bits in itertools.product((0, 1), repeat=3)]


def make_vertex(label: VertexLabel) -> Box222:
    """Exact table of an extremal box.

    Local(alpha, beta, gamma, eta): a = alpha*x + beta, b = gamma*y + eta (mod 2).
    Nonlocal(alpha, beta, gamma): uniform over outputs with
    a + b = x*y + alpha*x + beta*y + gamma (mod 2).
    """
    t = np.zeros((2, 2, 2, 2))
    if label.kind == "local":
        al, be, ga, et = label.bits
        for x, y in itertools.product((0, 1), repeat=2):
            t[x, y, (al * x) ^ be, (ga * y) ^ et] = 1.0
    else:
        al, be, ga = label.bits
        for x, y, a, b in itertools.product((0, 1), repeat=4):
            if a ^ b == (x & y) ^ (al & x) ^ (be & y) ^ ga:
                t[x, y, a, b] = 0.5
    return Box222(t)


def pr_box() -> Box222:
    """The a+b = x*y vertex (nonlocal 0,0,0)."""
    return make_vertex(VertexLabel("nonlocal", (0, 0, 0)))


def uniform_box() -> Box222:
    return Box222(np.full((2, 2, 2, 2), 0.25))


def convex_mix(b1: Box222, b2: Box222, weight: float) -> Box222:
    """weight * b1 + (1 - weight) * b2."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError("mixing weight must be in [0, 1]")
    return Box222(weight * b1.table + (1.0 - weight) * b2.table)


# ---------------------------------------------------------------------------
# Bell functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BellFunctional:
    """Linear functional c_xy <X_x Y_y> + m_x <X_x> + m'_y <Y_y> + offset."""

    correlator: np.ndarray  # shape (2, 2), c_xy
    marginal_a: np.ndarray  # shape (2,), m_x
    marginal_b: np.ndarray  # shape (2,), m'_y
    offset: float = 0.0
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.correlator, dtype=float).reshape(2, 2)
        ma = np.asarray(self.marginal_a, dtype=float).reshape(2)
        mb = np.asarray(self.marginal_b, dtype=float).reshape(2)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(ma)) and np.all(np.isfinite(mb))):
            raise ValueError("functional coefficients must be finite")
        object.__setattr__(self, "correlator", _readonly(c))
        object.__setattr__(self, "marginal_a", _readonly(ma))
        object.__setattr__(self, "marginal_b", _readonly(mb))

    def weight_norm(self) -> float:
        """Euclidean norm of the 8 correlator+marginal coefficients."""
        return float(
            np.sqrt(
                np.sum(self.correlator**2)
                + np.sum(self.marginal_a**2)
                + np.sum(self.marginal_b**2)
            )
        )


def chsh() -> BellFunctional:
    """<X0Y0> + <X0Y1> + <X1Y0> - <X1Y1>."""
    return BellFunctional(
        correlator=np.array([[1.0, 1.0], [1.0, -1.0]]),
        marginal_a=np.zeros(2),
        marginal_b=np.zeros(2),
        name="chsh",
    )


def chsh_variant(alpha: int, beta: int, gamma: int) -> BellFunctional:
    """Sign symmetry of CHSH whose algebraic maximizer is the matching
    nonlocal vertex: coefficients (-1)**(xy + alpha*x + beta*y + gamma)."""
    c = np.empty((2, 2))
    for x, y in itertools.product((0, 1), repeat=2):
        c[x, y] = (-1.0) ** ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma)
    return BellFunctional(
        correlator=c,
        marginal_a=np.zeros(2),
        marginal_b=np.zeros(2),
        name=f"chsh[{alpha}{beta}{gamma}]",
    )


def chsh_variants() -> list:
    """All 8 sign symmetries, lexicographic in (alpha, beta, gamma)."""
    return [chsh_variant(*bits) for bits in itertools.product((0, 1), repeat=3)]


def tilted_chsh(alpha: float) -> BellFunctional:
    """CHSH plus alpha * <X0>."""
    base = chsh()
    return BellFunctional(
        correlator=base.correlator,
        marginal_a=np.array([float(alpha), 0.0]),
        marginal_b=np.zeros(2),
        name=f"tilted_chsh[{alpha:g}]",
    )


def correlators(box: Box222):
    """(C, mA, mB): full correlators C[x,y] = <X_x Y_y> and marginals
    mA[x] = <X_x>, mB[y] = <Y_y> (y/x-averaged; no-signaling makes the
    choice immaterial within tolerance)."""
    t = box.table
    sign_ab = np.array([[1.0, -1.0], [-1.0, 1.0]])  # (-1)**(a xor b)
    c = np.einsum("xyab,ab->xy", t, sign_ab)
    sign_a = np.array([1.0, -1.0])
    ma = np.einsum("xyab,a->xy", t, sign_a).mean(axis=1)
    mb = np.einsum("xyab,b->xy", t, sign_a).mean(axis=0)
    return c, ma, mb


def evaluate(f: BellFunctional, box: Box222) -> float:
    """Value of the functional on a box."""
    c, ma, mb = correlators(box)
    return float(
        np.sum(f.correlator * c)
        + np.sum(f.marginal_a * ma)
        + np.sum(f.marginal_b * mb)
        + f.offset
    )


# ---------------------------------------------------------------------------
# Hardy cells
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HardyStats:
    """The four cells of the Hardy argument: one success probability and
    three cells that must vanish for a Hardy point."""

    q: float
    z01: float
    z10: float
    z11: float

    def is_hardy_point(self, tol: float = TOL_ZERO) -> bool:
        return self.q > tol and max(self.z01, self.z10, self.z11) <= tol

    def max_zero_violation(self) -> float:
        return max(self.z01, self.z10, self.z11)


def hardy_stats(box: Box222) -> HardyStats:
    """Extract p(00|00), p(00|01), p(00|10), p(11|11)."""
    t = box.table
    return HardyStats(
        q=float(t[0, 0, 0, 0]),
        z01=float(t[0, 1, 0, 0]),
        z10=float(t[1, 0, 0, 0]),
        z11=float(t[1, 1, 1, 1]),
    )


# ---------------------------------------------------------------------------
# Tensor products and marginals
# ---------------------------------------------------------------------------


def _to_ncopy(b) -> NCopyBox:
    if isinstance(b, Box222):
        return b.as_ncopy()
    if isinstance(b, NCopyBox):
        return b
    raise TypeError(f"expected Box222 or NCopyBox, got {type(b).__name__}")


def tensor(b1, b2) -> NCopyBox:
    """Product box on n1 + n2 copies; earlier operand occupies the high bits."""
    n1, n2 = _to_ncopy(b1), _to_ncopy(b2)
    return NCopyBox(n=n1.n + n2.n, table=np.kron(n1.table, n2.table))


def marginal_copies(box: NCopyBox, keep: tuple) -> NCopyBox:
    """Marginal box on the listed copies (1-based), remaining inputs fixed to 0.

    No-signaling makes the fixed inputs immaterial up to tolerance.
    """
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep or keep[0] < 1 or keep[-1] > box.n:
        raise ValueError("copy indices out of range")
    bits = box.n
    shape = (2,) * (4 * bits)
    t = box.table.reshape(shape)
    # axes order: x bits, y bits, a bits, b bits (copy 1 first within a group)
    drop = [k - 1 for k in range(1, bits + 1) if k not in keep]
    # sum dropped output bits
    sum_axes = tuple(2 * bits + d for d in drop) + tuple(3 * bits + d for d in drop)
    t = t.sum(axis=sum_axes)
    # fix dropped input bits to 0 (account for axes shifting as we index)
    remaining_inputs = [d for d in drop] + [bits + d for d in drop]
    for ax in sorted(remaining_inputs, reverse=True):
        t = np.take(t, 0, axis=ax)
    m = len(keep)
    d = 2 ** m
    return NCopyBox(n=m, table=t.reshape(d, d, d, d))


# ---------------------------------------------------------------------------
# Local-polytope membership (self-contained phase-1 simplex)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalityVerdict:
    """Either convex weights over the 16 deterministic vertices, or a
    separating functional with its local bound and achieved value."""

    is_local: bool
    weights: np.ndarray | None = None
    functional: BellFunctional | None = None
    local_bound: float | None = None
    value: float | None = None

    def __post_init__(self):
        if self.is_local:
            if self.weights is None:
                raise ValueError("local verdict requires weights")
            object.__setattr__(self, "weights", _readonly(np.asarray(self.weights)))
        else:
            if self.functional is None or self.local_bound is None or self.value is None:
                raise ValueError("nonlocal verdict requires a certificate")


def _phase1_simplex(A: np.ndarray, b: np.ndarray, piv_tol: float = 1e-11,
                    max_pivots: int = 5000):
    """Feasibility of {A x = b, x >= 0} by minimizing artificial variables.

    Bland's rule, dense tableau; problem sizes here are ~17x16.  Returns
    (feasible, x, farkas): on infeasibility, farkas @ A <= tol and
    farkas @ b > 0.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    m, n = A.shape
    flip = b < 0
    A = np.where(flip[:, None], -A, A)
    b = np.where(flip, -b, b)

    tableau = np.zeros((m, n + m + 1))
    tableau[:, :n] = A
    tableau[:, n:n + m] = np.eye(m)
    tableau[:, -1] = b
    basis = list(range(n, n + m))

    cost = np.zeros(n + m)
    cost[n:] = 1.0
    reduced = np.zeros(n + m + 1)
    reduced[:-1] = cost
    for i in range(m):
        reduced -= tableau[i]  # basic costs are all 1 initially
    # reduced[-1] == -(current objective)

    for _ in range(max_pivots):
        enter = -1
        for j in range(n + m):
            if reduced[j] < -piv_tol:
                enter = j
                break
        if enter < 0:
            break
        col = tableau[:, enter]
        leave_row, best_ratio, best_var = -1, np.inf, None
        for i in range(m):
            if col[i] > piv_tol:
                ratio = tableau[i, -1] / col[i]
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12
                    and (best_var is None or basis[i] < best_var)
                ):
                    leave_row, best_ratio, best_var = i, ratio, basis[i]
        if leave_row < 0:
            break  # unbounded; cannot happen in phase 1
        piv = tableau[leave_row, enter]
        tableau[leave_row] /= piv
        for i in range(m):
            if i != leave_row and abs(tableau[i, enter]) > 0:
                tableau[i] -= tableau[i, enter] * tableau[leave_row]
        reduced -= reduced[enter] * tableau[leave_row]
        basis[leave_row] = enter

    objective = -reduced[-1]
    x = np.zeros(n)
    for i, var in enumerate(basis):
        if var < n:
            x[var] = tableau[i, -1]
    if objective <= 1e-9:
        return True, x, None
    # Farkas certificate from the simplex multipliers; B^-1 sits where the
    # artificial identity block started.
    y = np.zeros(m)
    for i, var in enumerate(basis):
        if var >= n:
            y += tableau[i, n:n + m]
    y = np.where(flip, -y, y)
    return False, x, y


_SIGN_A = np.array([1.0, -1.0])
_SIGN_AB = np.array([[1.0, -1.0], [-1.0, 1.0]])


def _cell_functional(coeffs: np.ndarray, name: str = "") -> BellFunctional:
    """Rewrite sum_xyab lam[x,y,a,b] p(ab|xy) in correlator-marginal form.

    Valid on no-signaling boxes, where p(ab|xy) =
    (1 + (-1)^a mA_x + (-1)^b mB_y + (-1)^(a+b) C_xy) / 4.
    """
    lam = coeffs.reshape(2, 2, 2, 2)
    offset = lam.sum() / 4.0
    c = np.einsum("xyab,ab->xy", lam, _SIGN_AB) / 4.0
    ma = np.einsum("xyab,a->x", lam, _SIGN_A) / 4.0
    mb = np.einsum("xyab,b->y", lam, _SIGN_A) / 4.0
    return BellFunctional(correlator=c, marginal_a=ma, marginal_b=mb,
                          offset=float(offset), name=name)


def local_membership(box: Box222) -> LocalityVerdict:
    """Decide membership in the local polytope.

    Feasibility of box = sum_v w_v vertex_v over the 16 deterministic
    vertices is solved by a phase-1 simplex.  On infeasibility the 8 CHSH
    sign variants are scanned for an interpretable certificate first; the
    simplex Farkas vector is the fallback.
    """
    vertex_tables = np.stack([make_vertex(v).to_flat() for v in local_vertices()])
    A = np.vstack([vertex_tables.T, np.ones((1, 16))])
    b = np.concatenate([box.to_flat(), [1.0]])
    feasible, weights, farkas = _phase1_simplex(A, b)
    if feasible:
        return LocalityVerdict(is_local=True, weights=np.maximum(weights, 0.0))

    best = None
    for f in chsh_variants():
        value = evaluate(f, box)
        if value > 2.0 + TOL_LP and (best is None or value > best[1]):
            best = (f, value)
    if best is not None:
        return LocalityVerdict(
            is_local=False, functional=best[0], local_bound=2.0, value=best[1]
        )

    # Fallback: convert the Farkas vector (cell space, plus a constant row)
    # into a correlator-form functional.
    f = _cell_functional(farkas[:16], name="lp_dual")
    bound = max(evaluate(f, make_vertex(v)) for v in local_vertices())
    return LocalityVerdict(
        is_local=False, functional=f, local_bound=bound, value=evaluate(f, box)
    )


# ---------------------------------------------------------------------------
# Hyperplane distances (Tsirelson / tilted-CHSH fractions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fractions:
    """Signed perpendicular distances, in the 8-dim correlator+marginal
    space, from the quantum boundary hyperplanes of CHSH and tilted CHSH.
    Smaller distance = larger fraction of the corresponding resource."""

    alpha: float
    tsirelson_distance: float
    tilted_distance: float
    chsh_value: float
    tilted_value: float
    tilted_bound_oracle: float
    tilted_bound_printed: float


def fractions(box: Box222, alpha: float, bound_oracle=None) -> Fractions:
    """Distances from the CHSH = 2*sqrt(2) hyperplane and from the tilted
    CHSH quantum-maximum hyperplane.

    The tilted quantum maximum comes from the numeric optimizer in
    :mod:`boxforge.quantum` (``bound_oracle`` may inject a custom callable);
    the widely quoted closed form 2*sqrt(alpha**2 + 1) disagrees with the
    alpha -> 0 limit and is reported alongside for reference.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if bound_oracle is None:
        from . import quantum  # deferred: quantum depends on this module

        bound_oracle = quantum.chsh_alpha_quantum_max
    f_chsh = chsh()
    f_tilted = tilted_chsh(alpha)
    chsh_value = evaluate(f_chsh, box)
    tilted_value = evaluate(f_tilted, box)
    b_alpha = float(bound_oracle(alpha))
    return Fractions(
        alpha=float(alpha),
        tsirelson_distance=(TSIRELSON_BOUND - chsh_value) / f_chsh.weight_norm(),
        tilted_distance=(b_alpha - tilted_value) / f_tilted.weight_norm(),
        chsh_value=chsh_value,
        tilted_value=tilted_value,
        tilted_bound_oracle=b_alpha,
        tilted_bound_printed=2.0 * math.sqrt(alpha**2 + 1.0),
    )
