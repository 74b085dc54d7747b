"""Deterministic local pre/post-processing protocols ("wirings") on one
and two copies of a 222 box, their enumeration, canonicalization, and
application.

Single-copy protocols relabel the input (z or its negation) and postprocess
the output with one of the four nonlocality-preserving maps

    f1(c, z) = c        f2(c, z) = not c
    f3(c, z) = c xor z  f4(c, z) = not (c xor z)

giving 2*2 input choices x 4*4 output maps = 64 protocols.

A two-copy wiring for one party is an adaptive strategy per child input x:
which copy to query first, its input, the second copy's input as a function
of the first result, and the final output as a function of both results.
Raw per-party count: (2*2*4*16)**2 = 65536.  Wirings are stored as truth
tables so equality and canonicalization are decidable; enumeration order is
lexicographic on the table bits.

Canonical equivalence is extensional: two party-wirings are identified iff,
for every hypothesized pair of copy outputs, they query the copies at the
same inputs and emit the same final output (the "schedule table"), which
makes their children identical on every admissible parent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .box_core import (
    Box222,
    LocalityVerdict,
    NCopyBox,
    local_membership,
)


class WiringError(ValueError):
    """Raised for malformed wirings or inadmissible parents."""


# ---------------------------------------------------------------------------
# Single-copy wirings
# ---------------------------------------------------------------------------

# OUTPUT_MAPS[k, z, c] = value of f^(k+1)(c, z)
OUTPUT_MAPS = np.array(
    [
        [[0, 1], [0, 1]],  # f1: c
        [[1, 0], [1, 0]],  # f2: not c
        [[0, 1], [1, 0]],  # f3: c xor z
        [[1, 0], [0, 1]],  # f4: not (c xor z)
    ],
    dtype=np.int8,
)

OUTPUT_MAP_NAMES = ("f1", "f2", "f3", "f4")


@dataclass(frozen=True)
class SingleCopyWiring:
    """Input relabels (0: z -> z, 1: z -> not z) and output map codes
    (0..3 for f1..f4) for each party."""

    input_a: int
    input_b: int
    output_a: int
    output_b: int

    def __post_init__(self):
        if self.input_a not in (0, 1) or self.input_b not in (0, 1):
            raise WiringError("input relabel must be 0 or 1")
        if not (0 <= self.output_a < 4 and 0 <= self.output_b < 4):
            raise WiringError("output map code must be in 0..3")

    @property
    def index(self) -> int:
        return ((self.input_a * 2 + self.input_b) * 4 + self.output_a) * 4 + self.output_b

    def describe(self) -> str:
        ia = "x'=x" if self.input_a == 0 else "x'=!x"
        ib = "y'=y" if self.input_b == 0 else "y'=!y"
        return (
            f"{ia}, {ib}, a={OUTPUT_MAP_NAMES[self.output_a]}, "
            f"b={OUTPUT_MAP_NAMES[self.output_b]}"
        )


def enumerate_single_copy() -> list:
    """All 64 nonlocality-preserving single-copy protocols.

    Ordering: index = ((input_a*2 + input_b)*4 + output_a)*4 + output_b,
    so the identity protocol is element 0.
    """
    out = []
    for ia, ib, fa, fb in itertools.product((0, 1), (0, 1), range(4), range(4)):
        out.append(SingleCopyWiring(ia, ib, fa, fb))
    return out


def _apply_output_tables(box: Box222, input_a: int, input_b: int,
                         table_a: np.ndarray, table_b: np.ndarray) -> Box222:
    """Child of `box` under arbitrary per-party output truth tables
    table[z, c_parent] -> c_child (inputs relabeled first)."""
    t = box.table
    child = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product((0, 1), repeat=2):
        xp = x ^ input_a
        yp = y ^ input_b
        for ap, bp in itertools.product((0, 1), repeat=2):
            child[x, y, table_a[x, ap], table_b[y, bp]] += t[xp, yp, ap, bp]
    return Box222(child)


def apply_single_copy(w: SingleCopyWiring, box: Box222) -> Box222:
    """Child box: relabel inputs, then map outputs with f^(code)."""
    return _apply_output_tables(
        box, w.input_a, w.input_b, OUTPUT_MAPS[w.output_a], OUTPUT_MAPS[w.output_b]
    )


# Truth table of c = z AND (not c'): constant on z = 0.  Collapsing an
# output branch to a constant admits a joint distribution for both inputs
# of that party, so the child of any nonlocal vertex becomes local.
FORBIDDEN_OUTPUT_MAP = np.array([[0, 0], [1, 0]], dtype=np.int8)

# Truth table of c = z xor c' (same as f3): a nonlocality-preserving map.
ALLOWED_OUTPUT_MAP = OUTPUT_MAPS[2]

IDENTITY_OUTPUT_MAP = OUTPUT_MAPS[0]


def demonstrate_forbidden_map(box: Box222) -> LocalityVerdict:
    """Apply the output map c = z AND (not c') on party A (identity
    elsewhere) and classify the child; for every nonlocal vertex the
    verdict comes back local."""
    child = _apply_output_tables(box, 0, 0, FORBIDDEN_OUTPUT_MAP, IDENTITY_OUTPUT_MAP)
    return local_membership(child)


def fixes_box(w: SingleCopyWiring, box: Box222, tol: float = 1e-12) -> bool:
    return apply_single_copy(w, box).allclose(box, tol)


def compose_single_copy(second: SingleCopyWiring, first: SingleCopyWiring) -> SingleCopyWiring:
    """The single protocol equivalent to applying `first` then `second`.

    The four output maps are the affine maps c xor (eps*z xor delta); they
    are closed under this composition.
    """

    def compose_party(in2, out2, in1, out1):
        eps1, delta1 = (out1 in (2, 3)), (out1 in (1, 3))
        eps2, delta2 = (out2 in (2, 3)), (out2 in (1, 3))
        # first acts at relabeled input z2 = z xor in2
        eps = eps1 ^ eps2
        delta = (eps1 & in2) ^ delta1 ^ delta2
        return in1 ^ in2, int(eps) * 2 + int(delta)

    ia, fa = compose_party(second.input_a, second.output_a, first.input_a, first.output_a)
    ib, fb = compose_party(second.input_b, second.output_b, first.input_b, first.output_b)
    return SingleCopyWiring(ia, ib, fa, fb)


# ---------------------------------------------------------------------------
# Two-copy wirings
# ---------------------------------------------------------------------------

RAW_PER_INPUT = 256
RAW_PER_PARTY = RAW_PER_INPUT**2


@dataclass(frozen=True)
class TwoCopyLocalWiring:
    """One party's adaptive two-copy strategy, as truth tables per child
    input x: order[x] (0: copy 1 first), first_input[x], second_input[x][r1]
    (input to the later copy given the first result), and
    final_output[x][r1][r2] (child output given both results in query
    order)."""

    order: tuple
    first_input: tuple
    second_input: tuple  # shape (2, 2)
    final_output: tuple  # shape (2, 2, 2)

    def __post_init__(self):
        order = tuple(int(v) for v in self.order)
        first = tuple(int(v) for v in self.first_input)
        second = tuple(tuple(int(v) for v in row) for row in self.second_input)
        final = tuple(
            tuple(tuple(int(v) for v in row) for row in plane)
            for plane in self.final_output
        )
        flat = list(order) + list(first) + [v for r in second for v in r] + [
            v for p in final for r in p for v in r
        ]
        if len(order) != 2 or len(first) != 2 or len(second) != 2 or len(final) != 2:
            raise WiringError("tables must cover both child inputs")
        if any(v not in (0, 1) for v in flat):
            raise WiringError("table entries must be bits")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "first_input", first)
        object.__setattr__(self, "second_input", second)
        object.__setattr__(self, "final_output", final)

    @classmethod
    def from_index(cls, idx: int) -> "TwoCopyLocalWiring":
        """Decode the lexicographic index; per child input the 8-bit block
        is [order | first_input | second_input(2) | final_output(4)], the
        x = 0 block in the high bits."""
        if not 0 <= idx < RAW_PER_PARTY:
            raise WiringError("raw index out of range")
        blocks = [(idx >> 8) & 0xFF, idx & 0xFF]
        order, first, second, final = [], [], [], []
        for blk in blocks:
            order.append((blk >> 7) & 1)
            first.append((blk >> 6) & 1)
            second.append(((blk >> 5) & 1, (blk >> 4) & 1))
            final.append((((blk >> 3) & 1, (blk >> 2) & 1), ((blk >> 1) & 1, blk & 1)))
        return cls(tuple(order), tuple(first), tuple(second), tuple(final))

    @property
    def index(self) -> int:
        idx = 0
        for x in range(2):
            blk = (self.order[x] << 7) | (self.first_input[x] << 6)
            blk |= (self.second_input[x][0] << 5) | (self.second_input[x][1] << 4)
            f = self.final_output[x]
            blk |= (f[0][0] << 3) | (f[0][1] << 2) | (f[1][0] << 1) | f[1][1]
            idx = (idx << 8) | blk
        return idx

    def schedule(self, x: int, a1: int, a2: int) -> tuple:
        """(u1, u2, child_output) the strategy realizes when the copies'
        outputs would be a1 and a2."""
        if self.order[x] == 0:
            u1 = self.first_input[x]
            u2 = self.second_input[x][a1]
            out = self.final_output[x][a1][a2]
        else:
            u2 = self.first_input[x]
            u1 = self.second_input[x][a2]
            out = self.final_output[x][a2][a1]
        return u1, u2, out

    def fingerprint(self) -> int:
        """Bit-packed schedule table over (x, a1, a2); wirings with equal
        fingerprints produce identical children on every admissible parent."""
        code = 0
        for x, a1, a2 in itertools.product((0, 1), repeat=3):
            for bit in self.schedule(x, a1, a2):
                code = (code << 1) | bit
        return code


PASS_THROUGH = TwoCopyLocalWiring(
    order=(0, 0),
    first_input=(0, 1),
    second_input=((0, 0), (0, 0)),
    final_output=(((0, 0), (1, 1)), ((0, 0), (1, 1))),
)


@dataclass(frozen=True)
class TwoCopyWiring:
    """A full two-copy protocol: one local strategy per party."""

    party_a: TwoCopyLocalWiring
    party_b: TwoCopyLocalWiring


def enumerate_two_copy_raw() -> list:
    """All 65536 raw per-party strategies in lexicographic table order."""
    return [TwoCopyLocalWiring.from_index(i) for i in range(RAW_PER_PARTY)]


@dataclass(frozen=True)
class WiringClass:
    """Extensional equivalence class of per-party two-copy strategies."""

    fingerprint: int
    representative: TwoCopyLocalWiring
    members: tuple  # raw indices, ascending


def canonicalize_two_copy(wirings: list) -> list:
    """Group strategies by schedule-table fingerprint.

    Classes are sorted by fingerprint, so the output is invariant under
    permutations of the input list; representatives are the lowest-index
    members.
    """
    groups: dict = {}
    for w in wirings:
        fp = w.fingerprint()
        groups.setdefault(fp, []).append(w)
    classes = []
    for fp in sorted(groups):
        members = sorted(groups[fp], key=lambda w: w.index)
        classes.append(
            WiringClass(
                fingerprint=fp,
                representative=members[0],
                members=tuple(w.index for w in members),
            )
        )
    return classes


@dataclass(frozen=True)
class PerInputClass:
    """Extensional class of one-input strategies: schedule arrays indexed
    [a1, a2] and the lowest representative 8-bit table block."""

    code: int  # 12-bit packed schedule
    block: int  # representative per-input table block
    u1: np.ndarray
    u2: np.ndarray
    out: np.ndarray


def _block_schedule(blk: int):
    """Schedule arrays of one 8-bit per-input table block."""
    w = TwoCopyLocalWiring.from_index((blk << 8) | blk)
    u1 = np.zeros((2, 2), dtype=np.int8)
    u2 = np.zeros((2, 2), dtype=np.int8)
    out = np.zeros((2, 2), dtype=np.int8)
    for a1, a2 in itertools.product((0, 1), repeat=2):
        u1[a1, a2], u2[a1, a2], out[a1, a2] = w.schedule(0, a1, a2)
    return u1, u2, out


def per_input_classes() -> list:
    """The 192 extensional classes of one-input strategies, sorted by
    schedule code; a party wiring is any pair of them (one per child
    input), so the canonical per-party count is 192**2."""
    groups: dict = {}
    for blk in range(RAW_PER_INPUT):
        u1, u2, out = _block_schedule(blk)
        code = 0
        for a1, a2 in itertools.product((0, 1), repeat=2):
            code = (code << 3) | (int(u1[a1, a2]) << 2) | (int(u2[a1, a2]) << 1) | int(out[a1, a2])
        if code not in groups or blk < groups[code][0]:
            groups[code] = (blk, u1, u2, out)
    return [
        PerInputClass(code=code, block=blk, u1=u1, u2=u2, out=out)
        for code, (blk, u1, u2, out) in sorted(groups.items())
    ]


def party_wiring_from_blocks(block_x0: int, block_x1: int) -> TwoCopyLocalWiring:
    """Assemble a party wiring from per-input representative blocks."""
    return TwoCopyLocalWiring.from_index((block_x0 << 8) | block_x1)


def _check_sequential_marginals(parent: NCopyBox, tol: float = 1e-9) -> None:
    """Sequential use needs each party's single-copy marginals independent
    of that party's other input (cross-party no-signaling is already a type
    invariant)."""
    t = parent.table.reshape(2, 2, 2, 2, 2, 2, 2, 2)  # x1 x2 y1 y2 a1 a2 b1 b2
    pa = t.sum(axis=(6, 7))[:, :, 0, 0]  # a-side joint at y = (0,0)
    p_a1 = pa.sum(axis=3)  # [x1, x2, a1]
    if np.max(np.abs(p_a1 - p_a1[:, :1, :])) > tol:
        raise WiringError("copy-1 marginal of party A depends on x2")
    p_a2 = pa.sum(axis=2)
    if np.max(np.abs(p_a2 - p_a2[:1, :, :])) > tol:
        raise WiringError("copy-2 marginal of party A depends on x1")
    pb = t.sum(axis=(4, 5))[0, 0]  # b-side joint at x = (0,0)
    p_b1 = pb.sum(axis=3)
    if np.max(np.abs(p_b1 - p_b1[:, :1, :])) > tol:
        raise WiringError("copy-1 marginal of party B depends on y2")
    p_b2 = pb.sum(axis=2)
    if np.max(np.abs(p_b2 - p_b2[:1, :, :])) > tol:
        raise WiringError("copy-2 marginal of party B depends on y1")


def apply_two_copy(wa: TwoCopyLocalWiring, wb: TwoCopyLocalWiring,
                   parent: NCopyBox) -> Box222:
    """Child of a 2-copy parent under the parties' adaptive strategies.

    Sums the parent table over all internal outcome paths: for each
    hypothesized copy-output pair the schedule fixes the copy inputs, so
    every term reads the parent at one well-defined input profile.
    """
    if parent.n != 2:
        raise WiringError("parent must be a 2-copy box")
    _check_sequential_marginals(parent)
    t = parent.table.reshape(2, 2, 2, 2, 2, 2, 2, 2)
    child = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product((0, 1), repeat=2):
        for a1, a2, b1, b2 in itertools.product((0, 1), repeat=4):
            u1, u2, a = wa.schedule(x, a1, a2)
            v1, v2, b = wb.schedule(y, b1, b2)
            child[x, y, a, b] += t[u1, u2, v1, v2, a1, a2, b1, b2]
    return Box222(child)


# ---------------------------------------------------------------------------
# Stochastic wirings (shared randomness over deterministic protocols)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StochasticWiring:
    """Convex mixture of deterministic wirings of one arity."""

    weights: tuple
    components: tuple

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(self.components) or not weights:
            raise WiringError("need one weight per component")
        if any(w < -1e-12 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
            raise WiringError("weights must be a probability vector")
        kinds = {type(c) for c in self.components}
        if len(kinds) != 1 or kinds.pop() not in (SingleCopyWiring, TwoCopyWiring):
            raise WiringError("components must share one wiring arity")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", tuple(self.components))


def apply_stochastic(w: StochasticWiring, parent) -> Box222:
    """Weighted mixture of the deterministic children."""
    first = w.components[0]
    if isinstance(first, SingleCopyWiring):
        if isinstance(parent, NCopyBox):
            parent = parent.as_box222()
        children = [apply_single_copy(c, parent) for c in w.components]
    else:
        children = [apply_two_copy(c.party_a, c.party_b, parent) for c in w.components]
    table = sum(wt * ch.table for wt, ch in zip(w.weights, children))
    return Box222(table)
