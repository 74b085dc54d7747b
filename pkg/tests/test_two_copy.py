import math

import numpy as np
import pytest

from boxforge import box_core as bc
from boxforge import quantum as qm
from boxforge import wiring as wr


@pytest.fixture(scope="module")
def raw_wirings():
    return wr.enumerate_two_copy_raw()


@pytest.fixture(scope="module")
def canonical(raw_wirings):
    return wr.canonicalize_two_copy(raw_wirings)


class TestRawEnumeration:
    def test_count(self, raw_wirings):
        assert len(raw_wirings) == 65536

    def test_index_roundtrip(self, raw_wirings):
        for i in (0, 1, 835, 4095, 65535):
            assert raw_wirings[i].index == i
            assert wr.TwoCopyLocalWiring.from_index(i) == raw_wirings[i]

    def test_pass_through_is_listed(self, raw_wirings):
        assert wr.PASS_THROUGH in raw_wirings

    def test_bad_tables_rejected(self):
        with pytest.raises(wr.WiringError):
            wr.TwoCopyLocalWiring(
                order=(0, 2), first_input=(0, 0),
                second_input=((0, 0), (0, 0)),
                final_output=(((0, 0), (0, 0)), ((0, 0), (0, 0))),
            )


class TestCanonicalization:
    def test_per_party_class_count(self, canonical):
        assert len(canonical) == 36864  # 192 per child input, squared

    def test_per_input_class_count(self):
        assert len(wr.per_input_classes()) == 192

    def test_members_partition_raw(self, canonical):
        total = sum(len(c.members) for c in canonical)
        assert total == 65536
        seen = set()
        for c in canonical:
            seen.update(c.members)
        assert len(seen) == 65536

    def test_stable_under_permutation(self, raw_wirings, canonical):
        rng = np.random.default_rng(0)
        perm = rng.permutation(len(raw_wirings))
        shuffled = wr.canonicalize_two_copy([raw_wirings[i] for i in perm])
        assert [c.fingerprint for c in shuffled] == [c.fingerprint for c in canonical]
        assert [c.members for c in shuffled] == [c.members for c in canonical]

    def test_fingerprint_merges_unused_branches(self):
        # order 0 with a constant second input: the branch on the unused
        # first-result value of second_input is unreachable only when the
        # tables coincide; equal schedules must merge
        w1 = wr.TwoCopyLocalWiring(
            order=(0, 0), first_input=(0, 0),
            second_input=((0, 0), (0, 0)),
            final_output=(((0, 1), (1, 0)), ((0, 1), (1, 0))),
        )
        # same channel expressed with the copies queried in the other order
        w2 = wr.TwoCopyLocalWiring(
            order=(1, 1), first_input=(0, 0),
            second_input=((0, 0), (0, 0)),
            final_output=(((0, 1), (1, 0)), ((0, 1), (1, 0))),
        )
        assert w1.fingerprint() == w2.fingerprint()

    def test_published_census_comparison(self, canonical):
        per_input = len(wr.per_input_classes())
        assert per_input**2 == len(canonical)
        # the published total census (82 per party-and-input to the fourth
        # power) uses a different counting convention; we only report ours
        assert per_input**4 != 82**4


class TestApplyTwoCopy:
    def test_pass_through_recovers_factor(self, random_ns_box):
        rng = np.random.default_rng(1)
        b1, b2 = random_ns_box(rng), random_ns_box(rng)
        parent = bc.tensor(b1, b2)
        child = wr.apply_two_copy(wr.PASS_THROUGH, wr.PASS_THROUGH, parent)
        assert child.allclose(b1, 1e-12)

    def test_children_linear_in_parent(self, raw_wirings, random_ns_box):
        rng = np.random.default_rng(5)
        wa = raw_wirings[rng.integers(0, 65536)]
        wb = raw_wirings[rng.integers(0, 65536)]
        b1, b2 = random_ns_box(rng), random_ns_box(rng)
        lam = 0.3
        parent_mix = bc.NCopyBox(
            n=2, table=lam * bc.tensor(b1, b1).table + (1 - lam) * bc.tensor(b2, b2).table
        )
        child_mix = wr.apply_two_copy(wa, wb, parent_mix)
        child_split = lam * wr.apply_two_copy(wa, wb, bc.tensor(b1, b1)).table + (
            1 - lam
        ) * wr.apply_two_copy(wa, wb, bc.tensor(b2, b2)).table
        assert np.max(np.abs(child_mix.table - child_split)) < 1e-12

    def test_equivalent_wirings_equal_children(self, canonical, random_ns_box):
        rng = np.random.default_rng(7)
        parent = bc.tensor(random_ns_box(rng), random_ns_box(rng))
        other = wr.TwoCopyLocalWiring.from_index(canonical[100].members[0])
        for cls in (canonical[100], canonical[20000]):
            members = [wr.TwoCopyLocalWiring.from_index(i) for i in cls.members[:4]]
            children = [wr.apply_two_copy(m, other, parent) for m in members]
            for child in children[1:]:
                assert child.allclose(children[0], 1e-12)

    def test_rejects_one_copy_parent(self):
        with pytest.raises(wr.WiringError):
            wr.apply_two_copy(wr.PASS_THROUGH, wr.PASS_THROUGH, bc.pr_box().as_ncopy())

    def test_rejects_intra_party_signaling_parent(self):
        # a1 correlates with x2 through a PR box inside party A's wing:
        # blatantly breaks sequential-use marginals
        t = np.zeros((4, 4, 4, 4))
        for x in range(4):
            x1, x2 = x >> 1, x & 1
            for y in range(4):
                for a in range(4):
                    a1, a2 = a >> 1, a & 1
                    if a1 != (x2 & 1):
                        continue
                    for b in range(4):
                        t[x, y, a, b] = 0.5 / 8.0
        # normalize per (x, y): currently each (x,y) sums over 2 a's * 4 b's
        t = t / t.sum(axis=(2, 3), keepdims=True)
        parent = bc.NCopyBox(n=2, table=t)
        with pytest.raises(wr.WiringError):
            wr.apply_two_copy(wr.PASS_THROUGH, wr.PASS_THROUGH, parent)


class TestQuantumClosure:
    def test_pr_children_capped_at_algebraic_max(self):
        from boxforge import distill

        assert distill.exhaustive_chsh_max(bc.pr_box()) == pytest.approx(4.0, abs=1e-12)

    def test_tsirelson_children_capped_at_quantum_max(self):
        from boxforge import distill

        tbox = qm.realize_box(qm.tsirelson_realization())
        best = distill.exhaustive_chsh_max(tbox)
        assert best <= 2 * math.sqrt(2) + 1e-9
        assert best == pytest.approx(2 * math.sqrt(2), abs=1e-9)
