import json

import numpy as np
import pytest

from boxforge import analysis
from boxforge import box_core as bc
from boxforge import quantum as qm
from boxforge import serialize as sz
from boxforge import wiring as wr


class TestBoxFiles:
    def test_roundtrip_box222(self):
        box = bc.convex_mix(bc.pr_box(), bc.uniform_box(), 0.37)
        again = sz.box_from_json_dict(sz.box_to_json_dict(box))
        assert isinstance(again, bc.Box222)
        assert again.allclose(box, 0.0)

    def test_roundtrip_ncopy(self):
        parent = bc.tensor(bc.pr_box(), bc.uniform_box())
        again = sz.box_from_json_dict(sz.box_to_json_dict(parent))
        assert isinstance(again, bc.NCopyBox)
        assert np.array_equal(again.table, parent.table)

    def test_flat_order_is_row_major(self):
        box = bc.pr_box()
        data = sz.box_to_json_dict(box)
        # flat index ((x*2+y)*2+a)*2+b: cell (1,1,0,1) sits at position 13
        assert data["table"][13] == box.table[1, 1, 0, 1]

    def test_schema_rejects_malformed(self):
        with pytest.raises(sz.FormatError):
            sz.box_from_json_dict({"scenario": [2, 2, 2], "table": [0.25] * 16})
        with pytest.raises(sz.FormatError):
            sz.box_from_json_dict(
                {"scenario": [3, 2, 2], "copies": 1, "table": [0.25] * 16}
            )

    def test_wrong_length_rejected(self):
        with pytest.raises(sz.FormatError):
            sz.box_from_json_dict(
                {"scenario": [2, 2, 2], "copies": 2, "table": [0.25] * 16}
            )


class TestRealizationFiles:
    def test_roundtrip(self):
        realization, _ = qm.tilted_realization(0.31)
        data = json.loads(json.dumps(sz.realization_to_json_dict(realization)))
        again = sz.realization_from_json_dict(data)
        assert np.allclose(again.state.amplitudes, realization.state.amplitudes)
        for m1, m2 in zip(again.a_measurements, realization.a_measurements):
            assert np.allclose(m1.projectors[0], m2.projectors[0])
        assert qm.realize_box(again).allclose(qm.realize_box(realization), 1e-15)

    def test_complex_pairs_format(self):
        data = sz.realization_to_json_dict(qm.tsirelson_realization())
        amp = data["state"]["amplitudes"]
        assert all(len(pair) == 2 for pair in amp)


class TestWiringFiles:
    def test_single_copy_roundtrip(self):
        for w in wr.enumerate_single_copy()[:8]:
            again = sz.wiring_from_json_dict(sz.wiring_to_json_dict(w))
            assert again == w

    def test_two_copy_roundtrip(self):
        w = wr.TwoCopyWiring(party_a=wr.PASS_THROUGH,
                             party_b=wr.TwoCopyLocalWiring.from_index(777))
        again = sz.wiring_from_json_dict(sz.wiring_to_json_dict(w))
        assert again == w

    def test_stochastic_roundtrip(self):
        ws = wr.enumerate_single_copy()
        mix = wr.StochasticWiring(weights=(0.25, 0.75), components=(ws[1], ws[9]))
        again = sz.wiring_from_json_dict(sz.wiring_to_json_dict(mix))
        assert again == mix

    def test_schema_version_required(self):
        data = sz.wiring_to_json_dict(wr.PASS_THROUGH)
        del data["schema_version"]
        with pytest.raises(sz.FormatError):
            sz.wiring_from_json_dict(data)


class TestReportFiles:
    def test_roundtrip(self):
        report = analysis.verify_appendix_a()
        data = sz.report_to_json_dict(report)
        again = sz.report_from_json_dict(json.loads(json.dumps(data)))
        assert again.to_json_dict() == data

    def test_bad_verdict_rejected(self):
        report = analysis.verify_appendix_a()
        data = sz.report_to_json_dict(report)
        data["verdict"] = "maybe"
        with pytest.raises(sz.FormatError):
            sz.report_from_json_dict(data)


class TestCsv:
    def test_scan_rows(self, tmp_path):
        from boxforge import distill

        results = distill.scan(bc.pr_box(), alphas=(), top_k=1, include_hardy=False)
        header, rows = sz.scan_results_rows(results)
        assert header[:4] == [
            "wiring_a_block_x0", "wiring_a_block_x1",
            "wiring_b_block_x0", "wiring_b_block_x1",
        ]
        assert "chsh" in header
        assert len(rows) == len(results)
        path = tmp_path / "scan.csv"
        sz.write_csv(str(path), header, rows)
        text = path.read_text().splitlines()
        assert len(text) == len(rows) + 1
