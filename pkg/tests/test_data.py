import json

import numpy as np
import pytest

from fairadapt import semlab
from fairadapt.data import emit, ingest, parse_metadata, serialize_metadata, split
from fairadapt.errors import DataError
from fairadapt.graph import CausalGraph

GRAPH = CausalGraph.build(
    ["A", "X", "Y"], [("A", "X"), ("X", "Y")], "A", "Y"
)

META = json.dumps(
    {
        "columns": {
            "A": {"kind": "discrete_ordered", "levels": ["0", "1"], "role": "attribute"},
            "X": {"kind": "continuous", "role": "feature"},
            "Y": {"kind": "discrete_ordered", "levels": ["0", "1"], "role": "outcome"},
        },
        "baseline": "0",
    }
)

CSV = "A,X,Y\n0,1.5,1\n1,-0.25,0\n0,3.0,1\n"


class TestIngest:
    def test_happy_path(self):
        data = ingest(CSV, META, GRAPH)
        assert data.n_rows == 3
        assert data.baseline == "0"
        assert not data.is_test
        np.testing.assert_allclose(data.values["X"], [1.5, -0.25, 3.0])

    def test_non_numeric_continuous(self):
        bad = CSV.replace("-0.25", "blue")
        with pytest.raises(DataError, match="row 1.*'X'.*not numeric"):
            ingest(bad, META, GRAPH)

    def test_missing_cell(self):
        bad = "A,X,Y\n0,1.5,1\n1,,0\n"
        with pytest.raises(DataError, match="missing cell at row 1"):
            ingest(bad, META, GRAPH)

    def test_value_outside_levels(self):
        bad = CSV.replace("0,3.0,1", "2,3.0,1")
        with pytest.raises(DataError, match="outside declared levels"):
            ingest(bad, META, GRAPH)

    def test_missing_graph_column(self):
        meta = json.loads(META)
        del meta["columns"]["X"]
        with pytest.raises(DataError, match="graph node 'X'"):
            ingest(CSV, json.dumps(meta), GRAPH)

    def test_outcome_absent_marks_test(self):
        data = ingest("A,X\n0,1.5\n1,2.0\n", META, GRAPH)
        assert data.is_test
        assert data.outcome is None

    def test_unknown_column(self):
        with pytest.raises(DataError, match="not declared in metadata"):
            ingest("A,X,Y,Z\n0,1,1,1\n", META, GRAPH)

    def test_round_trip(self):
        data = ingest(CSV, META, GRAPH)
        again = ingest(emit(data), META, GRAPH)
        for name in data.columns:
            np.testing.assert_array_equal(data.values[name], again.values[name])

    def test_simulator_round_trip(self):
        sem = semlab.builtin("synthetic_a")
        smp = semlab.sample(sem, 200, seed=3)
        text = emit(smp.data)
        meta = serialize_metadata(smp.data)
        back = ingest(text, meta, sem.graph)
        for name in smp.data.columns:
            np.testing.assert_array_equal(back.values[name], smp.data.values[name])

    def test_metadata_round_trip(self):
        schema, baseline = parse_metadata(META)
        data = ingest(CSV, META, GRAPH)
        schema2, baseline2 = parse_metadata(serialize_metadata(data))
        assert schema == schema2 and baseline == baseline2


class TestSplit:
    def make(self, n=100):
        sem = semlab.builtin("synthetic_a")
        return semlab.sample(sem, n, seed=11).data

    def test_75_25(self):
        train, test = split(self.make(100), 0.75, seed=4)
        assert train.n_rows == 75 and test.n_rows == 25
        assert test.is_test and not train.is_test
        assert test.outcome is not None  # retained for evaluation

    def test_partition_disjoint(self):
        data = self.make(100)
        marker = np.arange(100.0)
        data = data.with_values({"X1": marker})
        train, test = split(data, 0.6, seed=9)
        seen = np.concatenate([train.values["X1"], test.values["X1"]])
        assert sorted(seen.tolist()) == marker.tolist()

    def test_out_of_range_fraction(self):
        with pytest.raises(DataError, match="train_fraction"):
            split(self.make(10), 1.0, seed=0)

    def test_deterministic(self):
        data = self.make(60)
        a1, b1 = split(data, 0.5, seed=21)
        a2, b2 = split(data, 0.5, seed=21)
        for name in data.columns:
            np.testing.assert_array_equal(a1.values[name], a2.values[name])
            np.testing.assert_array_equal(b1.values[name], b2.values[name])

    def test_requires_outcome(self):
        data = self.make(20).drop_outcome()
        with pytest.raises(DataError, match="outcome"):
            split(data, 0.5, seed=0)
