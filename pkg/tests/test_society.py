import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from everwill import Society, StructuralError, generate_relationships, validate_relationships


class TestValidator:
    def test_singleton_identity_ok(self):
        assert validate_relationships([[1.0]]).ok

    def test_two_by_two_ok(self):
        assert validate_relationships([[1.0, 0.5], [0.5, 1.0]]).ok

    def test_triangle_violation_with_witness(self):
        # r(0,2) + r(2,1) = 1.8 > 1 + r(0,1) = 1.1
        table = [
            [1.0, 0.1, 0.9],
            [0.1, 1.0, 0.9],
            [0.9, 0.9, 1.0],
        ]
        report = validate_relationships(table)
        assert not report.ok
        triangles = {v.indices for v in report.violations if v.axiom == "triangle"}
        assert (0, 1, 2) in triangles
        assert all(v.axiom == "triangle" for v in report.violations)

    def test_diagonal_violation(self):
        report = validate_relationships([[1.0, 0.5], [0.5, 0.9]])
        assert any(v.axiom == "diagonal" and v.indices == (1,) for v in report.violations)

    def test_interval_violation(self):
        report = validate_relationships([[1.0, 1.0], [1.0, 1.0]])
        assert any(v.axiom == "interval" for v in report.violations)
        report = validate_relationships([[1.0, 0.0], [0.0, 1.0]])
        assert any(v.axiom == "interval" for v in report.violations)

    def test_symmetry_violation(self):
        report = validate_relationships([[1.0, 0.5], [0.6, 1.0]])
        assert any(v.axiom == "symmetry" and v.indices == (0, 1) for v in report.violations)

    def test_rounding_slack_not_flagged(self):
        table = np.array([[1.0 + 1e-15, 0.5], [0.5 + 1e-15, 1.0]])
        assert validate_relationships(table).ok

    def test_non_square_is_structural(self):
        with pytest.raises(StructuralError):
            validate_relationships([[1.0, 0.5]])

    def test_non_finite_is_structural(self):
        with pytest.raises(StructuralError):
            validate_relationships([[1.0, np.nan], [np.nan, 1.0]])


class TestGenerator:
    def test_singleton(self):
        assert generate_relationships(1, 0).tolist() == [[1.0]]

    def test_generated_table_valid(self):
        assert validate_relationships(generate_relationships(5, 42)).ok

    def test_deterministic_in_seed(self):
        a = generate_relationships(5, 42)
        b = generate_relationships(5, 42)
        assert np.array_equal(a, b)
        c = generate_relationships(5, 43)
        assert not np.array_equal(a, c)

    def test_zero_persons_rejected(self):
        with pytest.raises(ValueError):
            generate_relationships(0, 1)

    def test_bad_eps_rejected(self):
        with pytest.raises(ValueError):
            generate_relationships(3, 1, eps=0.5)

    @settings(max_examples=30, deadline=None)
    @given(count=st.integers(2, 30), seed=st.integers(0, 2**32 - 1))
    def test_axioms_hold_for_any_seed(self, count, seed):
        table = generate_relationships(count, seed)
        assert validate_relationships(table).ok

    @settings(max_examples=20, deadline=None)
    @given(count=st.integers(2, 20), seed=st.integers(0, 2**32 - 1))
    def test_one_minus_strength_is_a_metric(self, count, seed):
        # the triangle axiom restated: d = 1 - r satisfies d(x,y) <= d(x,z) + d(z,y)
        table = generate_relationships(count, seed)
        d = 1.0 - table
        lhs = d[:, :, None]                      # d(x, y)
        rhs = d[:, None, :] + d.T[None, :, :]    # d(x, z) + d(z, y)
        assert np.all(lhs <= rhs + 1e-12)


class TestSociety:
    def test_relationship_lookup(self, society2):
        assert society2.relationship(0, 0) == 1.0
        assert society2.relationship(0, 1) == 0.5
        assert society2.relationship(0, 1) == society2.relationship(1, 0)

    def test_out_of_range_lookup(self, society2):
        with pytest.raises(ValueError):
            society2.relationship(0, 2)

    def test_table_is_immutable(self, society2):
        with pytest.raises(ValueError):
            society2.relationships[0, 1] = 0.9

    def test_empty_society_rejected(self):
        with pytest.raises(ValueError):
            Society(0, 1, [[1.0]])
        with pytest.raises(ValueError):
            Society(1, 0, [[1.0]])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(StructuralError):
            Society(3, 1, [[1.0, 0.5], [0.5, 1.0]])

    def test_json_round_trip(self, society3x2, tmp_path):
        path = tmp_path / "society.json"
        society3x2.save(path)
        loaded = Society.load(path)
        assert loaded.persons == society3x2.persons
        assert loaded.estate == society3x2.estate
        assert np.array_equal(loaded.relationships, society3x2.relationships)

    def test_loader_rejects_invalid_table(self, tmp_path):
        doc = {"persons": 2, "estate": 1, "relationships": [[1.0, 1.5], [1.5, 1.0]]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(StructuralError):
            Society.load(path)

    def test_loader_rejects_missing_keys(self):
        with pytest.raises(StructuralError):
            Society.from_dict({"persons": 2})
