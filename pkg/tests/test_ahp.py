from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankfarm.ahp import (
    RRRM,
    RRRV,
    aggregate_level,
    ahp_rank,
    build_rrrm,
    consistency_ratio,
    final_rank,
    ordinal_label,
    principal_eigenvector,
    select_best,
)
from rankfarm.catalog import Catalog, NodeConfig, ServiceOffering, hierarchy_from_dict
from rankfarm.errors import (
    DimensionMismatch,
    EmptyMatch,
    MissingQoSValue,
    MissingVReq,
    NonPositiveValue,
    NoConvergence,
    WeightError,
)
from rankfarm.requirements import RequirementSet, requirements_from_dict

from conftest import IDS


def closed_form(values, tendency):
    """Exact normalized values (positive) or reciprocals (negative)."""
    fr = [Fraction(v) for v in values]
    score = fr if tendency == "positive" else [1 / f for f in fr]
    total = sum(score)
    return [float(s / total) for s in score]


def largest_real_root_3x3(a):
    """Largest real root of det(lambda I - A) by bisection on exact coefficients."""
    a = [[Fraction(x) for x in row] for row in a]
    trace = a[0][0] + a[1][1] + a[2][2]
    minors = (
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
        + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1]
    )
    det = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )
    p = lambda x: x**3 - trace * x**2 + minors * x - det  # noqa: E731
    lo, hi = Fraction(3), Fraction(10)
    assert p(lo) < 0 < p(hi)
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if p(mid) < 0 else (lo, mid)
    return float(lo)


UPLOAD = dict(zip(IDS, [10, 12, 15, 20, 10]))


class TestBuildRRRM:
    def test_upload_matrix_first_row(self):
        m = build_rrrm(UPLOAD, "negative")
        assert m.entries[0].tolist() == [1.0, 12 / 10, 15 / 10, 20 / 10, 10 / 10]

    def test_identical_values(self):
        m = build_rrrm({"a": 3.0, "b": 3.0, "c": 3.0}, "positive")
        assert np.array_equal(m.entries, np.ones((3, 3)))

    def test_close_tendency(self):
        m = build_rrrm({"A": 50, "B": 60}, "close", 50, epsilon=1e-9)
        # D_A = 0 + 1e-9 * 50, D_B = 10 + 1e-9 * 50; entry(A, B) = D_B / D_A
        expected = (10 + 1e-9 * 50) / (1e-9 * 50)
        assert m.entries[0, 1] == pytest.approx(expected, rel=1e-12)
        assert np.isfinite(m.entries).all()
        v = principal_eigenvector(m)
        assert v["A"] > 0.999999

    def test_close_prefers_nearer(self):
        m = build_rrrm({"A": 40, "B": 52, "C": 70}, "close", 50)
        v = principal_eigenvector(m)
        assert v["B"] > v["A"] > v["C"]

    def test_exact_tendency(self):
        m = build_rrrm({"A": 99, "B": 99.9, "C": 99}, "exact", 99)
        v = principal_eigenvector(m)
        assert v["A"] == pytest.approx(v["C"]) and v["B"] < 1e-6

    def test_zero_target_uses_absolute_smoothing(self):
        m = build_rrrm({"A": 0.0, "B": 1.0}, "close", 0.0)
        assert m.entries[0, 1] == pytest.approx((1 + 1e-12) / 1e-12)

    def test_non_positive(self):
        with pytest.raises(NonPositiveValue):
            build_rrrm({"a": 1.0, "b": 0.0}, "negative")

    def test_missing_vreq(self):
        with pytest.raises(MissingVReq):
            build_rrrm({"a": 1.0}, "close")

    def test_single_service(self):
        m = build_rrrm({"only": 4.2}, "positive")
        assert m.entries.tolist() == [[1.0]]


class TestPrincipalEigenvector:
    def test_upload_matrix_closed_form(self):
        v = principal_eigenvector(build_rrrm(UPLOAD, "negative"))
        np.testing.assert_allclose(v.values, [0.25, 0.2083333, 0.1666667, 0.125, 0.25], atol=1e-6)

    def test_adaptability_column(self):
        v = principal_eigenvector(build_rrrm(dict(zip(IDS, [40, 45, 30, 50, 50])), "negative"))
        np.testing.assert_allclose(v.values, [0.2074, 0.1843, 0.2765, 0.1659, 0.1659], atol=1e-4)

    def test_one_by_one(self):
        assert principal_eigenvector(build_rrrm({"x": 7.0}, "negative")).values.tolist() == [1.0]

    def test_no_convergence(self):
        m = RRRM("p", ("a", "b", "c"), np.array([[1, 2, 4], [0.5, 1, 1], [0.25, 1, 1]], dtype=float))
        with pytest.raises(NoConvergence):
            principal_eigenvector(m, tol=1e-15, max_iter=1)

    def test_perturbed_matrix_is_an_eigenvector(self):
        a = np.array([[1, 2, 4], [0.5, 1, 1], [0.25, 1, 1]], dtype=float)
        v = principal_eigenvector(RRRM("p", ("a", "b", "c"), a)).values
        lam = largest_real_root_3x3(a.tolist())
        np.testing.assert_allclose(a @ v, lam * v, atol=1e-10)


class TestConsistencyRatio:
    def test_upload_matrix_is_consistent(self):
        assert consistency_ratio(build_rrrm(UPLOAD, "negative")) == pytest.approx(0.0, abs=1e-6)

    def test_two_by_two(self):
        assert consistency_ratio(build_rrrm({"a": 1.0, "b": 9.0}, "positive")) == 0.0

    def test_perturbed_3x3(self):
        a = [[1, 2, 4], [0.5, 1, 1], [0.25, 1, 1]]
        cr = consistency_ratio(RRRM("p", ("a", "b", "c"), np.array(a, dtype=float)))
        expected = (largest_real_root_3x3(a) - 3) / 2 / 0.58
        assert cr > 0
        assert cr == pytest.approx(expected, abs=1e-9)


def _vec(values, order=("RF1",)):
    return RRRV("v", tuple(order), np.array(values, dtype=float))


class TestAggregation:
    def test_assurance_rf1(self):
        out = aggregate_level([_vec([0.2003]), _vec([0.2590])], [0.6, 0.4])
        assert out.values[0] == pytest.approx(0.2238, abs=5e-5)

    def test_single_child_identity(self):
        child = _vec([0.1, 0.2, 0.7], ["a", "b", "c"])
        assert np.array_equal(aggregate_level([child], [1.0]).values, child.values)

    def test_required_group_rf1(self):
        out = aggregate_level([_vec([0.2238]), _vec([0.1123]), _vec([0.1560])], [0.3, 0.4, 0.3])
        assert out.values[0] == pytest.approx(0.1589, abs=5e-5)

    def test_final_rank_rf1_rf2(self):
        order = ("RF1", "RF2")
        out = final_rank(
            {"Q_O": _vec([0.2005, 0.1774], order), "Q_R": _vec([0.1589, 0.2719], order)},
            {"Q_O": 0.4, "Q_R": 0.6},
        )
        np.testing.assert_allclose(out.values, [0.1755, 0.2341], atol=5e-5)

    def test_final_rank_identical_groups(self):
        u = _vec([0.2, 0.3, 0.5], "abc")
        out = final_rank({"Q_O": u, "Q_R": u}, {"Q_O": 0.4, "Q_R": 0.6})
        np.testing.assert_allclose(out.values, u.values, atol=1e-15)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(WeightError):
            aggregate_level([_vec([0.5]), _vec([0.5])], [0.5, 0.6])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            aggregate_level([_vec([0.5, 0.5], "ab"), _vec([0.5, 0.5], "ba")], [0.5, 0.5])
        with pytest.raises(DimensionMismatch):
            aggregate_level([], [])
        with pytest.raises(DimensionMismatch):
            final_rank({"Q_O": _vec([1.0])}, {"Q_R": 1.0})


def _two_leaf_catalog(values_a, values_b, tendency="negative"):
    h = hierarchy_from_dict(
        {
            "groups": [
                {"id": "G", "weight": 1.0, "attributes": [
                    {"name": "T", "weight": 1.0, "sub": [
                        {"name": "x", "weight": 0.5, "unit": "", "tendency": tendency},
                        {"name": "y", "weight": 0.5, "unit": "", "tendency": tendency},
                    ]}]}
            ]
        }
    )
    offerings = []
    for sid, (x, y) in {"A": values_a, "B": values_b}.items():
        offerings.append(ServiceOffering(sid, "IaaS", frozenset(), frozenset(), _node(), {"x": x, "y": y}))
    return Catalog(tuple(offerings), h)


def _node():
    return NodeConfig(8, 4, 100, False)


class TestAhpRank:
    def test_derived_ordering(self, catalog, requirements):
        report = ahp_rank(catalog, IDS, requirements)
        # computed from the offered values; the printed ordering needs the injected vectors
        assert [c.service_id for c in report.choices] == ["RF3", "RF4", "RF5", "RF1", "RF2"]
        assert [c.label for c in report.choices][:2] == ["First Choice", "Second Choice"]
        assert select_best(report) == "RF3"

    def test_injected_ordering(self, catalog, requirements, printed_vectors):
        report = ahp_rank(catalog, IDS, requirements, injected=printed_vectors)
        assert [c.service_id for c in report.choices] == ["RF2", "RF4", "RF3", "RF1", "RF5"]
        assert select_best(report) == "RF2"
        assert report.consistency == {}

    def test_every_vector_sums_to_one(self, catalog, requirements):
        report = ahp_rank(catalog, IDS, requirements)
        for level in (report.sub_level_vectors, report.top_level_vectors, report.group_vectors):
            for vec in level.values():
                assert vec.values.sum() == pytest.approx(1.0, abs=1e-9)
        assert report.final.values.sum() == pytest.approx(1.0, abs=1e-9)
        assert max(report.consistency.values()) < 1e-6

    def test_single_service(self, catalog, requirements):
        report = ahp_rank(catalog, ["RF4"], requirements)
        assert report.final.values.tolist() == [pytest.approx(1.0)]
        assert report.choices[0].label == "First Choice"
        assert select_best(report) == "RF4"

    def test_identical_services_tie(self):
        cat = _two_leaf_catalog((3.0, 5.0), (3.0, 5.0))
        report = ahp_rank(cat, ["B", "A"], RequirementSet())
        np.testing.assert_allclose(report.final.values, [0.5, 0.5])
        assert [c.service_id for c in report.choices] == ["A", "B"]
        assert any("tie" in w for w in report.warnings)
        assert select_best(report) == "A"

    def test_requested_values_echoed(self, catalog, requirements):
        report = ahp_rank(catalog, IDS, requirements)
        assert report.requested["NodeCost"] == {"bound": 1, "direction": "lt"}

    def test_empty_match(self, catalog, requirements):
        with pytest.raises(EmptyMatch):
            ahp_rank(catalog, [], requirements)

    def test_missing_value_names_service_and_attribute(self):
        cat = _two_leaf_catalog((3.0, 5.0), (3.0, 5.0))
        offerings = (cat.offerings[0], ServiceOffering("B", "IaaS", frozenset(), frozenset(), _node(), {"x": 1.0}))
        with pytest.raises(MissingQoSValue) as info:
            ahp_rank(Catalog(offerings, cat.hierarchy), ["A", "B"], RequirementSet())
        assert (info.value.service_id, info.value.attribute) == ("B", "y")

    def test_zero_override_rejected(self, hierarchy):
        with pytest.raises(WeightError):
            requirements_from_dict({"weights": {"Q_O": 0.0}}, hierarchy)

    def test_weight_dominance(self, catalog):
        report = ahp_rank(catalog, IDS, RequirementSet())
        out = final_rank(report.group_vectors, {"Q_O": 0.0, "Q_R": 1.0})
        assert np.array_equal(out.values, report.group_vectors["Q_R"].values)

    def test_negative_weight(self):
        with pytest.raises(WeightError):
            aggregate_level([_vec([0.5]), _vec([0.5])], [1.5, -0.5])

    def test_tendency_flip_reverses_two_services(self):
        pos = build_rrrm({"A": 2.0, "B": 5.0}, "positive")
        neg = build_rrrm({"A": 2.0, "B": 5.0}, "negative")
        np.testing.assert_array_equal(pos.entries.T, neg.entries)
        vp, vn = principal_eigenvector(pos), principal_eigenvector(neg)
        assert (vp["A"] < vp["B"]) and (vn["A"] > vn["B"])


def test_ordinal_labels():
    assert ordinal_label(1) == "First Choice"
    assert ordinal_label(5) == "Fifth Choice"
    assert ordinal_label(21) == "21st Choice"
    assert ordinal_label(112) == "112th Choice"


_values = st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=10)


@settings(max_examples=200, deadline=None)
@given(_values, st.sampled_from(["positive", "negative"]), st.floats(min_value=1e-3, max_value=1e3))
def test_value_derived_properties(values, tendency, scale):
    order = [f"s{i}" for i in range(len(values))]
    m = build_rrrm(dict(zip(order, values)), tendency)
    np.testing.assert_allclose(m.entries * m.entries.T, 1.0, atol=1e-9)
    assert np.all(np.diag(m.entries) == 1.0)
    v = principal_eigenvector(m)
    assert v.values.sum() == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(v.values, closed_form(values, tendency), atol=1e-9)
    scaled = principal_eigenvector(build_rrrm(dict(zip(order, [x * scale for x in values])), tendency))
    np.testing.assert_allclose(scaled.values, v.values, atol=1e-9)
    assert consistency_ratio(m) < 1e-6
