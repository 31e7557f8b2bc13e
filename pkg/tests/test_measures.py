import numpy as np
import pytest

from relot import DiscreteMeasure, dirac, measure_from_csv
from relot.errors import DimensionMismatch


def test_basic_construction():
    m = DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([0.25, 0.75]))
    assert m.n_atoms == 2
    assert m.dimension == 1
    assert m.total_mass == pytest.approx(1.0, rel=1e-12)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([[0.0]]), np.array([0.0]))
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([0.5, -0.5]))


def test_empty_measure_rejected():
    with pytest.raises(ValueError):
        DiscreteMeasure(np.zeros((0, 2)), np.zeros(0))


def test_duplicates_merged_within_tolerance():
    m = DiscreteMeasure(
        np.array([[0.0, 0.0], [1.0, 2.0], [1e-13, -1e-13], [1.0, 2.0]]),
        np.array([0.1, 0.2, 0.3, 0.4]),
    )
    assert m.n_atoms == 2
    assert m.positions[0] == pytest.approx([0.0, 0.0])
    assert m.weights[0] == pytest.approx(0.4)
    assert m.weights[1] == pytest.approx(0.6)
    assert m.total_mass == pytest.approx(1.0)


def test_nearby_but_distinct_atoms_not_merged():
    m = DiscreteMeasure(np.array([[0.0], [1e-9]]), np.array([0.5, 0.5]))
    assert m.n_atoms == 2


def test_positions_are_immutable():
    m = dirac([1.0, 2.0], 0.5)
    with pytest.raises(ValueError):
        m.positions[0, 0] = 3.0


def test_dirac():
    m = dirac([1.0, 2.0], 0.5)
    assert m.n_atoms == 1
    assert m.total_mass == 0.5
    assert m.dimension == 2


def test_csv_round_trip_is_exact():
    rng = np.random.default_rng(2)
    m = DiscreteMeasure(rng.normal(size=(7, 3)), rng.uniform(0.1, 1.0, size=7))
    back = measure_from_csv(m.to_csv())
    assert np.array_equal(back.positions, m.positions)
    assert np.array_equal(back.weights, m.weights)


def test_csv_header_enforced():
    with pytest.raises(ValueError):
        measure_from_csv("a,b\n1,2\n")
    with pytest.raises(ValueError):
        measure_from_csv("")
    with pytest.raises(DimensionMismatch):
        measure_from_csv("x_1,x_2,weight\n1.0,2.0\n")


def test_csv_parses_reference_format():
    text = "x_1,x_2,weight\n0.0,0.5,0.25\n1.0,-0.5,0.75\n"
    m = measure_from_csv(text)
    assert m.n_atoms == 2
    assert m.positions[1, 1] == -0.5
    assert m.total_mass == pytest.approx(1.0)
