import pytest

from reproduction import (
    COLUMNS,
    EXPECTED,
    ROWS,
    certificate_suite,
    partition_search_suite,
    reproduce_existence_matrix,
    round_robin_suite,
    two_resource_suite,
)


def test_expected_matrix_shape():
    assert ROWS == ("partition", "laminar", "contiguous", "centralized")
    assert all(len(EXPECTED[row]) == len(COLUMNS) for row in ROWS)
    assert EXPECTED["laminar"] == "-+++"
    assert EXPECTED["contiguous"] == "--++"


@pytest.mark.parametrize("structure", ["partition", "laminar", "contiguous"])
def test_round_robin_suite(structure):
    result = round_robin_suite(3, 15, structure=structure)
    assert result.ok, result.failures
    assert result.total == 15


@pytest.mark.parametrize("structure", ["partition", "laminar"])
def test_two_resource_suite(structure):
    assert two_resource_suite(11, 15, structure=structure).ok
    assert two_resource_suite(12, 10, structure=structure, identical=True).ok


def test_partition_search_suite():
    assert partition_search_suite(5, 10).ok


def test_certificate_suites():
    for name, total in (("example1", 8), ("contiguous", 64), ("centralized", 32)):
        result = certificate_suite(name)
        assert result.ok and result.total == total


@pytest.mark.parametrize("row, column", [
    ("contiguous", "identical"),
    ("laminar", "two"),
    ("partition", "general"),
    ("centralized", "two-identical"),
])
def test_single_cell(row, column):
    report = reproduce_existence_matrix(2024, 5, only=(row, column))
    assert len(report.cells) == 1
    cell = report.cells[0]
    assert (cell.row, cell.column) == (row, column)
    assert cell.passed, cell.evidence.failures
    assert report.extras == ()
    assert report.ok


def test_cells_are_deterministic():
    first = reproduce_existence_matrix(99, 5, only=("laminar", "identical"))
    second = reproduce_existence_matrix(99, 5, only=("laminar", "identical"))
    assert first.cells[0].evidence.passed == second.cells[0].evidence.passed
    assert first.cells[0].evidence.failures == second.cells[0].evidence.failures


@pytest.mark.slow
def test_full_table():
    report = reproduce_existence_matrix(2024, 10)
    assert len(report.cells) == 16
    assert report.ok, [c for c in report.cells if not c.passed]
    matrix = report.matrix()
    assert "".join(matrix["centralized"][column] for column in COLUMNS) == "----"
    assert "".join(matrix["partition"][column] for column in COLUMNS) == "++++"


@pytest.mark.slow
def test_large_construction_suites():
    assert round_robin_suite(2024, 500, structure="contiguous").ok
    assert two_resource_suite(2024, 500, structure="laminar").ok
