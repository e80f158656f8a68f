import pytest

from mvlam.checker import check
from mvlam.reduce import Evaluator
from mvlam.terms import is_linear


def assert_well_formed(built):
    """Checks at its declared type and is linear."""
    report = check([], built.term, built.certificate, built.declared_type)
    assert report.ok, report.error
    lin = is_linear(built.term)
    assert lin, lin.reason


def outputs(built, table):
    return Evaluator(built.term, table.input_radices, table.output_radix).table()


@pytest.fixture
def well_formed():
    return assert_well_formed
