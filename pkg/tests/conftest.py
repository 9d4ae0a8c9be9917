import pytest

from scaffold_forge.pgroup import preset
from scaffold_forge.saltman import build_generic

# D_3 and D_4 as printed for the dihedral group of order 16 (X_j = Y_j^2 - Y_j - D_j).
PRINTED_D3 = "X1*(Y1+Y2)"
PRINTED_D4 = "X1^3*Y1+X1^2*X2*Y2+X1^2*Y1*Y2+X1*(Y1^3+Y1*Y3+Y2*Y3+Y2)+X1*X3*(Y1+Y2)+X3*(Y3+Y2)"
PRINTED_OVERRIDES = {3: PRINTED_D3, 4: PRINTED_D4}


@pytest.fixture(scope="session")
def d16():
    return preset("dihedral2", 2, 4)


@pytest.fixture(scope="session")
def ref_tower(d16):
    return build_generic(d16, d_overrides=PRINTED_OVERRIDES)


@pytest.fixture(scope="session")
def canonical_tower(d16):
    return build_generic(d16)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
