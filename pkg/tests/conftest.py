import pytest

from sparsejt import DenseTable, Domain, from_dense, load_asia

XYZ = Domain(["X", "Y", "Z"], [["x1", "x2"], ["y1", "y2"], ["z1", "z2"]])
YZW = Domain(["Y", "Z", "W"], [["y1", "y2"], ["z1", "z2"], ["w1", "w2"]])

# Flat layouts with the first variable varying fastest.
F_VALUES = [5, 4, 0, 7, 0, 9, 0, 0]
G_VALUES = [7, 6, 0, 6, 0, 0, 9, 0]


@pytest.fixture
def dense_f():
    return DenseTable(XYZ, F_VALUES)


@pytest.fixture
def dense_g():
    return DenseTable(YZW, G_VALUES)


@pytest.fixture
def sf(dense_f):
    return from_dense(dense_f)


@pytest.fixture
def sg(dense_g):
    return from_dense(dense_g)


@pytest.fixture(scope="session")
def asia():
    return load_asia()


# One PASS/FAIL line per acceptance criterion, repeated in the terminal summary.
ACCEPTANCE_RESULTS: list[str] = []


class CriterionRecorder:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        extra = "; ".join(self.details)
        if exc_type is not None:
            extra = (extra + "; " if extra else "") + f"{exc_type.__name__}: {exc}".splitlines()[0]
        line = f"criterion {self.number:>2} {status}: {self.title}" + (f" ({extra})" if extra else "")
        ACCEPTANCE_RESULTS.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    return CriterionRecorder


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
