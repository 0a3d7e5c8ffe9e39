import numpy as np
import pytest

from gaussmpo import Species


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=[Species.BOSONIC, Species.FERMIONIC], ids=["boson", "fermion"])
def species(request):
    return request.param


def haar_unitary(n, rng):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# acceptance verdicts, one entry per clause, reported after the run
ACCEPTANCE = {}


def record(criterion, clause, ok, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((clause, bool(ok), detail))
    line = f"{criterion} {clause}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE, key=lambda c: int(c[2:])):
        clauses = ACCEPTANCE[criterion]
        failed = [c for c in clauses if not c[1]]
        verdict = "PASS" if not failed else "FAIL"
        summary = "; ".join(f"{name} {detail}".strip() for name, _, detail in (failed or clauses))
        tr.write_line(f"{criterion} {verdict}  {summary}")
