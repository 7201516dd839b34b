from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tropgal.catalog import cycle, dihedral, star5, star6, theta_sigma3  # noqa: E402
from tropgal.curve import make_curve  # noqa: E402
from tropgal.group import generate_group, make_automorphism  # noqa: E402


def legs(n: int = 4):
    """Circle of ``n`` unit edges with an infinite leg at every vertex, rotated."""
    c = make_curve(f"L{n}", [(f"e{i}", f"v{i}", f"v{(i + 1) % n}", 1) for i in range(n)]
                   + [(f"l{i}", f"v{i}", f"x{i}", "inf") for i in range(n)])
    vm = {f"v{i}": f"v{(i + 1) % n}" for i in range(n)}
    vm.update({f"x{i}": f"x{(i + 1) % n}" for i in range(n)})
    em = {f"e{i}": (f"e{(i + 1) % n}", False) for i in range(n)}
    em.update({f"l{i}": (f"l{(i + 1) % n}", False) for i in range(n)})
    rot = make_automorphism(c, vm, em, "rot")
    return c, generate_group(c, [rot], name=f"Z{n}")


def galois_corpus():
    """(name, curve, group) for the Galois instances used by the sweeps."""
    out = []
    for ex in (cycle(12), dihedral(4), dihedral(6), cycle(6), cycle(12, "rotation:2"),
               cycle(8, "dihedral")):
        out.append((ex.name, ex.curve, ex.group))
    c, g = legs(4)
    out.append(("legs4", c, g))
    return out


def all_actions():
    """Every action in the corpus, Galois or not."""
    out = list(galois_corpus())
    t, s6, s5 = theta_sigma3(), star6(), star5()
    out += [("theta_S3", t.curve, t.group), ("theta_sigma", t.curve, t.action("sigma")),
            ("star6_G", s6.curve, s6.group), ("star6_H", s6.curve, s6.action("beta")),
            ("star6_gamma", s6.curve, s6.action("gamma")),
            ("star5_G", s5.curve, s5.group), ("star5_gamma", s5.curve, s5.action("gamma"))]
    return out


@pytest.fixture(scope="session")
def corpus():
    return galois_corpus()


@pytest.fixture(scope="session")
def actions():
    return all_actions()


# -- acceptance summary ---------------------------------------------------------------------

ACCEPTANCE: dict = {}


@pytest.fixture
def verdict():
    """Record one acceptance line; the summary prints them in criterion order."""
    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
