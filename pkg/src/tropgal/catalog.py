"""Built-in example curves and actions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .curve import Curve, make_curve
from .errors import UnknownExample
from .group import ActionGroup, Automorphism, Subgroup, edge_permutation, generate_group, \
    make_automorphism


@dataclass
class Example:
    name: str
    curve: Curve
    group: ActionGroup
    elements: dict = field(default_factory=dict)  # named automorphisms
    description: str = ""

    def subgroup(self, *names: str, label: str = "") -> Subgroup:
        return self.group.subgroup([self.elements[n] for n in names], label)

    def action(self, *names: str, label: str = "") -> ActionGroup:
        """A separate action generated by named elements (possibly outside ``group``)."""
        return generate_group(self.curve, [self.elements[n] for n in names],
                              name=label or "<" + ",".join(names) + ">")


def theta_curve(length=1) -> Curve:
    return make_curve("theta", [(f"e{i}", "u", "w", length) for i in (1, 2, 3)])


def theta_sigma3() -> Example:
    c = theta_curve()
    sigma = edge_permutation(c, [["e1", "e2", "e3"]], "sigma")
    tau = edge_permutation(c, [["e2", "e3"]], "tau")
    swap12 = edge_permutation(c, [["e1", "e2"]], "swap12")
    g = generate_group(c, [sigma, tau], name="S3")
    return Example("theta_sigma3", c, g, {"sigma": sigma, "tau": tau, "swap12": swap12},
                   "theta graph with unit edges and the symmetric group on its edges")


def star_curve(k: int) -> Curve:
    return make_curve(f"S{k}", [(f"e{i}", "c", f"l{i}", 1) for i in range(1, k + 1)])


def star6() -> Example:
    c = star_curve(6)
    sigma = edge_permutation(c, [["e1", "e2"]], "sigma")
    beta = edge_permutation(c, [["e3", "e4", "e5", "e6"]], "beta")
    gamma = edge_permutation(c, [[f"e{i}" for i in range(1, 7)]], "gamma")
    beta2 = beta * beta
    sigma_beta2 = sigma * beta2
    g = generate_group(c, [sigma, beta], name="G")
    return Example("star6", c, g,
                   {"sigma": sigma, "beta": beta, "gamma": gamma, "beta2": beta2,
                    "sigma_beta2": sigma_beta2},
                   "star K_{1,6} with <(e1 e2), (e3 e4 e5 e6)>")


def star5() -> Example:
    c = star_curve(5)
    sigma = edge_permutation(c, [["e1", "e2"]], "sigma")
    beta = edge_permutation(c, [["e3", "e4", "e5"]], "beta")
    gamma = edge_permutation(c, [[f"e{i}" for i in range(1, 6)]], "gamma")
    g = generate_group(c, [sigma, beta], name="G")
    return Example("star5", c, g, {"sigma": sigma, "beta": beta, "gamma": gamma},
                   "star K_{1,5} with <(e1 e2), (e3 e4 e5)>")


def cycle_curve(n: int, length=1) -> Curve:
    return make_curve(f"C{n}", [(f"e{i}", f"v{i}", f"v{(i + 1) % n}", length)
                                for i in range(n)])


def rotation(c: Curve, n: int, k: int = 1) -> Automorphism:
    return make_automorphism(c, {f"v{i}": f"v{(i + k) % n}" for i in range(n)},
                             {f"e{i}": (f"e{(i + k) % n}", False) for i in range(n)},
                             f"rot{k}")


def reflection(c: Curve, n: int) -> Automorphism:
    """``v_i -> v_{-i}``; edge ``e_i`` goes to ``e_{-i-1}`` reversed."""
    return make_automorphism(c, {f"v{i}": f"v{(-i) % n}" for i in range(n)},
                             {f"e{i}": (f"e{(-i - 1) % n}", True) for i in range(n)}, "ref")


def cycle(n: int, group: str = "rotation") -> Example:
    """Circle with ``n`` unit edges.

    ``group`` is ``rotation`` (cyclic of order n), ``dihedral`` (order 2n),
    ``rotation:k`` (rotations by multiples of n/k, order k) or ``trivial``.
    """
    if n < 2:
        raise UnknownExample("cycle needs at least 2 vertices")
    c = cycle_curve(n)
    rot, ref = rotation(c, n), reflection(c, n)
    elements = {"rot": rot, "ref": ref}
    if group == "rotation":
        gens, name = [rot], f"Z{n}"
    elif group == "dihedral":
        gens, name = [rot, ref], f"D{n}"
    elif group == "trivial":
        gens, name = [], "1"
    elif group.startswith("rotation:"):
        k = int(group.split(":", 1)[1])
        if k <= 0 or n % k:
            raise UnknownExample(f"rotation subgroup of order {k} does not divide {n}")
        step = rotation(c, n, n // k)
        elements["step"] = step
        gens, name = [step], f"Z{k}"
    else:
        raise UnknownExample(f"unknown cycle group {group!r}")
    g = generate_group(c, gens, name=name)
    return Example(f"cycle{n}_{group}", c, g, elements, f"circle with {n} unit edges, {name}")


def dihedral(n: int) -> Example:
    return cycle(n, "dihedral")


CATALOG = {
    "theta_sigma3": lambda *a: theta_sigma3(),
    "star6": lambda *a: star6(),
    "star5": lambda *a: star5(),
    "cycle": lambda n="12", group="rotation", *a: cycle(int(n), group),
    "dihedral": lambda n="4", *a: dihedral(int(n)),
}


def build_example(name: str, *params: str) -> Example:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose from {sorted(CATALOG)}") from None
    try:
        return factory(*params)
    except (TypeError, ValueError) as exc:
        raise UnknownExample(f"bad parameters for {name}: {exc}") from None
