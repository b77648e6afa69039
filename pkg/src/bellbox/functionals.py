"""Bell-type functionals in coefficient-table form, and their relabeling group.

A functional is an affine function of a behavior: marginal coefficient
vectors for both parties, an NxN joint block (first index Alice, matching
`BehaviorPoint.joint`), and an integer constant so that every inequality in
this module reads `value <= 0`.  The named families generated here are the
CHSH table and its zero-padded liftings, the tight N-setting family
I_NN22, the machine-resistant variant M_NN22 (same table with Alice's first
marginal strengthened to -(N-1)), and the two auxiliary inequalities
C1/C2 obtained from M_NN22 by no-signaling majorization.

The symmetry group is generated by setting permutations, per-setting output
flips on either side, and the party swap; its order is 2 * (N!)^2 * 2^(2N).
Output flips act affinely, so transforming a functional can pick up a
constant term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .behavior import BehaviorPoint, Scenario


@dataclass(frozen=True)
class BellFunctional:
    """Integer coefficient table with the bound convention `value <= 0`."""

    scenario: Scenario
    alice: tuple
    bob: tuple
    joint: tuple
    constant: int = 0

    def __post_init__(self):
        n = self.scenario.n_settings
        alice = tuple(int(v) for v in self.alice)
        bob = tuple(int(v) for v in self.bob)
        joint = tuple(tuple(int(v) for v in row) for row in self.joint)
        if len(alice) != n or len(bob) != n or len(joint) != n or any(len(r) != n for r in joint):
            raise ValueError("coefficient tables must match the scenario size")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "constant", int(self.constant))

    def evaluate(self, point: BehaviorPoint):
        """Inner product with a behavior plus the constant term.

        The scalar backend of the point decides the result type.
        """
        if point.scenario != self.scenario:
            raise ValueError("functional and behavior live in different scenarios")
        n = self.scenario.n_settings
        total = self.constant
        for i in range(n):
            if self.alice[i]:
                total += self.alice[i] * point.alice[i]
        for j in range(n):
            if self.bob[j]:
                total += self.bob[j] * point.bob[j]
        for i in range(n):
            row_c, row_p = self.joint[i], point.joint[i]
            for j in range(n):
                if row_c[j]:
                    total += row_c[j] * row_p[j]
        if isinstance(total, int):
            total = float(total) if point.backend == "float" else Fraction(total)
        return total

    def coefficient_vector(self) -> tuple:
        """Flat integer vector aligned with `BehaviorPoint.coords()`, then the constant."""
        flat = self.alice + self.bob + tuple(v for row in self.joint for v in row)
        return flat + (self.constant,)

    def table_key(self) -> tuple:
        return (self.constant, self.alice, self.bob, self.joint)


def functional_to_json_dict(f: BellFunctional) -> dict:
    """JSON document mirroring the behavior layout, plus the constant term."""
    return {
        "n": f.scenario.n_settings,
        "alice": list(f.alice),
        "bob": list(f.bob),
        "joint": [list(r) for r in f.joint],
        "constant": f.constant,
    }


def functional_from_json_dict(doc: dict) -> BellFunctional:
    return BellFunctional(
        Scenario(int(doc["n"])),
        tuple(doc["alice"]),
        tuple(doc["bob"]),
        tuple(tuple(r) for r in doc["joint"]),
        int(doc.get("constant", 0)),
    )


def functional_from_rows(alice_header: Sequence[int], rows: Sequence[Sequence[int]], constant: int = 0) -> BellFunctional:
    """Build a functional from the row-per-Bob-setting table layout.

    `rows[j]` is `(bob_coeff_j, joint_with_A0, ..., joint_with_A(N-1))`, the
    layout used for printed tables (Alice marginals as the header row).
    """
    n = len(alice_header)
    bob = tuple(row[0] for row in rows)
    joint = tuple(tuple(rows[j][1 + i] for j in range(n)) for i in range(n))
    return BellFunctional(Scenario(n), tuple(alice_header), bob, joint, constant)


def display_rows(f: BellFunctional) -> list:
    """Inverse of `functional_from_rows`, for table rendering."""
    n = f.scenario.n_settings
    return [[f.bob[j]] + [f.joint[i][j] for i in range(n)] for j in range(n)]


# ---------------------------------------------------------------------------
# Named families


def make_chsh(n: int = 2) -> BellFunctional:
    """The CHSH table, zero-padded ("lifted") into scenarios with n > 2.

    The lifting keeps Alice's settings {0, 1} and moves Bob's pair to
    {1, 2}, which is the standard embedding for three settings; extra
    settings carry zero coefficients.
    """
    if n < 2:
        raise ValueError("CHSH needs at least two settings")
    scenario = Scenario(n)
    alice = tuple(-1 if i == 0 else 0 for i in range(n))
    joint = [[0] * n for _ in range(n)]
    if n == 2:
        bob = (-1, 0)
        joint[0][0] = joint[0][1] = joint[1][0] = 1
        joint[1][1] = -1
    else:
        bob = tuple(-1 if j == 1 else 0 for j in range(n))
        joint[0][1] = joint[1][1] = joint[0][2] = 1
        joint[1][2] = -1
    return BellFunctional(scenario, alice, bob, tuple(map(tuple, joint)))


def make_inn22(n: int) -> BellFunctional:
    """The tight N-setting family: staircase of +1 blocks with -1 on the anti-diagonal."""
    if n < 2:
        raise ValueError("the family starts at two settings")
    alice = tuple(-1 if i == 0 else 0 for i in range(n))
    bob = tuple(-(n - 1 - j) for j in range(n))
    joint = []
    for i in range(n):
        row = []
        for j in range(n):
            if i <= n - 1 - j:
                row.append(1)
            elif j >= 1 and i == n - j:
                row.append(-1)
            else:
                row.append(0)
        joint.append(tuple(row))
    return BellFunctional(Scenario(n), alice, bob, tuple(joint))


def make_mnn22(n: int) -> BellFunctional:
    """Same table as `make_inn22` with Alice's first marginal strengthened to -(n-1).

    The resulting inequality holds for every strategy wired around a single
    (n-1)-input box; no such inequality exists for two settings.
    """
    if n < 3:
        raise ValueError("the machine-resistant family starts at three settings")
    base = make_inn22(n)
    alice = (-(n - 1),) + base.alice[1:]
    return BellFunctional(base.scenario, alice, base.bob, base.joint)


def make_c1(n: int) -> BellFunctional:
    """First majorized form of `make_mnn22`: Bob's first setting dropped."""
    if n < 3:
        raise ValueError("defined for three or more settings")
    base = make_inn22(n)
    alice = (-(n - 2),) + (0,) * (n - 1)
    bob = (0,) + base.bob[1:]
    joint = [list(row) for row in base.joint]
    for i in range(n):
        joint[i][0] = 0
    joint[n - 1][1] = 0
    return BellFunctional(base.scenario, alice, bob, tuple(map(tuple, joint)))


def make_c2(n: int) -> BellFunctional:
    """Second majorized form: Alice's second setting and Bob's last setting dropped."""
    if n < 3:
        raise ValueError("defined for three or more settings")
    base = make_inn22(n)
    alice = (-(n - 2),) + (0,) * (n - 1)
    bob = tuple(-(n - 2 - j) if j <= n - 3 else 0 for j in range(n))
    joint = [list(row) for row in base.joint]
    for j in range(n):
        joint[1][j] = 0
    for i in range(n):
        joint[i][n - 1] = 0
    return BellFunctional(base.scenario, alice, bob, tuple(map(tuple, joint)))


# ---------------------------------------------------------------------------
# Relabeling group


def _check_perm(perm, n):
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of the settings")


@dataclass(frozen=True)
class SymmetryElement:
    """A relabeling: party swap first, then setting permutations and output flips.

    `alice_perm[x]` is the source setting measured at slot x after the
    relabeling, and `alice_flips[x]` says whether that slot's output is
    flipped; likewise for Bob.  These elements form a group of order
    2 * (N!)^2 * 2^(2N).
    """

    alice_perm: tuple
    bob_perm: tuple
    alice_flips: tuple
    bob_flips: tuple
    party_swap: bool = False

    def __post_init__(self):
        n = len(self.alice_perm)
        alice_perm = tuple(int(v) for v in self.alice_perm)
        bob_perm = tuple(int(v) for v in self.bob_perm)
        _check_perm(alice_perm, n)
        _check_perm(bob_perm, n)
        alice_flips = tuple(int(bool(v)) for v in self.alice_flips)
        bob_flips = tuple(int(bool(v)) for v in self.bob_flips)
        if len(alice_flips) != n or len(bob_flips) != n:
            raise ValueError("flip vectors must have one bit per setting")
        object.__setattr__(self, "alice_perm", alice_perm)
        object.__setattr__(self, "bob_perm", bob_perm)
        object.__setattr__(self, "alice_flips", alice_flips)
        object.__setattr__(self, "bob_flips", bob_flips)
        object.__setattr__(self, "party_swap", bool(self.party_swap))

    @property
    def n_settings(self) -> int:
        return len(self.alice_perm)

    @classmethod
    def identity(cls, n: int) -> "SymmetryElement":
        return cls(tuple(range(n)), tuple(range(n)), (0,) * n, (0,) * n, False)

    def apply_to_point(self, point: BehaviorPoint) -> BehaviorPoint:
        n = self.n_settings
        if point.scenario.n_settings != n:
            raise ValueError("scenario mismatch")
        if self.party_swap:
            a1, b1 = point.bob, point.alice
            j1 = tuple(zip(*point.joint))
        else:
            a1, b1, j1 = point.alice, point.bob, point.joint
        sa, sb = self.alice_perm, self.bob_perm
        fa, fb = self.alice_flips, self.bob_flips
        alice = tuple(1 - a1[sa[x]] if fa[x] else a1[sa[x]] for x in range(n))
        bob = tuple(1 - b1[sb[y]] if fb[y] else b1[sb[y]] for y in range(n))
        joint = []
        for x in range(n):
            p = sa[x]
            row = []
            for y in range(n):
                q = sb[y]
                base = j1[p][q]
                if fa[x] and fb[y]:
                    row.append(1 - a1[p] - b1[q] + base)
                elif fa[x]:
                    row.append(b1[q] - base)
                elif fb[y]:
                    row.append(a1[p] - base)
                else:
                    row.append(base)
            joint.append(tuple(row))
        return BehaviorPoint(point.scenario, alice, bob, tuple(joint))

    def apply_to_functional(self, f: BellFunctional) -> BellFunctional:
        """Push a functional forward so that duality holds.

        For every behavior S, `g.apply_to_functional(f).evaluate(S)` equals
        `f.evaluate(g.inverse().apply_to_point(S))`.
        """
        n = self.n_settings
        if f.scenario.n_settings != n:
            raise ValueError("scenario mismatch")
        if self.party_swap:
            a1, b1 = f.bob, f.alice
            c1 = tuple(zip(*f.joint))
        else:
            a1, b1, c1 = f.alice, f.bob, f.joint
        sa, sb = self.alice_perm, self.bob_perm
        fa, fb = self.alice_flips, self.bob_flips
        flipped_a = [x for x in range(n) if fa[x]]
        flipped_b = [y for y in range(n) if fb[y]]
        alice = []
        for x in range(n):
            p = sa[x]
            s = a1[p] + sum(c1[p][sb[y]] for y in flipped_b)
            alice.append(-s if fa[x] else s)
        bob = []
        for y in range(n):
            q = sb[y]
            s = b1[q] + sum(c1[sa[x]][q] for x in flipped_a)
            bob.append(-s if fb[y] else s)
        joint = tuple(
            tuple(
                -c1[sa[x]][sb[y]] if fa[x] != fb[y] else c1[sa[x]][sb[y]]
                for y in range(n)
            )
            for x in range(n)
        )
        constant = (
            f.constant
            + sum(a1[sa[x]] for x in flipped_a)
            + sum(b1[sb[y]] for y in flipped_b)
            + sum(c1[sa[x]][sb[y]] for x in flipped_a for y in flipped_b)
        )
        return BellFunctional(f.scenario, tuple(alice), tuple(bob), joint, constant)

    def compose(self, other: "SymmetryElement") -> "SymmetryElement":
        """The element acting as `other` first, then `self`."""
        n = self.n_settings
        if other.n_settings != n:
            raise ValueError("scenario mismatch")
        if self.party_swap:
            o_a = (other.bob_perm, other.bob_flips)
            o_b = (other.alice_perm, other.alice_flips)
        else:
            o_a = (other.alice_perm, other.alice_flips)
            o_b = (other.bob_perm, other.bob_flips)
        sa = tuple(o_a[0][self.alice_perm[x]] for x in range(n))
        fa = tuple(self.alice_flips[x] ^ o_a[1][self.alice_perm[x]] for x in range(n))
        sb = tuple(o_b[0][self.bob_perm[y]] for y in range(n))
        fb = tuple(self.bob_flips[y] ^ o_b[1][self.bob_perm[y]] for y in range(n))
        return SymmetryElement(sa, sb, fa, fb, self.party_swap ^ other.party_swap)

    def inverse(self) -> "SymmetryElement":
        n = self.n_settings
        inv_a = [0] * n
        inv_b = [0] * n
        for x in range(n):
            inv_a[self.alice_perm[x]] = x
            inv_b[self.bob_perm[x]] = x
        fa = tuple(self.alice_flips[inv_a[x]] for x in range(n))
        fb = tuple(self.bob_flips[inv_b[y]] for y in range(n))
        if self.party_swap:
            return SymmetryElement(tuple(inv_b), tuple(inv_a), fb, fa, True)
        return SymmetryElement(tuple(inv_a), tuple(inv_b), fa, fb, False)


def transform(f: BellFunctional, g: SymmetryElement) -> BellFunctional:
    return g.apply_to_functional(f)


def transform_point(point: BehaviorPoint, g: SymmetryElement) -> BehaviorPoint:
    return g.apply_to_point(point)


def group_order(n: int) -> int:
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    return 2 * fact * fact * (2 ** (2 * n))


def group_generators(n: int) -> list:
    """Adjacent setting transpositions, single output flips, and the party swap."""
    ident = tuple(range(n))
    zeros = (0,) * n
    gens = [SymmetryElement(ident, ident, zeros, zeros, True)]
    for k in range(n - 1):
        t = list(ident)
        t[k], t[k + 1] = t[k + 1], t[k]
        gens.append(SymmetryElement(tuple(t), ident, zeros, zeros, False))
        gens.append(SymmetryElement(ident, tuple(t), zeros, zeros, False))
    for k in range(n):
        flip = tuple(1 if i == k else 0 for i in range(n))
        gens.append(SymmetryElement(ident, ident, flip, zeros, False))
        gens.append(SymmetryElement(ident, ident, zeros, flip, False))
    return gens


def random_element(n: int, rng) -> SymmetryElement:
    sa = list(range(n))
    sb = list(range(n))
    rng.shuffle(sa)
    rng.shuffle(sb)
    fa = tuple(rng.randrange(2) for _ in range(n))
    fb = tuple(rng.randrange(2) for _ in range(n))
    return SymmetryElement(tuple(sa), tuple(sb), fa, fb, bool(rng.randrange(2)))


def orbit(f: BellFunctional) -> set:
    """Closure of {f} under the full relabeling group (party swap included)."""
    gens = group_generators(f.scenario.n_settings)
    seen = {f}
    frontier = [f]
    while frontier:
        nxt = []
        for g in frontier:
            for gen in gens:
                h = gen.apply_to_functional(g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def canonical_form(f: BellFunctional) -> BellFunctional:
    """Lexicographically smallest table in the orbit; equal iff equivalent."""
    return min(orbit(f), key=BellFunctional.table_key)
