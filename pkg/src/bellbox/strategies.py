"""Local deterministic strategies and wirings around a single non-local box.

Each party picks, per setting, one option from the alphabet
{det(0), det(1), machine(k), machine_flipped(k)} with k ranging over the
box inputs; serialized option names are "0d", "1d", "km", "kmf".
Options are encoded as integers in the canonical tie-breaking order
0d < 1d < 0m < 0mf < 1m < 1mf < ..., which also fixes enumeration order.

The exact maximizer exploits that a behavior entry at settings (i, j)
depends only on the two per-setting choices, so for a fixed Alice choice
vector each of Bob's settings can be optimized independently.  This turns
the (2+2K)^(2N) product search into (2+2K)^N * N * (2+2K) evaluations,
all in integer half-units.  Shared randomness never helps a linear
objective, so searching pure wirings is exhaustive for the strategy class.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .behavior import BehaviorPoint, Scenario, from_half_units
from .functionals import BellFunctional
from .machines import MachineSpec

DEFAULT_SETTING_CAP = 6

OPT_DET0 = 0
OPT_DET1 = 1


class CapExceededError(ValueError):
    """Enumeration would be too large; pass an explicit `cap` to override."""


def opt_machine(k: int, flip: bool = False) -> int:
    return 2 + 2 * k + (1 if flip else 0)


def option_name(code: int) -> str:
    if code == OPT_DET0:
        return "0d"
    if code == OPT_DET1:
        return "1d"
    k, flip = divmod(code - 2, 2)
    return f"{k}m" + ("f" if flip else "")


def option_code(name: str) -> int:
    if name == "0d":
        return OPT_DET0
    if name == "1d":
        return OPT_DET1
    m = re.fullmatch(r"(\d+)m(f?)", name)
    if not m:
        raise ValueError(f"unknown option name {name!r}")
    return opt_machine(int(m.group(1)), bool(m.group(2)))


def alphabet_size(machine: MachineSpec | None) -> int:
    return 2 if machine is None else 2 + 2 * machine.n_inputs


@dataclass(frozen=True)
class WiringStrategy:
    """Per-setting option choices for both parties around at most one box."""

    machine: MachineSpec | None
    alice: tuple
    bob: tuple

    def __post_init__(self):
        alice = tuple(int(c) for c in self.alice)
        bob = tuple(int(c) for c in self.bob)
        if len(alice) != len(bob):
            raise ValueError("both parties choose for the same number of settings")
        limit = alphabet_size(self.machine)
        for c in alice + bob:
            if not 0 <= c < limit:
                raise ValueError(f"choice code {c} outside the option alphabet")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    @property
    def n_settings(self) -> int:
        return len(self.alice)

    def uses_machine(self) -> bool:
        return any(c >= 2 for c in self.alice + self.bob)


def strategy_to_json_dict(s: WiringStrategy) -> dict:
    from .machines import machine_to_json_dict

    return {
        "machine": None if s.machine is None else machine_to_json_dict(s.machine),
        "alice": [option_name(c) for c in s.alice],
        "bob": [option_name(c) for c in s.bob],
    }


def strategy_from_json_dict(doc: dict) -> WiringStrategy:
    from .machines import machine_from_json_dict

    machine = None if doc["machine"] is None else machine_from_json_dict(doc["machine"])
    return WiringStrategy(
        machine,
        tuple(option_code(c) for c in doc["alice"]),
        tuple(option_code(c) for c in doc["bob"]),
    )


# ---------------------------------------------------------------------------
# Behavior entry rules, tabulated in integer half-units (probability * 2)


def _marginal_halves(n_options: int) -> np.ndarray:
    out = np.ones(n_options, dtype=np.int64)
    out[OPT_DET0] = 2
    out[OPT_DET1] = 0
    return out


def _joint_halves(machine: MachineSpec | None) -> np.ndarray:
    a = alphabet_size(machine)
    table = np.zeros((a, a), dtype=np.int64)
    for ca in range(a):
        for cb in range(a):
            if ca < 2 and cb < 2:
                table[ca, cb] = 2 if (ca == OPT_DET0 and cb == OPT_DET0) else 0
            elif ca < 2:
                table[ca, cb] = 1 if ca == OPT_DET0 else 0
            elif cb < 2:
                table[ca, cb] = 1 if cb == OPT_DET0 else 0
            else:
                ka, fa = divmod(ca - 2, 2)
                kb, fb = divmod(cb - 2, 2)
                anti = machine.anticorrelates(ka, kb)
                table[ca, cb] = 1 if (fa ^ fb) == (1 if anti else 0) else 0
    return table


def behavior_half_vector(s: WiringStrategy) -> tuple:
    """Flat half-unit coordinates of the induced behavior (alice, bob, joint)."""
    marg = _marginal_halves(alphabet_size(s.machine))
    joint = _joint_halves(s.machine)
    n = s.n_settings
    out = [int(marg[c]) for c in s.alice]
    out += [int(marg[c]) for c in s.bob]
    for ca in s.alice:
        for cb in s.bob:
            out.append(int(joint[ca, cb]))
    return tuple(out)


def strategy_behavior(s: WiringStrategy) -> BehaviorPoint:
    """Exact behavior induced by a wiring strategy.

    Deterministic options pin marginals to 0/1; any machine option gives a
    uniform marginal.  A joint entry is 1/2 exactly when the two (possibly
    flipped) box outputs can agree on 0, i.e. when the net flip parity
    matches the box's correlation on the chosen input pair.
    """
    return from_half_units(Scenario(s.n_settings), behavior_half_vector(s))


def deterministic_point(scenario: Scenario, alice_outputs: Sequence[int], bob_outputs: Sequence[int]) -> BehaviorPoint:
    """The local vertex where each party always outputs the given bit per setting."""
    n = scenario.n_settings
    if len(alice_outputs) != n or len(bob_outputs) != n:
        raise ValueError("need one output bit per setting")
    a = tuple(1 - int(u) for u in alice_outputs)
    b = tuple(1 - int(v) for v in bob_outputs)
    joint = tuple(tuple(a[i] * b[j] for j in range(n)) for i in range(n))
    return BehaviorPoint(scenario, a, b, joint)


def _check_cap(n: int, cap: int | None):
    cap = DEFAULT_SETTING_CAP if cap is None else cap
    if n > cap:
        raise CapExceededError(
            f"enumeration at {n} settings exceeds the cap {cap}; pass cap={n} to override"
        )


def enumerate_local(scenario: Scenario, cap: int | None = None) -> list:
    """All 4^N deterministic behaviors, in output lexicographic order."""
    n = scenario.n_settings
    _check_cap(n, cap)
    points = []
    for u in itertools.product((0, 1), repeat=n):
        for v in itertools.product((0, 1), repeat=n):
            points.append(deterministic_point(scenario, u, v))
    return points


def enumerate_one_machine(scenario: Scenario, machine: MachineSpec, cap: int | None = None) -> Iterator[WiringStrategy]:
    """All (2+2K)^N x (2+2K)^N wiring strategies, deterministic subset included."""
    n = scenario.n_settings
    _check_cap(n, cap)
    codes = range(alphabet_size(machine))
    for alice in itertools.product(codes, repeat=n):
        for bob in itertools.product(codes, repeat=n):
            yield WiringStrategy(machine, alice, bob)


# ---------------------------------------------------------------------------
# Exact decoupled maximization


def _code_vectors(n: int, a: int) -> np.ndarray:
    """All a^n choice vectors as rows, in lexicographic (big-endian) order."""
    count = a**n
    codes = np.arange(count, dtype=np.int64)
    out = np.empty((count, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[:, i] = codes % a
        codes //= a
    return out


class _DecoupledMax:
    """Numpy workspace for the Alice-outer / Bob-per-setting-inner maximization."""

    def __init__(self, f: BellFunctional, machine: MachineSpec, vector_cap: int = 2_000_000):
        n = f.scenario.n_settings
        a = alphabet_size(machine)
        if a**n > vector_cap:
            raise CapExceededError(
                f"{a}^{n} Alice choice vectors exceed the optimizer cap {vector_cap}"
            )
        self.f = f
        self.machine = machine
        self.n = n
        self.a = a
        marg = _marginal_halves(a)
        joint = _joint_halves(machine)
        avec = _code_vectors(n, a)
        acoef = np.asarray(f.alice, dtype=np.int64)
        bcoef = np.asarray(f.bob, dtype=np.int64)
        ccoef = np.asarray(f.joint, dtype=np.int64)
        alice_part = marg[avec] @ acoef + 2 * f.constant
        gathered = joint[avec]  # (S, n, a): half-units for each Bob option
        term = np.einsum("sia,ij->sja", gathered, ccoef)
        term += (bcoef[:, None] * marg[None, :])[None, :, :]
        best = term.max(axis=2)
        self.avec = avec
        self.term = term
        self.best = best
        self.total = alice_part + best.sum(axis=1)
        self.max2 = int(self.total.max())

    @property
    def value(self) -> Fraction:
        return Fraction(self.max2, 2)

    def witness(self) -> WiringStrategy:
        s = int(np.argmax(self.total))
        alice = tuple(int(c) for c in self.avec[s])
        bob = tuple(int(np.argmax(self.term[s, j])) for j in range(self.n))
        return WiringStrategy(self.machine, alice, bob)

    def iter_attaining(self) -> Iterator[WiringStrategy]:
        """All strategies attaining the maximum.

        Complete only for the maximum itself: a maximizer must be optimal in
        every Bob column, so the per-column argmax product covers them all.
        """
        for s in np.flatnonzero(self.total == self.max2):
            alice = tuple(int(c) for c in self.avec[s])
            options = [
                np.flatnonzero(self.term[s, j] == self.best[s, j]) for j in range(self.n)
            ]
            for bob in itertools.product(*options):
                yield WiringStrategy(self.machine, alice, tuple(int(c) for c in bob))


@dataclass(frozen=True)
class OneMachineMaximum:
    value: Fraction
    witness: WiringStrategy
    saturating: tuple
    truncated: bool


def max_over_one_machine(
    f: BellFunctional,
    machine: MachineSpec,
    collect_cap: int = 200_000,
) -> OneMachineMaximum:
    """Exact maximum of `f` over all strategies using at most one `machine`.

    Returns the value, the lexicographically first witness, and every
    strategy attaining the maximum up to `collect_cap` (the `truncated`
    flag says whether the cap was hit).
    """
    state = _DecoupledMax(f, machine)
    saturating = []
    truncated = False
    for s in state.iter_attaining():
        if len(saturating) >= collect_cap:
            truncated = True
            break
        saturating.append(s)
    return OneMachineMaximum(state.value, state.witness(), tuple(saturating), truncated)


def _pareto_prune(pairs):
    pairs.sort(key=lambda p: (-p[0], -p[1]))
    kept = []
    best_v = None
    for u, v in pairs:
        if best_v is None or v > best_v:
            kept.append((u, v))
            best_v = v
    return kept


def max_min_over_one_machine(f: BellFunctional, g: BellFunctional, machine: MachineSpec) -> Fraction:
    """Exact max over one-machine strategies of min(f, g).

    Per Alice vector, the reachable (f, g) value pairs form a Minkowski sum
    of per-setting option sets; a Pareto frontier sweep keeps this exact
    without enumerating Bob's full product space.
    """
    if f.scenario != g.scenario:
        raise ValueError("functionals live in different scenarios")
    sf = _DecoupledMax(f, machine)
    sg = _DecoupledMax(g, machine)
    n, a = sf.n, sf.a
    marg = _marginal_halves(a)
    af = np.asarray(f.alice, dtype=np.int64)
    ag = np.asarray(g.alice, dtype=np.int64)
    part_f = marg[sf.avec] @ af + 2 * f.constant
    part_g = marg[sf.avec] @ ag + 2 * g.constant
    best2 = None
    for s in range(sf.avec.shape[0]):
        frontier = [(0, 0)]
        for j in range(n):
            tf = sf.term[s, j]
            tg = sg.term[s, j]
            frontier = _pareto_prune(
                [(u + int(tf[c]), v + int(tg[c])) for u, v in frontier for c in range(a)]
            )
        base_f, base_g = int(part_f[s]), int(part_g[s])
        cand = max(min(base_f + u, base_g + v) for u, v in frontier)
        if best2 is None or cand > best2:
            best2 = cand
    return Fraction(best2, 2)
