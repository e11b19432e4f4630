"""Character combinatorics over Z/(p-1) deciding the Galois-image criterion.

A surjection onto the pro-p Iwahori with the right torus action exists iff
the simple roots and the negated highest root can be sent to pairwise
distinct characters of a cyclic group of order p-1, odd (or trivial when
the cocharacter basis is empty), whose weighted product vanishes.  The
weights are the highest-root coefficients, so everything reduces to exact
arithmetic mod p-1 plus a regularity test for p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import RejectionError, ResourceLimitError
from .generators import is_multiplicity_free
from .rootdata import build_root_system, is_odd_prime, pro_p_cochar_basis

SEARCH_NODE_BUDGET = 2_000_000
REGULARITY_GUARD = 10_000


@dataclass(frozen=True)
class CharacterPool:
    """Characters of a cyclic group of order p-1 as residues; odd means odd residue."""

    p: int
    odd: tuple
    allowed: tuple
    s_empty: bool

    @property
    def modulus(self):
        return self.p - 1

    @property
    def trivial(self):
        return 0


def character_pool(rd, p):
    """Odd characters, plus the trivial one exactly when the cocharacter basis is empty."""
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    odd = tuple(range(1, p - 1, 2))
    s_empty = len(pro_p_cochar_basis(rd, p)) == 0
    allowed = tuple(sorted(odd + (0,))) if s_empty else odd
    return CharacterPool(p, odd, allowed, s_empty)


@dataclass(frozen=True)
class CharacterAssignment:
    """phis[:-1] for the simple roots, phis[-1] for the negated highest root."""

    p: int
    highest_coeffs: tuple
    phis: tuple

    def validate(self, allowed=None):
        modulus = self.p - 1
        if len(self.phis) != len(self.highest_coeffs) + 1:
            raise AssertionError("assignment length mismatch")
        if len(set(self.phis)) != len(self.phis):
            raise AssertionError("characters are not pairwise distinct")
        pool = set(allowed) if allowed is not None else set(range(1, modulus, 2)) | {0}
        if not set(self.phis) <= pool:
            raise AssertionError("character outside the allowed set")
        total = sum(n * v for n, v in zip(self.highest_coeffs, self.phis)) + self.phis[-1]
        if total % modulus:
            raise AssertionError("weighted product is not the trivial character")
        return True

    def to_dict(self):
        return {
            "p": self.p,
            "highest_coeffs": list(self.highest_coeffs),
            "phis": list(self.phis),
        }


@lru_cache(maxsize=None)
def _highest_coeffs(type_label, rank):
    rs = build_root_system(type_label, rank)
    return rs.highest_root(0).coeffs


def threshold_constant(type_label, rank, p_mod4=None):
    """Smallest admissible prime bound for the constructive assignments.

    Exceptional types use sum (2i-1) n_i + 2l computed from the built root
    system; classical types are 2l+3 or 2l+5 according to p mod 4.
    """
    if type_label in ("E", "F", "G"):
        n = _highest_coeffs(type_label, rank)
        return sum((2 * i + 1) * c for i, c in enumerate(n)) + 2 * rank
    if type_label in ("A", "B", "C", "D"):
        if p_mod4 not in (1, 3):
            raise RejectionError("classical thresholds depend on p mod 4")
        return 2 * rank + 3 if p_mod4 == 1 else 2 * rank + 5
    raise RejectionError(f"unknown type label {type_label!r}")


def _pairs(p):
    """Distinct inverse pairs {chi, chi^{-1}} of odd characters, canonically ordered."""
    out = []
    a = 1
    while a < (p - 1) - a:
        out.append((a, p - 1 - a))
        a += 2
    return out


def constructive_assignment(type_label, rank, p):
    """The explicit assignments: inverse pairs for classical types, the odd
    arithmetic progression 2i-1 for exceptional ones.

    At the single boundary prime p = sum (2i-1) n_i + 2l the progression's
    forced last character collides with 2l-1, so that case falls back to
    the lexicographically smallest valid tuple.
    """
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    n = _highest_coeffs(type_label, rank)
    l = rank
    if type_label in ("E", "F", "G"):
        c = threshold_constant(type_label, rank)
        if p < c:
            raise RejectionError(
                f"p = {p} below the constructive bound {c}; use search_assignment"
            )
        r = sum((2 * i + 1) * ni for i, ni in enumerate(n))
        phis = tuple(2 * i + 1 for i in range(l)) + ((-r) % (p - 1),)
        if len(set(phis)) != len(phis):
            odd = tuple(range(1, p - 1, 2))
            found = _search(n, p, odd)
            if found is None:
                raise AssertionError("no odd assignment at an admissible prime")
            phis = found
        out = CharacterAssignment(p, n, phis)
        out.validate()
        return out
    if type_label not in ("A", "B", "C", "D"):
        raise RejectionError(f"unknown type label {type_label!r}")
    c = threshold_constant(type_label, rank, p % 4)
    if p < c:
        raise RejectionError(
            f"p = {p} below the constructive bound {c}; use search_assignment"
        )
    pairs = _pairs(p)
    phis = [None] * (l + 1)

    def put_pair(slot_a, slot_b):
        a, b = pairs.pop(0)
        phis[slot_a] = a
        phis[slot_b] = b

    if type_label == "A":
        if l % 2 == 0:
            for i in range(0, l, 2):
                put_pair(i, i + 1)
            phis[l] = 0
        else:
            for i in range(0, l + 1, 2):
                put_pair(i, i + 1)
    elif type_label == "B":
        if l % 2 == 1:
            put_pair(0, l)
            for i in range(1, l, 2):
                put_pair(i, i + 1)
        else:
            phis[1] = 0
            put_pair(0, l)
            for i in range(2, l, 2):
                put_pair(i, i + 1)
    elif type_label == "C":
        if l % 2 == 1:
            put_pair(l - 1, l)
            for i in range(0, l - 1, 2):
                put_pair(i, i + 1)
        else:
            phis[0] = 0
            put_pair(l - 1, l)
            for i in range(1, l - 1, 2):
                put_pair(i, i + 1)
    else:  # D
        if l % 2 == 1:
            put_pair(l - 2, l - 1)
            put_pair(0, l)
            for i in range(1, l - 2, 2):
                put_pair(i, i + 1)
        else:
            phis[1] = 0
            put_pair(0, l - 2)
            put_pair(l - 1, l)
            for i in range(2, l - 2, 2):
                put_pair(i, i + 1)
    out = CharacterAssignment(p, n, tuple(phis))
    out.validate()
    return out


def _search(n_coeffs, p, allowed, node_budget=SEARCH_NODE_BUDGET):
    l = len(n_coeffs)
    modulus = p - 1
    values = sorted(allowed)
    value_set = set(values)
    if l + 1 > len(values):
        return None
    used = [False] * (modulus + 1)
    phis = []
    nodes = 0

    def dfs(pos, acc):
        nonlocal nodes
        if pos == l:
            last = (-acc) % modulus
            if last in value_set and not used[last]:
                phis.append(last)
                return True
            return False
        for v in values:
            if used[v]:
                continue
            nodes += 1
            if nodes > node_budget:
                raise ResourceLimitError("assignment search budget exceeded", count=nodes)
            used[v] = True
            phis.append(v)
            if dfs(pos + 1, (acc + n_coeffs[pos] * v) % modulus):
                return True
            used[v] = False
            phis.pop()
        return False

    return tuple(phis) if dfs(0, 0) else None


def search_assignment(type_label, rank, p, allowed=None):
    """Exhaustive backtracking witness, or None; first hit is the tuple with
    the lexicographically smallest prefix over the sorted allowed set."""
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    if rank > 8:
        raise RejectionError("search is guarded at rank <= 8")
    n = _highest_coeffs(type_label, rank)
    if allowed is None:
        allowed = tuple(range(1, p - 1, 2)) + (0,)
    found = _search(n, p, allowed)
    if found is None:
        return None
    out = CharacterAssignment(p, n, found)
    out.validate(allowed)
    return out


# --- regular primes -----------------------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli_even(kmax):
    """B_0, B_2, ..., B_{2 kmax} as exact Fractions (even indices only)."""
    out = [Fraction(1)]
    for m in range(1, kmax + 1):
        n = 2 * m
        s = Fraction(n + 1, -2)  # the B_1 = -1/2 term of the recurrence
        for j in range(m):
            s += comb(n + 1, 2 * j) * out[j]
        out.append(-s / (n + 1))
    return out


def bernoulli_number(m):
    """Exact B_m for even m >= 0 (first-kind convention; even values agree in both)."""
    if m % 2 or m < 0:
        raise RejectionError("even nonnegative index required")
    return _bernoulli_even(m // 2)[m // 2]


def irregular_indices_exact(p):
    """Even 2k <= p-3 with p dividing the numerator of B_{2k}, by exact fractions."""
    out = []
    for m in range(2, p - 2, 2):
        if bernoulli_number(m).numerator % p == 0:
            out.append(m)
    return out


def irregular_indices_modp2(p):
    """Same set via power sums: p | numerator(B_m) iff sum_{a<p} a^m = 0 mod p^2."""
    p2 = p * p
    ms = list(range(2, p - 2, 2))
    sums = {m: 0 for m in ms}
    for a in range(1, p):
        sq = a * a % p2
        cur = sq
        for m in ms:
            sums[m] = (sums[m] + cur) % p2
            cur = cur * sq % p2
    return [m for m in ms if sums[m] == 0]


def is_regular_prime(p, method="modp2"):
    """Whether odd p divides no numerator of B_2, ..., B_{p-3}."""
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    if p > REGULARITY_GUARD:
        raise RejectionError(f"regularity test guarded at p <= {REGULARITY_GUARD}")
    if method == "modp2":
        return not irregular_indices_modp2(p)
    if method == "exact":
        return not irregular_indices_exact(p)
    if method == "both":
        a = irregular_indices_modp2(p)
        b = irregular_indices_exact(p)
        if a != b:
            raise AssertionError(f"regularity methods disagree at p = {p}: {a} vs {b}")
        return not a
    raise RejectionError(f"unknown method {method!r}")


# --- the criterion --------------------------------------------------------------


@dataclass(frozen=True)
class CriterionReport:
    type_label: str
    rank: int
    p: int
    b_condition: bool
    s_empty: bool
    assignment: CharacterAssignment | None
    satisfied: bool
    threshold: int
    regular: bool | None = None
    note: str = ""

    def to_dict(self):
        return {
            "type": self.type_label,
            "rank": self.rank,
            "p": self.p,
            "b_condition": self.b_condition,
            "s_empty": self.s_empty,
            "witness": None if self.assignment is None else self.assignment.to_dict(),
            "satisfied": self.satisfied,
            "threshold": self.threshold,
            "regular": self.regular,
            "note": self.note,
        }


def evaluate_criterion(rd, p, check_regular=False):
    """Decide the character criterion for a simple adjoint datum at odd p.

    Runs the constructive assignment when its bound admits p, otherwise the
    exhaustive search over the allowed set; attaches the regularity flag on
    request.
    """
    if len(rd.rs.components) != 1:
        raise RejectionError("the criterion is stated for simple groups")
    if rd.preset != "adjoint":
        raise RejectionError("the criterion is stated for the adjoint datum")
    type_label, rank = rd.rs.components[0]
    threshold = threshold_constant(
        type_label, rank, p % 4 if type_label in ("A", "B", "C", "D") else None
    )
    regular = is_regular_prime(p) if check_regular else None
    b_ok = is_multiplicity_free(rd, p)
    if not b_ok:
        return CriterionReport(
            type_label, rank, p, False, len(pro_p_cochar_basis(rd, p)) == 0,
            None, False, threshold, regular,
            note="the Frattini module is not multiplicity free at this prime",
        )
    pool = character_pool(rd, p)
    assignment = None
    try:
        cand = constructive_assignment(type_label, rank, p)
        cand.validate(pool.allowed)
        assignment = cand
    except (RejectionError, AssertionError):
        assignment = None
    if assignment is None:
        assignment = search_assignment(type_label, rank, p, pool.allowed)
    return CriterionReport(
        type_label, rank, p, True, pool.s_empty, assignment,
        assignment is not None, threshold, regular,
    )
