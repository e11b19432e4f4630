"""Minimal topological generator sets and the Frattini character module.

For a split root datum and an odd prime p the pro-p Iwahori subgroup is
topologically generated by four families: semisimple elements s(1+p) for s
in a cocharacter basis of the lattice quotient, the simple unipotents
x_alpha(1), one lowest unipotent x_{-alpha_max}(p) per component, and, when
p = 3, x_delta(1) for the sum of the two simple roots of each G2 component.
The induced eigenbasis of the Frattini quotient is recorded as a multiset
of characters of the adjoint torus torsion, i.e. vectors mod p - 1 over the
simple-root basis of the root lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RejectionError
from .rootdata import is_odd_prime, pro_p_cochar_basis


@dataclass(frozen=True)
class GenDesc:
    """One generator: kind "unipotent" (vec = global simple-root coefficients,
    arg "1" or "p") or "semisimple" (vec = M-dual coordinates, arg "1+p")."""

    kind: str
    vec: tuple
    arg: str

    def to_dict(self):
        if self.kind == "unipotent":
            return {"kind": "unipotent", "root": list(self.vec), "arg": self.arg}
        return {"kind": "semisimple", "cochar": list(self.vec), "arg": self.arg}

    @staticmethod
    def from_dict(doc):
        if doc["kind"] == "unipotent":
            return GenDesc("unipotent", tuple(doc["root"]), doc["arg"])
        return GenDesc("semisimple", tuple(doc["cochar"]), doc["arg"])


@dataclass(frozen=True)
class GeneratorSpec:
    semisimple: tuple
    simple_unipotents: tuple
    lowest_unipotents: tuple
    g2_extras: tuple

    def all_descriptors(self):
        return self.semisimple + self.simple_unipotents + self.lowest_unipotents + self.g2_extras

    @property
    def count(self):
        return len(self.all_descriptors())

    def to_dict(self):
        return {"generators": [d.to_dict() for d in self.all_descriptors()]}


def _global_vec(rs, root):
    off = rs.rank_offset(root.component)
    g = [0] * rs.total_rank
    for i, c in enumerate(root.coeffs):
        g[off + i] = c
    return tuple(g)


def minimal_generators(rd, p):
    """The minimal topological generating set of the pro-p Iwahori of rd."""
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    rs = rd.rs
    cs = pro_p_cochar_basis(rd, p)
    semisimple = tuple(GenDesc("semisimple", v, "1+p") for v in cs.vectors)
    simples = tuple(
        GenDesc("unipotent", _global_vec(rs, a), "1") for a in rs.simple_roots()
    )
    lowest = tuple(
        GenDesc("unipotent", tuple(-c for c in _global_vec(rs, rs.highest_root(ci))), "p")
        for ci in range(len(rs.components))
    )
    extras = ()
    if p == 3:
        extras = tuple(
            GenDesc("unipotent", _global_vec(rs, rs.g2_delta(ci)), "1")
            for ci in range(len(rs.components))
            if rs.g2_delta(ci) is not None
        )
    return GeneratorSpec(semisimple, simples, lowest, extras)


@dataclass(frozen=True)
class FrattiniModule:
    """Frattini quotient as a torsion-torus character module.

    trivial_rank counts the F_p summands with trivial action; `characters`
    is the multiset of nontrivial-action summands, one vector mod p-1 over
    the global simple-root basis per unipotent generator.
    """

    p: int
    trivial_rank: int
    characters: tuple

    @property
    def dimension(self):
        return self.trivial_rank + len(self.characters)

    def to_dict(self):
        return {
            "p": self.p,
            "trivial_rank": self.trivial_rank,
            "characters": [list(c) for c in self.characters],
        }


def frattini_module(rd, p):
    """Character decomposition of the Frattini quotient under the adjoint torus."""
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    rs = rd.rs
    spec = minimal_generators(rd, p)
    modulus = p - 1
    chars = []
    for d in spec.simple_unipotents + spec.lowest_unipotents + spec.g2_extras:
        chars.append(tuple(c % modulus for c in d.vec))
    return FrattiniModule(p, len(spec.semisimple), tuple(chars))


def is_multiplicity_free(rd, p):
    """Whether all simple summands of the Frattini module are distinct.

    The trivial-action summands occupy the zero character class, so a
    nonempty cocharacter basis forbids any unipotent character from being
    zero and forbids a second trivial summand.
    """
    if len(rd.rs.components) != 1:
        raise RejectionError("multiplicity-freeness is defined for simple data")
    fm = frattini_module(rd, p)
    zero = tuple(0 for _ in range(rd.rs.total_rank))
    seen = {}
    for c in fm.characters:
        seen[c] = seen.get(c, 0) + 1
    seen[zero] = seen.get(zero, 0) + fm.trivial_rank
    return all(v <= 1 for v in seen.values())
