"""Split root systems, isogeny root data, and cocharacter lattice quotients.

Everything is exact: roots are integer coefficient vectors over the simple
roots of their irreducible component, lengths come from the symmetrized
Cartan matrix, and lattice quotients are computed by integer Smith normal
form.  Simple-root numbering follows the Bourbaki plates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import RejectionError

DEFAULT_MAX_RANK = 12

_VALID_TYPES = ("A", "B", "C", "D", "E", "F", "G")


def _check_type(type_label, rank, max_rank):
    if type_label not in _VALID_TYPES:
        raise RejectionError(f"unknown type label {type_label!r}")
    if rank < 1 or rank > max_rank:
        raise RejectionError(f"rank {rank} outside [1, {max_rank}] for type {type_label}")
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }[type_label]
    if not ok:
        raise RejectionError(f"({type_label}, {rank}) is not a valid simple type")


def cartan_matrix(type_label, rank):
    """Cartan data as rows: C[i][j] = <alpha_j, alpha_i^vee>.

    The reflection through alpha_i acts on a coefficient vector c by
    c -> c - (sum_j c_j C[i][j]) e_i.
    """
    C = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def edge(i, j, cij=-1, cji=-1):
        C[i][j] = cij
        C[j][i] = cji

    if type_label in ("A", "B", "C"):
        for i in range(rank - 1):
            edge(i, i + 1)
        if type_label == "B" and rank >= 2:
            # alpha_rank is the short simple root
            C[rank - 1][rank - 2] = -2
            C[rank - 2][rank - 1] = -1
        if type_label == "C" and rank >= 2:
            # alpha_rank is the long simple root
            C[rank - 1][rank - 2] = -1
            C[rank - 2][rank - 1] = -2
    elif type_label == "D":
        for i in range(rank - 2):
            edge(i, i + 1)
        edge(rank - 3, rank - 1)
    elif type_label == "E":
        edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
        for i, j in edges:
            if i < rank and j < rank:
                edge(i, j)
    elif type_label == "F":
        edge(0, 1)
        edge(1, 2, cij=-1, cji=-2)
        edge(2, 3)
    elif type_label == "G":
        # alpha_1 short, alpha_2 long
        C[0][1] = -3
        C[1][0] = -1
    return tuple(tuple(row) for row in C)


def norm_halves(type_label, rank):
    """d_i with (alpha_i, alpha_i) = 2 d_i, normalized so short roots get 1."""
    if type_label in ("A", "D", "E"):
        return (1,) * rank
    if type_label == "B":
        return (2,) * (rank - 1) + (1,)
    if type_label == "C":
        return (1,) * (rank - 1) + (2,)
    if type_label == "F":
        return (2, 2, 1, 1)
    if type_label == "G":
        return (1, 3)
    raise RejectionError(f"unknown type label {type_label!r}")


def _close_positive_roots(C):
    """All positive roots of the Cartan matrix C, by height-level saturation.

    A candidate beta + alpha_i is a root iff the alpha_i-chain through beta
    ascends, i.e. (down-steps) - <beta, alpha_i^vee> >= 1.  Levels are
    processed in height order so every down-chain member is already known.
    """
    rank = len(C)
    simples = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]
    seen = set(simples)
    level = list(simples)
    out = list(simples)
    while level:
        nxt = []
        for beta in level:
            for i in range(rank):
                pair = sum(beta[j] * C[i][j] for j in range(rank))
                down = 0
                cur = list(beta)
                while True:
                    cur[i] -= 1
                    if tuple(cur) in seen:
                        down += 1
                    else:
                        break
                if down - pair >= 1:
                    up = list(beta)
                    up[i] += 1
                    t = tuple(up)
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        nxt.sort()
        out.extend(nxt)
        level = nxt
    out.sort(key=lambda v: (sum(v), v))
    return out


@dataclass(frozen=True)
class Root:
    component: int
    coeffs: tuple
    height: int
    length: str  # "short" | "long"

    def __neg__(self):
        return Root(self.component, tuple(-c for c in self.coeffs), -self.height, self.length)


class _Component:
    """One irreducible factor with its Cartan data and closed root list."""

    def __init__(self, type_label, rank, max_rank=DEFAULT_MAX_RANK):
        _check_type(type_label, rank, max_rank)
        self.type_label = type_label
        self.rank = rank
        self.cartan = cartan_matrix(type_label, rank)
        self.d = norm_halves(type_label, rank)
        self.positives = _close_positive_roots(self.cartan)
        self._posset = set(self.positives)
        self._rootset = self._posset | {tuple(-c for c in v) for v in self.positives}
        self._norm_max = max(self.norm2(v) for v in self.positives)
        hmax = max(sum(v) for v in self.positives)
        tops = [v for v in self.positives if sum(v) == hmax]
        if len(tops) != 1:
            raise AssertionError(f"highest root not unique for ({type_label},{rank})")
        self.highest = tops[0]
        for v in self.positives:
            if any(h < c for h, c in zip(self.highest, v)):
                raise AssertionError("highest root fails coefficientwise dominance")

    def is_root(self, v):
        return tuple(v) in self._rootset

    def norm2(self, v):
        C = self.cartan
        n = self.rank
        return sum(v[i] * v[j] * self.d[i] * C[i][j] for i in range(n) for j in range(n))

    def length_class(self, v):
        return "long" if self.norm2(v) == self._norm_max else "short"

    def pairing(self, beta, gamma):
        """Cartan integer <beta, gamma^vee> = 2(beta,gamma)/(gamma,gamma)."""
        C = self.cartan
        n = self.rank
        num = sum(beta[i] * self.d[i] * C[i][j] * gamma[j] for i in range(n) for j in range(n))
        dg = self.norm2(gamma) // 2
        q, r = divmod(num, dg)
        if r:
            raise AssertionError("non-integral Cartan pairing")
        return q

    def coroot_coeffs(self, gamma):
        """gamma^vee over the simple coroots: c_i * d_i / d_gamma per coordinate."""
        dg = self.norm2(gamma) // 2
        out = []
        for i in range(self.rank):
            q, r = divmod(gamma[i] * self.d[i], dg)
            if r:
                raise AssertionError("non-integral coroot coordinate")
            out.append(q)
        return tuple(out)


class RootSystem:
    """Product of irreducible components; immutable after construction.

    Roots are listed sorted by (component, height, coefficients); negatives
    carry negative heights, so positives are exactly the roots of positive
    height.
    """

    def __init__(self, component_types, max_rank=DEFAULT_MAX_RANK):
        if not component_types:
            raise RejectionError("at least one component required")
        self._comps = [_Component(t, r, max_rank) for t, r in component_types]
        self.components = tuple((c.type_label, c.rank) for c in self._comps)
        roots = []
        for ci, comp in enumerate(self._comps):
            allv = sorted(
                list(comp._rootset), key=lambda v: (sum(v), v)
            )
            for v in allv:
                roots.append(Root(ci, v, sum(v), comp.length_class(v)))
        self.roots = tuple(roots)
        self._index = {(r.component, r.coeffs): i for i, r in enumerate(self.roots)}
        self.simple_indices = tuple(
            tuple(
                self._index[(ci, tuple(1 if j == i else 0 for j in range(comp.rank)))]
                for i in range(comp.rank)
            )
            for ci, comp in enumerate(self._comps)
        )
        self.highest_indices = tuple(
            self._index[(ci, comp.highest)] for ci, comp in enumerate(self._comps)
        )
        self.g2_delta_indices = tuple(
            self._index[(ci, (1, 1))] if comp.type_label == "G" else None
            for ci, comp in enumerate(self._comps)
        )

    # -- lookups -----------------------------------------------------------

    def component(self, ci):
        return self._comps[ci]

    @property
    def total_rank(self):
        return sum(c.rank for c in self._comps)

    def rank_offset(self, ci):
        return sum(c.rank for c in self._comps[:ci])

    def index(self, root):
        return self._index[(root.component, root.coeffs)]

    def find(self, component, coeffs):
        i = self._index.get((component, tuple(coeffs)))
        return None if i is None else self.roots[i]

    def is_root(self, component, coeffs):
        return (component, tuple(coeffs)) in self._index

    def positive_roots(self):
        return tuple(r for r in self.roots if r.height > 0)

    def simple_roots(self):
        return tuple(self.roots[i] for ci in range(len(self._comps)) for i in self.simple_indices[ci])

    def highest_root(self, ci):
        return self.roots[self.highest_indices[ci]]

    def g2_delta(self, ci):
        i = self.g2_delta_indices[ci]
        return None if i is None else self.roots[i]

    def pairing(self, beta, gamma):
        if beta.component != gamma.component:
            return 0
        return self._comps[beta.component].pairing(beta.coeffs, gamma.coeffs)

    def coroot_coeffs(self, root):
        return self._comps[root.component].coroot_coeffs(root.coeffs)

    def norm2(self, root):
        return self._comps[root.component].norm2(root.coeffs)

    def reflect(self, root, ci, i):
        """Reflection of `root` through the i-th simple root of component ci."""
        if root.component != ci:
            return root
        comp = self._comps[ci]
        pair = sum(root.coeffs[j] * comp.cartan[i][j] for j in range(comp.rank))
        new = list(root.coeffs)
        new[i] -= pair
        found = self.find(ci, new)
        if found is None:
            raise AssertionError("root set not closed under simple reflection")
        return found

    # -- serialization -----------------------------------------------------

    def to_dict(self, datum=None, p=None):
        doc = {
            "components": [{"type": t, "rank": r} for t, r in self.components],
            "roots": [
                {
                    "component": r.component,
                    "coeffs": list(r.coeffs),
                    "height": r.height,
                    "length": r.length,
                }
                for r in self.roots
            ],
            "simple_roots": [list(ix) for ix in self.simple_indices],
            "highest_roots": list(self.highest_indices),
            "g2_delta": [i for i in self.g2_delta_indices],
        }
        if datum is not None and p is not None:
            cs = pro_p_cochar_basis(datum, p)
            doc["cochar_basis"] = [list(v) for v in cs.vectors]
            doc["p"] = p
        return doc

    @staticmethod
    def from_dict(doc):
        rs = RootSystem([(c["type"], c["rank"]) for c in doc["components"]])
        if rs.to_dict()["roots"] != doc["roots"]:
            raise RejectionError("root list does not match its component data")
        return rs


@lru_cache(maxsize=None)
def build_root_system(type_label, rank, max_rank=DEFAULT_MAX_RANK):
    """Root system of one simple type; products via `product_root_system`."""
    return RootSystem([(type_label, rank)], max_rank)


@lru_cache(maxsize=None)
def product_root_system(component_types, max_rank=DEFAULT_MAX_RANK):
    return RootSystem(tuple(component_types), max_rank)


def root_chain(rs, beta, alpha):
    """Chain data (r, s) with R cap {beta + Z alpha} = {beta-(r-1)alpha, ..., beta+s alpha}."""
    if beta.component != alpha.component:
        raise RejectionError("chain requires roots of one component")
    if beta.coeffs == alpha.coeffs or beta.coeffs == tuple(-c for c in alpha.coeffs):
        raise RejectionError("chain undefined for proportional roots")
    comp = rs.component(alpha.component)

    def shift(k):
        return tuple(b + k * a for b, a in zip(beta.coeffs, alpha.coeffs))

    down = 0
    while comp.is_root(shift(-(down + 1))):
        down += 1
    up = 0
    while comp.is_root(shift(up + 1)):
        up += 1
    return down + 1, up


# --- Smith normal form ------------------------------------------------------


def smith_normal_form(mat):
    """U * A * V = D over the integers.

    Returns (diag, U, Uinv, V); diag has length min(m, n), entries are
    nonnegative with d_t | d_{t+1}.  Deterministic for fixed input.
    """
    A = [list(row) for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Uinv = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    def row_add(i, j, k):
        # row_i += k * row_j;  Uinv absorbs the inverse op on columns
        A[i] = [x + k * y for x, y in zip(A[i], A[j])]
        U[i] = [x + k * y for x, y in zip(U[i], U[j])]
        for r in Uinv:
            r[j] -= k * r[i]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def col_add(j, i, k):
        # col_j += k * col_i
        for r in A:
            r[j] += k * r[i]
        for r in V:
            r[j] += k * r[i]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        while True:
            i, j = pivot
            if i != t:
                row_swap(t, i)
            if j != t:
                col_swap(t, j)
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    row_add(i, t, -q)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    col_add(j, t, -q)
                    if A[t][j]:
                        dirty = True
            if dirty:
                pivot = None
                for i in range(t, m):
                    for j in range(t, n):
                        if A[i][j] != 0 and (
                            pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])
                        ):
                            pivot = (i, j)
                continue
            # divisibility of the remaining block by the pivot

            witness = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t]:
                        witness = i
                        break
                if witness is not None:
                    break
            if witness is None:
                break
            row_add(t, witness, 1)
            pivot = (t, t)
        if A[t][t] < 0:
            row_neg(t)
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    return diag, U, Uinv, V


# --- Root data --------------------------------------------------------------


class RootDatum:
    """Character/cocharacter lattices with roots and coroots embedded.

    M and its dual are identified with Z^rank; the pairing is the dot
    product.  Simple roots and coroots are stored per global simple index,
    arbitrary (co)roots are embedded linearly on demand.
    """

    def __init__(self, rs, preset, rank, simple_roots_m, simple_coroots_mdual):
        self.rs = rs
        self.preset = preset
        self.rank = rank
        self.simple_roots_m = tuple(tuple(v) for v in simple_roots_m)
        self.simple_coroots_mdual = tuple(tuple(v) for v in simple_coroots_mdual)
        self._validate()

    def _validate(self):
        rs = self.rs
        simples = rs.simple_roots()
        for i, a in enumerate(simples):
            for j, b in enumerate(simples):
                want = rs.pairing(a, b)
                got = sum(x * y for x, y in zip(self.simple_roots_m[i], self.simple_coroots_mdual[j]))
                if want != got:
                    raise RejectionError("embedded lattices do not reproduce the Cartan matrix")
        for r in rs.roots:
            if self.pairing(self.root_in_m(r), self.coroot_in_mdual(r)) != 2:
                raise AssertionError("<alpha, alpha^vee> != 2")

    def _global_coeffs(self, root):
        off = self.rs.rank_offset(root.component)
        g = [0] * self.rs.total_rank
        for i, c in enumerate(root.coeffs):
            g[off + i] = c
        return g

    def root_in_m(self, root):
        g = self._global_coeffs(root)
        return tuple(
            sum(g[i] * self.simple_roots_m[i][j] for i in range(len(g)))
            for j in range(self.rank)
        )

    def coroot_in_mdual(self, root):
        cor = self.rs.coroot_coeffs(root)
        off = self.rs.rank_offset(root.component)
        g = [0] * self.rs.total_rank
        for i, c in enumerate(cor):
            g[off + i] = c
        return tuple(
            sum(g[i] * self.simple_coroots_mdual[i][j] for i in range(len(g)))
            for j in range(self.rank)
        )

    @staticmethod
    def pairing(m_vec, mdual_vec):
        return sum(x * y for x, y in zip(m_vec, mdual_vec))

    def to_dict(self):
        return {
            "preset": self.preset,
            "rank": self.rank,
            "components": [{"type": t, "rank": r} for t, r in self.rs.components],
            "simple_roots_in_M": [list(v) for v in self.simple_roots_m],
            "simple_coroots_in_Mdual": [list(v) for v in self.simple_coroots_mdual],
        }


def _solve_integer_row(rows, target):
    """x with x * rows = target over Z, or None.  rows is a list of vectors."""
    m = len(rows)
    n = len(rows[0])
    diag, U, Uinv, V = smith_normal_form([list(r) for r in rows])
    # x * A = b  <=>  (x * Uinv) * D = b * V
    bv = [sum(target[i] * V[i][j] for i in range(n)) for j in range(n)]
    y = [0] * m
    for t in range(min(m, n)):
        d = diag[t]
        if d == 0:
            if bv[t]:
                return None
            continue
        q, r = divmod(bv[t], d)
        if r:
            return None
        y[t] = q
    if any(bv[t] for t in range(min(m, n), n)):
        return None
    x = [sum(y[i] * U[i][j] for i in range(m)) for j in range(m)]
    return x


def build_root_datum(rs, preset, weight_basis=None):
    """Root datum for an isogeny preset.

    Presets: "simply-connected"/"sc", "adjoint"/"ad", "gl" (type A only,
    GL_{rank+1}-style), or "explicit" with `weight_basis` rows giving a basis
    of M in fundamental-weight coordinates (semisimple data only).
    """
    L = rs.total_rank
    simples = rs.simple_roots()

    def cartan_row(i):
        # <alpha_j, alpha_i^vee> over all global j
        return [rs.pairing(simples[j], simples[i]) for j in range(L)]

    def cartan_col(i):
        # <alpha_i, alpha_j^vee> over all global j
        return [rs.pairing(simples[i], simples[j]) for j in range(L)]

    unit = [tuple(1 if j == i else 0 for j in range(L)) for i in range(L)]
    if preset in ("simply-connected", "sc"):
        return RootDatum(rs, "simply-connected", L, [tuple(cartan_col(i)) for i in range(L)], unit)
    if preset in ("adjoint", "ad"):
        return RootDatum(rs, "adjoint", L, unit, [tuple(cartan_row(i)) for i in range(L)])
    if preset == "gl":
        if rs.components != (("A", L),):
            raise RejectionError("gl preset requires a single type-A component")
        n = L + 1
        emb = [tuple(1 if j == i else (-1 if j == i + 1 else 0) for j in range(n)) for i in range(L)]
        return RootDatum(rs, "gl", n, emb, emb)
    if preset == "explicit":
        if weight_basis is None:
            raise RejectionError("explicit preset needs a weight_basis matrix")
        B = [list(r) for r in weight_basis]
        if len(B) != L or any(len(r) != L for r in B):
            raise RejectionError("weight_basis must be square of the total rank")
        roots_m = []
        for i in range(L):
            x = _solve_integer_row(B, cartan_col(i))
            if x is None:
                raise RejectionError("explicit lattice does not contain the root lattice")
            roots_m.append(tuple(x))
        coroots = [tuple(B[j][i] for j in range(L)) for i in range(L)]
        return RootDatum(rs, "explicit", L, roots_m, coroots)
    raise RejectionError(f"unknown preset {preset!r}")


@dataclass(frozen=True)
class CocharacterSet:
    """Lifts of an F_p-basis of (Mdual / Z Rdual) tensor F_p."""

    vectors: tuple
    p: int
    divisors: tuple
    free_rank: int

    def __len__(self):
        return len(self.vectors)


def is_odd_prime(p):
    if p < 3 or p % 2 == 0:
        return False
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


def pro_p_cochar_basis(rd, p):
    """Deterministic representatives for a basis of (Mdual/Z Rdual) tensor F_p.

    Computed by Smith reduction of the simple-coroot inclusion matrix;
    representatives are the transformed basis vectors whose elementary
    divisor is divisible by p (or zero for the free part), with coset
    coordinates reduced to least nonnegative residues.
    """
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    L = rd.rs.total_rank
    rank = rd.rank
    cols = [rd.coroot_in_mdual(a) for a in rd.rs.simple_roots()]
    A = [[cols[j][i] for j in range(L)] for i in range(rank)]
    diag, U, Uinv, V = smith_normal_form(A)
    if any(d == 0 for d in diag):
        raise AssertionError("simple coroots must be linearly independent")
    picked = [i for i, d in enumerate(diag) if d % p == 0]
    picked += list(range(len(diag), rank))
    vectors = []
    for i in picked:
        f = [Uinv[r][i] for r in range(rank)]
        # reduce coset coordinates w = U f into [0, d_t)
        w = [sum(U[r][c] * f[c] for c in range(rank)) for r in range(rank)]
        for t, d in enumerate(diag):
            w[t] %= d
        v = tuple(sum(Uinv[r][c] * w[c] for c in range(rank)) for r in range(rank))
        vectors.append(v)
    free = rank - len(diag)
    return CocharacterSet(tuple(vectors), p, tuple(diag), free)
