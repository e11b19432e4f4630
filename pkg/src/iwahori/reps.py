"""Exact matrix realizations mod p^k: natural SL_n and the adjoint representation.

The adjoint representation is built on the integral Chevalley basis; each
one-parameter subgroup is exp(t ad X_gamma) where the divided powers
(ad X_gamma)^m / m! are computed over arbitrary-precision integers with the
division asserted exact, then reduced mod p^k.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RejectionError
from .rootdata import Root, is_odd_prime
from .chevalley import structure_constants


class ModMatrix:
    """Square matrix over Z/p^k with least nonnegative entries; hashable."""

    __slots__ = ("n", "mod", "entries")

    def __init__(self, n, mod, entries):
        self.n = n
        self.mod = mod
        self.entries = tuple(e % mod for e in entries)
        if len(self.entries) != n * n:
            raise RejectionError("entry count does not match the dimension")

    @staticmethod
    def identity(n, mod):
        return ModMatrix(n, mod, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @staticmethod
    def from_rows(rows, mod):
        n = len(rows)
        return ModMatrix(n, mod, [x for row in rows for x in row])

    def rows(self):
        n = self.n
        return [list(self.entries[i * n : (i + 1) * n]) for i in range(n)]

    def __getitem__(self, rc):
        return self.entries[rc[0] * self.n + rc[1]]

    def __mul__(self, other):
        if not isinstance(other, ModMatrix) or other.n != self.n or other.mod != self.mod:
            raise RejectionError("matrix shapes or moduli differ")
        n = self.n
        mod = self.mod
        a = self.entries
        b = other.entries
        out = [0] * (n * n)
        for i in range(n):
            ai = i * n
            for k in range(n):
                x = a[ai + k]
                if x:
                    bk = k * n
                    for j in range(n):
                        out[ai + j] += x * b[bk + j]
        return ModMatrix(n, mod, [x % mod for x in out])

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        r = ModMatrix.identity(self.n, self.mod)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def inv(self):
        """Inverse by Gauss-Jordan; every pivot must be a unit mod p."""
        n = self.n
        mod = self.mod
        A = self.rows()
        B = ModMatrix.identity(n, mod).rows()
        for col in range(n):
            piv = None
            for r in range(col, n):
                try:
                    pinv = pow(A[r][col], -1, mod)
                except ValueError:
                    continue
                piv = (r, pinv)
                break
            if piv is None:
                raise RejectionError("matrix is not invertible mod p")
            r, pinv = piv
            A[col], A[r] = A[r], A[col]
            B[col], B[r] = B[r], B[col]
            A[col] = [(x * pinv) % mod for x in A[col]]
            B[col] = [(x * pinv) % mod for x in B[col]]
            for r2 in range(n):
                if r2 != col and A[r2][col]:
                    f = A[r2][col]
                    A[r2] = [(x - f * y) % mod for x, y in zip(A[r2], A[col])]
                    B[r2] = [(x - f * y) % mod for x, y in zip(B[r2], B[col])]
        return ModMatrix.from_rows(B, mod)

    def __eq__(self, other):
        return (
            isinstance(other, ModMatrix)
            and self.n == other.n
            and self.mod == other.mod
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.n, self.mod, self.entries))

    def __repr__(self):
        return f"ModMatrix({self.rows()} mod {self.mod})"

    def to_dict(self):
        return {"n": self.n, "modulus": self.mod, "entries": list(self.entries)}

    @staticmethod
    def from_dict(doc):
        return ModMatrix(doc["n"], doc["modulus"], doc["entries"])


def commutator(x, y):
    return x * y * x.inv() * y.inv()


# --- natural representation of SL_n ------------------------------------------


class NaturalSLRep:
    """The defining n-dimensional representation of SL_n over Z/p^k.

    Positive roots are e_i - e_j with i < j and the Borel is upper
    triangular.
    """

    kind = "natural-sl"

    def __init__(self, n, p, k):
        if n < 2:
            raise RejectionError("SL_n needs n >= 2")
        if not is_odd_prime(p):
            raise RejectionError(f"p = {p} must be an odd prime")
        if k < 1:
            raise RejectionError("k must be >= 1")
        self.n = n
        self.p = p
        self.k = k
        self.mod = p**k
        self.dim = n

    def x(self, i, j, t):
        """x_{e_i - e_j}(t) = 1 + t E_{ij}, zero-based indices."""
        if i == j:
            raise RejectionError("root indices must differ")
        ent = [1 if a == b else 0 for a in range(self.n) for b in range(self.n)]
        ent[i * self.n + j] = t % self.mod
        return ModMatrix(self.n, self.mod, ent)

    def torus(self, diag):
        if len(diag) != self.n:
            raise RejectionError("diagonal length mismatch")
        ent = [0] * (self.n * self.n)
        for i, d in enumerate(diag):
            ent[i * self.n + i] = d % self.mod
        return ModMatrix(self.n, self.mod, ent)

    def coroot(self, i, x):
        """alpha_i^vee(x) = diag(1, ..., x, x^{-1}, ..., 1), zero-based i."""
        diag = [1] * self.n
        diag[i] = x % self.mod
        diag[i + 1] = pow(x, -1, self.mod)
        return self.torus(diag)

    def _interval(self, vec):
        """Positive A-type root coefficient vector -> (i, j) with root e_i - e_j."""
        support = [i for i, c in enumerate(vec) if c]
        if not support or any(vec[i] != 1 for i in support):
            raise RejectionError("not a type-A root coefficient vector")
        lo, hi = support[0], support[-1]
        if support != list(range(lo, hi + 1)):
            raise RejectionError("not a type-A root coefficient vector")
        return lo, hi + 1

    def realize(self, desc, p_value=None):
        """Matrix of a generator descriptor (see generators.GenDesc)."""
        p_value = self.p if p_value is None else p_value
        if desc.kind == "unipotent":
            vec = desc.vec
            neg = all(c <= 0 for c in vec) and any(c < 0 for c in vec)
            if neg:
                i, j = self._interval(tuple(-c for c in vec))
                t = 1 if desc.arg == "1" else p_value
                return self.x(j, i, t)
            i, j = self._interval(vec)
            t = 1 if desc.arg == "1" else p_value
            return self.x(i, j, t)
        if desc.kind == "semisimple":
            # cochar over the simple coroots: diag(x^{c_1}, x^{c_2-c_1}, ..., x^{-c_{n-1}})
            x = (1 + p_value) % self.mod
            c = list(desc.vec) + [0]
            diag = [pow(x, c[i] - (c[i - 1] if i else 0), self.mod) for i in range(self.n)]
            return self.torus(diag)
        raise RejectionError(f"unknown descriptor kind {desc.kind!r}")


def natural_sl_generators(n, p, k):
    """Theorem generator matrices for the simply connected SL_n datum."""
    from .generators import minimal_generators
    from .rootdata import build_root_system, build_root_datum

    rs = build_root_system("A", n - 1)
    rd = build_root_datum(rs, "simply-connected")
    spec = minimal_generators(rd, p)
    rep = NaturalSLRep(n, p, k)
    return {desc: rep.realize(desc) for desc in spec.all_descriptors()}, rep


# --- adjoint representation ---------------------------------------------------


class AdjointRep:
    """Adjoint action on the Chevalley Z-form, reduced mod p^k.

    Basis: the simple coroots H_1..H_L (global numbering across components),
    then all roots sorted by (height, component, coefficients).
    """

    kind = "adjoint"

    def __init__(self, rs, p, k):
        if not is_odd_prime(p):
            raise RejectionError(f"p = {p} must be an odd prime")
        if k < 1:
            raise RejectionError("k must be >= 1")
        self.rs = rs
        self.sc = structure_constants(rs)
        self.p = p
        self.k = k
        self.mod = p**k
        L = rs.total_rank
        roots = sorted(rs.roots, key=lambda r: (r.height, r.component, r.coeffs))
        self.basis = [("H", i) for i in range(L)] + [("X", r.component, r.coeffs) for r in roots]
        self.idx = {b: i for i, b in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._divided = {}

    def _simple(self, gi):
        # global simple index -> (component, local index)
        off = 0
        for ci, (_, rank) in enumerate(self.rs.components):
            if gi < off + rank:
                return ci, gi - off
            off += rank
        raise IndexError(gi)

    def _ad(self, root):
        rs = self.rs
        comp = rs.component(root.component)
        dim = self.dim
        M = [[0] * dim for _ in range(dim)]
        rowx = self.idx[("X", root.component, root.coeffs)]
        for col, b in enumerate(self.basis):
            if b[0] == "H":
                ci, i = self._simple(b[1])
                if ci == root.component:
                    unit = tuple(1 if t == i else 0 for t in range(comp.rank))
                    M[rowx][col] = -comp.pairing(root.coeffs, unit)
            else:
                _, ci, d = b
                if ci != root.component:
                    continue
                if d == tuple(-c for c in root.coeffs):
                    off = rs.rank_offset(root.component)
                    for i, w in enumerate(comp.coroot_coeffs(root.coeffs)):
                        if w:
                            M[self.idx[("H", off + i)]][col] = w
                else:
                    s = tuple(x + y for x, y in zip(root.coeffs, d))
                    if ("X", ci, s) in self.idx:
                        M[self.idx[("X", ci, s)]][col] = self.sc.n_coeffs(ci, root.coeffs, d)
        return M

    def divided_powers(self, root):
        key = (root.component, root.coeffs)
        if key in self._divided:
            return self._divided[key]
        dim = self.dim
        ad = self._ad(root)
        rows_nz = [
            [(j, x) for j, x in enumerate(row) if x] for row in ad
        ]
        out = [[[1 if i == j else 0 for j in range(dim)] for i in range(dim)]]
        P = [row[:] for row in out[0]]
        fact = 1
        m = 0
        while True:
            m += 1
            fact *= m
            newP = [[0] * dim for _ in range(dim)]
            for i in range(dim):
                for j, x in rows_nz[i]:
                    prow = P[j]
                    row = newP[i]
                    for c in range(dim):
                        if prow[c]:
                            row[c] += x * prow[c]
            P = newP
            if not any(any(row) for row in P):
                break
            D = []
            for row in P:
                drow = []
                for x in row:
                    q, r = divmod(x, fact)
                    if r:
                        raise AssertionError("divided power is not integral")
                    drow.append(q)
                D.append(drow)
            out.append(D)
            if m > 8:
                raise AssertionError("ad nilpotency bound exceeded")
        self._divided[key] = out
        return out

    def x(self, root, t):
        """exp(t ad X_root) mod p^k."""
        mod = self.mod
        mats = self.divided_powers(root)
        dim = self.dim
        acc = [0] * (dim * dim)
        tm = 1
        for D in mats:
            for i in range(dim):
                base = i * dim
                row = D[i]
                for j in range(dim):
                    if row[j]:
                        acc[base + j] = (acc[base + j] + tm * row[j]) % mod
            tm = (tm * t) % mod
        return ModMatrix(dim, mod, acc)

    def cochar(self, vec, xval):
        """The cocharacter with M-dual coordinates `vec`, evaluated at a unit."""
        mod = self.mod
        ent = [0] * (self.dim * self.dim)
        for i, b in enumerate(self.basis):
            if b[0] == "H":
                ent[i * self.dim + i] = 1
            else:
                _, ci, coeffs = b
                root = self.rs.find(ci, coeffs)
                e = sum(x * y for x, y in zip(self._root_in_m(root), vec))
                ent[i * self.dim + i] = pow(xval, e, mod) if e >= 0 else pow(
                    pow(xval, -1, mod), -e, mod
                )
        return ModMatrix(self.dim, mod, ent)

    def _root_in_m(self, root):
        # identity embedding: characters evaluated through the datum happen
        # in `realize`, which passes pairing-ready vectors
        off = self.rs.rank_offset(root.component)
        g = [0] * self.rs.total_rank
        for i, c in enumerate(root.coeffs):
            g[off + i] = c
        return g

    def realize(self, desc, rd=None, p_value=None):
        """Matrix of a generator descriptor.

        Unipotent descriptors carry global simple-root coefficients;
        semisimple ones carry M-dual coordinates of the datum `rd`, whose
        pairing with each root drives the diagonal action.
        """
        p_value = self.p if p_value is None else p_value
        if desc.kind == "unipotent":
            root = self._root_from_vec(desc.vec)
            t = 1 if desc.arg == "1" else p_value
            return self.x(root, t)
        if desc.kind == "semisimple":
            if rd is None:
                raise RejectionError("semisimple descriptors need the root datum")
            x = (1 + p_value) % self.mod
            mod = self.mod
            ent = [0] * (self.dim * self.dim)
            for i, b in enumerate(self.basis):
                if b[0] == "H":
                    ent[i * self.dim + i] = 1
                else:
                    _, ci, coeffs = b
                    root = self.rs.find(ci, coeffs)
                    e = rd.pairing(rd.root_in_m(root), desc.vec)
                    ent[i * self.dim + i] = pow(x, e, mod) if e >= 0 else pow(
                        pow(x, -1, mod), -e, mod
                    )
            return ModMatrix(self.dim, mod, ent)
        raise RejectionError(f"unknown descriptor kind {desc.kind!r}")

    def _root_from_vec(self, vec):
        rs = self.rs
        off = 0
        for ci, (_, rank) in enumerate(rs.components):
            local = tuple(vec[off + i] for i in range(rank))
            if any(local):
                if any(vec[j] for j in range(len(vec)) if not (off <= j < off + rank)):
                    raise RejectionError("descriptor mixes components")
                root = rs.find(ci, local)
                if root is None:
                    raise RejectionError("descriptor vector is not a root")
                return root
            off += rank
        raise RejectionError("zero descriptor vector")

    def word_matrix(self, word):
        """Adjoint image of a collection normal form (cross-oracle hook)."""
        out = ModMatrix.identity(self.dim, self.mod)
        for coeffs, t in word.letters():
            root = self.rs.find(word.component, coeffs)
            out = out * self.x(root, t)
        return out


def adjoint_generators(rd, p, k):
    """Theorem generator matrices in the adjoint representation of rd."""
    from .generators import minimal_generators

    spec = minimal_generators(rd, p)
    rep = AdjointRep(rd.rs, p, k)
    return {desc: rep.realize(desc, rd=rd) for desc in spec.all_descriptors()}, rep


# --- Iwahori membership and factorization (natural SL only) -------------------


def reduce_and_classify(m, rep):
    """Classify by the mod-p reduction: "I(1)", "I", or "outside"."""
    if getattr(rep, "kind", None) != "natural-sl":
        raise RejectionError("classification is supported for the natural SL kind only")
    n = m.n
    p = rep.p
    below_zero = all(m[i, j] % p == 0 for i in range(n) for j in range(i))
    if not below_zero:
        return "outside"
    if all(m[i, i] % p == 1 for i in range(n)):
        return "I(1)"
    return "I"


def ldu_factor(m, p):
    """Unique m = u_minus * t * u_plus for m in the Iwahori of SL_n mod p^k.

    u_minus is lower unipotent with below-diagonal entries divisible by p,
    t diagonal, u_plus upper unipotent.
    """
    n = m.n
    mod = m.mod
    A = m.rows()
    Lw = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for col in range(n):
        try:
            pinv = pow(A[col][col], -1, mod)
        except ValueError:
            raise RejectionError("pivot is not a unit; the matrix is outside the Iwahori")
        for r in range(col + 1, n):
            f = (A[r][col] * pinv) % mod
            if f % p:
                raise RejectionError("below-diagonal entry not divisible by p")
            if f:
                A[r] = [(x - f * y) % mod for x, y in zip(A[r], A[col])]
            Lw[r][col] = f
    T = [[A[i][i] if i == j else 0 for j in range(n)] for i in range(n)]
    U = [[(pow(A[i][i], -1, mod) * A[i][j]) % mod if j >= i else 0 for j in range(n)] for i in range(n)]
    lower = ModMatrix.from_rows(Lw, mod)
    diag = ModMatrix.from_rows(T, mod)
    upper = ModMatrix.from_rows(U, mod)
    if lower * diag * upper != m:
        raise AssertionError("factorization does not multiply back")
    return lower, diag, upper
