"""Chevalley structure constants, rank-2 commutator expansions, and collection.

Structure constants are computed from scratch: extraspecial pairs get the
sign +1 and every other value follows from the Jacobi identity and the
invariant-form relation, over exact rationals with integrality asserted.
Commutator expansions are then derived, not copied from a table: the four
exponentials are multiplied out in a plane-restricted module with exact
divided powers and the normal-form coefficients peeled off one root at a
time.  The classical rank-2 table is kept only as a cross-checked contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import RejectionError
from .rootdata import Root, root_chain
from .rootdata import is_odd_prime

# Expected term patterns (degree -> |coefficient|) for each chain datum (r, s)
# with s >= 1; every s = 0 chain gives the empty expansion.
RANK2_ROWS = {
    (1, 1): {(1, 1): 1},
    (1, 2): {(1, 1): 1, (2, 1): 1},
    (1, 3): {(1, 1): 1, (2, 1): 1, (3, 1): 1, (3, 2): 1},
    (2, 1): {(1, 1): 2},
    (2, 2): {(1, 1): 2, (2, 1): 3, (1, 2): 3},
    (3, 1): {(1, 1): 3},
}


def _vadd(x, y):
    return tuple(a + b for a, b in zip(x, y))


def _vsub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def _vneg(x):
    return tuple(-a for a in x)


def _vscale(k, x):
    return tuple(k * a for a in x)


def _height(v):
    return sum(v)


def _key(v):
    return (_height(v), v)


def _component_constants(comp):
    """Full N table of one component as {(a, b): int} over coefficient tuples."""
    rootset = comp._rootset
    norm2 = comp.norm2

    def down(a, b):
        k = 1
        while _vsub(b, _vscale(k, a)) in rootset:
            k += 1
        return k - 1

    npos_table = {}

    def npos(a, b):
        if _key(a) > _key(b):
            return -npos(b, a)
        return Fraction(npos_table[(a, b)])

    def nval(x, y):
        hx, hy = _height(x), _height(y)
        if hx > 0 and hy > 0:
            return npos(x, y)
        if hx < 0 and hy < 0:
            return -nval(_vneg(x), _vneg(y))
        if hx < 0:
            return -nval(y, x)
        # x positive, y negative: reduce through the invariant-form relation
        delta = _vneg(y)
        c = _vsub(x, delta)
        if _height(c) > 0:
            return -Fraction(norm2(c), norm2(x)) * npos(delta, c)
        nu = _vneg(c)
        return Fraction(norm2(nu), norm2(delta)) * npos(nu, x)

    positives = comp.positives
    posset = comp._posset
    for sigma in positives:
        if _height(sigma) < 2:
            continue
        decomps = []
        for a in positives:
            if _key(a) >= _key(sigma):
                break
            v = _vsub(sigma, a)
            if v in posset and _key(a) < _key(v):
                decomps.append((a, v))
        decomps.sort(key=lambda ab: _key(ab[0]))
        eps, eta = decomps[0]
        npos_table[(eps, eta)] = down(eps, eta) + 1
        for al, be in decomps[1:]:
            denom = nval(sigma, _vneg(eps))
            acc = Fraction(0)
            theta = _vsub(be, eps)
            if theta in rootset:
                acc += nval(be, _vneg(eps)) * npos(theta, al)
            phi = _vsub(al, eps)
            if phi in rootset:
                acc += (-nval(al, _vneg(eps))) * nval(phi, be)
            val = -acc / denom
            if val.denominator != 1:
                raise AssertionError("non-integral structure constant")
            val = int(val)
            if abs(val) != down(al, be) + 1:
                raise AssertionError("structure constant magnitude violates chain data")
            npos_table[(al, be)] = val

    table = {}
    for x in rootset:
        for y in rootset:
            s = _vadd(x, y)
            if any(s) and s in rootset:
                v = nval(x, y)
                if v.denominator != 1:
                    raise AssertionError("non-integral structure constant")
                table[(x, y)] = int(v)
    return table


class StructureConstants:
    """N_{a,b} with [X_a, X_b] = N_{a,b} X_{a+b}, for all pairs with a+b a root."""

    def __init__(self, rs):
        self.rs = rs
        self._tables = [_component_constants(rs.component(ci)) for ci in range(len(rs.components))]
        self._exp_cache = {}
        self._pair_cache = {}
        self._letter_cache = {}

    def n(self, a, b):
        """N value for Root pair (a, b); None when a+b is not a root."""
        if a.component != b.component:
            return None
        return self._tables[a.component].get((a.coeffs, b.coeffs))

    def n_coeffs(self, component, a, b):
        return self._tables[component].get((a, b))

    def pairs(self, component):
        return self._tables[component].items()


@lru_cache(maxsize=None)
def structure_constants(rs):
    return StructureConstants(rs)


# --- plane-restricted module and exact exponential peeling -------------------


def _poly_mul(f, g):
    out = {}
    for (a1, b1), c1 in f.items():
        for (a2, b2), c2 in g.items():
            k = (a1 + a2, b1 + b2)
            v = out.get(k, 0) + c1 * c2
            if v:
                out[k] = v
            elif k in out:
                del out[k]
    return out


def _pm_mul(A, B):
    """Product of sparse {(row, col): poly} matrices."""
    brows = {}
    for (r, c), poly in B.items():
        brows.setdefault(r, []).append((c, poly))
    out = {}
    for (r, k), pa in A.items():
        for c, pb in brows.get(k, ()):
            prod = _poly_mul(pa, pb)
            if not prod:
                continue
            tgt = out.setdefault((r, c), {})
            for mono, co in prod.items():
                v = tgt.get(mono, 0) + co
                if v:
                    tgt[mono] = v
                elif mono in tgt:
                    del tgt[mono]
    return {k: v for k, v in out.items() if v}


class _PlaneModule:
    """The Lie submodule spanned by the Cartan of one component and the
    root spaces in the integer span of two independent roots.

    Faithful for every one-parameter subgroup in the plane, which is what
    the coefficient peeling needs.
    """

    def __init__(self, sc, component, a, b):
        self.sc = sc
        self.component = component
        comp = sc.rs.component(component)
        self.comp = comp
        piv = None
        n = comp.rank
        for i in range(n):
            for j in range(i + 1, n):
                if a[i] * b[j] - a[j] * b[i]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            raise RejectionError("proportional roots span no plane")
        det = a[piv[0]] * b[piv[1]] - a[piv[1]] * b[piv[0]]
        plane = []
        for g in comp._rootset:
            xi = g[piv[0]] * b[piv[1]] - g[piv[1]] * b[piv[0]]
            yj = a[piv[0]] * g[piv[1]] - a[piv[1]] * g[piv[0]]
            if xi % det or yj % det:
                continue
            i, j = xi // det, yj // det
            if _vadd(_vscale(i, a), _vscale(j, b)) == g:
                plane.append(g)
        plane.sort(key=_key)
        self.plane = plane
        self.basis = [("H", i) for i in range(n)] + [("X", g) for g in plane]
        self.idx = {elt: i for i, elt in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._divided = {}

    def _ad(self, g):
        comp = self.comp
        n = comp.rank
        dim = self.dim
        M = [[0] * dim for _ in range(dim)]
        groot = Root(self.component, g, _height(g), comp.length_class(g))
        for col, elt in enumerate(self.basis):
            kind, val = elt
            if kind == "H":
                unit = tuple(1 if t == val else 0 for t in range(n))
                pair = comp.pairing(g, unit)
                M[self.idx[("X", g)]][col] = -pair
            else:
                d = val
                if d == _vneg(g):
                    for i, w in enumerate(comp.coroot_coeffs(g)):
                        if w:
                            M[self.idx[("H", i)]][col] = w
                else:
                    s = _vadd(g, d)
                    if ("X", s) in self.idx:
                        M[self.idx[("X", s)]][col] = self.sc.n_coeffs(self.component, g, d)
        return M

    def divided_powers(self, g):
        """Integer matrices (ad X_g)^m / m!, up to nilpotency."""
        if g in self._divided:
            return self._divided[g]
        dim = self.dim
        ad = self._ad(g)
        out = [[[1 if i == j else 0 for j in range(dim)] for i in range(dim)]]
        P = [row[:] for row in out[0]]
        fact = 1
        m = 0
        while True:
            m += 1
            fact *= m
            P = [
                [sum(ad[i][t] * P[t][j] for t in range(dim)) for j in range(dim)]
                for i in range(dim)
            ]
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
        self._divided[g] = out
        return out

    def exp_poly(self, g, c, mono):
        """exp(c * t * ad X_g) with t the monomial u^mono0 v^mono1, as a sparse poly matrix."""
        mats = self.divided_powers(g)
        E = {}
        for m, D in enumerate(mats):
            scale = c**m
            key = (mono[0] * m, mono[1] * m)
            for r, row in enumerate(D):
                for col, x in enumerate(row):
                    if x:
                        poly = E.setdefault((r, col), {})
                        v = poly.get(key, 0) + x * scale
                        if v:
                            poly[key] = v
                        elif key in poly:
                            del poly[key]
        return {k: v for k, v in E.items() if v}


def _cone(comp, a, b):
    cone = {}
    for i in range(1, 7):
        for j in range(1, 7):
            v = _vadd(_vscale(i, a), _vscale(j, b))
            if v in comp._rootset:
                cone[(i, j)] = v
    return cone


def _cone_signature(sc, component, a, b, cone):
    labels = dict(cone)
    labels[(1, 0)] = a
    labels[(0, 1)] = b
    rel = []
    pts = sorted(labels)
    for p1 in pts:
        for p2 in pts:
            s = (p1[0] + p2[0], p1[1] + p2[1])
            if s in labels:
                rel.append((p1, p2, sc.n_coeffs(component, labels[p1], labels[p2])))
    return (tuple(sorted(cone)), tuple(rel))


def _peel(sc, component, a, b, cone):
    comp = sc.rs.component(component)
    mod = _PlaneModule(sc, component, a, b)
    L = _pm_mul(
        _pm_mul(mod.exp_poly(b, 1, (0, 1)), mod.exp_poly(a, 1, (1, 0))),
        _pm_mul(mod.exp_poly(b, -1, (0, 1)), mod.exp_poly(a, -1, (1, 0))),
    )
    out = {}
    for deg in sorted(cone, key=lambda t: (t[0] + t[1], t[0])):
        g = cone[deg]
        w = comp.coroot_coeffs(g)
        k0 = next(i for i, x in enumerate(w) if x)
        row = mod.idx[("H", k0)]
        col = mod.idx[("X", _vneg(g))]
        num = L.get((row, col), {}).get(deg, 0)
        c, r = divmod(num, w[k0])
        if r:
            raise AssertionError("peeled coefficient is not integral")
        if c:
            out[deg] = c
            L = _pm_mul(mod.exp_poly(g, -c, deg), L)
    ident = {(i, i): {(0, 0): 1} for i in range(mod.dim)}
    if L != ident:
        raise AssertionError("commutator expansion left a nontrivial residual")
    return out


def _expansion_coeffs(sc, component, a, b):
    """{(i, j): c} with [x_b(v):x_a(u)] = prod x_{ia+jb}(c u^i v^j), product in
    (i+j, i) order.  Cached per pair and across pairs sharing local cone data."""
    pair_key = (component, a, b)
    hit = sc._pair_cache.get(pair_key)
    if hit is not None:
        return hit
    comp = sc.rs.component(component)
    cone = _cone(comp, a, b)
    if not cone:
        sc._pair_cache[pair_key] = {}
        return {}
    sig = _cone_signature(sc, component, a, b, cone)
    hit = sc._exp_cache.get(sig)
    if hit is None:
        hit = _peel(sc, component, a, b, cone)
        sc._exp_cache[sig] = hit
    sc._pair_cache[pair_key] = hit
    return hit


@dataclass(frozen=True)
class Term:
    root: Root
    coeff: int
    deg: tuple


@dataclass(frozen=True)
class CommutatorExpansion:
    alpha: Root
    beta: Root
    chain: tuple
    terms: tuple

    def letters(self, u, v, modulus):
        """Evaluate as root-group letters [(root, value)] mod `modulus`."""
        out = []
        for t in self.terms:
            val = (t.coeff * pow(u, t.deg[0], modulus) * pow(v, t.deg[1], modulus)) % modulus
            if val:
                out.append((t.root, val))
        return out

    def to_dict(self):
        return {
            "pair": [list(self.alpha.coeffs), list(self.beta.coeffs)],
            "rs": list(self.chain),
            "terms": [
                {"root": list(t.root.coeffs), "coeff": t.coeff, "deg": list(t.deg)}
                for t in self.terms
            ],
        }

    @staticmethod
    def from_dict(rs, component, doc):
        alpha = rs.find(component, doc["pair"][0])
        beta = rs.find(component, doc["pair"][1])
        if alpha is None or beta is None:
            raise RejectionError("pair does not consist of roots")
        terms = []
        for t in doc["terms"]:
            r = rs.find(component, t["root"])
            if r is None:
                raise RejectionError("term root is not a root")
            terms.append(Term(r, t["coeff"], tuple(t["deg"])))
        return CommutatorExpansion(alpha, beta, tuple(doc["rs"]), tuple(terms))


def general_expansion(sc, a, b):
    """Expansion of [x_b(v):x_a(u)] for any non-proportional pair of roots."""
    if a.component != b.component:
        raise RejectionError("commutator expansion requires one component")
    if a.coeffs == b.coeffs or a.coeffs == _vneg(b.coeffs):
        raise RejectionError("commutator expansion undefined for proportional roots")
    rs = sc.rs
    coeffs = _expansion_coeffs(sc, a.component, a.coeffs, b.coeffs)
    terms = []
    for (i, j), c in sorted(coeffs.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][0])):
        g = _vadd(_vscale(i, a.coeffs), _vscale(j, b.coeffs))
        terms.append(Term(rs.find(a.component, g), c, (i, j)))
    return tuple(terms)


def commutator_expansion(sc, alpha, beta):
    """Symbolic [x_beta(v) : x_alpha(u)], requiring |alpha| <= |beta|.

    Callers with the opposite orientation should swap the pair and invert,
    since [y:x] = [x:y]^{-1}.
    """
    rs = sc.rs
    if rs.norm2(alpha) > rs.norm2(beta):
        raise RejectionError("orient the pair so that alpha is not longer than beta")
    terms = general_expansion(sc, alpha, beta)
    chain = root_chain(rs, beta, alpha)
    expected = {} if chain[1] == 0 else RANK2_ROWS.get(chain)
    if expected is None:
        raise AssertionError(f"chain datum {chain} has no rank-2 table row")
    got = {t.deg: abs(t.coeff) for t in terms}
    if got != expected:
        raise AssertionError(f"expansion pattern {got} deviates from the table row {expected}")
    return CommutatorExpansion(alpha, beta, chain, terms)


# --- collection ---------------------------------------------------------------


def _comm_letters(sc, component, x, y, modulus, cutoff):
    """Letters of [x_{xv}(xt) : x_{yv}(yt)] in normal product order."""
    xv, xt = x
    yv, yt = y
    key = (component, xv, xt, yv, yt, modulus, cutoff)
    hit = sc._letter_cache.get(key)
    if hit is not None:
        return hit
    coeffs = _expansion_coeffs(sc, component, yv, xv)
    out = []
    for (i, j), c in sorted(coeffs.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][0])):
        g = _vadd(_vscale(i, yv), _vscale(j, xv))
        if _height(g) >= cutoff:
            continue
        val = (c * pow(yt, i, modulus) * pow(xt, j, modulus)) % modulus
        if val:
            out.append((g, val))
    if len(sc._letter_cache) < 1_000_000:
        sc._letter_cache[key] = out
    return out


def _collect(sc, component, letters, modulus, cutoff):
    work = []
    for v, t in letters:
        t %= modulus
        if t and _height(v) < cutoff:
            work.append((v, t))
    out = []
    while work:
        m = min(range(len(work)), key=lambda i: _key(work[i][0]))
        restart = False
        while m > 0:
            x = work[m - 1]
            y = work[m]
            if x[0] == y[0]:
                t = (x[1] + y[1]) % modulus
                if t:
                    work[m - 1 : m + 1] = [(x[0], t)]
                    m -= 1
                else:
                    del work[m - 1 : m + 1]
                    restart = True
                    break
            else:
                spill = _comm_letters(sc, component, x, y, modulus, cutoff)
                work[m - 1 : m + 1] = spill + [y, x]
                m = m - 1 + len(spill)
        if restart:
            continue
        v, t = work.pop(0)
        if out and out[-1][0] == v:
            nt = (out[-1][1] + t) % modulus
            if nt:
                out[-1] = (v, nt)
            else:
                out.pop()
        else:
            out.append((v, t))
    return out


class UnipotentWord:
    """Normal form over the positive roots of one component, mod p^k.

    Coefficients are least nonnegative residues, stored sparsely; the word
    is the product of x_gamma(t_gamma) in (height, coefficients) order.  An
    optional height cutoff works in the quotient by the subgroup of roots
    of height >= cutoff.
    """

    __slots__ = ("sc", "component", "p", "k", "cutoff", "coeffs")

    def __init__(self, sc, component, p, k, coeffs=None, cutoff=None):
        if not is_odd_prime(p):
            raise RejectionError(f"p = {p} must be an odd prime")
        if k < 1:
            raise RejectionError("k must be >= 1")
        self.sc = sc
        self.component = component
        self.p = p
        self.k = k
        self.cutoff = cutoff
        mod = p**k
        comp = sc.rs.component(component)
        cut = cutoff if cutoff is not None else _height(comp.highest) + 1
        clean = {}
        for v, t in (coeffs or {}).items():
            v = tuple(v)
            if v not in comp._posset:
                raise RejectionError("letters must be positive roots of the component")
            t %= mod
            if t and _height(v) < cut:
                clean[v] = t
        self.coeffs = clean

    @property
    def modulus(self):
        return self.p**self.k

    def _cut(self):
        comp = self.sc.rs.component(self.component)
        return self.cutoff if self.cutoff is not None else _height(comp.highest) + 1

    def letters(self):
        return [(v, t) for v, t in sorted(self.coeffs.items(), key=lambda kv: _key(kv[0]))]

    def canonical(self):
        comp = self.sc.rs.component(self.component)
        cut = self._cut()
        order = [v for v in comp.positives if _height(v) < cut]
        return tuple(self.coeffs.get(v, 0) for v in order)

    def __eq__(self, other):
        return (
            isinstance(other, UnipotentWord)
            and self.component == other.component
            and self.p == other.p
            and self.k == other.k
            and self.cutoff == other.cutoff
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.component, self.p, self.k, self.cutoff, self.canonical()))

    def is_identity(self):
        return not self.coeffs

    def __mul__(self, other):
        if (
            not isinstance(other, UnipotentWord)
            or other.component != self.component
            or other.p != self.p
            or other.k != self.k
            or other.cutoff != self.cutoff
        ):
            raise RejectionError("can only multiply words over the same quotient")
        merged = _collect(
            self.sc, self.component, self.letters() + other.letters(), self.modulus, self._cut()
        )
        return UnipotentWord(
            self.sc, self.component, self.p, self.k, dict(merged), self.cutoff
        )

    def inverse(self):
        mod = self.modulus
        inv_letters = [(v, (-t) % mod) for v, t in reversed(self.letters())]
        merged = _collect(self.sc, self.component, inv_letters, mod, self._cut())
        return UnipotentWord(self.sc, self.component, self.p, self.k, dict(merged), self.cutoff)

    def to_dict(self):
        return {
            "component": self.component,
            "p": self.p,
            "k": self.k,
            "cutoff": self.cutoff,
            "coeffs": [[list(v), t] for v, t in self.letters()],
        }


def collect_product(sc, words, p, k, component=None, cutoff=None):
    """Normal form of a product of words and root-group letters.

    `words` may mix UnipotentWord values and (Root, value) letters; all must
    live on the positive roots of a single component.
    """
    letters = []
    comp_seen = component
    for w in words:
        if isinstance(w, UnipotentWord):
            if w.p != p or w.k != k:
                raise RejectionError("mixed moduli in collection input")
            if comp_seen is None:
                comp_seen = w.component
            if w.component != comp_seen:
                raise RejectionError("collection letters must share one component")
            letters.extend(w.letters())
        else:
            root, t = w
            if comp_seen is None:
                comp_seen = root.component
            if root.component != comp_seen:
                raise RejectionError("collection letters must share one component")
            if root.height <= 0:
                raise RejectionError("letters must be positive roots")
            letters.append((root.coeffs, t))
    if comp_seen is None:
        raise RejectionError("empty product needs an explicit component")
    comp = sc.rs.component(comp_seen)
    cut = cutoff if cutoff is not None else _height(comp.highest) + 1
    if not is_odd_prime(p):
        raise RejectionError(f"p = {p} must be an odd prime")
    merged = _collect(sc, comp_seen, letters, p**k, cut)
    return UnipotentWord(sc, comp_seen, p, k, dict(merged), cutoff)


# --- height filtration --------------------------------------------------------


@dataclass(frozen=True)
class HeightFiltration:
    component: int
    levels: tuple  # levels[i] lists the roots of height > i, as coeff tuples

    def level_sizes(self):
        return tuple(len(lv) for lv in self.levels)


def unipotent_filtration(rs, component=0):
    """U_1 > U_2 > ... by height; level i holds the roots of height >= i."""
    comp = rs.component(component)
    hmax = _height(comp.highest)
    levels = []
    for i in range(1, hmax + 1):
        levels.append(tuple(v for v in comp.positives if _height(v) >= i))
    return HeightFiltration(component, tuple(levels))
