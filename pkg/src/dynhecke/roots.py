"""Finite root data, Weyl groups, and Langlands duality.

Both lattices are presented concretely as Z^n and the pairing is the
standard dot product of coordinate vectors.  In the adjoint presentation
the simple roots are the standard basis of the character lattice and the
simple coroots are the rows of the Cartan matrix; the simply connected
presentation mirrors this.  Dualizing is then a pure data swap: transpose
the Cartan matrix and exchange the root and coroot vectors.

Convention: cartan[i][j] = <alpha_j, alpha_i^vee>, so row i of the Cartan
matrix is the coordinate vector of the i-th simple coroot in the adjoint
presentation.  All matrices act on column vectors and are stored as tuples
of rows with exact integer entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

IntVec = tuple[int, ...]
IntMat = tuple[IntVec, ...]

_CARTAN: dict[str, IntMat] = {
    "A1": ((2,),),
    "A1xA1": ((2, 0), (0, 2)),
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
    "B2": ((2, -1), (-2, 2)),
    "C2": ((2, -2), (-1, 2)),
    "G2": ((2, -1), (-3, 2)),
}

_DUAL_LABEL = {
    "A1": "A1",
    "A1xA1": "A1xA1",
    "A2": "A2",
    "A3": "A3",
    "B2": "C2",
    "C2": "B2",
    "G2": "G2",
}

_ISOGENY_TAGS = ("adjoint", "simply_connected")

_BRAID_ORDER = {0: 2, 1: 3, 2: 4, 3: 6}


def _normalize_label(label: str) -> str:
    cleaned = label.strip().replace("×", "x")
    for known in _CARTAN:
        if cleaned.lower() == known.lower():
            return known
    raise ValueError(f"unknown Cartan label {label!r}; supported: {sorted(_CARTAN)}")


def dot(a: IntVec, b) -> complex:
    return sum(x * y for x, y in zip(a, b, strict=True))


def mat_vec(m: IntMat, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def mat_mul(a: IntMat, b: IntMat) -> IntMat:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def transpose(m: IntMat) -> IntMat:
    n = len(m)
    return tuple(tuple(m[j][i] for j in range(n)) for i in range(n))


def identity_matrix(n: int) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _reflection_matrix(u: IntVec, v: IntVec) -> IntMat:
    """I - outer(u, v), the reflection x -> x - <v, x> u."""
    n = len(u)
    return tuple(
        tuple((1 if i == j else 0) - u[i] * v[j] for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class RootDatum:
    """A finite root datum in fixed Z^n coordinates.

    ``simple_roots`` live in the character lattice, ``simple_coroots`` in the
    cocharacter lattice, and the pairing of the two is the dot product.
    """

    label: str
    isogeny_tag: str
    rank: int
    cartan: IntMat
    simple_roots: tuple[IntVec, ...]
    simple_coroots: tuple[IntVec, ...]

    def __post_init__(self) -> None:
        for i in range(self.rank):
            for j in range(self.rank):
                pair = dot(self.simple_roots[j], self.simple_coroots[i])
                if pair != self.cartan[i][j]:
                    raise ValueError(
                        f"pairing <alpha_{j}, alpha_{i}^vee> = {pair} does not "
                        f"match cartan[{i}][{j}] = {self.cartan[i][j]}"
                    )

    def pairing(self, a, b) -> complex:
        """<a, b> for a in X^* coordinates and b in X_* coordinates."""
        return dot(a, b)


def build_root_datum(label: str, isogeny_tag: str = "adjoint") -> RootDatum:
    """Construct a supported root datum from its Cartan type label."""
    name = _normalize_label(label)
    if isogeny_tag not in _ISOGENY_TAGS:
        raise ValueError(f"isogeny_tag must be one of {_ISOGENY_TAGS}, got {isogeny_tag!r}")
    cartan = _CARTAN[name]
    n = len(cartan)
    basis = identity_matrix(n)
    if isogeny_tag == "adjoint":
        roots = basis
        coroots = cartan
    else:
        roots = transpose(cartan)
        coroots = basis
    return RootDatum(name, isogeny_tag, n, cartan, roots, coroots)


def langlands_dual(rd: RootDatum) -> RootDatum:
    """Swap the two lattices: roots <-> coroots, Cartan matrix transposed.

    Involutive on the nose: dual(dual(rd)) == rd in these coordinates.
    """
    flipped = "simply_connected" if rd.isogeny_tag == "adjoint" else "adjoint"
    return RootDatum(
        _DUAL_LABEL[rd.label],
        flipped,
        rd.rank,
        transpose(rd.cartan),
        rd.simple_coroots,
        rd.simple_roots,
    )


def braid_order(rd: RootDatum, i: int, j: int) -> int:
    """Order of s_i s_j in the Weyl group."""
    if i == j:
        raise ValueError("braid order needs two distinct simple indices")
    product = rd.cartan[i][j] * rd.cartan[j][i]
    return _BRAID_ORDER[product]


@dataclass(frozen=True, eq=False)
class WeylElement:
    """A Weyl group element with one fixed reduced word.

    Equality and hashing go through the matrix action on the cocharacter
    lattice, so elements reached through different words still coincide.
    ``mat_on_star`` is the inverse transpose of ``mat_on_costar``: the pairing
    is Weyl invariant.
    """

    word: tuple[int, ...]
    mat_on_costar: IntMat
    mat_on_star: IntMat
    length: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.mat_on_costar == other.mat_on_costar

    def __hash__(self) -> int:
        return hash(self.mat_on_costar)

    def __repr__(self) -> str:
        if not self.word:
            return "W(e)"
        return "W(s" + " s".join(str(i + 1) for i in self.word) + ")"


class WeylGroup:
    """Enumerated Weyl group of a root datum with product and inverse lookup."""

    def __init__(self, rd: RootDatum):
        self.datum = rd
        n = rd.rank
        gens_costar = [
            _reflection_matrix(rd.simple_coroots[i], rd.simple_roots[i]) for i in range(n)
        ]
        gens_star = [
            _reflection_matrix(rd.simple_roots[i], rd.simple_coroots[i]) for i in range(n)
        ]
        ident = WeylElement((), identity_matrix(n), identity_matrix(n), 0)
        table = {ident.mat_on_costar: ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for w in frontier:
                for i in range(n):
                    mc = mat_mul(w.mat_on_costar, gens_costar[i])
                    if mc in table:
                        continue
                    ms = mat_mul(w.mat_on_star, gens_star[i])
                    el = WeylElement(w.word + (i,), mc, ms, w.length + 1)
                    table[mc] = el
                    nxt.append(el)
            frontier = nxt
        self.identity = ident
        self.simple = tuple(table[gens_costar[i]] for i in range(n))
        self.elements = tuple(sorted(table.values(), key=lambda w: (w.length, w.word)))
        self._by_matrix = table

    def canonical(self, mat_on_costar: IntMat) -> WeylElement:
        return self._by_matrix[mat_on_costar]

    def product(self, w: WeylElement, x: WeylElement) -> WeylElement:
        return self._by_matrix[mat_mul(w.mat_on_costar, x.mat_on_costar)]

    def inverse(self, w: WeylElement) -> WeylElement:
        return self._by_matrix[transpose(w.mat_on_star)]

    def from_word(self, word) -> WeylElement:
        el = self.identity
        for i in word:
            el = self.product(el, self.simple[i])
        return el

    def reflection(self, root: IntVec, coroot: IntVec) -> WeylElement:
        return self._by_matrix[_reflection_matrix(coroot, root)]

    def longest(self) -> WeylElement:
        return max(self.elements, key=lambda w: w.length)

    def __len__(self) -> int:
        return len(self.elements)


@lru_cache(maxsize=64)
def weyl_group(rd: RootDatum) -> WeylGroup:
    return WeylGroup(rd)


def enumerate_weyl(rd: RootDatum) -> tuple[WeylElement, ...]:
    """All Weyl group elements, each carrying one fixed reduced word."""
    return weyl_group(rd).elements


@lru_cache(maxsize=64)
def _basis_inverse(vectors: tuple[IntVec, ...]) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse of the matrix whose columns are the given vectors."""
    n = len(vectors)
    aug = [
        [Fraction(vectors[j][i]) for j in range(n)]
        + [Fraction(1 if k == i else 0) for k in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        scale = aug[col][col]
        aug[col] = [x / scale for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _coefficients_in_basis(vectors: tuple[IntVec, ...], v: IntVec) -> tuple[Fraction, ...]:
    inv = _basis_inverse(vectors)
    return tuple(sum(inv[i][j] * v[j] for j in range(len(v))) for i in range(len(v)))


@lru_cache(maxsize=64)
def positive_root_pairs(rd: RootDatum) -> tuple[tuple[IntVec, IntVec], ...]:
    """All positive (root, coroot) pairs, ordered by height then coordinates.

    The root orbit is closed under the simple reflections acting on both
    lattices at once, which keeps the bijection alpha <-> alpha^vee intact.
    """
    group = weyl_group(rd)
    seen: dict[IntVec, IntVec] = {}
    frontier = list(zip(rd.simple_roots, rd.simple_coroots))
    for root, coroot in frontier:
        seen[root] = coroot
    while frontier:
        nxt = []
        for root, coroot in frontier:
            for s in group.simple:
                r2 = mat_vec(s.mat_on_star, root)
                if r2 not in seen:
                    c2 = mat_vec(s.mat_on_costar, coroot)
                    seen[r2] = c2
                    nxt.append((r2, c2))
        frontier = nxt

    def height(root: IntVec) -> Fraction:
        return sum(_coefficients_in_basis(rd.simple_roots, root))

    positive = [
        (root, coroot)
        for root, coroot in seen.items()
        if all(c >= 0 for c in _coefficients_in_basis(rd.simple_roots, root))
    ]
    positive.sort(key=lambda pair: (height(pair[0]), pair[0]))
    return tuple(positive)


def positive_roots(rd: RootDatum) -> tuple[IntVec, ...]:
    return tuple(root for root, _ in positive_root_pairs(rd))


def inversion_set(w: WeylElement, rd: RootDatum) -> frozenset[IntVec]:
    """The positive roots sent to negative roots by w^{-1}.

    Its size equals the length of w.
    """
    pos = set(positive_roots(rd))
    w_inv_on_star = transpose(w.mat_on_costar)
    return frozenset(a for a in pos if mat_vec(w_inv_on_star, a) not in pos)


def rho_vectors(rd: RootDatum) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Half-sums of the positive roots and of the positive coroots.

    Pairing either against any simple (co)root of the other side gives 1.
    """
    pairs = positive_root_pairs(rd)
    n = rd.rank
    rho = tuple(sum(Fraction(root[i]) for root, _ in pairs) / 2 for i in range(n))
    rho_vee = tuple(sum(Fraction(coroot[i]) for _, coroot in pairs) / 2 for i in range(n))
    return rho, rho_vee
