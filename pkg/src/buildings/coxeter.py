"""Finite Coxeter systems: validation, classification, element tables and charts.

Elements are enumerated by breadth-first search over the contragredient
(Tits) representation.  Each element is identified by the image of the
vector (1, ..., 1) in the dual space, which lies in the interior of the
fundamental chamber of the Tits cone, so the orbit map is injective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

INF = math.inf
DEFAULT_CAP = 100_000
TOL = 1e-9


class CoxeterError(ValueError):
    """Invalid Coxeter data or an operation that needs a spherical system."""


@dataclass(frozen=True)
class CoxeterSystem:
    labels: tuple[str, ...]
    matrix: tuple[tuple[float, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.labels)

    def m(self, i: int, j: int) -> float:
        return self.matrix[i][j]

    def neighbours(self, i: int) -> list[int]:
        """Generators joined to ``i`` in the Coxeter diagram (m >= 3)."""
        return [j for j in range(self.rank) if j != i and self.matrix[i][j] != 2]

    def is_isolated(self, i: int) -> bool:
        return not self.neighbours(i)

    def components(self) -> list[list[int]]:
        """Connected components of the Coxeter diagram, sorted."""
        seen: set[int] = set()
        comps = []
        for start in range(self.rank):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in self.neighbours(i):
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            comps.append(sorted(comp))
        return comps

    def restrict(self, gens: list[int]) -> "CoxeterSystem":
        return CoxeterSystem(
            tuple(self.labels[i] for i in gens),
            tuple(tuple(self.matrix[i][j] for j in gens) for i in gens),
        )

    def to_json(self) -> list[list[int]]:
        """Matrix with infinity encoded as 0."""
        return [[0 if v == INF else int(v) for v in row] for row in self.matrix]

    @cached_property
    def table(self) -> "ElementTable":
        return enumerate_elements(self)


def new_coxeter_system(matrix, labels=None) -> CoxeterSystem:
    """Validate a Coxeter matrix.  Entries 0 or ``inf`` stand for infinity."""
    rows = [list(r) for r in matrix]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise CoxeterError("Coxeter matrix must be square and nonempty")
    m = [[INF if (v == 0 or v == INF) else v for v in r] for r in rows]
    for i in range(n):
        if m[i][i] != 1:
            raise CoxeterError(f"diagonal entry m({i},{i}) must be 1")
        for j in range(n):
            v = m[i][j]
            if v != m[j][i]:
                raise CoxeterError(f"matrix is not symmetric at ({i},{j})")
            if i != j and v != INF:
                if int(v) != v or v < 2:
                    raise CoxeterError(f"off-diagonal entry m({i},{j})={v} must be an integer >= 2")
    m = [[v if v == INF else int(v) for v in r] for r in m]
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = tuple(str(x) for x in labels)
    if len(labels) != n or len(set(labels)) != n:
        raise CoxeterError("generator labels must be distinct, one per row")
    return CoxeterSystem(labels, tuple(tuple(r) for r in m))


def _classify_component(W: CoxeterSystem, comp: list[int]) -> str | None:
    """Name of a connected finite diagram, or None if the component is infinite."""
    n = len(comp)
    if n == 1:
        return "A1"
    sub = [[W.m(i, j) for j in comp] for i in comp]
    edges = [(a, b, sub[a][b]) for a in range(n) for b in range(a + 1, n) if sub[a][b] != 2]
    if any(w == INF for _, _, w in edges):
        return None
    if n == 2:
        w = edges[0][2]
        return {3: "A2", 4: "B2", 6: "G2"}.get(w, f"I2({w})")
    if len(edges) != n - 1:
        return None  # contains a cycle
    deg = [0] * n
    for a, b, _ in edges:
        deg[a] += 1
        deg[b] += 1
    heavy = [e for e in edges if e[2] > 3]
    if max(deg) > 3 or sum(1 for d in deg if d == 3) > 1:
        return None
    if max(deg) == 3:
        if heavy:
            return None
        centre = deg.index(3)
        arms = sorted(_arm_length(edges, centre, nb) for nb in _nbrs(edges, centre))
        if arms[0] == 1 and arms[1] == 1:
            return f"D{n}"
        if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
            return f"E{n}"
        return None
    # the diagram is a path
    if not heavy:
        return f"A{n}"
    if len(heavy) > 1:
        return None
    a, b, w = heavy[0]
    at_end = deg[a] == 1 or deg[b] == 1
    if w == 4:
        if at_end:
            return f"B{n}"
        return "F4" if n == 4 else None
    if w == 5 and at_end and n in (3, 4):
        return f"H{n}"
    return None


def _nbrs(edges, v):
    return [b if a == v else a for a, b, _ in edges if v in (a, b)]


def _arm_length(edges, centre, start):
    length, prev, cur = 1, centre, start
    while True:
        nxt = [x for x in _nbrs(edges, cur) if x != prev]
        if not nxt:
            return length
        prev, cur = cur, nxt[0]
        length += 1


def is_spherical(W: CoxeterSystem) -> tuple[bool, list[str]]:
    """Finiteness via the classification of irreducible finite Coxeter diagrams."""
    names = []
    ok = True
    for comp in W.components():
        name = _classify_component(W, comp)
        if name is None:
            ok = False
            names.append("infinite")
        else:
            names.append(name)
    return ok, names


def _bilinear(W: CoxeterSystem) -> np.ndarray:
    n = W.rank
    B = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            v = W.m(i, j)
            B[i, j] = -1.0 if v == INF else -math.cos(math.pi / v)
    return B


def _key(v: np.ndarray) -> bytes:
    return (np.round(v, 7) + 0.0).tobytes()


@dataclass
class ElementTable:
    """All elements of a finite Coxeter group, indexed 0..N-1 with 0 the identity.

    ``words[w]`` is the shortlex-least reduced word, ``right[w][s]`` the index of
    w*s.  Indices are ordered shortlex by normal form.
    """

    system: CoxeterSystem
    words: list[tuple[int, ...]]
    right: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int] = field(repr=False)

    def __len__(self):
        return len(self.words)

    @property
    def identity(self) -> int:
        return 0

    def length(self, w: int) -> int:
        return len(self.words[w])

    @cached_property
    def longest(self) -> int:
        top = max(len(x) for x in self.words)
        cands = [w for w, x in enumerate(self.words) if len(x) == top]
        if len(cands) != 1:
            raise CoxeterError("no unique longest element")
        return cands[0]

    def gen(self, s: int) -> int:
        return self.right[0][s]

    def mul_word(self, w: int, word) -> int:
        for s in word:
            w = self.right[w][s]
        return w

    def mul(self, x: int, y: int) -> int:
        return self.mul_word(x, self.words[y])

    def inverse(self, w: int) -> int:
        return self.mul_word(0, reversed(self.words[w]))

    def element(self, word) -> int:
        return self.mul_word(0, word)

    def label(self, w: int) -> str:
        if not self.words[w]:
            return "1"
        return "".join(f"s{self.system.labels[s]}" for s in self.words[w])


def enumerate_elements(W: CoxeterSystem, cap: int = DEFAULT_CAP) -> ElementTable:
    """Breadth-first enumeration of W in shortlex order.

    Raises CoxeterError once more than ``cap`` elements have been produced.
    """
    n = W.rank
    B = _bilinear(W)
    # contragredient action on coordinates f_j = f(alpha_j): f_j -= 2 B_ij f_i
    refl = []
    for i in range(n):
        M = np.eye(n)
        M[i, :] -= 2 * B[i, :]
        refl.append(M.T)  # acts on row vectors: f @ M.T
    rho = np.ones(n)
    vecs = [rho]
    words: list[tuple[int, ...]] = [()]
    seen = {_key(rho): 0}
    level = [0]
    while level:
        nxt = []
        for s in range(n):
            block = np.array([vecs[w] for w in level]) @ refl[s].T
            for w, v in zip(level, block):
                k = _key(v)
                if k in seen:
                    continue
                idx = len(words)
                if idx >= cap:
                    raise CoxeterError(f"element count exceeds cap {cap}; W is infinite or too large")
                seen[k] = idx
                words.append((s,) + words[w])
                vecs.append(v)
                nxt.append(idx)
        nxt.sort(key=lambda i: words[i])
        level = nxt
    # renumber shortlex
    order = sorted(range(len(words)), key=lambda i: (len(words[i]), words[i]))
    words = [words[i] for i in order]
    vecs = [vecs[i] for i in order]
    seen = {_key(v): i for i, v in enumerate(vecs)}
    V = np.array(vecs)
    left = np.empty((len(words), n), dtype=np.int64)
    for s in range(n):
        for w, v in enumerate(V @ refl[s].T):
            left[w, s] = seen[_key(v)]
    # inverse of s_a1 ... s_ak is s_ak ... s_a1, built by left multiplication
    inv = [0] * len(words)
    for w, word in enumerate(words):
        x = 0
        for s in word:
            x = left[x, s]
        inv[w] = int(x)
    right = [tuple(inv[left[inv[w], s]] for s in range(n)) for w in range(len(words))]
    index = {word: i for i, word in enumerate(words)}
    return ElementTable(W, words, right, index)


def opposition_involution(W: CoxeterSystem) -> tuple[int, ...]:
    """The permutation i -> type of w0 s_i w0."""
    _require_spherical(W)
    T = W.table
    w0 = T.longest
    gens = {T.gen(s): s for s in range(W.rank)}
    out = []
    for i in range(W.rank):
        conj = T.mul(T.mul(w0, T.gen(i)), w0)
        out.append(gens[conj])
    return tuple(out)


def _require_spherical(W: CoxeterSystem):
    ok, _ = is_spherical(W)
    if not ok:
        raise CoxeterError("operation needs a spherical (finite) Coxeter system")


def block_sum(W1: CoxeterSystem, W2: CoxeterSystem) -> CoxeterSystem:
    """Coxeter system of the join: commuting union of the two generator sets."""
    labels = list(W1.labels)
    for lab in W2.labels:
        while lab in labels:
            lab = lab + "'"
        labels.append(lab)
    n1, n2 = W1.rank, W2.rank
    M = [[2] * (n1 + n2) for _ in range(n1 + n2)]
    for i in range(n1 + n2):
        M[i][i] = 1
    for i in range(n1):
        for j in range(n1):
            M[i][j] = W1.m(i, j)
    for i in range(n2):
        for j in range(n2):
            M[n1 + i][n1 + j] = W2.m(i, j)
    return new_coxeter_system(M, labels)


@dataclass
class SphericalChart:
    """Orthonormal model of the standard representation with G(i,i) = 1."""

    system: CoxeterSystem
    gram: np.ndarray
    roots: np.ndarray  # row i = unit simple root alpha_i
    reflections: list[np.ndarray]
    vertices: np.ndarray  # row k = unit vector of the type-k vertex of the base chamber

    @cached_property
    def element_matrices(self) -> list[np.ndarray]:
        T = self.system.table
        mats = []
        n = self.system.rank
        for word in T.words:
            M = np.eye(n)
            for s in word:
                M = M @ self.reflections[s]
            mats.append(M)
        return mats

    def point(self, w: int, types, coords) -> np.ndarray:
        """Unit vector for barycentric coords over base-chamber vertices of ``types``, moved by w."""
        v = np.zeros(self.system.rank)
        for k, x in zip(types, coords):
            v += x * self.vertices[k]
        v = self.element_matrices[w] @ v
        return v / np.linalg.norm(v)


def spherical_chart(W: CoxeterSystem) -> SphericalChart:
    n = W.rank
    G = np.eye(n)
    for i in range(n):
        for j in range(n):
            if i != j:
                v = W.m(i, j)
                if v == INF:
                    raise CoxeterError("Gram matrix not positive definite (infinite entry)")
                G[i, j] = -math.cos(math.pi / v)
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise CoxeterError("Gram matrix not positive definite: W is not spherical") from None
    if np.linalg.eigvalsh(G).min() <= TOL:
        raise CoxeterError("Gram matrix not positive definite: W is not spherical")
    roots = L
    refl = [np.eye(n) - 2 * np.outer(a, a) for a in roots]
    for R in refl:
        if not np.allclose(R @ R, np.eye(n), atol=TOL) or not np.allclose(R.T @ R, np.eye(n), atol=TOL):
            raise CoxeterError("reflection failed orthogonality check")
    inv = np.linalg.inv(roots)  # column k solves alpha_i . x = delta_ik
    verts = inv.T / np.linalg.norm(inv.T, axis=1)[:, None]
    return SphericalChart(W, G, roots, refl, verts)


def dihedral(m: int, labels=("0", "1")) -> CoxeterSystem:
    return new_coxeter_system([[1, m], [m, 1]], labels)
