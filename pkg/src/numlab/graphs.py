"""Graph construction, sampling and exact invariants.

Graphs are undirected and simple, stored as one adjacency bitmask per
vertex (bit j of ``adj[i]`` set iff edge (i, j) present).  All values are
immutable after construction; samplers take explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

STRONG_PRODUCT_CAP = 4096


class GraphError(ValueError):
    """Invalid graph data or violated precondition."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on n labeled vertices, adjacency as bitsets."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError("vertex count must be nonnegative")
        if len(self.adj) != self.n:
            raise GraphError("adjacency row count must equal n")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.adj):
            if row & ~full:
                raise GraphError(f"row {i} has bits beyond vertex range")
            if row >> i & 1:
                raise GraphError(f"self-loop at vertex {i}")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if (self.adj[i] >> j & 1) != (self.adj[j] >> i & 1):
                    raise GraphError(f"adjacency not symmetric at ({i}, {j})")

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise GraphError(f"bad edge ({i}, {j})")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return Graph(n, tuple(adj))

    @staticmethod
    def from_matrix(a: np.ndarray) -> "Graph":
        a = np.asarray(a, dtype=bool)
        n = a.shape[0]
        adj = [int(sum(1 << j for j in np.nonzero(a[i])[0])) for i in range(n)]
        return Graph(n, tuple(adj))

    def to_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for i, row in enumerate(self.adj):
            for j in _bits(row):
                a[i, j] = True
        return a

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def degree(self, i: int) -> int:
        return bin(self.adj[i]).count("1")

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n):
            row = self.adj[i] >> (i + 1)
            for j in _bits(row):
                out.append((i, i + 1 + j))
        return out

    def edge_count(self) -> int:
        return sum(self.degree(i) for i in range(self.n)) // 2


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class CirculantSpec:
    """Circulant graph on Z_n: edge (i, j) iff (i - j) mod n hits the connection set."""

    n: int
    conn: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError("circulant size must be positive")
        object.__setattr__(self, "conn", frozenset(int(s) for s in self.conn))
        for s in self.conn:
            if not 1 <= s <= self.n // 2:
                raise GraphError(f"shift {s} outside 1..{self.n // 2}")

    def shifts(self) -> set[int]:
        """Full symmetric difference set conn ∪ {n - s}."""
        return set(self.conn) | {self.n - s for s in self.conn}

    def complement(self) -> "CirculantSpec":
        return CirculantSpec(self.n, frozenset(range(1, self.n // 2 + 1)) - self.conn)


def build_circulant(spec: CirculantSpec) -> Graph:
    """Expand a CirculantSpec to its Graph (vertex-transitive by construction)."""
    shifts = spec.shifts()
    n = spec.n
    row0 = 0
    for s in shifts:
        row0 |= 1 << s
    adj = []
    for i in range(n):
        # rotate row0 left by i within n bits
        adj.append(((row0 << i) | (row0 >> (n - i))) & ((1 << n) - 1) if i else row0)
    return Graph(n, tuple(adj))


def sample_er(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each unordered pair present independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise GraphError("probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    u = rng.random((n, n))
    upper = np.triu(u < p, 1)
    return Graph.from_matrix(upper | upper.T)


def sample_random_circulant(n: int, seed: int) -> CirculantSpec:
    """Uniformly random symmetric connection set: one fair bit per residue class.

    Residues 1..ceil((n-1)/2); for even n the self-paired residue n/2 is a
    single independent bit.
    """
    if n < 2:
        raise GraphError("need n >= 2")
    rng = np.random.default_rng(seed)
    nbits = (n - 1 + 1) // 2  # ceil((n-1)/2)
    bits = rng.integers(0, 2, size=nbits)
    return CirculantSpec(n, frozenset(i + 1 for i in range(nbits) if bits[i]))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def quadratic_residues(p: int) -> set[int]:
    """Nonzero squares mod p."""
    return {(i * i) % p for i in range(1, p)}


def build_paley(p: int) -> CirculantSpec:
    """Paley graph on Z_p for prime p = 1 mod 4: edges at quadratic-residue differences."""
    if not is_prime(p):
        raise GraphError(f"{p} is not prime")
    if p % 4 != 1:
        raise GraphError(f"{p} is not 1 mod 4")
    qr = quadratic_residues(p)
    return CirculantSpec(p, frozenset(s for s in qr if s <= (p - 1) // 2))


def primitive_root(p: int) -> int:
    """Smallest primitive root mod prime p."""
    phi = p - 1
    factors = set()
    m = phi
    f = 2
    while f * f <= m:
        while m % f == 0:
            factors.add(f)
            m //= f
        f += 1
    if m > 1:
        factors.add(m)
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
    raise GraphError(f"no primitive root found for {p}")


def paley_localization_spec(p: int) -> CirculantSpec:
    """Induced subgraph of Paley(p) on the neighbors of 0, in its circulant labeling.

    The neighbors of 0 are the quadratic residues; listing them as powers of
    t = g^2 (g a primitive root) makes the induced graph circulant on
    m = (p-1)/2 vertices with shift d present iff t^d - 1 is a residue.
    """
    build_paley(p)  # validates p
    m = (p - 1) // 2
    g = primitive_root(p)
    t = (g * g) % p
    qr = quadratic_residues(p)
    powers = [1]
    for _ in range(m):
        powers.append((powers[-1] * t) % p)
    conn = frozenset(d for d in range(1, m // 2 + 1) if (powers[d] - 1) % p in qr)
    return CirculantSpec(m, conn)


def paley_localization_order(p: int) -> list[int]:
    """Vertex order (powers of g^2) under which localize(Paley(p), [0]) matches
    build_circulant(paley_localization_spec(p))."""
    m = (p - 1) // 2
    g = primitive_root(p)
    t = (g * g) % p
    out = [1]
    for _ in range(m - 1):
        out.append((out[-1] * t) % p)
    return out


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, tuple((~row & full) & ~(1 << i) for i, row in enumerate(g.adj)))


def permute(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel vertices: new vertex i is old vertex perm[i]."""
    if sorted(perm) != list(range(g.n)):
        raise GraphError("perm must be a permutation of the vertices")
    inv = [0] * g.n
    for new, old in enumerate(perm):
        inv[old] = new
    adj = [0] * g.n
    for i, j in g.edges():
        a, b = inv[i], inv[j]
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return Graph(g.n, tuple(adj))


def localize(g: Graph, pins: Sequence[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on the common neighbors of every pinned vertex.

    Pins are excluded; kept vertices are relabeled 0..m-1 in increasing
    original label, and that original-label list is returned alongside.
    """
    if len(set(pins)) != len(pins):
        raise GraphError("pins must be distinct")
    for v in pins:
        if not 0 <= v < g.n:
            raise GraphError(f"pin {v} out of range")
    mask = (1 << g.n) - 1
    for v in pins:
        mask &= g.adj[v]
    for v in pins:
        mask &= ~(1 << v)
    keep = list(_bits(mask))
    sub = [0] * len(keep)
    for a, i in enumerate(keep):
        for b, j in enumerate(keep):
            if a != b and g.has_edge(i, j):
                sub[a] |= 1 << b
    return Graph(len(keep), tuple(sub)), keep


def strong_product(g: Graph, h: Graph, cap: int = STRONG_PRODUCT_CAP) -> Graph:
    """Strong graph product: pairs adjacent iff each coordinate is equal or adjacent."""
    if g.n * h.n > cap:
        raise GraphError(f"product would have {g.n * h.n} vertices (cap {cap})")
    ag = g.to_matrix() | np.eye(g.n, dtype=bool)
    ah = h.to_matrix() | np.eye(h.n, dtype=bool)
    prod = np.kron(ag, ah)
    np.fill_diagonal(prod, False)
    return Graph.from_matrix(prod)


def strong_power(g: Graph, k: int, cap: int = STRONG_PRODUCT_CAP) -> Graph:
    out = g
    for _ in range(k - 1):
        out = strong_product(out, g, cap=cap)
    return out


@dataclass(frozen=True)
class GraphInvariants:
    clique: int
    independence: int
    chromatic: int


def _max_clique(adj: Sequence[int], n: int) -> int:
    """Exact maximum clique via branch and bound with greedy coloring bound."""
    best = 0

    def color_sort(cand: int) -> list[tuple[int, int]]:
        # greedy coloring of candidates; returns (vertex, color) in color order
        order = []
        color = 0
        rest = cand
        while rest:
            color += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v)
                avail &= ~adj[v]
                rest &= ~(1 << v)
                order.append((v, color))
        return order

    def expand(cand: int, size: int) -> None:
        nonlocal best
        order = color_sort(cand)
        for v, color in reversed(order):
            if size + color <= best:
                return
            best = max(best, size + 1)
            expand(cand & adj[v], size + 1)
            cand &= ~(1 << v)

    expand((1 << n) - 1, 0)
    return best


def clique_number(g: Graph) -> int:
    if g.n == 0:
        return 0
    return _max_clique(g.adj, g.n)


def independence_number(g: Graph) -> int:
    return clique_number(complement(g))


def chromatic_number(g: Graph) -> int:
    """Exact chromatic number: iterative deepening on k-colorability."""
    if g.n == 0:
        return 0
    lo = clique_number(g)
    order = sorted(range(g.n), key=g.degree, reverse=True)
    adj = g.adj

    def colorable(k: int) -> bool:
        colors = [0] * g.n  # 1..k, 0 = unassigned

        def assign(pos: int, used: int) -> bool:
            if pos == g.n:
                return True
            v = order[pos]
            seen = {colors[u] for u in _bits(adj[v]) if colors[u]}
            limit = min(k, used + 1)
            for c in range(1, limit + 1):
                if c in seen:
                    continue
                colors[v] = c
                if assign(pos + 1, max(used, c)):
                    return True
                colors[v] = 0
            return False

        return assign(0, 0)

    k = lo
    while not colorable(k):
        k += 1
    return k


def small_invariants(g: Graph) -> GraphInvariants:
    """Exact clique, independence and chromatic numbers (n <= 32 only)."""
    if g.n > 32:
        raise GraphError("exact invariants capped at 32 vertices")
    w = clique_number(g)
    a = independence_number(g)
    if w != independence_number(complement(g)):
        raise AssertionError("clique/independence duality violated")
    return GraphInvariants(clique=w, independence=a, chromatic=chromatic_number(g))


def shannon_bounds(g: Graph, k: int, theta_fn=None) -> tuple[float, float]:
    """Capacity bracket: alpha(G^boxtimes-k)^(1/k) and the theta upper bound."""
    power = strong_power(g, k)
    if power.n > 32:
        raise GraphError("powered graph too large for exact independence number")
    lower = independence_number(power) ** (1.0 / k)
    if theta_fn is None:
        from .theta import theta_sdp

        theta_fn = lambda graph: theta_sdp(graph).value
    theta = theta_fn(g)
    return lower, theta


# --- text formats ----------------------------------------------------------


def graph_to_text(g: Graph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"{i} {j}" for i, j in g.edges()]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n "):
        raise GraphError("first line must be 'n <count>'")
    n = int(lines[0][2:])
    seen = set()
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line: {ln!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise GraphError(f"edge ({i}, {j}) out of range")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"duplicate edge ({i}, {j})")
        seen.add(key)
        edges.append(key)
    return Graph.from_edges(n, edges)


def circulant_to_text(spec: CirculantSpec) -> str:
    return f"circulant {spec.n} : {','.join(str(s) for s in sorted(spec.conn))}\n"


def circulant_from_text(text: str) -> CirculantSpec:
    body = text.strip()
    if not body.startswith("circulant "):
        raise GraphError("expected 'circulant <n> : s1,s2,...'")
    head, _, tail = body.partition(":")
    n = int(head.split()[1])
    tail = tail.strip()
    conn = frozenset(int(s) for s in tail.split(",") if s.strip()) if tail else frozenset()
    return CirculantSpec(n, conn)
