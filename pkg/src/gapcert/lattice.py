"""Decorated hexagonal-lattice graphs and their AKLT Hamiltonians.

Every vertex carries ``two_s`` equal to its degree in the full decorated
lattice: hubs are spin 3/2, decoration sites spin 1. The interaction on an
edge is the projector onto the maximal total spin ``(two_s_a + two_s_b)/2``,
i.e. ``z(e)`` is the sum of the lattice degrees of its endpoints. Cut-out
patches (Y-graphs, the two-hub graph G) keep those lattice tags, so a leg
that is truncated at a patch boundary still sees the bulk projectors.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator

from .spin import SparseHermitianOperator, apply_two_site, embed_two_site, total_spin_projector

REGIONS = ("GL", "CN", "GR", "CENTER", "BULK")


@dataclass(frozen=True)
class Vertex:
    id: int
    two_s: int
    region: str


@dataclass(frozen=True)
class DecoratedGraph:
    """Vertices in tensor-factor order plus an undirected edge list.

    ``centers`` lists the spin-3/2 hubs the graph was built around.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    centers: tuple[int, ...] = ()
    name: str = ""
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {v.id: k for k, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        seen = set()
        for a, b in self.edges:
            if a == b or a not in index or b not in index:
                raise ValueError(f"invalid edge ({a}, {b})")
            key = frozenset((a, b))
            if key in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add(key)
        for v in self.vertices:
            if v.region not in REGIONS:
                raise ValueError(f"unknown region {v.region!r}")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.vertices)

    def position(self, vid: int) -> int:
        """Tensor-factor position of vertex ``vid``."""
        return self._index[vid]

    def vertex(self, vid: int) -> Vertex:
        return self.vertices[self._index[vid]]

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(v.two_s + 1 for v in self.vertices)

    @property
    def hilbert_dim(self) -> int:
        return int(np.prod(self.local_dims, dtype=np.int64))

    def degrees(self) -> dict[int, int]:
        deg = Counter()
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return {v.id: deg[v.id] for v in self.vertices}

    def z(self, edge: tuple[int, int]) -> int:
        a, b = edge
        return self.vertex(a).two_s + self.vertex(b).two_s

    def region(self, name: str) -> list[int]:
        return [v.id for v in self.vertices if v.region == name]

    def subgraph(self, ids, name: str = "") -> "DecoratedGraph":
        """Induced subgraph; keeps the relative vertex order and the spin tags."""
        keep = set(ids)
        verts = tuple(v for v in self.vertices if v.id in keep)
        edges = tuple(e for e in self.edges if e[0] in keep and e[1] in keep)
        centers = tuple(c for c in self.centers if c in keep)
        return DecoratedGraph(verts, edges, centers, name)

    def to_json(self) -> str:
        doc = {
            "vertices": [{"id": v.id, "two_s": v.two_s, "region": v.region} for v in self.vertices],
            "edges": [list(e) for e in self.edges],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "DecoratedGraph":
        doc = json.loads(text)
        verts = tuple(Vertex(int(v["id"]), int(v["two_s"]), v["region"]) for v in doc["vertices"])
        edges = tuple((int(a), int(b)) for a, b in doc["edges"])
        centers = tuple(v.id for v in verts if v.two_s == 3)
        return cls(verts, edges, centers)


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"decoration number must be a positive integer, got {n!r}")


def build_g_graph(n: int) -> DecoratedGraph:
    """Two adjacent hubs v, w with their five decorated legs (G = G_L - C_n - G_R).

    Vertex order follows the product basis of the MPS description:
    G_L is ``(a_1, b_1), ..., (a_n, b_n), v`` with ``a_1, b_1`` the outer ends
    of v's two free legs; the shared chain is ``c_1 .. c_n`` from v to w; G_R is
    ``w, (d_1, e_1), ..., (d_n, e_n)`` with ``d_1, e_1`` next to w.
    """
    _check_n(n)
    v_id, w_id = 0, 1
    a = [2 + k for k in range(n)]              # leg 1 of v, a[0] outermost
    b = [2 + n + k for k in range(n)]          # leg 2 of v
    c = [2 + 2 * n + k for k in range(n)]      # shared chain, c[0] next to v
    d = [2 + 3 * n + k for k in range(n)]      # leg 1 of w, d[0] next to w
    e = [2 + 4 * n + k for k in range(n)]      # leg 2 of w

    verts = []
    for k in range(n):
        verts += [Vertex(a[k], 2, "GL"), Vertex(b[k], 2, "GL")]
    verts.append(Vertex(v_id, 3, "GL"))
    verts += [Vertex(x, 2, "CN") for x in c]
    verts.append(Vertex(w_id, 3, "GR"))
    for k in range(n):
        verts += [Vertex(d[k], 2, "GR"), Vertex(e[k], 2, "GR")]

    edges = []
    for leg in (a, b):
        edges += [(leg[k], leg[k + 1]) for k in range(n - 1)]
        edges.append((leg[-1], v_id))
    edges.append((v_id, c[0]))
    edges += [(c[k], c[k + 1]) for k in range(n - 1)]
    edges.append((c[-1], w_id))
    for leg in (d, e):
        edges.append((w_id, leg[0]))
        edges += [(leg[k], leg[k + 1]) for k in range(n - 1)]
    return DecoratedGraph(tuple(verts), tuple(edges), (v_id, w_id), f"G({n})")


def build_y_graph(n: int) -> DecoratedGraph:
    """One hub with three decorated legs of ``n`` spin-1 sites each (3n+1 vertices).

    Same vertex order and ids as the ``G_L - C_n`` part of :func:`build_g_graph`.
    """
    g = build_g_graph(n)
    sub = g.subgraph(g.region("GL") + g.region("CN"), f"Y({n})")
    verts = tuple(
        Vertex(v.id, v.two_s, "CENTER" if v.id == 0 else "BULK") for v in sub.vertices
    )
    return DecoratedGraph(verts, sub.edges, (0,), sub.name)


def build_decorated_torus(cells_x: int, cells_y: int, n: int) -> DecoratedGraph:
    """Periodic decorated honeycomb on a brick-wall ``cells_x`` x ``cells_y`` patch.

    Unit cell (x, y) holds hubs A and B; A(x, y) bonds to B(x, y), B(x-1, y)
    and B(x, y-1). Each bond becomes a path of ``n`` spin-1 sites from A to B.
    Hubs come first in the vertex order, then the decorations bond by bond.
    """
    _check_n(n)
    for c in (cells_x, cells_y):
        if int(c) != c or c < 1:
            raise ValueError(f"cell counts must be positive integers, got {c!r}")
    ncell = cells_x * cells_y

    def hub(x, y, sub):
        return 2 * ((y % cells_y) * cells_x + (x % cells_x)) + sub

    verts = [Vertex(i, 3, "CENTER") for i in range(2 * ncell)]
    edges = []
    next_id = 2 * ncell
    for y in range(cells_y):
        for x in range(cells_x):
            a = hub(x, y, 0)
            for bx, by in ((x, y), (x - 1, y), (x, y - 1)):
                bnode = hub(bx, by, 1)
                path = list(range(next_id, next_id + n))
                next_id += n
                verts += [Vertex(p, 2, "BULK") for p in path]
                chain = [a] + path + [bnode]
                edges += list(zip(chain[:-1], chain[1:]))
    return DecoratedGraph(
        tuple(verts), tuple(edges), tuple(range(2 * ncell)), f"torus({cells_x},{cells_y},{n})"
    )


def y_support(graph: DecoratedGraph, hub: int) -> list[int]:
    """Vertex ids of Y_hub: the hub plus every decoration site on its three bonds."""
    if graph.vertex(hub).two_s != 3:
        raise ValueError(f"vertex {hub} is not a hub")
    adj = {v.id: [] for v in graph.vertices}
    for a, b in graph.edges:
        adj[a].append(b)
        adj[b].append(a)
    support = [hub]
    for start in adj[hub]:
        prev, cur = hub, start
        while graph.vertex(cur).two_s == 2:
            support.append(cur)
            nxt = [x for x in adj[cur] if x != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
    order = {v.id: k for k, v in enumerate(graph.vertices)}
    return sorted(set(support), key=order.__getitem__)


def _validate(graph: DecoratedGraph) -> None:
    if not graph.vertices:
        raise ValueError("empty graph")
    deg = graph.degrees()
    for v in graph.vertices:
        if deg[v.id] > v.two_s:
            raise ValueError(
                f"vertex {v.id} has degree {deg[v.id]} but spin tag {v.two_s}/2"
            )


def edge_terms(graph: DecoratedGraph, edges=None):
    """Yield ``(projector, pos_a, pos_b)`` for the given edges (default: all)."""
    _validate(graph)
    for a, b in graph.edges if edges is None else edges:
        sa, sb = graph.vertex(a).two_s, graph.vertex(b).two_s
        proj = total_spin_projector(sa, sb, graph.z((a, b)))
        yield proj, graph.position(a), graph.position(b)


def hamiltonian(graph: DecoratedGraph, edges=None) -> SparseHermitianOperator:
    """Sum of maximal-total-spin projectors over the edges of ``graph``."""
    dims = graph.local_dims
    total = sparse.csr_matrix((graph.hilbert_dim,) * 2, dtype=complex)
    for proj, i, j in edge_terms(graph, edges):
        total = total + embed_two_site(proj, i, j, dims).matrix
    total = total.tocsr()
    total.sort_indices()
    return SparseHermitianOperator(total, dims)


def hamiltonian_operator(graph: DecoratedGraph, edges=None) -> LinearOperator:
    """Matrix-free version of :func:`hamiltonian` for large Hilbert spaces."""
    dims = graph.local_dims
    terms = list(edge_terms(graph, edges))
    dim = graph.hilbert_dim

    def matvec(x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for proj, i, j in terms:
            out += apply_two_site(proj, i, j, dims, x)
        return out

    return LinearOperator((dim, dim), matvec=matvec, matmat=matvec, rmatvec=matvec, dtype=complex)


def local_hamiltonian(graph: DecoratedGraph, hub: int) -> tuple[DecoratedGraph, SparseHermitianOperator]:
    """h_hub: the Hamiltonian of the edges internal to Y_hub, on Y_hub's own sites."""
    sub = graph.subgraph(y_support(graph, hub), f"Y_{hub}")
    return sub, hamiltonian(sub)
