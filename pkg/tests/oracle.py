"""Independent reference constructions built directly from the definitions.

Nothing here touches the library's graph, BFS or normal-form code; words are
plain strings over lowercase generators with uppercase inverses.
"""

from __future__ import annotations

import math
from itertools import combinations, product

import networkx as nx


def inv(letter: str) -> str:
    return letter.swapcase()


def free_reduce(word: str) -> str:
    out = []
    for c in word:
        if out and out[-1] == inv(c):
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def free_ball(rank: int, radius: int) -> list[str]:
    gens = "abcdfg"[:rank]
    letters = [c for g in gens for c in (g, g.upper())]
    words = {""}
    frontier = {""}
    for _ in range(radius):
        frontier = {free_reduce(w + c) for w in frontier for c in letters} - words
        words |= frontier
    return sorted(words, key=lambda w: (len(w), w))


def word_to_syllables(word: str) -> list[tuple[str, int]]:
    """'aaB' -> [('a', 2), ('b', -1)] for feeding a parser."""
    out = []
    for c in word:
        s, k = c.lower(), (1 if c.islower() else -1)
        if out and out[-1][0] == s and (out[-1][1] > 0) == (k > 0):
            out[-1] = (s, out[-1][1] + k)
        else:
            out.append((s, k))
    return out


def cayley_ball_graph(rank: int, radius: int) -> nx.Graph:
    ball = free_ball(rank, radius)
    inside = set(ball)
    G = nx.Graph()
    G.add_nodes_from(ball)
    letters = [c for g in "abcdfg"[:rank] for c in (g, g.upper())]
    for w in ball:
        for c in letters:
            v = free_reduce(w + c)
            if v in inside:
                G.add_edge(w, v)
    return G


def horoball_graph(points, metric, depth: int) -> nx.Graph:
    """Combinatorial horoball on points x {0..depth} from the definition."""
    G = nx.Graph()
    for p in points:
        for t in range(depth + 1):
            G.add_node((p, t))
            if t < depth:
                G.add_edge((p, t), (p, t + 1))
    for p, q in combinations(points, 2):
        d = metric(p, q)
        for t in range(depth + 1):
            if 1 <= d <= math.floor(math.exp(t)):
                G.add_edge((p, t), (q, t))
    return G


def z_points(width: int) -> list[int]:
    return list(range(-width, width + 1))


def z2_points(width: int) -> list[tuple[int, int]]:
    return [(x, y) for x, y in product(range(-width, width + 1), repeat=2) if abs(x) + abs(y) <= width]


def l1(p, q) -> int:
    if isinstance(p, int):
        return abs(p - q)
    return sum(abs(a - b) for a, b in zip(p, q))


def free_cusped_graph(radius: int, depth: int) -> nx.Graph:
    """Cusped truncation of (Free(2), {<a>}) with margin 0.

    Cosets g<a> are identified by stripping trailing a/A letters; the
    horoball over a coset sits on the coset's elements inside the ball.
    """
    G = cayley_ball_graph(2, radius)
    cosets: dict[str, list[str]] = {}
    for w in list(G.nodes):
        cosets.setdefault(w.rstrip("aA"), []).append(w)

    def offset(rep: str, w: str) -> int:
        tail = w[len(rep):]
        return tail.count("a") - tail.count("A")

    for rep, members in cosets.items():
        for w in members:
            prev = w
            for t in range(1, depth + 1):
                node = ("horo", w, t)
                G.add_edge(prev, node)
                prev = node
        for u, v in combinations(members, 2):
            d = abs(offset(rep, u) - offset(rep, v))
            for t in range(1, depth + 1):
                if 1 <= d <= math.floor(math.exp(t)):
                    G.add_edge(("horo", u, t), ("horo", v, t))
    return G


def all_pairs(G: nx.Graph) -> dict:
    return dict(nx.all_pairs_shortest_path_length(G))


def four_point_brute(D, n: int) -> float:
    """max over all ordered quadruples of min{(u|w)_x, (v|w)_x} - (u|v)_x."""

    def gp(x, y, z):
        return (D[x][y] + D[x][z] - D[y][z]) / 2

    best = 0.0
    for x, u, v, w in product(range(n), repeat=4):
        best = max(best, min(gp(x, u, w), gp(x, v, w)) - gp(x, u, v))
    return best


def equilateral_brute(D, ball: list) -> float:
    """max over triples of the least corner Gromov product."""
    best = -1.0
    for x, y, z in combinations(ball, 3):
        a = (D[x][y] + D[x][z] - D[y][z]) / 2
        b = (D[y][x] + D[y][z] - D[x][z]) / 2
        c = (D[z][x] + D[z][y] - D[x][y]) / 2
        best = max(best, min(a, b, c))
    return best
