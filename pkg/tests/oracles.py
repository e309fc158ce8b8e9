"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the package's algorithms; lattices are built from
explicit sets and compared through plain Python loops.
"""

from itertools import combinations, permutations, product


def set_lattice(sets):
    """(leq, meet, join) tables of a family of frozensets closed under
    intersection, ordered by inclusion; join is the least member above."""
    sets = list(sets)
    n = len(sets)
    leq = [[sets[a] <= sets[b] for b in range(n)] for a in range(n)]

    def least_above(a, b):
        ups = [c for c in range(n) if leq[a][c] and leq[b][c]]
        return min(ups, key=lambda c: len(sets[c]))

    def greatest_below(a, b):
        downs = [c for c in range(n) if leq[c][a] and leq[c][b]]
        return max(downs, key=lambda c: len(sets[c]))

    meet = [[greatest_below(a, b) for b in range(n)] for a in range(n)]
    join = [[least_above(a, b) for b in range(n)] for a in range(n)]
    return leq, meet, join


def gf2_subspaces(dim, q=2):
    """All subspaces of F_q^dim as frozensets of vectors, by brute force over
    spans of every subset of at most ``dim`` vectors."""
    vecs = list(product(range(q), repeat=dim))
    found = set()
    for r in range(dim + 1):
        for gens in combinations(vecs, r):
            span = set()
            for coeffs in product(range(q), repeat=r):
                span.add(tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) % q for i in range(dim)))
            if not span:
                span = {tuple([0] * dim)}
            found.add(frozenset(span))
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def complementary_pairs(leq, meet, join):
    n = len(leq)
    bot = next(a for a in range(n) if all(leq[a]))
    top = next(a for a in range(n) if all(leq[b][a] for b in range(n)))
    return sorted((a, b) for a in range(n) for b in range(n) if meet[a][b] == bot and join[a][b] == top)


def is_modular(leq, meet, join):
    n = len(leq)
    for a, b, c in product(range(n), repeat=3):
        if leq[a][c] and join[a][meet[b][c]] != meet[join[a][b]][c]:
            return False
    return True


def brute_isomorphic(leq1, leq2):
    n = len(leq1)
    if n != len(leq2):
        return False
    for p in permutations(range(n)):
        if all(leq1[a][b] == leq2[p[a]][p[b]] for a in range(n) for b in range(n)):
            return True
    return False


def nv_map(meet, join, n_, v):
    return tuple(meet[v][join[n_][x]] for x in range(len(meet)))


def then(f, g):
    """Apply f, then g."""
    return tuple(g[f[x]] for x in range(len(f)))


def gaussian_binomial(k, r, q):
    num = den = 1
    for i in range(r):
        num *= q ** (k - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def matrix_idempotents(q, k):
    return sum(gaussian_binomial(k, r, q) * q ** (r * (k - r)) for r in range(k + 1))


def gl_order(q, k):
    out = 1
    for i in range(k):
        out *= q ** k - q ** i
    return out


def matmul(a, b, q):
    k = len(a)
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) % q for j in range(k)) for i in range(k))


def all_matrices(q, k):
    for entries in product(range(q), repeat=k * k):
        yield tuple(tuple(entries[i * k:(i + 1) * k]) for i in range(k))


def bfs_distance(nodes, adjacent, s, t):
    """d(s, s) = 1; otherwise the edge count of a shortest path, 0 if none."""
    if s == t:
        return 1
    seen = {s}
    frontier = [s]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for y in nodes:
                if y not in seen and adjacent(x, y):
                    if y == t:
                        return d
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return 0
