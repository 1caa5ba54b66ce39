"""Exact combinatorics of strict closed paths and their dictionary weights.

A strict closed path of length k visits vertices with no immediate
repetition and returns to its start.  Its isomorphism class is encoded by
first-visit numbering: vertex labels are positive integers assigned in
order of first appearance, so the class of (a, b, c, a, b, a) is
(1, 2, 3, 1, 2, 1).

The weight of a path, given an injective assignment of its vertices to
dictionary atoms, is the product of consecutive inner products around the
cycle.  Expectations of these weights over uniformly random injective
assignments are computed exactly (by Moebius inversion over vertex
coincidence patterns, evaluated as tensor contractions of the dictionary
Gram matrix), which ties the Monte Carlo spectral statistics to closed
combinatorial quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dictionaries import Dictionary
from .errors import BudgetExceededError, NotATreeError, SingleVisitError

MAX_LENGTH = 10
MAX_VERTICES = 4
# atom budgets for the exact expectation: contraction work grows like
# atom_count^3 once three or more vertices are free
MAX_ATOMS_SMALL_CLASS = 2000  # |V| <= 2
MAX_ATOMS = 400  # |V| in {3, 4}


@dataclass(frozen=True)
class PathClass:
    """Isomorphism class of a strict closed path, in first-visit canonical form."""

    steps: tuple[int, ...]

    def __post_init__(self):
        s = self.steps
        if len(s) < 3:
            raise ValueError("a closed strict path has length at least 2")
        if s[0] != 1 or s[-1] != 1:
            raise ValueError("canonical form starts and ends at vertex 1")
        seen_max = 1
        for j in range(1, len(s)):
            if s[j] == s[j - 1]:
                raise ValueError(f"strictness violated at position {j}")
            if not 1 <= s[j] <= seen_max + 1:
                raise ValueError(f"first-visit numbering violated at position {j}")
            seen_max = max(seen_max, s[j])

    @property
    def k(self) -> int:
        return len(self.steps) - 1

    @property
    def vertex_count(self) -> int:
        return max(self.steps)

    @cached_property
    def edge_counts(self) -> dict[tuple[int, int], int]:
        """Directed traversal counts over the cycle."""
        counts: dict[tuple[int, int], int] = {}
        for u, v in zip(self.steps, self.steps[1:]):
            counts[(u, v)] = counts.get((u, v), 0) + 1
        return counts

    @cached_property
    def undirected_edges(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(e) for e in self.edge_counts)

    @cached_property
    def is_tree(self) -> bool:
        """Underlying graph is a tree and every edge is crossed once per direction."""
        if len(self.undirected_edges) != self.vertex_count - 1:
            return False
        for edge in self.undirected_edges:
            u, v = tuple(edge)
            if self.edge_counts.get((u, v), 0) != 1 or self.edge_counts.get((v, u), 0) != 1:
                return False
        return True

    def __str__(self) -> str:
        return "-".join(str(v) for v in self.steps)


def canonicalize(labels) -> PathClass:
    """First-visit renumbering of any labeled strict closed path."""
    mapping: dict = {}
    out = []
    for x in labels:
        if x not in mapping:
            mapping[x] = len(mapping) + 1
        out.append(mapping[x])
    return PathClass(tuple(out))


def enumerate_path_classes(k: int) -> list[PathClass]:
    """All isomorphism classes of strict closed paths of length k, in lexicographic order."""
    if not 2 <= k <= MAX_LENGTH:
        raise BudgetExceededError(f"path length k={k} outside the supported range [2, {MAX_LENGTH}]")
    out: list[PathClass] = []
    prefix = [1]

    def extend(pos: int, seen_max: int) -> None:
        if pos == k:
            if prefix[-1] != 1:
                prefix.append(1)
                out.append(PathClass(tuple(prefix)))
                prefix.pop()
            return
        for v in range(1, seen_max + 2):
            if v == prefix[-1]:
                continue
            prefix.append(v)
            extend(pos + 1, max(seen_max, v))
            prefix.pop()

    extend(1, 1)
    return out


def labeled_closed_paths(n: int, k: int):
    """Every strict closed path of length k on the label set {1..n} (generator)."""
    path = [0] * (k + 1)

    def extend(pos: int):
        if pos == k:
            if path[0] != path[k - 1]:
                path[k] = path[0]
                yield tuple(path)
            return
        for v in range(1, n + 1):
            if v == path[pos - 1]:
                continue
            path[pos] = v
            yield from extend(pos + 1)

    for start in range(1, n + 1):
        path[0] = start
        yield from extend(1)


def tree_to_dyck(pc: PathClass) -> tuple[int, ...]:
    """First-visit encoding of a tree class as a word of +1/-1 letters."""
    if not pc.is_tree:
        raise NotATreeError(f"{pc} is not a tree class")
    seen = {1}
    word = []
    for v in pc.steps[1:]:
        if v in seen:
            word.append(-1)
        else:
            seen.add(v)
            word.append(1)
    return tuple(word)


def dyck_to_tree(word) -> PathClass:
    """Inverse of the first-visit encoding.

    The word must have nonnegative prefix sums and total sum zero (the
    zero-sum condition is what makes the encoding invertible).
    """
    word = tuple(word)
    if any(d not in (1, -1) for d in word):
        raise ValueError("word letters must be +1 or -1")
    total = 0
    for d in word:
        total += d
        if total < 0:
            raise ValueError("prefix sums must stay nonnegative")
    if total != 0:
        raise ValueError("word must sum to zero")
    steps = [1]
    stack = [1]
    next_label = 2
    for d in word:
        if d == 1:
            stack.append(next_label)
            steps.append(next_label)
            next_label += 1
        else:
            stack.pop()
            steps.append(stack[-1])
    return PathClass(tuple(steps))


# ---------------------------------------------------------------------------
# exact weight expectations
# ---------------------------------------------------------------------------


def _set_partitions(items: list[int]):
    """All partitions of a small set, as lists of blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]
        yield [[first]] + partition


def _check_budget(vertex_count: int, atom_count: int) -> None:
    if vertex_count > MAX_VERTICES:
        raise BudgetExceededError(
            f"class has {vertex_count} vertices; exact expectations support at most {MAX_VERTICES}"
        )
    limit = MAX_ATOMS_SMALL_CLASS if vertex_count <= 2 else MAX_ATOMS
    if atom_count > limit:
        raise BudgetExceededError(
            f"dictionary has {atom_count} atoms; the budget for {vertex_count}-vertex "
            f"classes is {limit}"
        )


def _merged_walk_sum(edges, blocks: int, G: np.ndarray) -> complex:
    """Sum over all (unrestricted) block assignments of the walk weight.

    ``edges`` lists directed block pairs; equal pairs contribute diagonal
    factors.  Evaluated as one einsum contraction of the Gram matrix.
    """
    letters = "abcd"
    pair_factors: dict[tuple[int, int], np.ndarray] = {}
    loop_counts = [0] * blocks
    for u, v in edges:
        if u == v:
            loop_counts[u] += 1
        else:
            key = (min(u, v), max(u, v))
            mat = G if u < v else G.T
            if key in pair_factors:
                pair_factors[key] = pair_factors[key] * mat
            else:
                pair_factors[key] = mat
    operands = []
    subs = []
    for (u, v), mat in pair_factors.items():
        operands.append(mat)
        subs.append(letters[u] + letters[v])
    d = np.diag(G)
    for u in range(blocks):
        if loop_counts[u]:
            operands.append(d**loop_counts[u])
            subs.append(letters[u])
        elif not any(u in (a, b) for (a, b) in pair_factors):
            # isolated block: free index contributes a factor N
            operands.append(np.ones(G.shape[0]))
            subs.append(letters[u])
    return complex(np.einsum(",".join(subs) + "->", *operands, optimize=True))


def _exact_weight_sum(labels, G: np.ndarray) -> tuple[complex, int]:
    """(sum over injective assignments of the walk weight, number of vertices)."""
    order: dict = {}
    for x in labels:
        if x not in order:
            order[x] = len(order)
    m = len(order)
    verts = [order[x] for x in labels]
    edges = list(zip(verts, verts[1:]))
    total = 0.0 + 0.0j
    for partition in _set_partitions(list(range(m))):
        block_of = {}
        for b, block in enumerate(partition):
            for v in block:
                block_of[v] = b
        weight = 1
        for block in partition:
            s = len(block)
            weight *= (-1) ** (s - 1) * math.factorial(s - 1)
        merged_edges = [(block_of[u], block_of[v]) for u, v in edges]
        total += weight * _merged_walk_sum(merged_edges, len(partition), G)
    return total, m


def expected_weight(pc: PathClass | tuple, D: Dictionary) -> complex:
    """Exact average of the path weight over injective atom assignments.

    Class invariance of the expectation reduces the average over size-n
    supports to an average over assignments of the path's own vertices,
    which is what makes exact evaluation feasible.
    """
    labels = pc.steps if isinstance(pc, PathClass) else tuple(pc)
    N = D.atom_count
    order: dict = {}
    for x in labels:
        if x not in order:
            order[x] = len(order)
    _check_budget(len(order), N)
    M = D.atoms_matrix
    G = M.T @ M.conj()
    total, m = _exact_weight_sum(labels, G)
    denom = 1
    for i in range(m):
        denom *= N - i
    return total / denom


def class_size(pc: PathClass, n: int) -> int:
    """Number of labeled representatives on {1..n}: the falling factorial."""
    size = 1
    for i in range(pc.vertex_count):
        size *= n - i
    return max(size, 0)


def class_normalization(pc: PathClass, n: int, p: int) -> float:
    """The normalization p^{k/2} n^{|V|-1-k/2} (n-free exactly when the class is a tree)."""
    return p ** (pc.k / 2) * float(n) ** (pc.vertex_count - 1 - pc.k / 2)


def tail_bound_exponent(pc: PathClass, epsilon: float) -> float:
    """Exponent of p in the incoherence bound on the normalized expectation.

    With n = p^(1-epsilon), the product of the class normalization and the
    coherence bound mu^{k/2} p^{-k/2} scales like p to this exponent; it is
    negative exactly when k > 2(|V|-1), forcing such classes to vanish.
    """
    return (1.0 - epsilon) * (pc.vertex_count - 1 - pc.k / 2)


def exact_spectral_moment(D: Dictionary, n: int, k: int) -> float:
    """Exact expectation of the k-th spectral moment of the normalized error.

    Sums class contributions n^{-1} (p/n)^{k/2} |class| E(weight) over all
    classes of length k.  Supported for k <= 4 (larger k has classes whose
    vertex count exceeds the exact-expectation budget).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return 0.0
    if k > MAX_VERTICES:
        raise BudgetExceededError(f"exact moments support k <= {MAX_VERTICES}")
    p = D.p
    total = 0.0 + 0.0j
    for pc in enumerate_path_classes(k):
        size = class_size(pc, n)
        if size == 0:
            continue
        total += (p / n) ** (k / 2) / n * size * expected_weight(pc, D)
    if abs(total.imag) > 1e-8:
        raise AssertionError(f"spectral moment came out non-real: {total}")
    return float(total.real)


@dataclass(frozen=True)
class TrajectoryPoint:
    p: int
    n: int
    value: complex


@dataclass(frozen=True)
class ClassTrajectory:
    path_class: PathClass
    is_tree: bool
    points: tuple[TrajectoryPoint, ...]
    converging: bool

    @property
    def final_value(self) -> complex:
        return self.points[-1].value


def trajectory_table(
    dictionaries: dict[int, Dictionary],
    classes,
    epsilon: float = 0.3,
    fixed_n: int | None = None,
) -> list[ClassTrajectory]:
    """Normalized expectations n(class) * E(weight) across a ladder of primes.

    For each class, evaluates the exact normalized expectation on every
    dictionary (keyed by p, visited in increasing order); flags whether
    the trajectory moves toward 1 (tree classes) or toward 0 in magnitude
    (everything else) over the final step of the ladder.

    The normalization needs a support size: by default n = floor(p^(1-eps))
    per ladder point.  Tree normalizations are n-free; for other classes
    the floor makes n jump at desk-scale primes, so ``fixed_n`` pins one n
    across the whole ladder, which isolates the pure p-dependence that the
    vanishing estimates describe.
    """
    ps = sorted(dictionaries)
    rows = []
    for pc in classes:
        pts = []
        for p in ps:
            n = fixed_n if fixed_n is not None else support_size(p, epsilon)
            value = class_normalization(pc, n, p) * expected_weight(pc, dictionaries[p])
            pts.append(TrajectoryPoint(p, n, value))
        if len(pts) >= 2:
            if pc.is_tree:
                converging = abs(pts[-1].value - 1) < abs(pts[-2].value - 1)
            else:
                converging = abs(pts[-1].value) < abs(pts[-2].value)
        else:
            converging = True
        rows.append(ClassTrajectory(pc, pc.is_tree, tuple(pts), converging))
    return rows


def support_size(p: int, epsilon: float) -> int:
    """floor(p^(1-epsilon)), the support size used throughout the statistics."""
    return int(math.floor(p ** (1.0 - epsilon) + 1e-9))


# ---------------------------------------------------------------------------
# vertex surgery and the completeness identity
# ---------------------------------------------------------------------------


def _single_visit_position(steps: tuple[int, ...], vertex: int) -> int:
    positions = [i for i in range(len(steps) - 1) if steps[i] == vertex]
    if len(positions) != 1:
        raise SingleVisitError(
            f"vertex {vertex} is crossed {len(positions)} times in {steps}; need exactly 1"
        )
    return positions[0]


def _rotate(steps: tuple[int, ...], r: int) -> tuple[int, ...]:
    """Start the closed walk at position r (weights are rotation-invariant)."""
    return steps[r:-1] + steps[: r + 1]


def delete_vertex(steps: tuple[int, ...], vertex: int) -> tuple[int, ...]:
    """Surgery removing a once-crossed vertex.

    Distinct neighbours are joined by a new edge (length drops by 1);
    equal neighbours collapse the detour (length drops by 2).
    """
    i0 = _single_visit_position(steps, vertex)
    if i0 == 0:
        steps = _rotate(steps, 1)
        i0 = _single_visit_position(steps, vertex)
    vl, vr = steps[i0 - 1], steps[i0 + 1]
    if vl != vr:
        return steps[:i0] + steps[i0 + 1 :]
    return steps[:i0] + steps[i0 + 2 :]


def replace_vertex(steps: tuple[int, ...], vertex: int, replacement: int) -> tuple[int, ...]:
    """Surgery rerouting a once-crossed vertex through another vertex."""
    i0 = _single_visit_position(steps, vertex)
    if i0 == 0:
        steps = _rotate(steps, 1)
        i0 = _single_visit_position(steps, vertex)
    return steps[:i0] + (replacement,) + steps[i0 + 1 :]


def _walk_weight(steps, assign: dict, M: np.ndarray) -> complex:
    w = 1.0 + 0.0j
    for u, v in zip(steps, steps[1:]):
        a = M[:, assign[u]]
        b = M[:, assign[v]]
        w *= np.vdot(b, a)  # sum_t a(t) conj(b(t))
    return w


def completeness_residual(
    pc: PathClass, vertex: int, D: Dictionary, samples: int = 100, seed: int = 0
) -> float:
    """Max residual of the basis-completeness identity over sampled assignments.

    For a vertex crossed exactly once, summing the walk weight over every
    dictionary atom substituted at that vertex equals the basis count
    times the weight of the vertex-deleted walk; the identity is exact
    (it is Parseval applied within each orthonormal basis).
    """
    steps = pc.steps
    i0 = _single_visit_position(steps, vertex)
    if i0 == 0:
        steps = _rotate(steps, 1)
        i0 = _single_visit_position(steps, vertex)
    vl, vr = steps[i0 - 1], steps[i0 + 1]
    reduced = delete_vertex(steps, vertex)
    others = []
    for x in steps[:-1]:
        if x != vertex and x not in others:
            others.append(x)

    M = D.atoms_matrix
    N = D.atom_count
    rng = np.random.Generator(np.random.Philox(key=seed))
    worst = 0.0
    for _ in range(samples):
        idx = np.arange(N)
        for i in range(len(others)):
            j = int(rng.integers(i, N))
            idx[i], idx[j] = idx[j], idx[i]
        assign = {u: int(idx[i]) for i, u in enumerate(others)}

        scalar = 1.0 + 0.0j
        for u, v in zip(steps, steps[1:]):
            if vertex in (u, v):
                continue
            scalar *= np.vdot(M[:, assign[v]], M[:, assign[u]])
        al = M[:, assign[vl]]
        ar = M[:, assign[vr]]
        left_factors = M.conj().T @ al  # <a_l, b> for every atom b
        right_factors = M.T @ ar.conj()  # <b, a_r> for every atom b
        lhs = scalar * np.sum(left_factors * right_factors)
        rhs = D.basis_count * _walk_weight(reduced, assign, M)
        worst = max(worst, abs(lhs - rhs))
    return worst


def interleave(path1: tuple[int, ...], path2: tuple[int, ...]) -> tuple[int, ...]:
    """Concatenation of two vertex-sharing closed walks into one of double length.

    The second walk is spliced into the first at the first shared vertex.
    The map is injective on pairs, which is what bounds the variance of
    the spectral moments.
    """
    k = len(path1) - 1
    if len(path2) - 1 != k:
        raise ValueError("both walks must have the same length")
    v2 = set(path2)
    i1 = next((i for i in range(k) if path1[i] in v2), None)
    if i1 is None:
        raise ValueError("walks share no vertex")
    i2 = next(i for i in range(k) if path2[i] == path1[i1])
    out = list(path1[: i1 + 1])
    for j in range(1, k + 1):
        out.append(path2[(i2 + j) % k])
    out.extend(path1[i1 + 1 :])
    return tuple(out)
