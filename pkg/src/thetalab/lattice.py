"""Integer symplectic linear algebra in exact arithmetic.

Normal forms of non-degenerate integer skew-symmetric forms, their
polarization invariants, and membership tests for the groups acting on
period matrices.  Everything here runs on arbitrary-width Python integers;
unimodularity and divisibility are exact claims, so no floats appear.
"""

from dataclasses import dataclass

from .errors import DegenerateForm, DimensionMismatch, NotSkew


def _as_int_matrix(rows):
    mat = [[int(x) for x in row] for row in rows]
    n = len(mat)
    if any(len(r) != n for r in mat):
        raise DimensionMismatch("matrix must be square")
    return mat


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def _transpose(a):
    return [list(col) for col in zip(*a)]


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def int_det(matrix):
    """Exact determinant by fraction-free Bareiss elimination."""
    a = [row[:] for row in matrix]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class IntegerSkewForm:
    """A 2n x 2n integer antisymmetric matrix."""

    entries: tuple

    def __init__(self, entries):
        mat = _as_int_matrix(entries)
        n2 = len(mat)
        if n2 % 2 != 0:
            raise DimensionMismatch("skew form must have even dimension")
        for i in range(n2):
            for j in range(n2):
                if mat[i][j] != -mat[j][i]:
                    raise NotSkew(f"entries[{i}][{j}] != -entries[{j}][{i}]")
        object.__setattr__(self, "entries", tuple(tuple(r) for r in mat))

    @property
    def dim(self):
        return len(self.entries)

    @property
    def n(self):
        return len(self.entries) // 2

    def det(self):
        return int_det([list(r) for r in self.entries])

    def value(self, u, v):
        """Q(u, v) for integer vectors u, v."""
        return sum(u[i] * self.entries[i][j] * v[j]
                   for i in range(self.dim) for j in range(self.dim))


@dataclass(frozen=True)
class PolarizationType:
    """The divisor chain delta_1 | delta_2 | ... | delta_n of a skew form."""

    delta: tuple

    def __init__(self, delta):
        delta = tuple(int(d) for d in delta)
        if any(d <= 0 for d in delta):
            raise ValueError("polarization entries must be positive")
        for a, b in zip(delta, delta[1:]):
            if b % a != 0:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")
        object.__setattr__(self, "delta", delta)

    @property
    def n(self):
        return len(self.delta)

    def is_principal(self):
        return all(d == 1 for d in self.delta)


@dataclass(frozen=True)
class SymplecticBasis:
    """Unimodular change of basis putting a skew form into block normal shape."""

    transform: tuple

    def __init__(self, transform):
        mat = _as_int_matrix(transform)
        if abs(int_det(mat)) != 1:
            raise ValueError("basis transform must be unimodular")
        object.__setattr__(self, "transform", tuple(tuple(r) for r in mat))

    def apply(self, form: IntegerSkewForm):
        """The form in the new basis: transform^T Q transform."""
        t = [list(r) for r in self.transform]
        q = [list(r) for r in form.entries]
        return IntegerSkewForm(_matmul(_transpose(t), _matmul(q, t)))


def standard_block_form(delta):
    """The block matrix [[0, Delta], [-Delta, 0]] for a polarization type."""
    delta = list(delta)
    n = len(delta)
    out = [[0] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        out[k][n + k] = delta[k]
        out[n + k][k] = -delta[k]
    return out


def frobenius_normal_form(form: IntegerSkewForm):
    """Reduce a non-degenerate integer skew form to the block shape
    [[0, Delta], [-Delta, 0]] with Delta = diag(delta_1, ..., delta_n),
    delta_k > 0 and delta_k | delta_{k+1}.

    Returns (SymplecticBasis, PolarizationType).  The minimal-value search
    scans |Q(v_i, v_j)| over the current basis in lexicographic (i, j)
    order, breaking ties at the smallest (i, j); a gcd-descent step runs
    whenever a division leaves a remainder, and a divisibility-repair step
    (mixing a complement vector into the pivot pair) whenever a complement
    entry is not divisible by the pivot value.  Both steps strictly shrink
    the pivot, so the loop terminates.
    """
    if not isinstance(form, IntegerSkewForm):
        form = IntegerSkewForm(form)
    det = form.det()
    if det == 0:
        raise DegenerateForm("skew form is singular")
    dim = form.dim
    n = form.n
    q = [list(r) for r in form.entries]

    def qval(u, v):
        return sum(u[i] * q[i][j] * v[j] for i in range(dim) for j in range(dim))

    vecs = [[1 if i == j else 0 for i in range(dim)] for j in range(dim)]
    active = list(range(dim))
    pairs = []
    deltas = []
    for _ in range(n):
        while True:
            # minimal positive |Q| over active pairs, lexicographic scan
            best = None
            for ii, i in enumerate(active):
                for j in active[ii + 1:]:
                    val = abs(qval(vecs[i], vecs[j]))
                    if val != 0 and (best is None or val < best[0]):
                        best = (val, i, j)
            if best is None:
                raise DegenerateForm("form restricted to complement is singular")
            _, i, j = best
            if qval(vecs[i], vecs[j]) < 0:
                vecs[i], vecs[j] = vecs[j], vecs[i]
            delta = qval(vecs[i], vecs[j])
            e, f = vecs[i], vecs[j]
            # clear the complement against the pivot pair
            exact = True
            for l in active:
                if l in (i, j):
                    continue
                v = vecs[l]
                x = -(qval(v, f) // delta)
                y = qval(v, e) // delta
                vecs[l] = [v[t] + x * e[t] + y * f[t] for t in range(dim)]
                if qval(vecs[l], e) != 0 or qval(vecs[l], f) != 0:
                    exact = False
            if not exact:
                continue  # a remainder < delta appeared; rescan
            # divisibility repair: every complement entry must be 0 mod delta
            comp = [l for l in active if l not in (i, j)]
            bad = None
            for li, l in enumerate(comp):
                for m in comp[li + 1:]:
                    if qval(vecs[l], vecs[m]) % delta != 0:
                        bad = l
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            vecs[i] = [vecs[i][t] + vecs[bad][t] for t in range(dim)]
        pairs.append((i, j))
        deltas.append(delta)
        active = [l for l in active if l not in (i, j)]
    order = [i for i, _ in pairs] + [j for _, j in pairs]
    cols = [vecs[t] for t in order]
    transform = _transpose(cols)  # basis vectors as columns
    basis = SymplecticBasis(transform)
    reduced = basis.apply(form)
    if list(map(list, reduced.entries)) != standard_block_form(deltas):
        raise AssertionError("normal-form reduction failed internal check")
    return basis, PolarizationType(deltas)


def is_symplectic_member(g_matrix, delta) -> bool:
    """Whether g preserves the form [[0, Delta], [-Delta, 0]] exactly:
    g J_delta g^T == J_delta in integer arithmetic."""
    if isinstance(delta, PolarizationType):
        delta = delta.delta
    g = _as_int_matrix(g_matrix)
    n = len(delta)
    if len(g) != 2 * n:
        raise DimensionMismatch(
            f"matrix dimension {len(g)} does not match polarization size {2 * n}"
        )
    j = standard_block_form(delta)
    return _matmul(g, _matmul(j, _transpose(g))) == j
