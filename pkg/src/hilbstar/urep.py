"""Unitary representations of finite groups and their intertwiners.

Groups are given by full multiplication tables, representations by full
element-to-matrix tables, so validation is a direct law check with no word
problem.  Intertwiners form a dagger category: the adjoint of an intertwiner
is again an intertwiner because the representing matrices are unitary.

Kernels, ranges and direct sums are computed componentwise; the carried
objects are genuine representations (restrictions to invariant subspaces,
block-diagonal sums), checked rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .category import CategoryInstance, Mor, Obj, compose, dag, identity
from .errors import (
    FieldMismatch,
    InvarianceViolation,
    NotComposable,
    NotIsometric,
    PreconditionViolated,
    ShapeMismatch,
)
from .linalg import DEFAULT_TOL, Field, Mat, Tolerance, sym


@dataclass(frozen=True)
class GroupTable:
    """Finite group as a Cayley table of element indices."""

    order: int
    table: tuple[tuple[int, ...], ...]
    identity_index: int
    inverse: tuple[int, ...]

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def elements(self) -> range:
        return range(self.order)


def make_group(table: Sequence[Sequence[int]], identity_index: int | None = None) -> GroupTable:
    """Validate a Cayley table and derive identity and inverses.

    Checks the Latin-square property, the identity and inverse laws, and
    associativity over all triples.
    """
    rows = tuple(tuple(int(v) for v in row) for row in table)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise PreconditionViolated("multiplication table must be square")
    full = set(range(n))
    for row in rows:
        if set(row) != full:
            raise PreconditionViolated("table rows must be permutations")
    for j in range(n):
        if {row[j] for row in rows} != full:
            raise PreconditionViolated("table columns must be permutations")
    if identity_index is None:
        candidates = [e for e in range(n) if all(rows[e][g] == g == rows[g][e] for g in range(n))]
        if not candidates:
            raise PreconditionViolated("no identity element found")
        identity_index = candidates[0]
    e = identity_index
    if any(rows[e][g] != g or rows[g][e] != g for g in range(n)):
        raise PreconditionViolated("declared identity fails the identity law")
    inverse = []
    for g in range(n):
        inv = [h for h in range(n) if rows[g][h] == e and rows[h][g] == e]
        if len(inv) != 1:
            raise PreconditionViolated(f"element {g} lacks a unique inverse")
        inverse.append(inv[0])
    for a, b, c in itertools.product(range(n), repeat=3):
        if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
            raise PreconditionViolated(f"associativity fails at ({a}, {b}, {c})")
    return GroupTable(n, rows, e, tuple(inverse))


def cyclic_group(n: int) -> GroupTable:
    if n < 1:
        raise PreconditionViolated("cyclic group order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return make_group(table, identity_index=0)


def group_from_permutations(perms: Sequence[Sequence[int]]) -> GroupTable:
    """Group generated as a closed set of permutations given explicitly.

    The input must already be closed under composition; elements are indexed
    in the given order.
    """
    elems = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(elems)}
    n = len(elems)
    table = [[0] * n for _ in range(n)]
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            pq = tuple(p[q[k]] for k in range(len(p)))
            if pq not in index:
                raise PreconditionViolated("permutation set is not closed")
            table[i][j] = index[pq]
    return make_group(table)


def symmetric_group_3() -> GroupTable:
    perms = [
        (0, 1, 2),
        (1, 2, 0),
        (2, 0, 1),
        (0, 2, 1),
        (2, 1, 0),
        (1, 0, 2),
    ]
    return group_from_permutations(perms)


@dataclass(frozen=True)
class Rep:
    """Unitary representation: one matrix per group element."""

    group: GroupTable
    dim: int
    field: Field
    images: tuple[Mat, ...]

    def image(self, g: int) -> Mat:
        return self.images[g]


@dataclass(frozen=True)
class RepReport:
    unitarity_residual: float
    homomorphism_residual: float
    identity_residual: float
    passed: bool


def validate_rep(rep: Rep, tol: Tolerance = DEFAULT_TOL) -> RepReport:
    """Report the worst unitarity and homomorphism residuals of a rep."""
    if len(rep.images) != rep.group.order:
        raise PreconditionViolated("one image per group element required")
    eye = Mat.identity(rep.dim, rep.field)
    unit = 0.0
    for img in rep.images:
        if img.shape != (rep.dim, rep.dim):
            raise ShapeMismatch("image has wrong shape")
        unit = max(unit, (sym(img.H @ img) - eye).norm())
    ident = (rep.images[rep.group.identity_index] - eye).norm()
    hom = 0.0
    for g in rep.group.elements():
        for h in rep.group.elements():
            gh = rep.group.mul(g, h)
            hom = max(hom, (rep.images[gh] - rep.images[g] @ rep.images[h]).norm())
    scale = max(1.0, rep.dim**0.5)
    passed = (
        unit <= tol.margin(scale)
        and hom <= tol.margin(scale)
        and ident <= tol.margin(scale)
    )
    return RepReport(unit, hom, ident, passed)


def trivial_rep(group: GroupTable, dim: int = 1, field: Field = Field.COMPLEX) -> Rep:
    eye = Mat.identity(dim, field)
    return Rep(group, dim, field, tuple(eye for _ in group.elements()))


def regular_representation(group: GroupTable, field: Field = Field.COMPLEX) -> Rep:
    """Left regular representation by permutation matrices."""
    n = group.order
    images = []
    for g in group.elements():
        mat = np.zeros((n, n), dtype=field.dtype)
        for h in group.elements():
            mat[group.mul(g, h), h] = 1.0
        images.append(Mat(mat, field))
    return Rep(group, n, field, tuple(images))


def _same_group(a: GroupTable, b: GroupTable) -> bool:
    return a.order == b.order and a.table == b.table


class URepInstance(CategoryInstance):
    name = "urep"

    def obj_dim(self, payload: Rep) -> int:
        return payload.dim

    def obj_field(self, payload: Rep) -> Field:
        return payload.field

    def validate_payload(self, payload: Any) -> None:
        if not isinstance(payload, Rep):
            raise TypeError("urep object payload must be a Rep")
        report = validate_rep(payload)
        if not report.passed:
            raise PreconditionViolated(
                f"invalid representation: unitarity {report.unitarity_residual:.3e}, "
                f"homomorphism {report.homomorphism_residual:.3e}"
            )

    def product_payload(self, payloads: Sequence[Rep], field: Field) -> Rep:
        if not payloads:
            raise PreconditionViolated(
                "urep zero object needs a group; use trivial_rep(group, dim=0)"
            )
        group = payloads[0].group
        for p in payloads[1:]:
            if not _same_group(group, p.group):
                raise PreconditionViolated("direct sum needs a common group")
            if p.field is not field:
                raise FieldMismatch("direct sum components carry different fields")
        total = sum(p.dim for p in payloads)
        images = []
        for g in group.elements():
            blocks = [p.image(g).a for p in payloads]
            mat = np.zeros((total, total), dtype=field.dtype)
            off = 0
            for blk in blocks:
                k = blk.shape[0]
                mat[off : off + k, off : off + k] = blk
                off += k
            images.append(Mat(mat, field))
        return Rep(group, total, field, tuple(images))

    def sub_payload(self, ambient: Obj, onb: Mat, tol: Tolerance) -> Rep:
        """Restriction of the ambient rep to the span of ``onb``.

        Raises ``InvarianceViolation`` when the subspace fails to be carried
        into itself by the group action.
        """
        rep: Rep = ambient.payload
        v = onb.a
        proj = v @ v.conj().T
        images = []
        worst = 0.0
        for g in rep.group.elements():
            act = rep.image(g).a @ v
            leak = float(np.linalg.norm(act - proj @ act))
            worst = max(worst, leak)
            images.append(Mat(v.conj().T @ act, rep.field))
        if worst > tol.margin(max(1.0, float(np.linalg.norm(v)))):
            raise InvarianceViolation(
                f"subspace leaks under the group action: residual {worst:.3e}"
            )
        return Rep(rep.group, onb.cols, rep.field, tuple(images))


UREP = URepInstance()


def rep_obj(rep: Rep) -> Obj:
    return UREP.make_obj(rep)


def make_intertwiner(dom: Rep, cod: Rep, mat: Mat, tol: Tolerance = DEFAULT_TOL) -> Mor:
    """Wrap a matrix as an intertwiner, validating the commuting squares."""
    if not _same_group(dom.group, cod.group):
        raise PreconditionViolated("intertwiner requires a common group")
    mor = Mor(rep_obj(dom), rep_obj(cod), mat)
    resid = intertwiner_defect(mor)
    if resid > tol.margin(max(1.0, mat.norm())):
        raise PreconditionViolated(f"intertwining residual {resid:.3e}")
    return mor


def intertwiner_defect(t: Mor) -> float:
    """Worst residual of cod.images[g] t = t dom.images[g] over the group."""
    dom: Rep = t.dom.payload
    cod: Rep = t.cod.payload
    worst = 0.0
    for g in dom.group.elements():
        lhs = cod.image(g).a @ t.mat.a
        rhs = t.mat.a @ dom.image(g).a
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def rep_kernel(t: Mor, tol: Tolerance = DEFAULT_TOL) -> Mor:
    """Isometric kernel of an intertwiner, carrying the restricted rep.

    The null space of a valid intertwiner is invariant; invariance is
    nevertheless checked, so an invalid input surfaces as
    ``InvarianceViolation`` rather than a silently broken kernel.
    """
    from .category import isometric_kernel

    return isometric_kernel(t, tol)


def rep_directed_colimit(
    chain: Sequence[Mor], obj: Obj | None = None, tol: Tolerance = DEFAULT_TOL
) -> tuple[Obj, tuple[Mor, ...]]:
    """Colimit of a finite chain of isometric intertwiners, componentwise.

    The apex is the representation at the top of the chain and the legs are
    the suffix composites.
    """
    chain = list(chain)
    if not chain:
        if obj is None:
            raise PreconditionViolated("empty chain requires an explicit object")
        return obj, (identity(obj),)
    for k, f in enumerate(chain):
        if f.instance is not UREP:
            raise PreconditionViolated("chain must consist of intertwiners")
        resid = intertwiner_defect(f)
        if resid > tol.margin(max(1.0, f.norm())):
            raise PreconditionViolated(f"chain step {k} is not an intertwiner")
        iso_defect = (sym(f.mat.H @ f.mat) - Mat.identity(f.dom.dim, f.mat.field)).norm()
        if iso_defect > tol.margin(max(1.0, f.norm() ** 2)):
            raise NotIsometric(f"chain step {k} isometry defect {iso_defect:.3e}")
        if k and chain[k - 1].cod != f.dom:
            raise NotComposable(f"steps {k - 1} and {k} do not compose")
    apex = chain[-1].cod
    legs = [identity(apex)]
    for f in reversed(chain):
        legs.append(compose(legs[-1], f))
    legs.reverse()
    return apex, tuple(legs)


def intertwiner_space(dom: Rep, cod: Rep, tol: Tolerance = DEFAULT_TOL) -> list[Mat]:
    """Basis of the space of intertwiners dom -> cod.

    Solves the commuting-square equations as a joint null-space problem over
    the vectorized matrix space.
    """
    if not _same_group(dom.group, cod.group):
        raise PreconditionViolated("intertwiner space requires a common group")
    if dom.field is not cod.field:
        raise FieldMismatch("intertwiner space requires a common field")
    eye_c = np.eye(cod.dim, dtype=cod.field.dtype)
    eye_d = np.eye(dom.dim, dtype=dom.field.dtype)
    # vec(S A - A R) = (S (x) I - I (x) R^T) vec(A), row-major vectorization
    rows = []
    for g in dom.group.elements():
        s = cod.image(g).a
        r = dom.image(g).a
        rows.append(np.kron(s, eye_d) - np.kron(eye_c, r.T))
    system = np.vstack(rows) if rows else np.zeros((0, cod.dim * dom.dim))
    if system.shape[0] == 0:
        basis = np.eye(cod.dim * dom.dim, dtype=cod.field.dtype)
    else:
        _, sv, vh = np.linalg.svd(system, full_matrices=True)
        cutoff = tol.margin(float(sv[0]) if sv.size else 0.0)
        rank = int(np.count_nonzero(sv > cutoff))
        basis = vh[rank:].conj().T
    out = []
    for j in range(basis.shape[1]):
        out.append(Mat(basis[:, j].reshape(cod.dim, dom.dim), cod.field))
    return out


def nhilb_obstruction_demo(n_max: int) -> list[tuple[int, int]]:
    """Norm growth forcing the counterexample in the N-indexed functor case.

    For each n, builds the diagonal map with entries 1..n together with the
    standard embedding of stage n, and reports ||s_n e_n|| = n.  Any colimit
    of the stages would need a single bounded map dominating all of these.
    """
    if n_max < 1:
        raise PreconditionViolated("n_max must be at least 1")
    out = []
    for n in range(1, n_max + 1):
        s_n = np.diag(np.arange(1, n + 1, dtype=np.float64))
        e_n = np.zeros((n, 1))
        e_n[n - 1, 0] = 1.0
        norm = float(np.linalg.norm(s_n @ e_n))
        out.append((n, round(norm)))
    return out
