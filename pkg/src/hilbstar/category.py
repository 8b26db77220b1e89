"""Dagger-category interface and instance-independent derived structure.

A category instance interprets object payloads (a dimension for Hilbert
spaces, a representation for intertwiners); morphisms always carry a dense
matrix acting on column vectors, so composition, addition and the involution
are shared across instances.  What varies per instance is object bookkeeping:
which object a kernel or a range factors through, and what the direct sum of
objects is.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import (
    FieldMismatch,
    NotIsometric,
    PreconditionViolated,
    ShapeMismatch,
)
from .linalg import (
    DEFAULT_TOL,
    Field,
    Mat,
    Tolerance,
    inv_hermitian,
    loewner_leq,
    min_eig,
    range_null_bases,
    require_hermitian,
    sym,
)


class CategoryInstance(ABC):
    """Value-level interpreter for one concrete dagger category."""

    name: str

    @abstractmethod
    def obj_dim(self, payload: Any) -> int: ...

    @abstractmethod
    def obj_field(self, payload: Any) -> Field: ...

    @abstractmethod
    def validate_payload(self, payload: Any) -> None: ...

    @abstractmethod
    def product_payload(self, payloads: Sequence[Any], field: Field) -> Any:
        """Payload of the orthogonal direct sum of the given objects."""

    @abstractmethod
    def sub_payload(self, ambient: "Obj", onb: Mat, tol: Tolerance) -> Any:
        """Payload of the subobject spanned by orthonormal columns ``onb``."""

    def mor_defect(self, mor: "Mor", tol: Tolerance) -> float:
        """Residual of instance-specific morphism laws (0 when none)."""
        return 0.0

    def make_obj(self, payload: Any) -> "Obj":
        self.validate_payload(payload)
        return Obj(self, payload)

    def zero_object(self, field: Field) -> "Obj":
        return self.make_obj(self.product_payload([], field))


@dataclass(frozen=True)
class Obj:
    instance: CategoryInstance
    payload: Any

    @property
    def dim(self) -> int:
        return self.instance.obj_dim(self.payload)

    @property
    def field(self) -> Field:
        return self.instance.obj_field(self.payload)

    def __repr__(self) -> str:
        return f"Obj({self.instance.name}, dim={self.dim})"


@dataclass(frozen=True)
class Mor:
    """Morphism with a dense matrix payload acting on column vectors."""

    dom: Obj
    cod: Obj
    mat: Mat

    def __post_init__(self) -> None:
        if self.dom.instance is not self.cod.instance:
            raise PreconditionViolated("dom and cod belong to different instances")
        if self.mat.shape != (self.cod.dim, self.dom.dim):
            raise ShapeMismatch(
                f"payload {self.mat.shape} incompatible with "
                f"dom dim {self.dom.dim}, cod dim {self.cod.dim}"
            )
        if self.mat.field is not self.dom.field:
            raise FieldMismatch("payload field differs from object field")

    @property
    def instance(self) -> CategoryInstance:
        return self.dom.instance

    def __matmul__(self, other: "Mor") -> "Mor":
        """Composition self after other."""
        return compose(self, other)

    def __add__(self, other: "Mor") -> "Mor":
        _require_parallel(self, other)
        return Mor(self.dom, self.cod, self.mat + other.mat)

    def __sub__(self, other: "Mor") -> "Mor":
        _require_parallel(self, other)
        return Mor(self.dom, self.cod, self.mat - other.mat)

    def __neg__(self) -> "Mor":
        return Mor(self.dom, self.cod, -self.mat)

    def scale(self, c) -> "Mor":
        return Mor(self.dom, self.cod, self.mat.scale(c))

    def norm(self) -> float:
        return self.mat.norm()

    def is_endo(self) -> bool:
        return self.dom == self.cod


class HermEndo(Mor):
    """Hermitian endomorphism; construct via ``HermEndo.wrap``."""

    @staticmethod
    def wrap(mor: Mor, tol: Tolerance = DEFAULT_TOL) -> "HermEndo":
        if not mor.is_endo():
            raise PreconditionViolated("Hermitian endomorphisms need dom = cod")
        return HermEndo(mor.dom, mor.cod, require_hermitian(mor.mat, tol))


def _require_parallel(f: Mor, g: Mor) -> None:
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch("morphisms are not parallel")


def identity(obj: Obj) -> Mor:
    return Mor(obj, obj, Mat.identity(obj.dim, obj.field))


def zero_mor(dom: Obj, cod: Obj) -> Mor:
    return Mor(dom, cod, Mat.zeros(cod.dim, dom.dim, dom.field))


def compose(g: Mor, f: Mor) -> Mor:
    """g after f; matrix of the composite is mat(g) @ mat(f)."""
    if f.cod != g.dom:
        raise ShapeMismatch("composition: cod(f) != dom(g)")
    return Mor(f.dom, g.cod, g.mat @ f.mat)


def dag(f: Mor) -> Mor:
    """The involution: dom/cod swapped, conjugate-transposed matrix."""
    return Mor(f.cod, f.dom, f.mat.H)


def hom_inner_product(f: Mor, g: Mor) -> Mor:
    """The module inner product <f, g> = f* g on a hom-set."""
    _require_parallel(f, g)
    return compose(dag(f), g)


def gram(f: Mor) -> HermEndo:
    """<f, f> = f* f, symmetrized; positive semidefinite."""
    m = sym(f.mat.H @ f.mat)
    return HermEndo(f.dom, f.dom, m)


@dataclass(frozen=True)
class MorphismFlags:
    isometry: bool
    coisometry: bool
    unitary: bool
    partial_isometry: bool
    contraction: bool
    strict_contraction: bool


def classify_morphism(f: Mor, tol: Tolerance = DEFAULT_TOL) -> MorphismFlags:
    """Decide isometry/coisometry/unitary/partial-isometry/contraction flags.

    Each flag tests its defining equation: f*f = 1, ff* = 1, ff*f = f and
    f*f <= 1.  Strictness requires 1 - f*f to have spectrum above the
    tolerance margin.
    """
    fstar_f = sym(f.mat.H @ f.mat)
    f_fstar = sym(f.mat @ f.mat.H)
    eye_dom = Mat.identity(f.dom.dim, f.mat.field)
    eye_cod = Mat.identity(f.cod.dim, f.mat.field)
    scale = max(1.0, f.norm() ** 2)
    iso = (fstar_f - eye_dom).norm() <= tol.margin(scale)
    coiso = (f_fstar - eye_cod).norm() <= tol.margin(scale)
    partial = float(
        np.linalg.norm(f.mat.a @ fstar_f.a - f.mat.a)
    ) <= tol.margin(max(1.0, f.norm() ** 3))
    gap = min_eig(eye_dom - fstar_f, tol)
    contraction = gap >= -tol.margin(scale)
    strict = gap > tol.margin(1.0)
    return MorphismFlags(
        isometry=iso,
        coisometry=coiso,
        unitary=iso and coiso,
        partial_isometry=partial,
        contraction=contraction,
        strict_contraction=strict,
    )


@dataclass(frozen=True)
class BiproductStructure:
    """Chosen orthonormal product: apex with injections i_j = dag(p_j)."""

    apex: Obj
    components: tuple[Obj, ...]
    injections: tuple[Mor, ...]
    projections: tuple[Mor, ...]

    def __len__(self) -> int:
        return len(self.components)


def orthonormal_product(
    objs: Sequence[Obj], field: Field | None = None
) -> BiproductStructure:
    """Orthogonal direct sum with canonical 0/1 block embeddings.

    An empty family yields the zero object with no legs.
    """
    objs = list(objs)
    if objs:
        instance = objs[0].instance
        field = objs[0].field
        for o in objs[1:]:
            if o.field is not field:
                raise FieldMismatch("components carry different fields")
            if o.instance is not instance:
                raise PreconditionViolated("components from different instances")
    else:
        if field is None:
            raise PreconditionViolated("empty product needs an explicit field")
        from .fdhilb import instance_for  # local import to avoid a cycle

        instance = instance_for(field)
    apex = instance.make_obj(
        instance.product_payload([o.payload for o in objs], field)
    )
    dims = [o.dim for o in objs]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(offsets[-1])
    injections = []
    projections = []
    for j, o in enumerate(objs):
        block = np.zeros((total, dims[j]), dtype=field.dtype)
        block[offsets[j] : offsets[j + 1], :] = np.eye(dims[j], dtype=field.dtype)
        inj = Mor(o, apex, Mat(block, field))
        injections.append(inj)
        projections.append(dag(inj))
    return BiproductStructure(apex, tuple(objs), tuple(injections), tuple(projections))


def block_assemble(
    grid: Sequence[Sequence[Mor]],
    dom_bp: BiproductStructure,
    cod_bp: BiproductStructure,
) -> Mor:
    """Assemble a morphism between biproducts from its blocks.

    ``grid[j][k]`` maps ``dom_bp.components[j]`` to ``cod_bp.components[k]``;
    the assembled morphism f satisfies p_k f i_j = grid[j][k].
    """
    if len(grid) != len(dom_bp):
        raise ShapeMismatch("grid rows must match dom components")
    field = dom_bp.apex.field
    out = np.zeros((cod_bp.apex.dim, dom_bp.apex.dim), dtype=field.dtype)
    for j, row in enumerate(grid):
        if len(row) != len(cod_bp):
            raise ShapeMismatch("grid columns must match cod components")
        for k, block in enumerate(row):
            if block.dom != dom_bp.components[j] or block.cod != cod_bp.components[k]:
                raise ShapeMismatch(f"block ({j}, {k}) has wrong endpoints")
            i_k = cod_bp.injections[k].mat.a
            p_j = dom_bp.projections[j].mat.a
            out += i_k @ block.mat.a @ p_j
    return Mor(dom_bp.apex, cod_bp.apex, Mat(out, field))


def block_extract(
    f: Mor, dom_bp: BiproductStructure, cod_bp: BiproductStructure, j: int, k: int
) -> Mor:
    """Extract block (j, k): p_k f i_j."""
    return compose(cod_bp.projections[k], compose(f, dom_bp.injections[j]))


def isometric_kernel(f: Mor, tol: Tolerance = DEFAULT_TOL) -> Mor:
    """Isometry m with f m = 0 whose columns span the numerical null space."""
    _, null_basis, _ = range_null_bases(f.mat, tol)
    instance = f.instance
    kobj = instance.make_obj(instance.sub_payload(f.dom, null_basis, tol))
    return Mor(kobj, f.dom, null_basis)


def orthonormal_complement(x: Mor, tol: Tolerance = DEFAULT_TOL) -> Mor:
    """Isometric kernel of x*; spans the orthogonal complement of range(x)."""
    return isometric_kernel(dag(x), tol)


def range_isometry(x: Mor, tol: Tolerance = DEFAULT_TOL) -> Mor:
    """Isometry onto the numerical column space of ``x``."""
    range_basis, _, _ = range_null_bases(x.mat, tol)
    instance = x.instance
    robj = instance.make_obj(instance.sub_payload(x.cod, range_basis, tol))
    return Mor(robj, x.cod, range_basis)


def require_isometry(f: Mor, tol: Tolerance = DEFAULT_TOL) -> Mor:
    defect = (sym(f.mat.H @ f.mat) - Mat.identity(f.dom.dim, f.mat.field)).norm()
    if defect > tol.margin(max(1.0, f.norm() ** 2)):
        raise NotIsometric(f"isometry defect {defect:.3e}")
    return f


def cauchy_schwarz_gen_check(
    x: Mor, y: Mor, a: HermEndo, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Probe <y,x> a^{-1} <x,y> <= |y|^2 for invertible a >= |x|^2.

    The inequality always holds; the probe exists to falsify the
    implementation, not the theorem.
    """
    _require_parallel(x, y)
    if a.dom != x.dom:
        raise ShapeMismatch("a must be an endomorphism of dom(x)")
    gx = gram(x)
    if not loewner_leq(gx.mat, a.mat, tol):
        raise PreconditionViolated("a is not an upper bound of |x|^2")
    a_inv = inv_hermitian(a.mat, tol)  # raises if singular within tolerance
    xy = hom_inner_product(x, y).mat
    lhs = sym(xy.H @ a_inv @ xy)
    return loewner_leq(lhs, gram(y).mat, tol)
