"""Finite-dimensional Hilbert spaces over R and C.

Objects are dimensions tagged with a field; morphisms are matrices acting on
column vectors, with composition g . f realized as mat(g) @ mat(f) and the
involution as the conjugate transpose.  Object equality is structural
(dimension plus field), so the instance is skeletal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .category import CategoryInstance, Mor, Obj
from .errors import FieldMismatch, ShapeMismatch
from .linalg import Field, Mat, Tolerance


@dataclass(frozen=True)
class FdObject:
    dim: int
    field: Field

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")


class FdHilb(CategoryInstance):
    def __init__(self, field: Field):
        self._field = field
        self.name = f"fdhilb-{field.value}"

    def obj_dim(self, payload: FdObject) -> int:
        return payload.dim

    def obj_field(self, payload: FdObject) -> Field:
        return payload.field

    def validate_payload(self, payload: Any) -> None:
        if not isinstance(payload, FdObject):
            raise TypeError("fdhilb object payload must be FdObject")
        if payload.field is not self._field:
            raise FieldMismatch(
                f"object field {payload.field.value} in instance {self.name}"
            )

    def product_payload(self, payloads: Sequence[FdObject], field: Field) -> FdObject:
        return FdObject(sum(p.dim for p in payloads), field)

    def sub_payload(self, ambient: Obj, onb: Mat, tol: Tolerance) -> FdObject:
        return FdObject(onb.cols, ambient.field)


FDHILB_R = FdHilb(Field.REAL)
FDHILB_C = FdHilb(Field.COMPLEX)


def instance_for(field: Field) -> FdHilb:
    return FDHILB_R if field is Field.REAL else FDHILB_C


def fd_obj(dim: int, field: Field = Field.COMPLEX) -> Obj:
    return instance_for(field).make_obj(FdObject(dim, field))


def make_morphism(dom: Obj, cod: Obj, mat: Mat) -> Mor:
    """Wrap a matrix as a morphism; shape and field agreement enforced."""
    return Mor(dom, cod, mat)


def mor_from_array(data, field: Field = Field.COMPLEX) -> Mor:
    """Morphism between fd spaces inferred from the array shape."""
    arr = np.asarray(data, dtype=field.dtype)
    if arr.ndim != 2:
        raise ShapeMismatch("morphism data must be 2-D")
    return Mor(fd_obj(arr.shape[1], field), fd_obj(arr.shape[0], field), Mat(arr, field))
