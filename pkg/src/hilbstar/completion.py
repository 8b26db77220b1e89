"""Analytic-completeness algorithms at desk scale.

The infinite constructions are realized as certified truncations: lazy
sequences are materialized until a Cauchy gap falls below the tolerance, and
the result carries the gap as an explicit error bound.  Finite instances are
computed exactly (the top element of a finite directed order is its limit).

The supremum engine underpins everything else: bounded increasing sequences
of Hermitian endomorphisms converge in finite dimensions, so the stopping
rule only ever fails on data that violates its declared bound or direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .category import (
    BiproductStructure,
    HermEndo,
    Mor,
    Obj,
    classify_morphism,
    compose,
    dag,
    gram,
    hom_inner_product,
    identity,
    orthonormal_product,
    range_isometry,
    require_isometry,
    zero_mor,
)
from .errors import (
    ConvergenceFailure,
    GramMismatch,
    NoBound,
    NotCocone,
    NotCone,
    NotContraction,
    NotComposable,
    NotIsometric,
    NotMonotone,
    NotOrthogonal,
    NotOrthogonalCospan,
    NotL2Span,
    NoTailCertificate,
    NotPositive,
    PreconditionViolated,
    ShapeMismatch,
)
from .fdhilb import fd_obj
from .linalg import (
    DEFAULT_TOL,
    Field,
    Mat,
    Tolerance,
    eigh_hermitian,
    loewner_leq,
    min_eig,
    positive_sqrt,
    sym,
)

_EPS = float(np.finfo(np.float64).eps)


# ---------------------------------------------------------------------------
# Monotone suprema
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneChain:
    """Finite or lazily generated monotone sequence of Hermitian endos.

    ``term_fn`` must be replayable: calling it twice with the same index
    yields bit-identical terms.  Indices are 1-based.
    """

    term_fn: Callable[[int], HermEndo]
    size: int | None
    direction: str = "increasing"
    bound: HermEndo | None = None

    def __post_init__(self) -> None:
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError("direction must be 'increasing' or 'decreasing'")

    @staticmethod
    def from_terms(
        terms: Sequence[HermEndo],
        direction: str = "increasing",
        bound: HermEndo | None = None,
    ) -> "MonotoneChain":
        terms = tuple(terms)
        if not terms:
            raise PreconditionViolated("chain must have at least one term")
        return MonotoneChain(lambda n: terms[n - 1], len(terms), direction, bound)

    def term(self, n: int) -> HermEndo:
        if self.size is not None and not (1 <= n <= self.size):
            raise IndexError(f"index {n} outside chain of length {self.size}")
        return self.term_fn(n)


def _check_step(prev: HermEndo, cur: HermEndo, direction: str, tol: Tolerance) -> None:
    lo, hi = (prev, cur) if direction == "increasing" else (cur, prev)
    if not loewner_leq(lo.mat, hi.mat, tol):
        raise NotMonotone(f"consecutive terms violate the {direction} order")


def _check_bound(term: HermEndo, bound: HermEndo, tol: Tolerance) -> None:
    if not loewner_leq(term.mat, bound.mat, tol):
        raise NotMonotone("materialized term exceeds the declared bound")


def monotone_supremum(chain: MonotoneChain, tol: Tolerance = DEFAULT_TOL) -> HermEndo:
    """Supremum of a bounded monotone chain of Hermitian endomorphisms.

    Finite chains return their extreme term exactly.  Lazy increasing chains
    are materialized until the Frobenius gap between consecutive terms falls
    below ``atol + rtol * ||bound||``; the last materialized term is
    returned, and a post-hoc probe checks it dominates later terms.
    """
    if chain.size is not None:
        terms = [chain.term(n) for n in range(1, chain.size + 1)]
        for prev, cur in zip(terms, terms[1:]):
            _check_step(prev, cur, chain.direction, tol)
        if chain.bound is not None and chain.direction == "increasing":
            _check_bound(terms[-1], chain.bound, tol)
        return terms[-1] if chain.direction == "increasing" else terms[0]

    if chain.direction != "increasing":
        raise PreconditionViolated("lazy suprema need an increasing chain")
    if chain.bound is None:
        raise NoBound("lazy chain without an upper bound")
    threshold = tol.margin(chain.bound.norm())
    prev = chain.term(1)
    _check_bound(prev, chain.bound, tol)
    for n in range(2, tol.max_iter + 1):
        cur = chain.term(n)
        _check_step(prev, cur, chain.direction, tol)
        _check_bound(cur, chain.bound, tol)
        if (cur.mat - prev.mat).norm() <= threshold:
            _sup_posthoc_probe(chain, cur, n, tol)
            return cur
        prev = cur
    raise ConvergenceFailure(
        f"no Cauchy gap below {threshold:.3e} within {tol.max_iter} terms"
    )


def _sup_posthoc_probe(
    chain: MonotoneChain, s: HermEndo, stop: int, tol: Tolerance
) -> None:
    # The stopping rule observes only the gap; verify s >= a_m - tol for a
    # deterministic sample of later indices.
    rng = np.random.default_rng(2**32 + stop)
    offsets = np.unique(rng.integers(1, 33, size=10))
    slack = Tolerance(
        atol=tol.atol + tol.margin(max(1.0, s.norm())) * 4,
        rtol=tol.rtol,
        max_iter=tol.max_iter,
    )
    for off in offsets:
        later = chain.term(stop + int(off))
        if not loewner_leq(later.mat, s.mat, slack):
            raise ConvergenceFailure(
                f"term {stop + int(off)} escapes the computed supremum"
            )


def sup_conjugation(
    chain: MonotoneChain, r: Mor, tol: Tolerance = DEFAULT_TOL
) -> tuple[HermEndo, HermEndo, float]:
    """Compare sup_j r a_j r* with r (sup_j a_j) r*, both computed.

    No invertibility of ``r`` is required; the residual is expected at
    tolerance scale either way.
    """

    def conj(t: HermEndo) -> HermEndo:
        return HermEndo(r.cod, r.cod, sym(r.mat @ t.mat @ r.mat.H))

    conj_bound = conj(chain.bound) if chain.bound is not None else None
    conj_chain = MonotoneChain(
        lambda n: conj(chain.term(n)), chain.size, chain.direction, conj_bound
    )
    lhs = monotone_supremum(conj_chain, tol)
    rhs = conj(monotone_supremum(chain, tol))
    return lhs, rhs, (lhs.mat - rhs.mat).norm()


def approx_inverse_defect(
    a: HermEndo, n: int, tol: Tolerance = DEFAULT_TOL
) -> HermEndo:
    """The defect a - a^2 (a + 4^-n)^{-1}; PSD and at most 4^-n."""
    w, v = eigh_hermitian(a.mat, tol)
    if w.size and w[0] < -tol.margin(a.mat.norm()):
        raise NotPositive(f"min eigenvalue {w[0]:.3e}")
    w = np.where(w < 0.0, 0.0, w)
    shift = 4.0 ** (-n)
    vals = shift * w / (w + shift)
    out = sym(Mat((v.a * vals) @ v.a.conj().T, a.mat.field))
    return HermEndo(a.dom, a.dom, out)


# ---------------------------------------------------------------------------
# Douglas factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DouglasTrace:
    """Record of one Douglas factorization g = h f."""

    a: HermEndo
    d_terms: tuple[HermEndo, ...]
    d: HermEndo
    h: Mor
    iterations: int
    residual_idempotent: float  # ||d^2 - 2 d||
    residual_factor: float  # ||h f - g||
    pair_product: BiproductStructure


def douglas_factor(
    f: Mor, g: Mor, tol: Tolerance = DEFAULT_TOL
) -> DouglasTrace:
    """Factor g through f when f*f = g*g.

    Builds the column pair of f and g into the direct sum of their
    codomains, forms the increasing sequence
    d_n = <f,g> (a + 4^-n)^{-1} <f,g>* bounded above by 2, runs it to its
    supremum d (which satisfies d^2 = 2d), and reads off h as the lower-left
    block of d.  Spectral directions of a below the numerical noise floor
    are excluded from the resolvent; they carry no factorization data.
    """
    if f.dom != g.dom:
        raise ShapeMismatch("douglas: common domain required")
    gf, gg = gram(f), gram(g)
    mismatch = (gf.mat - gg.mat).norm()
    scale = max(gf.mat.norm(), gg.mat.norm(), 1.0)
    if mismatch > tol.margin(scale):
        raise GramMismatch(f"||f*f - g*g|| = {mismatch:.3e} at scale {scale:.3e}")
    a = HermEndo(f.dom, f.dom, sym((gf.mat + gg.mat).scale(0.5)))

    bp = orthonormal_product([f.cod, g.cod])
    col = compose(bp.injections[0], f) + compose(bp.injections[1], g)

    w, v = eigh_hermitian(a.mat, tol)
    w = np.where(w < 0.0, 0.0, w)
    cutoff = 100.0 * _EPS * (float(w[-1]) if w.size else 0.0)
    keep = w > cutoff
    b = col.mat.a @ v.a[:, keep]
    wk = w[keep]
    field = col.mat.field

    def d_at(n: int) -> HermEndo:
        coeff = 1.0 / (wk + 4.0 ** (-n))
        mat = sym(Mat((b * coeff) @ b.conj().T, field))
        return HermEndo(bp.apex, bp.apex, mat)

    threshold = tol.margin(2.0)
    d_terms = [d_at(1)]
    converged = False
    for n in range(2, tol.max_iter + 1):
        nxt = d_at(n)
        d_terms.append(nxt)
        if (nxt.mat - d_terms[-2].mat).norm() <= threshold:
            converged = True
            break
    if not converged:
        raise ConvergenceFailure(
            f"douglas resolvent gap above {threshold:.3e} after {tol.max_iter} terms"
        )
    d = d_terms[-1]

    dim_x = f.cod.dim
    h_mat = Mat(d.mat.a[dim_x:, :dim_x], field)
    h = Mor(f.cod, g.cod, h_mat)

    idem = float(np.linalg.norm(d.mat.a @ d.mat.a - 2.0 * d.mat.a))
    fact = (compose(h, f) - g).norm()
    return DouglasTrace(
        a=a,
        d_terms=tuple(d_terms),
        d=d,
        h=h,
        iterations=len(d_terms),
        residual_idempotent=idem,
        residual_factor=fact,
        pair_product=bp,
    )


# ---------------------------------------------------------------------------
# Codilations and codilators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Codilation:
    """Cospan of isometries (T, t1, t2) with t2* t1 = f."""

    apex: Obj
    t1: Mor
    t2: Mor
    jointly_epic: bool

    def defects(self, f: Mor) -> dict[str, float]:
        eye1 = Mat.identity(self.t1.dom.dim, self.t1.mat.field)
        eye2 = Mat.identity(self.t2.dom.dim, self.t2.mat.field)
        return {
            "t1_isometry": (sym(self.t1.mat.H @ self.t1.mat) - eye1).norm(),
            "t2_isometry": (sym(self.t2.mat.H @ self.t2.mat) - eye2).norm(),
            "factorization": (compose(dag(self.t2), self.t1) - f).norm(),
        }


def codilation(f: Mor, tol: Tolerance = DEFAULT_TOL) -> Codilation:
    """The column codilation of a contraction on dom(f) + cod(f)."""
    flags = classify_morphism(f, tol)
    if not flags.contraction:
        raise NotContraction("codilation requires a contraction")
    eye = Mat.identity(f.dom.dim, f.mat.field)
    defect = positive_sqrt(eye - sym(f.mat.H @ f.mat), tol)
    bp = orthonormal_product([f.dom, f.cod])
    t1 = compose(bp.injections[0], Mor(f.dom, f.dom, defect)) + compose(
        bp.injections[1], f
    )
    t2 = bp.injections[1]
    return Codilation(bp.apex, t1, t2, jointly_epic=flags.strict_contraction)


@dataclass(frozen=True)
class CodilatorResult:
    codilation: Codilation
    universality: str  # "verified" | "not-checked" | "open-nonstrict"
    samples: int
    max_mediating_residual: float | None


def codilator(
    f: Mor,
    tol: Tolerance = DEFAULT_TOL,
    samples: int = 0,
    seed: int = 0,
) -> CodilatorResult:
    """Jointly epic codilation obtained by compressing to the joint range.

    For strict contractions this is the universal codilation; universality
    is verified against ``samples`` randomly generated codilations.  For
    non-strict contractions universality is an open question and is only
    flagged, never asserted.
    """
    base = codilation(f, tol)
    combined = Mor(
        base.apex,
        base.apex,
        Mat(np.hstack([base.t1.mat.a, base.t2.mat.a]), base.t1.mat.field),
    )
    u = range_isometry(combined, tol)
    t1 = compose(dag(u), base.t1)
    t2 = compose(dag(u), base.t2)
    compressed = Codilation(u.dom, t1, t2, jointly_epic=True)

    strict = classify_morphism(f, tol).strict_contraction
    if not strict:
        return CodilatorResult(compressed, "open-nonstrict", 0, None)
    if samples <= 0:
        return CodilatorResult(compressed, "not-checked", 0, None)
    residual = verify_codilator_universality(compressed, f, samples, seed, tol)
    return CodilatorResult(compressed, "verified", samples, residual)


def mediating_to_codilation(
    codilator_cospan: Codilation, other: Codilation, tol: Tolerance = DEFAULT_TOL
) -> tuple[Mor, float]:
    """Unique isometry t with t t1 = t1', t t2 = t2'; returns (t, residual)."""
    legs = np.hstack([codilator_cospan.t1.mat.a, codilator_cospan.t2.mat.a])
    target = np.hstack([other.t1.mat.a, other.t2.mat.a])
    # t legs = target, solved in least squares; legs has full row rank
    # because the codilator legs are jointly epic.
    t_mat, *_ = np.linalg.lstsq(legs.conj().T, target.conj().T, rcond=None)
    t = Mor(
        codilator_cospan.apex,
        other.apex,
        Mat(t_mat.conj().T, codilator_cospan.t1.mat.field),
    )
    residual = float(np.linalg.norm(t.mat.a @ legs - target))
    iso_defect = (
        sym(t.mat.H @ t.mat) - Mat.identity(t.dom.dim, t.mat.field)
    ).norm()
    return t, max(residual, iso_defect)


def verify_codilator_universality(
    cand: Codilation, f: Mor, samples: int, seed: int, tol: Tolerance
) -> float:
    from .generators import gen_random_isometry  # deferred: avoids an import cycle

    base = codilation(f, tol)
    worst = 0.0
    for k in range(samples):
        extra = k % 4
        w = gen_random_isometry(
            base.apex.dim, base.apex.dim + extra, f.mat.field, seed=(seed, k)
        )
        other = Codilation(
            w.cod, compose(w, base.t1), compose(w, base.t2), jointly_epic=False
        )
        _, residual = mediating_to_codilation(cand, other, tol)
        worst = max(worst, residual)
    return worst


# ---------------------------------------------------------------------------
# Order sums and l2-families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrthFamily:
    """Orthogonal family of parallel morphisms, finite or truncatable.

    Lazy families are presented by a ``truncate`` function mapping a level N
    to the first N terms realized inside the level-N ambient space (mutually
    parallel at each fixed level), together with an optional Loewner bound
    on the partial Gram sums and an optional tail certificate mapping an
    error budget eps to a level N(eps) with  sum_{j>N} |x_j|^2 <= eps.
    """

    terms: tuple[Mor, ...] | None
    truncate: Callable[[int], Sequence[Mor]] | None = None
    bound: HermEndo | None = None
    tail: Callable[[float], int] | None = None

    @staticmethod
    def finite(terms: Sequence[Mor]) -> "OrthFamily":
        return OrthFamily(terms=tuple(terms))

    @staticmethod
    def lazy(
        truncate: Callable[[int], Sequence[Mor]],
        bound: HermEndo | None = None,
        tail: Callable[[float], int] | None = None,
    ) -> "OrthFamily":
        return OrthFamily(terms=None, truncate=truncate, bound=bound, tail=tail)

    @property
    def is_finite(self) -> bool:
        return self.terms is not None


def check_orthogonal(terms: Sequence[Mor], tol: Tolerance = DEFAULT_TOL) -> None:
    terms = list(terms)
    for i, x in enumerate(terms):
        for y in terms[i + 1 :]:
            resid = hom_inner_product(x, y).norm()
            if resid > tol.margin(max(1.0, x.norm() * y.norm())):
                raise NotOrthogonal(f"<x_i, x_j> residual {resid:.3e}")


@dataclass(frozen=True)
class OrderSumCertificate:
    n_terms: int
    eps: float
    pairing_residual: float  # max_j || <s, x_j> - |x_j|^2 ||
    gram_residual: float  # || |s|^2 - sum_j |x_j|^2 ||  over materialized terms


def _sum_terms(terms: Sequence[Mor]) -> Mor:
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _order_sum_certificate(
    s: Mor, terms: Sequence[Mor], eps: float
) -> OrderSumCertificate:
    pairing = 0.0
    total = None
    for x in terms:
        lhs = hom_inner_product(s, x)
        rhs = gram(x)
        pairing = max(pairing, (lhs - rhs).norm())
        total = rhs if total is None else total + rhs
    gram_resid = (gram(s) - total).norm() if total is not None else gram(s).norm()
    return OrderSumCertificate(len(terms), eps, pairing, gram_resid)


def order_sum(
    family: OrthFamily,
    tol: Tolerance = DEFAULT_TOL,
    eps: float | None = None,
) -> tuple[Mor, OrderSumCertificate]:
    """Order sum of an orthogonal family.

    Finite families are summed outright.  Lazy families are truncated at the
    level their tail certificate assigns to ``eps``; both defining equations
    of the order sum then hold within eps plus tolerance, and the returned
    certificate records the measured residuals.
    """
    if family.is_finite:
        terms = list(family.terms)
        check_orthogonal(terms, tol)
        if not terms:
            raise PreconditionViolated(
                "empty family needs an ambient hom-set; sum a zero morphism instead"
            )
        s = _sum_terms(terms)
        return s, _order_sum_certificate(s, terms, 0.0)

    if family.tail is None:
        raise NoTailCertificate("lazy order sums need a tail certificate")
    if eps is None:
        eps = tol.margin(1.0)
    level = max(1, int(family.tail(eps)))
    terms = list(family.truncate(level))
    check_orthogonal(terms, tol)
    s = _sum_terms(terms)
    return s, _order_sum_certificate(s, terms, eps)


def is_l2_family(
    family: OrthFamily,
    tol: Tolerance = DEFAULT_TOL,
    probe_depth: int | None = None,
) -> tuple[bool, HermEndo | None]:
    """Decide whether the family's partial Gram sums are bounded above.

    Finite families always qualify, with the full sum as bound.  Lazy
    families qualify when a declared bound survives a materialized prefix
    probe and a tail certificate is present; a prefix violating the bound
    refutes the claim outright.
    """
    if family.is_finite:
        terms = list(family.terms)
        check_orthogonal(terms, tol)
        if not terms:
            return True, None
        total = gram(terms[0])
        for t in terms[1:]:
            total = HermEndo(total.dom, total.cod, sym((total + gram(t)).mat))
        return True, total
    if family.bound is None:
        return False, None
    depth = probe_depth if probe_depth is not None else tol.max_iter
    terms = list(family.truncate(depth))
    check_orthogonal(terms, tol)
    partial = None
    for t in terms:
        g = gram(t)
        partial = g if partial is None else HermEndo(
            g.dom, g.cod, sym((partial + g).mat)
        )
        if not loewner_leq(partial.mat, family.bound.mat, tol):
            return False, None
    if family.tail is None:
        return False, None
    return True, family.bound


def geometric_tail(ratio: float, lead: float = 1.0) -> Callable[[float], int]:
    """Tail certificate for ||x_n|^2|| <= lead * ratio^n (0 < ratio < 1)."""
    if not 0.0 < ratio < 1.0:
        raise PreconditionViolated("geometric ratio must lie in (0, 1)")

    def tail(eps: float) -> int:
        if eps <= 0:
            raise PreconditionViolated("eps must be positive")
        n = 1
        while lead * ratio ** (n + 1) / (1.0 - ratio) > eps:
            n += 1
        return n

    return tail


# ---------------------------------------------------------------------------
# l2-products and mediating morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class L2ProductCertificate:
    truncated: bool
    level: int
    eps: float
    on_apex_defect: float  # || 1 - sum_j i_j p_j || on the realized apex


def l2_product(components: Sequence[Obj], field: Field | None = None) -> BiproductStructure:
    """Finite l2-product: the orthonormal product of the components."""
    return orthonormal_product(components, field)


def l2_product_truncated(
    component_fn: Callable[[int], Obj], level: int, eps: float
) -> tuple[BiproductStructure, L2ProductCertificate]:
    """First ``level`` stages of an infinite l2-product with an eps budget.

    On the realized apex the biproduct equations hold exactly; ``eps``
    records the caller's bound on the mass of the discarded tail relative
    to the intended infinite apex.
    """
    comps = [component_fn(j) for j in range(1, level + 1)]
    bp = orthonormal_product(comps)
    eye = np.eye(bp.apex.dim, dtype=bp.apex.field.dtype)
    acc = np.zeros_like(eye)
    for inj, proj in zip(bp.injections, bp.projections):
        acc += inj.mat.a @ proj.mat.a
    defect = float(np.linalg.norm(eye - acc))
    return bp, L2ProductCertificate(True, level, eps, defect)


def l2_mediating(
    bp: BiproductStructure, span: Sequence[Mor], tol: Tolerance = DEFAULT_TOL
) -> Mor:
    """Mediating morphism of a span into an l2-product.

    The comparison morphism is the order sum of the lifted legs i_j g_j; in
    the binary case this reduces to i_1 g_1 + i_2 g_2 exactly.
    """
    span = list(span)
    if len(span) != len(bp):
        raise ShapeMismatch("span length must match product components")
    if not span:
        raise PreconditionViolated("empty span has no mediating data")
    dom = span[0].dom
    lifted = []
    for g_j, inj, comp in zip(span, bp.injections, bp.components):
        if g_j.dom != dom:
            raise ShapeMismatch("span legs must share their domain")
        if g_j.cod != comp:
            raise ShapeMismatch("span leg does not land in its component")
        lifted.append(compose(inj, g_j))
    family = OrthFamily.finite(lifted)
    ok, _ = is_l2_family(family, tol)
    if not ok:
        raise NotL2Span("lifted span is not an l2-family")
    s, _ = order_sum(family, tol)
    return s


def epi_iso_factor(x: Mor, tol: Tolerance = DEFAULT_TOL) -> tuple[Mor, Mor]:
    """Factor x = m y with m an isometry onto range(x) and y epic."""
    m = range_isometry(x, tol)
    y = compose(dag(m), x)
    return y, m


def glue_isometries(
    cospan: Sequence[Mor],
    coproduct: BiproductStructure,
    tol: Tolerance = DEFAULT_TOL,
) -> Mor:
    """Unique isometry m with m i_j = m_j for an orthogonal isometric cospan."""
    cospan = list(cospan)
    if len(cospan) != len(coproduct):
        raise ShapeMismatch("cospan length must match coproduct components")
    if not cospan:
        raise PreconditionViolated("empty cospan has no gluing data")
    cod = cospan[0].cod
    for j, (m_j, comp) in enumerate(zip(cospan, coproduct.components)):
        if m_j.cod != cod:
            raise ShapeMismatch("cospan legs must share their codomain")
        if m_j.dom != comp:
            raise ShapeMismatch(f"cospan leg {j} does not start at its component")
        try:
            require_isometry(m_j, tol)
        except NotIsometric as exc:
            raise NotIsometric(f"cospan leg {j}: {exc}") from exc
    for i, m_i in enumerate(cospan):
        for m_j in cospan[i + 1 :]:
            resid = hom_inner_product(m_i, m_j).norm()
            if resid > tol.margin(max(1.0, m_i.norm() * m_j.norm())):
                raise NotOrthogonalCospan(f"<m_i, m_j> residual {resid:.3e}")
    out = zero_mor(coproduct.apex, cod)
    for m_j, proj in zip(cospan, coproduct.projections):
        out = out + compose(m_j, proj)
    return out


# ---------------------------------------------------------------------------
# Finite directed colimits of isometries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteColimit:
    objects: tuple[Obj, ...]
    apex: Obj
    legs: tuple[Mor, ...]


def finite_directed_colimit_isometries(
    chain: Sequence[Mor], obj: Obj | None = None, tol: Tolerance = DEFAULT_TOL
) -> FiniteColimit:
    """Colimit of a finite composable chain of isometries.

    The apex is the codomain of the last morphism and the legs are the
    suffix composites; an empty chain needs its single object passed
    explicitly.
    """
    chain = list(chain)
    if not chain:
        if obj is None:
            raise PreconditionViolated("empty chain requires an explicit object")
        return FiniteColimit((obj,), obj, (identity(obj),))
    for k, f in enumerate(chain):
        try:
            require_isometry(f, tol)
        except NotIsometric as exc:
            raise NotIsometric(f"chain step {k}: {exc}") from exc
        if k and chain[k - 1].cod != f.dom:
            raise NotComposable(f"steps {k - 1} and {k} do not compose")
    objects = [chain[0].dom] + [f.cod for f in chain]
    apex = objects[-1]
    legs = [identity(apex)]
    for f in reversed(chain):
        legs.append(compose(legs[-1], f))
    legs.reverse()
    return FiniteColimit(tuple(objects), apex, tuple(legs))


def check_cocone(
    colimit: FiniteColimit, chain: Sequence[Mor], cocone: Sequence[Mor], tol: Tolerance
) -> None:
    cocone = list(cocone)
    if len(cocone) != len(colimit.objects):
        raise NotCocone("cocone length must match the chain objects")
    for k, f in enumerate(chain):
        resid = (compose(cocone[k + 1], f) - cocone[k]).norm()
        if resid > tol.margin(max(1.0, cocone[k].norm())):
            raise NotCocone(f"cocone square {k} residual {resid:.3e}")


def colimit_mediating(
    colimit: FiniteColimit, cocone: Sequence[Mor], tol: Tolerance = DEFAULT_TOL
) -> Mor:
    """Unique t with t leg_j = cocone_j, solved on the jointly epic legs."""
    cocone = list(cocone)
    legs = np.hstack([leg.mat.a for leg in colimit.legs])
    target = np.hstack([c.mat.a for c in cocone])
    t_mat, *_ = np.linalg.lstsq(legs.conj().T, target.conj().T, rcond=None)
    return Mor(colimit.apex, cocone[0].cod, Mat(t_mat.conj().T, colimit.apex.field))


def mediating_via_codilator(
    colimit: FiniteColimit,
    chain: Sequence[Mor],
    cocone: Sequence[Mor],
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[Mor, Codilation]:
    """Mediating contraction for a cocone of contractions, with a codilation
    of the result as witness."""
    cocone = list(cocone)
    for k, a_j in enumerate(cocone):
        if not classify_morphism(a_j, tol).contraction:
            raise NotContraction(f"cocone component {k} is not a contraction")
    check_cocone(colimit, chain, cocone, tol)
    a = colimit_mediating(colimit, cocone, tol)
    if not classify_morphism(a, tol).contraction:
        raise NotContraction("mediating morphism failed the contraction check")
    return a, codilation(a, tol)


# ---------------------------------------------------------------------------
# Truncated codirected l2-limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedL2Limit:
    level: int
    apex_proxy: Obj
    legs: tuple[Mor, ...]  # truncation maps apex_proxy -> X_j, j = 1..level
    mediating: Mor
    mediating_gram: HermEndo
    eps: float


def _legs_from_steps(steps: Sequence[Mor], top: Obj) -> tuple[Mor, ...]:
    # leg for stage j composes the connecting maps from the top stage down.
    legs = [identity(top)]
    for f in reversed(list(steps)):
        legs.append(compose(f, legs[-1]))
    legs.reverse()
    return tuple(legs)


def l2_limit_truncated(
    steps: Sequence[Mor] | Callable[[int], Mor],
    cone: Sequence[Mor] | Callable[[int], Mor],
    tol: Tolerance = DEFAULT_TOL,
    bound: HermEndo | None = None,
) -> TruncatedL2Limit:
    """Mediating data of an l2-cone on a codirected chain of contractions.

    ``steps[k]`` is the connecting contraction from stage k+2 down to stage
    k+1 (1-based stages); ``cone[k]`` is the cone component into stage k+1.
    A finite chain has a top stage and the limit is attained there exactly.
    A lazy chain is materialized until the Gram net of the cone is Cauchy at
    tolerance scale; the final gap is returned as the tail bound eps.
    """
    finite = not callable(steps)
    if finite:
        step_list = list(steps)
        cone_list = list(cone)
        if len(cone_list) != len(step_list) + 1:
            raise NotCone("cone must have one component per stage")
        _validate_chain(step_list, cone_list, tol, bound)
        top = cone_list[-1]
        return TruncatedL2Limit(
            level=len(cone_list),
            apex_proxy=top.cod,
            legs=_legs_from_steps(step_list, top.cod),
            mediating=top,
            mediating_gram=gram(top),
            eps=0.0,
        )

    if bound is None:
        raise NoBound("lazy l2-limits need a bound on the cone's Gram net")
    step_fn, cone_fn = steps, cone
    threshold = tol.margin(bound.norm())
    xs = [cone_fn(1)]
    grams = [gram(xs[0])]
    step_list = []
    for k in range(1, tol.max_iter + 1):
        f_k = step_fn(k)  # X_{k+1} -> X_k
        x_next = cone_fn(k + 1)
        if f_k.dom != x_next.cod or f_k.cod != xs[-1].cod:
            raise NotComposable(f"stage {k} endpoints do not match")
        if not classify_morphism(f_k, tol).contraction:
            raise NotContraction(f"stage {k} connecting map is not a contraction")
        resid = (compose(f_k, x_next) - xs[-1]).norm()
        if resid > tol.margin(max(1.0, xs[-1].norm())):
            raise NotCone(f"cone square at stage {k} residual {resid:.3e}")
        g_next = gram(x_next)
        if not loewner_leq(grams[-1].mat, g_next.mat, tol):
            raise NotMonotone("cone Gram net is not increasing")
        if not loewner_leq(g_next.mat, bound.mat, tol):
            raise NotMonotone("cone Gram net exceeds its declared bound")
        xs.append(x_next)
        grams.append(g_next)
        step_list.append(f_k)
        gap = (g_next.mat - grams[-2].mat).norm()
        if gap <= threshold:
            return TruncatedL2Limit(
                level=len(xs),
                apex_proxy=x_next.cod,
                legs=_legs_from_steps(step_list, x_next.cod),
                mediating=x_next,
                mediating_gram=g_next,
                eps=gap,
            )
    raise ConvergenceFailure(
        f"cone Gram net gap above {threshold:.3e} after {tol.max_iter} stages"
    )


def _validate_chain(
    step_list: Sequence[Mor],
    cone_list: Sequence[Mor],
    tol: Tolerance,
    bound: HermEndo | None,
) -> None:
    for k, f_k in enumerate(step_list):
        if f_k.dom != cone_list[k + 1].cod or f_k.cod != cone_list[k].cod:
            raise NotComposable(f"stage {k + 1} endpoints do not match")
        if not classify_morphism(f_k, tol).contraction:
            raise NotContraction(f"stage {k + 1} connecting map is not a contraction")
        resid = (compose(f_k, cone_list[k + 1]) - cone_list[k]).norm()
        if resid > tol.margin(max(1.0, cone_list[k].norm())):
            raise NotCone(f"cone square at stage {k + 1} residual {resid:.3e}")
    if bound is not None:
        for x in cone_list:
            if not loewner_leq(gram(x).mat, bound.mat, tol):
                raise NotMonotone("cone Gram net exceeds its declared bound")


def archimedean_witness(n: int, field: Field = Field.COMPLEX) -> Mor:
    """Column of the scalars 2^-1 .. 2^-n into the n-fold sum of the line.

    Its Gram is (1 - 4^-n)/3, a strict contraction for every n; the family
    realizes the Archimedean supremum sup_n (1 - 4^-n)/3 = 1/3.
    """
    if n < 1:
        raise PreconditionViolated("n must be at least 1")
    col = np.array([[2.0 ** (-k)] for k in range(1, n + 1)], dtype=field.dtype)
    return Mor(fd_obj(1, field), fd_obj(n, field), Mat(col, field))
