"""Exact membership predicates for the arithmetic groups in play
(special linear, unitary over real quadratic rings, quaternionic unitary,
symplectic, orthogonal, and the exceptional group over Z), plus batch
verification that the symmetric-power image of the quaternion lattice
lands in the predicted unitary group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactnum import (
    ExactMatrix,
    FieldDescriptor,
    FieldElem,
    GaloisAction,
    _is_zero,
    field,
    galois_matrix,
    square_free_part,
)
from .g2core import in_g2
from .quatalg import QuatElem, embed_m2, gamma_enumerate
from .symrep import SignPair, hermitian_h, tau


def is_integral_scalar(x) -> bool:
    """Integrality on the monomial basis: all coefficients in Z."""
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, FieldElem):
        return all(c.denominator == 1 for c in x.coeffs)
    if isinstance(x, QuatElem):
        return all(is_integral_scalar(c) for c in x.coords)
    raise TypeError(f"unsupported scalar {type(x)!r}")


def is_integral_matrix(m: ExactMatrix) -> bool:
    return all(is_integral_scalar(e) for row in m.entries for e in row)


def _as_field_matrix(m: ExactMatrix, desc: FieldDescriptor) -> ExactMatrix:
    def conv(e):
        if isinstance(e, Fraction):
            return FieldElem.from_rational(desc, e)
        if isinstance(e, FieldElem):
            if e.desc == desc:
                return e
            return e.extend(desc)
        raise ValueError("entry is not a field element")
    return m.map_entries(conv)


def in_slnz(m: ExactMatrix) -> bool:
    """SL(n, Z): integer entries and determinant one."""
    if not m.is_square():
        return False
    if not is_integral_matrix(m):
        return False
    return m.det() == ExactMatrix.identity(m.nrows, like=m.entries[0][0]).entries[0][0]


def in_su_sqrt_d(m: ExactMatrix, n: int, d: int) -> bool:
    """The unitary lattice over Z[sqrt(d)]: entries integral over Z[sqrt(d)],
    determinant one, and sigma(M)^T M = I for the conjugation of
    Q(sqrt(d))/Q."""
    d = square_free_part(d)
    if d <= 1:
        raise ValueError("d must be a positive non-square")
    if m.nrows != n or m.ncols != n:
        return False
    desc = field(d)
    for row in m.entries:
        for e in row:
            if isinstance(e, FieldElem) and e.desc != desc:
                if any(r != d for r in e.desc.radicands):
                    raise ValueError(f"entry {e} is not in Q(sqrt({d}))")
    mm = _as_field_matrix(m, desc)
    if not is_integral_matrix(mm):
        return False
    if mm.det() != FieldElem.one(desc):
        return False
    sigma = GaloisAction.flipping(d)
    return galois_matrix(sigma, mm).transpose() * mm == ExactMatrix.identity(
        n, like=FieldElem.one(desc))


def diagonal_su_nonsplit_conditions(m: ExactMatrix, d: int) -> bool:
    """Diagonal membership conditions in the unitary lattice attached to a
    quadratic extension not containing the splitting root: the entry
    vector is palindromic and w_i * tau(w_(n+1-i)) = 1 for the conjugation
    tau of Q(sqrt(d))/Q, with integral entries and determinant one."""
    d = square_free_part(d)
    if not m.is_diagonal():
        return False
    desc = field(d)
    mm = _as_field_matrix(m, desc)
    if not is_integral_matrix(mm):
        return False
    w = list(mm.diagonal_entries())
    n = len(w)
    det = FieldElem.one(desc)
    for e in w:
        det = det * e
    if det != FieldElem.one(desc):
        return False
    tau_d = GaloisAction.flipping(d)
    from .exactnum import apply_galois
    for i in range(n):
        if w[i] != w[n - 1 - i]:
            return False
        if w[i] * apply_galois(tau_d, w[n - 1 - i]) != FieldElem.one(desc):
            return False
    return True


def preserves_form(m: ExactMatrix, j: ExactMatrix,
                   up_to_scalar: bool = False) -> bool:
    """M^T J M = J, or = lambda*J for some scalar when up_to_scalar."""
    if m.ncols != j.nrows or not m.is_square() or not j.is_square():
        raise ValueError("incompatible dimensions")
    one = m.entries[0][0] * 0 + 1
    jj = j.map_entries(lambda e: e * one)
    got = m.transpose() * jj * m
    if got == jj:
        return True
    if not up_to_scalar:
        return False
    lam = None
    for i in range(j.nrows):
        for k in range(j.ncols):
            if not _is_zero(jj.entries[i][k]):
                lam = got.entries[i][k] * _inv(jj.entries[i][k])
                break
        if lam is not None:
            break
    if lam is None:
        raise ValueError("form matrix is zero")
    return got == jj.map_entries(lambda e: e * lam)


def _inv(x):
    return (Fraction(1) / x) if isinstance(x, Fraction) else x.inverse()


def is_tau_pgl2_diagonal(b: ExactMatrix) -> bool:
    """Whether a diagonal matrix is a scalar multiple of the
    symmetric-power image of a 2x2 diagonal matrix: equivalent to its
    entries forming a geometric progression."""
    if not b.is_square() or not b.is_diagonal():
        raise ValueError("predicate is defined for diagonal matrices only")
    diag = b.diagonal_entries()
    if any(_is_zero(e) for e in diag):
        raise ValueError("diagonal entries must be nonzero")
    if len(diag) == 1:
        return True
    ratio = diag[0] * _inv(diag[1])
    return all(diag[i] * _inv(diag[i + 1]) == ratio
               for i in range(1, len(diag) - 1))


def in_su_quat(m: ExactMatrix, size: int, a: int, b: int, d: int) -> bool:
    """Quaternionic unitary lattice: entries are quaternions over (a,b)
    with coordinates integral over Z[sqrt(d)], the twisted conjugate
    transpose is the inverse, and the reduced-norm determinant (via the
    2x2 embedding) is one."""
    d = square_free_part(d)
    if m.nrows != size or m.ncols != size:
        return False
    for row in m.entries:
        for e in row:
            if not isinstance(e, QuatElem):
                raise ValueError("entries must be quaternions")
            if (square_free_part(e.algebra.a) != square_free_part(a)
                    or square_free_part(e.algebra.b) != square_free_part(b)):
                raise ValueError("entries lie in the wrong quaternion algebra")
    if not is_integral_matrix(m):
        return False
    tau_d = GaloisAction.flipping(d)
    twisted = m.map_entries(lambda q: q.conj().apply_galois(tau_d)).transpose()
    prod = twisted * m
    ident = ExactMatrix.identity(size, like=m.entries[0][0])
    if prod != ident:
        return False
    return _quat_block_det_is_one(m)


def _quat_block_det_is_one(m: ExactMatrix) -> bool:
    blocks = [[embed_m2(e) for e in row] for row in m.entries]
    desc = blocks[0][0].entries[0][0].desc
    size = m.nrows
    big = [[None] * (2 * size) for _ in range(2 * size)]
    for i in range(size):
        for j in range(size):
            blk = _as_field_matrix(blocks[i][j], desc) if (
                blocks[i][j].entries[0][0].desc != desc) else blocks[i][j]
            for r in range(2):
                for c in range(2):
                    big[2 * i + r][2 * j + c] = blk.entries[r][c]
    det = ExactMatrix(big).det()
    return det == FieldElem.one(desc)


def in_sp(m: ExactMatrix, n: int, integral: bool = True) -> bool:
    """Symplectic group for the block-diagonal form with 2x2 blocks
    [[0,1],[-1,0]]; with integrality this is the Z-point lattice."""
    if n % 2:
        raise ValueError("symplectic dimension must be even")
    if m.nrows != n or m.ncols != n:
        return False
    if integral and not is_integral_matrix(m):
        return False
    j = symplectic_form(n)
    one = m.entries[0][0] * 0 + 1
    jj = j.map_entries(lambda e: e * one)
    return m.transpose() * jj * m == jj


def symplectic_form(n: int) -> ExactMatrix:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for k in range(n // 2):
        rows[2 * k][2 * k + 1] = Fraction(1)
        rows[2 * k + 1][2 * k] = Fraction(-1)
    return ExactMatrix(rows)


def in_so_q(m: ExactMatrix, q: ExactMatrix, integral: bool = True) -> bool:
    """Special orthogonal group of a symmetric matrix; with integrality the
    Z-point lattice."""
    if m.nrows != q.nrows or not m.is_square():
        return False
    if integral and not is_integral_matrix(m):
        return False
    one = m.entries[0][0] * 0 + 1
    qq = q.map_entries(lambda e: e * one)
    if m.transpose() * qq * m != qq:
        return False
    return _is_zero(m.det() - one)


def in_g2z(m: ExactMatrix) -> bool:
    """Integer points of the exceptional group: integrality plus the
    cross-product membership conditions."""
    return is_integral_matrix(m) and in_g2(m)


def in_sl_quat(m: ExactMatrix, size: int, a: int, b: int) -> bool:
    """SL(size, O) for the standard order O of (a,b): integer quaternion
    entries with reduced-norm determinant one."""
    if m.nrows != size or m.ncols != size:
        return False
    for row in m.entries:
        for e in row:
            if not isinstance(e, QuatElem):
                raise ValueError("entries must be quaternions")
    if not is_integral_matrix(m):
        return False
    return _quat_block_det_is_one(m)


@dataclass(frozen=True)
class LatticeSpec:
    """A named arithmetic group with parameters; dispatches membership."""

    kind: str  # SLnZ | SU_sqrt_d | SU_quat | Sp | SO_Q | SL_quat | G2Z
    n: int = 0
    d: int = 0
    a: int = 0
    b: int = 0
    q_matrix: Optional[ExactMatrix] = None

    def __post_init__(self) -> None:
        kinds = {"SLnZ", "SU_sqrt_d", "SU_quat", "Sp", "SO_Q", "SL_quat", "G2Z"}
        if self.kind not in kinds:
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.kind == "SU_sqrt_d" and square_free_part(self.d) <= 1:
            raise ValueError("SU_sqrt_d needs a positive non-square d")
        if self.kind == "SU_quat" and square_free_part(self.d) <= 1:
            raise ValueError("SU_quat needs a positive non-square d")
        if self.kind == "Sp" and self.n % 2:
            raise ValueError("Sp needs even dimension")
        if self.kind == "SO_Q":
            if self.q_matrix is None or not self.q_matrix.is_symmetric():
                raise ValueError("SO_Q needs a symmetric form matrix")
        if self.kind == "G2Z" and self.n not in (0, 7):
            raise ValueError("G2Z lives in dimension 7")

    def contains(self, m: ExactMatrix) -> bool:
        if self.kind == "SLnZ":
            return m.nrows == self.n and in_slnz(m)
        if self.kind == "SU_sqrt_d":
            return in_su_sqrt_d(m, self.n, self.d)
        if self.kind == "SU_quat":
            return in_su_quat(m, self.n, self.a, self.b, self.d)
        if self.kind == "Sp":
            return in_sp(m, self.n)
        if self.kind == "SO_Q":
            return in_so_q(m, self.q_matrix)
        if self.kind == "SL_quat":
            return in_sl_quat(m, self.n, self.a, self.b)
        return m.nrows == 7 and in_g2z(m)


# -- batch containment -------------------------------------------------------


def applicable_sign_patterns(a: int, b: int) -> list[SignPair]:
    """Sign patterns realizable by a Galois element of Q(sqrt(a),sqrt(b)):
    a square radicand cannot flip, and equal radicands flip together."""
    a_sf, b_sf = square_free_part(a), square_free_part(b)
    out = []
    for sa in (1, -1):
        for sb in (1, -1):
            if sa == -1 and a_sf == 1:
                continue
            if sb == -1 and b_sf == 1:
                continue
            if a_sf == b_sf and a_sf != 1 and sa != sb:
                continue
            out.append((sa, sb))
    return out


@dataclass(frozen=True)
class ContainmentReport:
    a: int
    b: int
    n: int
    height: int
    patterns: tuple[SignPair, ...]
    total: int
    passed: int
    failures: tuple[tuple[tuple[int, int, int, int], SignPair], ...]

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "params": {"a": self.a, "b": self.b, "n": self.n},
            "patterns": [_pattern_name(p) for p in self.patterns],
            "height": self.height,
            "total": self.total,
            "passed": self.passed,
            "failures": [
                {"element": [str(x) for x in quad], "pattern": _pattern_name(p)}
                for quad, p in self.failures
            ],
        }


def _pattern_name(signs: SignPair) -> str:
    return ("+" if signs[0] == 1 else "-") + ("+" if signs[1] == 1 else "-")


def containment_check(a: int, b: int, n: int,
                      signs: Optional[SignPair] = None,
                      height: int = 2) -> ContainmentReport:
    """For every enumerated norm-one integer quaternion g, verify the
    twisted unitarity of tau(n, embed(g)) against the derived Hermitian
    matrix, under the requested Galois sign pattern (or all applicable
    ones)."""
    a_sf, b_sf = square_free_part(a), square_free_part(b)
    if a < 1 or b < 1 or a_sf == 1 or b_sf == 1:
        raise ValueError("a and b must be positive non-squares")
    if n < 2:
        raise ValueError("n must be at least 2")
    patterns = applicable_sign_patterns(a, b)
    if signs is not None:
        if signs not in patterns:
            raise ValueError(
                f"sign pattern {_pattern_name(signs)} is not realizable "
                f"for (a,b)=({a},{b})")
        patterns = [signs]
    elements = gamma_enumerate(a, b, height)
    rads = sorted({a_sf, b_sf})
    desc = field(*rads)
    actions = {
        p: GaloisAction.from_signs(
            {a_sf: p[0], b_sf: p[1]} if a_sf != b_sf else {a_sf: p[0]})
        for p in patterns
    }
    hmats = {
        p: hermitian_h(n, a, b, p).map_entries(
            lambda e: FieldElem.from_rational(desc, e))
        for p in patterns
    }
    failures = []
    checked = 0
    for g in elements:
        m = tau(n, _as_field_matrix(g.matrix(), desc))
        for p in patterns:
            checked += 1
            h = hmats[p]
            if galois_matrix(actions[p], m).transpose() * h * m != h:
                failures.append((g.quadruple(), p))
    return ContainmentReport(a, b, n, height, tuple(patterns),
                             checked, checked - len(failures),
                             tuple(failures))
