"""Reduction of exact data modulo an odd prime, breadth-first closure of
finite matrix groups with canonical byte-encoded hashing, the standard
order formulas, trace sets and trace witnesses over finite fields, and the
mod-p orbit-separation certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .exactnum import ExactMatrix, FieldElem, square_free_part
from .symrep import tau, trace_poly

DEFAULT_CLOSURE_CAP = 5_000_000


class CapExceeded(Exception):
    """Closure walked past the cap; carries the partial element count."""

    def __init__(self, partial: int):
        super().__init__(f"closure exceeded cap with {partial} elements found")
        self.partial = partial


# -- finite field elements ---------------------------------------------------


@dataclass(frozen=True)
class FqElem:
    """Element of F_p (degree 1) or F_p[r]/(r^2 - r2) (degree 2), with
    coordinates reduced mod p."""

    p: int
    x: int
    y: int = 0
    r2: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", self.x % self.p)
        object.__setattr__(self, "y", self.y % self.p)
        if self.r2 is not None:
            object.__setattr__(self, "r2", self.r2 % self.p)
        if self.r2 is None and self.y:
            raise ValueError("degree-1 element cannot have a second coordinate")

    @property
    def degree(self) -> int:
        return 1 if self.r2 is None else 2

    def _coerce(self, other) -> Optional["FqElem"]:
        if isinstance(other, int):
            return FqElem(self.p, other, 0, self.r2)
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError("denominator not invertible mod p")
            num = other.numerator * pow(other.denominator, -1, self.p)
            return FqElem(self.p, num, 0, self.r2)
        if isinstance(other, FqElem):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            if self.r2 is not None and other.r2 is None:
                return FqElem(self.p, other.x, 0, self.r2)
            if self.r2 != other.r2 and other.r2 is not None and self.r2 is not None:
                raise ValueError("mixed quadratic extensions")
            return other
        return None

    def one_like(self) -> "FqElem":
        return FqElem(self.p, 1, 0, self.r2)

    def zero_like(self) -> "FqElem":
        return FqElem(self.p, 0, 0, self.r2)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r2 = self.r2 if self.r2 is not None else o.r2
        return FqElem(self.p, self.x + o.x, self.y + o.y, r2)

    __radd__ = __add__

    def __neg__(self):
        return FqElem(self.p, -self.x, -self.y, self.r2)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r2 = self.r2 if self.r2 is not None else o.r2
        return FqElem(self.p, self.x - o.x, self.y - o.y, r2)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r2 = self.r2 if self.r2 is not None else o.r2
        if r2 is None:
            return FqElem(self.p, self.x * o.x)
        return FqElem(self.p,
                      self.x * o.x + r2 * self.y * o.y,
                      self.x * o.y + self.y * o.x, r2)

    __rmul__ = __mul__

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.r2 is None:
            return FqElem(self.p, pow(self.x, -1, self.p))
        n = (self.x * self.x - self.r2 * self.y * self.y) % self.p
        ninv = pow(n, -1, self.p)
        return FqElem(self.p, self.x * ninv, -self.y * ninv, self.r2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, e: int) -> "FqElem":
        if e < 0:
            return self.inverse() ** (-e)
        out = self.one_like()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def frobenius(self) -> "FqElem":
        return FqElem(self.p, self.x, -self.y, self.r2)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.y == 0 and self.x == other % self.p
        if not isinstance(other, FqElem):
            return NotImplemented
        if self.p != other.p:
            return False
        if self.y == 0 and other.y == 0:
            return self.x == other.x
        return (self.x, self.y, self.r2) == (other.x, other.y, other.r2)

    def __hash__(self) -> int:
        if self.y == 0:
            return hash((self.p, self.x))
        return hash((self.p, self.x, self.y, self.r2))

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        return f"{self.x}+{self.y}r"

    __repr__ = __str__


# -- reduction contexts ------------------------------------------------------


@dataclass(frozen=True)
class ReductionContext:
    """Reduction of Z[sqrt(d)] modulo an odd prime p not dividing d: when d
    is a square mod p the ring splits and sqrt(d) goes to a chosen root;
    otherwise the image is the quadratic field extension."""

    p: int
    d: int
    mode: str              # "split" | "inert"
    root: Optional[int]    # the chosen square root of d mod p when split

    @classmethod
    def build(cls, p: int, d: int) -> "ReductionContext":
        if p == 2 or not _is_prime(p):
            raise ValueError("reduction needs an odd prime")
        d = square_free_part(d)
        if d <= 1:
            raise ValueError("d must be a positive non-square")
        if d % p == 0:
            raise ValueError(f"{p} divides {d}; reduction context undefined")
        if pow(d % p, (p - 1) // 2, p) == 1:
            root = next(r for r in range(1, p) if r * r % p == d % p)
            return cls(p, d, "split", root)
        return cls(p, d, "inert", None)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def reduce_scalar(x: Union[int, Fraction, FieldElem],
                  ctx: ReductionContext) -> FqElem:
    """Ring homomorphism onto the residue ring; denominators must be
    invertible mod p."""
    p = ctx.p
    if isinstance(x, int):
        return FqElem(p, x)
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise ZeroDivisionError(f"denominator {x.denominator} not invertible mod {p}")
        return FqElem(p, x.numerator * pow(x.denominator, -1, p))
    if isinstance(x, FieldElem):
        rads = x.desc.radicands
        if len(rads) > 1 or (rads and rads[0] != ctx.d):
            raise ValueError(f"element lies in Q{rads}, context is for sqrt({ctx.d})")
        c0 = x.coeffs[0]
        c1 = x.coeffs[1] if len(x.coeffs) > 1 else Fraction(0)
        for c in (c0, c1):
            if c.denominator % p == 0:
                raise ZeroDivisionError(f"denominator {c.denominator} not invertible mod {p}")
        a = c0.numerator * pow(c0.denominator, -1, p)
        b = c1.numerator * pow(c1.denominator, -1, p)
        if ctx.mode == "split":
            return FqElem(p, a + b * ctx.root)
        return FqElem(p, a, b, ctx.d % p)
    raise TypeError(f"cannot reduce {type(x)!r}")


def reduce_matrix(m: ExactMatrix, ctx: ReductionContext) -> ExactMatrix:
    return m.map_entries(lambda e: reduce_scalar(e, ctx))


def reduce_int_matrix(m: ExactMatrix, p: int) -> ExactMatrix:
    """Reduce a rational matrix with p-invertible denominators mod p."""
    def red(e):
        e = Fraction(e)
        if e.denominator % p == 0:
            raise ZeroDivisionError("denominator not invertible mod p")
        return FqElem(p, e.numerator * pow(e.denominator, -1, p))
    return m.map_entries(red)


def matrix_order(m: ExactMatrix, cap: int = 1_000_000) -> int:
    """Multiplicative order of an invertible FqElem matrix."""
    ident = ExactMatrix.identity(m.nrows, like=m.entries[0][0])
    acc = m
    for k in range(1, cap + 1):
        if acc == ident:
            return k
        acc = acc * m
    raise CapExceeded(cap)


# -- packed rings and breadth-first closure ----------------------------------


class _PackedRing:
    """Arithmetic for closure walks: elements are ints in [0, q).  Prime
    fields use direct modular arithmetic; quadratic extensions pack x+y*r
    as x + p*y and use multiplication tables."""

    def __init__(self, p: int, r2: Optional[int] = None):
        self.p = p
        self.r2 = r2
        self.q = p if r2 is None else p * p
        if r2 is not None:
            if self.q > 4096:
                raise ValueError("quadratic packing is for small fields")
            q, mul = self.q, [0] * (self.q * self.q)
            for u in range(q):
                ux, uy = u % p, u // p
                for v in range(q):
                    vx, vy = v % p, v // p
                    x = (ux * vx + r2 * uy * vy) % p
                    y = (ux * vy + uy * vx) % p
                    mul[u * q + v] = x + p * y
            self.mul_table = mul

    def pack(self, e: FqElem) -> int:
        if self.r2 is None:
            if e.y:
                raise ValueError("element has degree 2, ring has degree 1")
            return e.x
        return e.x + self.p * e.y

    def unpack(self, u: int) -> FqElem:
        if self.r2 is None:
            return FqElem(self.p, u)
        return FqElem(self.p, u % self.p, u // self.p, self.r2)

    def add(self, u: int, v: int) -> int:
        if self.r2 is None:
            return (u + v) % self.p
        p = self.p
        return (u + v) % p + p * ((u // p + v // p) % p)


def _detect_ring(gens: Sequence[ExactMatrix]) -> _PackedRing:
    p = r2 = None
    for g in gens:
        for row in g.entries:
            for e in row:
                if not isinstance(e, FqElem):
                    raise TypeError("closure needs FqElem entries")
                if p is None:
                    p = e.p
                elif e.p != p:
                    raise ValueError("mixed characteristics")
                if e.r2 is not None:
                    if r2 is not None and e.r2 != r2:
                        raise ValueError("mixed quadratic extensions")
                    r2 = e.r2
    return _PackedRing(p, r2)


def _pack_matrix(ring: _PackedRing, m: ExactMatrix) -> tuple[int, ...]:
    return tuple(ring.pack(e if e.r2 is not None or ring.r2 is None
                           else FqElem(ring.p, e.x, 0, ring.r2))
                 for row in m.entries for e in row)


def _encode(flat: tuple[int, ...], wide: bool) -> bytes:
    if not wide:
        return bytes(flat)
    return b"".join(v.to_bytes(2, "little") for v in flat)


def _matmul_prime(a: tuple, b_cols: list, n: int, p: int) -> tuple:
    out = []
    for i in range(n):
        row = a[i * n:(i + 1) * n]
        for col in b_cols:
            out.append(sum(x * y for x, y in zip(row, col)) % p)
    return tuple(out)


def _prime_mul_fn(packed_gen: tuple, n: int, p: int):
    """Right-multiplication by a fixed generator, unrolled for the small
    dimensions the closure walks actually use."""
    g = packed_gen
    if n == 2:
        g0, g1, g2, g3 = g

        def mul2(a):
            a0, a1, a2, a3 = a
            return ((a0 * g0 + a1 * g2) % p, (a0 * g1 + a1 * g3) % p,
                    (a2 * g0 + a3 * g2) % p, (a2 * g1 + a3 * g3) % p)
        return mul2
    if n == 3:
        g0, g1, g2, g3, g4, g5, g6, g7, g8 = g

        def mul3(a):
            a0, a1, a2, a3, a4, a5, a6, a7, a8 = a
            return ((a0 * g0 + a1 * g3 + a2 * g6) % p,
                    (a0 * g1 + a1 * g4 + a2 * g7) % p,
                    (a0 * g2 + a1 * g5 + a2 * g8) % p,
                    (a3 * g0 + a4 * g3 + a5 * g6) % p,
                    (a3 * g1 + a4 * g4 + a5 * g7) % p,
                    (a3 * g2 + a4 * g5 + a5 * g8) % p,
                    (a6 * g0 + a7 * g3 + a8 * g6) % p,
                    (a6 * g1 + a7 * g4 + a8 * g7) % p,
                    (a6 * g2 + a7 * g5 + a8 * g8) % p)
        return mul3
    if n == 4:
        (g0, g1, g2, g3, g4, g5, g6, g7,
         g8, g9, g10, g11, g12, g13, g14, g15) = g

        def mul4(a):
            out = []
            for base in (0, 4, 8, 12):
                a0, a1, a2, a3 = a[base], a[base + 1], a[base + 2], a[base + 3]
                out.append((a0 * g0 + a1 * g4 + a2 * g8 + a3 * g12) % p)
                out.append((a0 * g1 + a1 * g5 + a2 * g9 + a3 * g13) % p)
                out.append((a0 * g2 + a1 * g6 + a2 * g10 + a3 * g14) % p)
                out.append((a0 * g3 + a1 * g7 + a2 * g11 + a3 * g15) % p)
            return tuple(out)
        return mul4
    cols = [g[j::n] for j in range(n)]

    def mul_generic(a):
        return _matmul_prime(a, cols, n, p)
    return mul_generic


def _matmul_table(a: tuple, b: tuple, n: int, ring: _PackedRing) -> tuple:
    q = ring.q
    p = ring.p
    mul = ring.mul_table
    out = []
    for i in range(n):
        base = i * n
        for j in range(n):
            accx = accy = 0
            for k in range(n):
                t = mul[a[base + k] * q + b[k * n + j]]
                accx += t % p
                accy += t // p
            out.append(accx % p + p * (accy % p))
    return tuple(out)


def _closure_walk(gens: Sequence[ExactMatrix], cap: int,
                  visit: Optional[Callable[[tuple, "_PackedRing", int], None]] = None
                  ) -> int:
    """BFS over products; returns the group order.  `visit` sees every
    element once (packed flat tuple)."""
    if not gens:
        raise ValueError("need at least one generator")
    ring = _detect_ring(gens)
    n = gens[0].nrows
    packed = [_pack_matrix(ring, g) for g in gens]
    wide = ring.q > 256
    if ring.r2 is None:
        muls = [_prime_mul_fn(g, n, ring.p) for g in packed]
    else:
        muls = [(lambda a, g=g: _matmul_table(a, g, n, ring)) for g in packed]
    ident = tuple(1 if i == j else 0 for i in range(n) for j in range(n))
    seen = {_encode(ident, wide)}
    if visit:
        visit(ident, ring, n)
    frontier = [ident]
    count = 1
    while frontier:
        new = []
        for m in frontier:
            for mul in muls:
                prod = mul(m)
                key = _encode(prod, wide)
                if key not in seen:
                    seen.add(key)
                    count += 1
                    if count > cap:
                        raise CapExceeded(count)
                    if visit:
                        visit(prod, ring, n)
                    new.append(prod)
        frontier = new
    return count


def group_closure(gens: Sequence[ExactMatrix],
                  cap: int = DEFAULT_CLOSURE_CAP) -> int:
    """Exact order of the group generated by invertible FqElem matrices,
    by breadth-first closure with canonical byte-encoded dedup.  Raises
    CapExceeded (with the partial count) past the cap."""
    return _closure_walk(gens, cap)


def group_closure_and_traces(gens: Sequence[ExactMatrix],
                             cap: int = DEFAULT_CLOSURE_CAP
                             ) -> tuple[int, frozenset[FqElem]]:
    """Order and full trace set in a single walk."""
    traces: set[FqElem] = set()

    def visit(flat, ring, n):
        traces.add(_packed_trace(flat, ring, n))

    order = _closure_walk(gens, cap, visit)
    return order, frozenset(traces)


def group_order_formula(family: str, n: int, q: int) -> int:
    """Textbook orders of the finite classical groups."""
    if family == "SL":
        out = q ** (n * (n - 1) // 2)
        for i in range(2, n + 1):
            out *= q ** i - 1
        return out
    if family == "SU":
        out = q ** (n * (n - 1) // 2)
        for i in range(2, n + 1):
            out *= q ** i - (-1) ** i
        return out
    if family == "Sp":
        if n % 2:
            raise ValueError("symplectic dimension must be even")
        m = n // 2
        out = q ** (m * m)
        for i in range(1, m + 1):
            out *= q ** (2 * i) - 1
        return out
    raise ValueError(f"no order formula for family {family!r}")


# -- standard generators ------------------------------------------------------


def sl_generators(n: int, p: int) -> list[ExactMatrix]:
    """An elementary transvection and a signed cycle generate SL(n, p)."""
    e12 = [[FqElem(p, 1 if i == j else 0) for j in range(n)] for i in range(n)]
    e12[0][1] = FqElem(p, 1)
    cyc = [[FqElem(p, 0) for _ in range(n)] for _ in range(n)]
    for i in range(n - 1):
        cyc[i + 1][i] = FqElem(p, 1)
    cyc[0][n - 1] = FqElem(p, (-1) ** (n - 1))
    return [ExactMatrix(e12), ExactMatrix(cyc)]


def hermitian_3form(p: int, r2: int) -> ExactMatrix:
    one = FqElem(p, 1, 0, r2)
    zero = FqElem(p, 0, 0, r2)
    return ExactMatrix([[zero, zero, one], [zero, one, zero], [one, zero, zero]])


def su3_generators(p: int) -> tuple[list[ExactMatrix], ExactMatrix, int]:
    """Generators of the 3-dimensional unitary group for the antidiagonal
    Hermitian form over F_(p^2): the unipotent root elements together with
    a Weyl representative.  Returns (generators, form, r2)."""
    r2 = _non_residue(p)
    q2 = p * p

    def fq(x, y=0):
        return FqElem(p, x, y, r2)

    def norm(e: FqElem) -> int:
        return (e.x * e.x - r2 * e.y * e.y) % p

    gens = []
    elements = [fq(x, y) for x in range(p) for y in range(p)]
    for a in elements:
        na = norm(a)
        for c in elements:
            # condition for [[1,a,c],[0,1,-frob(a)],[0,0,1]] to be unitary
            if (c.x * 2 + na) % p == 0:
                u = ExactMatrix([
                    [fq(1), a, c],
                    [fq(0), fq(1), -a.frobenius()],
                    [fq(0), fq(0), fq(1)],
                ])
                gens.append(u)
                gens.append(u.transpose())
    w = ExactMatrix([[fq(0), fq(0), fq(-1)],
                     [fq(0), fq(-1), fq(0)],
                     [fq(-1), fq(0), fq(0)]])
    gens.append(w)
    return gens, hermitian_3form(p, r2), r2


def _non_residue(p: int) -> int:
    return next(r for r in range(2, p) if pow(r, (p - 1) // 2, p) == p - 1)


def sp_generators(n: int, p: int) -> list[ExactMatrix]:
    """Symplectic transvections x -> x + <x,v> v for a spanning set of v,
    for the block-diagonal form."""
    from .lattices import symplectic_form
    j = symplectic_form(n)
    vs = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        vs.append(tuple(e))
    for i in range(n - 1):
        e = [0] * n
        e[i] = 1
        e[i + 1] = 1
        vs.append(tuple(e))
    e = [1] * n
    vs.append(tuple(e))
    gens = []
    for v in vs:
        jv = [sum(int(j.entries[r][c]) * v[c] for c in range(n)) % p
              for r in range(n)]
        rows = [[FqElem(p, (1 if r == c else 0) + v[r] * jv[c])
                 for c in range(n)] for r in range(n)]
        gens.append(ExactMatrix(rows))
    return gens


def so4_order(p: int) -> int:
    """|SO(I_4, F_p)| for odd p: the form has square discriminant, so the
    group is of plus type, of order p^2 (p^2-1)^2."""
    return p * p * (p * p - 1) ** 2


def so4_generators(p: int) -> list[ExactMatrix]:
    """A small verified generating set of SO(I_4, F_p): products of the
    reflection in e1 with reflections in a fixed spanning set of
    anisotropic vectors.  The generated order is checked against the
    closed form."""
    if p == 2:
        raise ValueError("odd characteristic only")
    vs = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
          (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0),
          (1, 1, 1, 0), (1, 1, 1, 1), (1, 2, 0, 0), (1, 0, 2, 0)]

    def reflection(v):
        nv = sum(x * x for x in v) % p
        if nv == 0:
            return None
        inv2 = (2 * pow(nv, -1, p)) % p
        return [[(int(r == c) - inv2 * v[r] * v[c]) % p for c in range(4)]
                for r in range(4)]

    refs = [reflection(v) for v in vs]
    refs = [r for r in refs if r is not None]
    base = refs[0]
    gens = []
    for h in refs[1:]:
        prod = [[sum(base[r][k] * h[k][c] for k in range(4)) % p
                 for c in range(4)] for r in range(4)]
        gens.append(ExactMatrix([[FqElem(p, e) for e in row] for row in prod]))
    if group_closure(gens) != so4_order(p):
        raise AssertionError("reflection products fail to generate SO(I_4)")
    return gens


def omega4_elements(p: int, cap: int = DEFAULT_CLOSURE_CAP) -> tuple[int, set]:
    """The commutator subgroup of SO(I_4, F_p): returns (order of SO, the
    set of packed elements of the index-2 subgroup), computed as the
    normal closure of the generators' commutators."""
    gens = so4_generators(p)
    so_order = so4_order(p)
    ring = _PackedRing(p)
    n = 4
    packed_gens = [_pack_matrix(ring, g) for g in gens]

    def as_matrix(a):
        return ExactMatrix([[FqElem(p, a[i * n + j]) for j in range(n)]
                            for i in range(n)])

    def inv(a):
        return _pack_matrix(ring, as_matrix(a).inverse())

    mul_by: dict[tuple, Callable] = {}

    def mul(a, b):
        fn = mul_by.get(b)
        if fn is None:
            fn = _prime_mul_fn(b, n, p)
            mul_by[b] = fn
        return fn(a)

    comms = set()
    for g in packed_gens:
        for h in packed_gens:
            c = mul(mul(g, h), inv(mul(h, g)))
            comms.add(c)
            comms.add(inv(c))
    ident = tuple(int(i == j) for i in range(n) for j in range(n))
    comms.discard(ident)
    comm_muls = [_prime_mul_fn(c, n, p) for c in comms]
    conj_pairs = [(inv(g), _prime_mul_fn(g, n, p)) for g in packed_gens]
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for m in frontier:
            for cm in comm_muls:
                prod = cm(m)
                if prod not in seen:
                    seen.add(prod)
                    if len(seen) > cap:
                        raise CapExceeded(len(seen))
                    new.append(prod)
            for g_inv, g_mul in conj_pairs:
                conj = g_mul(mul(g_inv, m))
                if conj not in seen:
                    seen.add(conj)
                    if len(seen) > cap:
                        raise CapExceeded(len(seen))
                    new.append(conj)
        frontier = new
    return so_order, seen


# -- trace sets ---------------------------------------------------------------


def trace_set_of_generators(gens: Sequence[ExactMatrix],
                            cap: int = DEFAULT_CLOSURE_CAP,
                            word_length: Optional[int] = None
                            ) -> frozenset[FqElem]:
    """Traces over the full closure, or over words of bounded length when
    word_length is given."""
    traces: set[FqElem] = set()

    if word_length is None:
        def visit(flat, ring, n):
            traces.add(_packed_trace(flat, ring, n))
        _closure_walk(gens, cap, visit)
        return frozenset(traces)

    ring = _detect_ring(gens)
    n = gens[0].nrows
    packed = [_pack_matrix(ring, g) for g in gens]
    if ring.r2 is None:
        muls = [_prime_mul_fn(g, n, ring.p) for g in packed]
    else:
        muls = [(lambda a, g=g: _matmul_table(a, g, n, ring)) for g in packed]
    frontier = [tuple(int(i == j) for i in range(n) for j in range(n))]
    traces.add(_packed_trace(frontier[0], ring, n))
    seen = set(frontier)
    for _ in range(word_length):
        new = []
        for m in frontier:
            for mul in muls:
                prod = mul(m)
                if prod not in seen:
                    seen.add(prod)
                    traces.add(_packed_trace(prod, ring, n))
                    new.append(prod)
        frontier = new
    return frozenset(traces)


def _packed_trace(flat: tuple, ring: _PackedRing, n: int) -> FqElem:
    acc = ring.unpack(0)
    for i in range(n):
        acc = acc + ring.unpack(flat[i * n + i])
    return acc


def trace_set(family_or_gens, n: Optional[int] = None, p: Optional[int] = None,
              cap: int = DEFAULT_CLOSURE_CAP,
              word_length: Optional[int] = None) -> frozenset[FqElem]:
    """Trace set of a named family (SL/SU/Sp/Omega at the given n, p) by
    full closure, or of an explicit generator list."""
    if isinstance(family_or_gens, str):
        family = family_or_gens
        if family == "SL":
            gens = sl_generators(n, p)
        elif family == "SU":
            if n != 3:
                raise ValueError("unitary generators are built for n = 3")
            gens = su3_generators(p)[0]
        elif family == "Sp":
            gens = sp_generators(n, p)
        elif family == "Omega":
            if n != 4:
                raise ValueError("commutator orthogonal group is built for n = 4")
            _, elements = omega4_elements(p, cap)
            ring = _PackedRing(p)
            return frozenset(_packed_trace(m, ring, 4) for m in elements)
        else:
            raise ValueError(f"unknown family {family!r}")
        return trace_set_of_generators(gens, cap, word_length)
    return trace_set_of_generators(family_or_gens, cap, word_length)


# -- trace witnesses ----------------------------------------------------------


@dataclass(frozen=True)
class TraceWitness:
    family: str
    matrix: ExactMatrix
    form: Optional[ExactMatrix]   # preserved bilinear/Hermitian form, if any
    trace: FqElem


def trace_witness(family: str, n: int, p: int, a) -> TraceWitness:
    """An element of the family with prescribed trace behaviour, verified
    against its defining equations mod p.

    SL and Sp: trace exactly a (companion 2x2 block, identity padding).
    SU (n = 3): the standard unitary witness with trace a - 1.
    Omega (n = 4): the squared orthogonal witness, trace -2a + 4 (a != 0).
    """
    if family == "SL":
        a_int = a.x if isinstance(a, FqElem) else a % p
        shift = (a_int - (n - 2)) % p
        m = _block_witness(n, p, shift)
        w = TraceWitness("SL", m, None, FqElem(p, a_int))
        _check_det_one(m)
        assert m.trace() == FqElem(p, a_int)
        return w
    if family == "Sp":
        if n % 2:
            raise ValueError("symplectic dimension must be even")
        a_int = a.x if isinstance(a, FqElem) else a % p
        shift = (a_int - (n - 2)) % p
        m = _block_witness(n, p, shift)
        from .lattices import symplectic_form
        form = reduce_int_matrix(symplectic_form(n), p)
        assert m.transpose() * form * m == form
        assert m.trace() == FqElem(p, a_int)
        return TraceWitness("Sp", m, form, FqElem(p, a_int))
    if family == "SU":
        if n != 3:
            raise ValueError("unitary witness is built for n = 3")
        return _su3_witness(p, a)
    if family == "Omega":
        if n != 4:
            raise ValueError("orthogonal witness is built for n = 4")
        return _omega4_witness(p, a)
    raise ValueError(f"unknown family {family!r}")


def _block_witness(n: int, p: int, a: int) -> ExactMatrix:
    rows = [[FqElem(p, 1 if i == j else 0) for j in range(n)] for i in range(n)]
    rows[0][0] = FqElem(p, a)
    rows[0][1] = FqElem(p, 1)
    rows[1][0] = FqElem(p, -1)
    rows[1][1] = FqElem(p, 0)
    return ExactMatrix(rows)


def _check_det_one(m: ExactMatrix) -> None:
    one = m.entries[0][0].one_like()
    if m.det() != one:
        raise AssertionError("witness determinant is not 1")


def _su3_witness(p: int, a) -> TraceWitness:
    r2 = _non_residue(p)
    if isinstance(a, FqElem):
        a = FqElem(p, a.x, a.y, r2 if a.r2 is None else a.r2)
        r2 = a.r2
    else:
        a = FqElem(p, a, 0, r2)

    def norm(e: FqElem) -> int:
        return (e.x * e.x - r2 * e.y * e.y) % p

    target = (-(a + a.frobenius()).x) % p
    b = next(FqElem(p, x, y, r2) for x in range(p) for y in range(p)
             if norm(FqElem(p, x, y, r2)) == target)
    zero, one = FqElem(p, 0, 0, r2), FqElem(p, 1, 0, r2)
    m = ExactMatrix([
        [a, b, one],
        [b.frobenius(), -one, zero],
        [one, zero, zero],
    ])
    form = hermitian_3form(p, r2)
    _check_det_one(m)
    frob = m.map_entries(FqElem.frobenius)
    if frob.transpose() * form * m != form:
        raise AssertionError("unitary witness fails its form equation")
    assert m.trace() == a - 1
    return TraceWitness("SU", m, form, a - one)


def _omega4_witness(p: int, a) -> TraceWitness:
    a_int = a.x if isinstance(a, FqElem) else a % p
    if a_int % p == 0:
        raise ValueError("witness construction needs a != 0")
    inv_a = pow(a_int, -1, p)
    m = ExactMatrix([
        [FqElem(p, 0), FqElem(p, 0), FqElem(p, -a_int), FqElem(p, a_int)],
        [FqElem(p, 0), FqElem(p, 0), FqElem(p, 1), FqElem(p, 0)],
        [FqElem(p, 1), FqElem(p, 1), FqElem(p, 0), FqElem(p, 0)],
        [FqElem(p, inv_a), FqElem(p, 0), FqElem(p, 0), FqElem(p, 0)],
    ])
    form = ExactMatrix([[FqElem(p, 1 if i + j == 3 else 0) for j in range(4)]
                        for i in range(4)])
    _check_det_one(m)
    if m.transpose() * form * m != form:
        raise AssertionError("orthogonal witness fails its form equation")
    m2 = m * m
    expected = FqElem(p, -2 * a_int + 4)
    assert m2.trace() == expected
    # squares of orthogonal elements land in the index-2 commutator subgroup
    return TraceWitness("Omega", m2, form, expected)


# -- orbit separation ---------------------------------------------------------


@dataclass(frozen=True)
class SeparationCertificate:
    """Mod-p evidence that bent and unbent trace sets can be told apart:
    the trace polynomial image is a proper subset of F_p, the bending
    matrix has the recorded multiplicative order (so its order-th power
    bends trivially mod p), and the sampled unbent traces all lie in the
    polynomial image."""

    n: int
    p: int
    d: int
    mode: str
    poly_image: tuple[int, ...]
    image_is_proper: bool
    b_order: int
    b_order_verified: bool
    word_length: int
    sampled_traces: tuple[int, ...]
    sample_inside_image: bool

    @property
    def separates(self) -> bool:
        return (self.image_is_proper and self.b_order_verified
                and self.sample_inside_image)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "d": self.d,
            "mode": self.mode,
            "poly_image": [str(t) for t in self.poly_image],
            "image_size": len(self.poly_image),
            "field_size": self.p,
            "image_is_proper": self.image_is_proper,
            "bending_order": str(self.b_order),
            "bending_order_verified": self.b_order_verified,
            "word_length": self.word_length,
            "sampled_traces": [str(t) for t in self.sampled_traces],
            "sample_inside_image": self.sample_inside_image,
            "separates": self.separates,
        }


def separation_certificate(n: int, b: ExactMatrix, p: int,
                           word_length: int = 4) -> SeparationCertificate:
    """Certificate for the given bending matrix over Z[sqrt(d)] and odd p:
    computes the image of the trace polynomial on F_p by brute force, the
    order of the reduced bending matrix, and a sampled trace set of words
    in reduced symmetric-power generators (the order-th bending power acts
    trivially mod p, so these are the bent traces)."""
    d = None
    for row in b.entries:
        for e in row:
            if isinstance(e, FieldElem) and e.desc.radicands:
                d = e.desc.radicands[0]
    if d is None:
        raise ValueError("bending matrix carries no quadratic irrationality")
    ctx = ReductionContext.build(p, d)
    poly = trace_poly(n)
    image = sorted(poly.image_mod(p))
    proper = len(image) < p

    b_red = reduce_matrix(b, ctx)
    order = matrix_order(b_red)
    ident = ExactMatrix.identity(n, like=b_red.entries[0][0])
    order_ok = (b_red ** order) == ident

    unipotent_u = ExactMatrix([[1, 1], [0, 1]])
    unipotent_l = ExactMatrix([[1, 0], [1, 1]])
    gens = [reduce_int_matrix(tau(n, unipotent_u), p),
            reduce_int_matrix(tau(n, unipotent_l), p)]
    sampled = trace_set_of_generators(gens, word_length=word_length)
    sample_vals = sorted({t.x for t in sampled})
    inside = all(v in set(image) for v in sample_vals)
    return SeparationCertificate(
        n=n, p=p, d=d, mode=ctx.mode,
        poly_image=tuple(image),
        image_is_proper=proper,
        b_order=order,
        b_order_verified=order_ok,
        word_length=word_length,
        sampled_traces=tuple(sample_vals),
        sample_inside_image=inside,
    )


def find_nonsurjective_prime(n: int, bound: int = 50) -> Optional[int]:
    """Smallest odd prime up to the bound where the trace polynomial is
    not surjective on F_p."""
    poly = trace_poly(n)
    for p in range(3, bound + 1, 2):
        if _is_prime(p) and len(poly.image_mod(p)) < p:
            return p
    return None


# -- exploratory: traces of the exceptional group mod p ----------------------


def g2_trace_probe(p: int, word_length: int = 6) -> dict:
    """Word-sampled trace set of integral exceptional-group elements mod p
    (symmetric-power images of the modular group plus the diagonal
    bending family).  Exploratory only: reports coverage of F_p, proves
    nothing beyond the sampled words."""
    from .exactnum import fundamental_unit
    from .bender import b0_family

    s = ExactMatrix([[0, -1], [1, 0]])
    t = ExactMatrix([[1, 1], [0, 1]])
    gens = [reduce_int_matrix(tau(7, s), p), reduce_int_matrix(tau(7, t), p)]
    unit = fundamental_unit(3).value
    if 3 % p:
        try:
            ctx = ReductionContext.build(p, 3)
            gens.append(reduce_matrix(b0_family("G2", 7, unit), ctx))
        except ValueError:
            pass
    traces = trace_set_of_generators(gens, word_length=word_length)
    values = sorted({t.x for t in traces if t.y == 0})
    return {
        "p": p,
        "word_length": word_length,
        "traces": values,
        "covers_field": len(values) == p,
    }
