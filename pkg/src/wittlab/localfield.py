"""Exact arithmetic in rings of integers of totally ramified p-adic towers.

A tower is Q_p -> K -> L where K/Q_p is totally ramified of degree e_K
(possibly trivial) and L/K is a degree-p Galois step, each level
presented by an Eisenstein polynomial.  Base residues are carried
modulo p^N_int where N_int exceeds the advertised precision N by a
guard margin sized so that:

* the digit-lifted roots of the top Eisenstein polynomial are exact
  zeros of it in the working ring, which makes the Galois substitution
  map an exact ring endomorphism of the working ring; and
* every identity asserted at the advertised precision survives the
  root ambiguity (roots are pinned only up to the derivative
  valuation).

Valuations are reported at the advertised cap: a value at or beyond
the cap is the interval "at least cap", and any assertion past the cap
is refused rather than guessed.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernels


class NotEisenstein(ValueError):
    """Defining polynomial is not Eisenstein at this level."""


class NotNormal(ValueError):
    """The top step is not Galois at working precision."""


class PrecisionTooLow(ValueError):
    """A request needs more base digits than the tower carries."""


class TraceNotRational(ArithmeticError):
    """A Galois-stable quantity failed to land in the level below."""


class NoSolutionAtPrecision(ArithmeticError):
    """Linear system certified unsolvable modulo p^depth.

    ``depth`` is the number of base digits at which the obstruction is
    already visible; ``delta`` is the precision loss profile (largest
    pivot valuation) of the elimination that produced the certificate.
    """

    def __init__(self, depth: int, delta: int = 0):
        self.depth = depth
        self.delta = delta
        super().__init__(f"no solution modulo p^{depth} (delta={delta})")


@dataclass(frozen=True)
class ValExtended:
    """A valuation that is either exactly known or at least the cap."""

    value: int | None
    cap: int

    @property
    def finite(self) -> bool:
        return self.value is not None

    def exact(self) -> int:
        if self.value is None:
            raise PrecisionTooLow(f"valuation only known to be >= {self.cap}")
        return self.value

    def at_least(self, bound: int) -> bool:
        """Decide ``v >= bound``; refuses bounds beyond the cap."""
        if bound > self.cap:
            raise PrecisionTooLow(
                f"assertion v >= {bound} exceeds the valuation cap {self.cap}"
            )
        if self.value is None:
            return True
        return self.value >= bound

    def __repr__(self) -> str:
        if self.value is None:
            return f">= {self.cap}"
        return str(self.value)


def _vp_int(x: int, p: int, vmax: int) -> int | None:
    """p-adic valuation of a residue; None means zero at working precision."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if v >= vmax:
            return None
    return v


class ZpBase:
    """Base coefficients: integers modulo p^N_int."""

    def __init__(self, p: int, digits: int):
        self.p = p
        self.digits = digits
        self.modulus = p**digits
        self.ram_index = 1

    def from_int(self, k: int) -> int:
        return k % self.modulus

    def val_raw(self, x: int) -> int | None:
        return _vp_int(x % self.modulus, self.p, self.digits)


class ExtLevel:
    """R[x]/(E) for an Eisenstein E over the level below.

    Elements are tuples of ``degree`` lower-level elements on the power
    basis of the class of x (the uniformizer of this level).
    """

    def __init__(self, below, ecoeffs: Sequence, name: str):
        self.below = below
        self.degree = len(ecoeffs)
        self.name = name
        self.p = below.p
        self.ram_index = self.degree * below.ram_index
        self._base = below if isinstance(below, ZpBase) else below._base
        self.modulus = self._base.modulus
        self._validate_eisenstein(ecoeffs)
        self.ecoeffs = tuple(ecoeffs)
        self.zero_elem = tuple(self._below_zero() for _ in range(self.degree))
        self.one_elem = self._unit_vector(0)
        self.pi_elem = (
            self._unit_vector(1) if self.degree > 1 else (self._below_from_int(self.p),)
        )
        self.red_rows = self._reduction_rows()
        self.flat_struct: tuple | None = None
        if not isinstance(below, ZpBase):
            self.flat_struct = self._structure_constants()

    # -- plumbing over the level below ---------------------------------

    def _below_zero(self):
        return 0 if isinstance(self.below, ZpBase) else self.below.zero_elem

    def _below_one(self):
        return 1 if isinstance(self.below, ZpBase) else self.below.one_elem

    def _below_from_int(self, k: int):
        return self.below.from_int(k)

    def _below_add(self, a, b):
        if isinstance(self.below, ZpBase):
            return (a + b) % self.modulus
        return self.below.add(a, b)

    def _below_sub(self, a, b):
        if isinstance(self.below, ZpBase):
            return (a - b) % self.modulus
        return self.below.sub(a, b)

    def _below_mul(self, a, b):
        if isinstance(self.below, ZpBase):
            return (a * b) % self.modulus
        return self.below.mul(a, b)

    def _below_val(self, a):
        if isinstance(self.below, ZpBase):
            return self.below.val_raw(a)
        return self.below.val_raw(a)

    def _unit_vector(self, j: int):
        vec = [self._below_zero() for _ in range(self.degree)]
        vec[j] = self._below_one()
        return tuple(vec)

    def _validate_eisenstein(self, ecoeffs) -> None:
        # non-leading coefficients in the maximal ideal, constant term
        # of valuation exactly one; the leading coefficient 1 is implicit
        for j, c in enumerate(ecoeffs):
            v = self.below.val_raw(c)
            if j == 0:
                if v != 1:
                    raise NotEisenstein(
                        f"{self.name}: constant term has valuation {v}, need exactly 1"
                    )
            elif v is not None and v < 1:
                raise NotEisenstein(f"{self.name}: coefficient of x^{j} is a unit")

    def _reduction_rows(self):
        # rows[t] = expansion of x^(degree+t) on the power basis
        d = self.degree
        rows = []
        if d == 1:
            return tuple(rows)
        cur = tuple(self._below_sub(self._below_zero(), c) for c in self.ecoeffs)
        rows.append(cur)
        for _ in range(d - 2):
            shifted = (self._below_zero(),) + cur[:-1]
            top = cur[-1]
            cur = tuple(
                self._below_sub(shifted[j], self._below_mul(top, self.ecoeffs[j]))
                for j in range(d)
            )
            rows.append(cur)
        return tuple(rows)

    # -- ring operations ------------------------------------------------

    def from_int(self, k: int):
        vec = [self._below_zero() for _ in range(self.degree)]
        vec[0] = self._below_from_int(k)
        return tuple(vec)

    def embed(self, a):
        """Embed a lower-level element as a constant."""
        vec = [self._below_zero() for _ in range(self.degree)]
        vec[0] = a
        return tuple(vec)

    def add(self, a, b):
        if isinstance(self.below, ZpBase):
            return kernels.zmod_vec_add(a, b, self.modulus)
        return tuple(self._below_add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        if isinstance(self.below, ZpBase):
            return kernels.zmod_vec_sub(a, b, self.modulus)
        return tuple(self._below_sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return self.sub(self.zero_elem, a)

    def scale_int(self, a, k: int):
        if isinstance(self.below, ZpBase):
            k %= self.modulus
            return tuple((x * k) % self.modulus for x in a)
        return tuple(self.below.scale_int(x, k) for x in a)

    def mul(self, a, b):
        if isinstance(self.below, ZpBase):
            if self.degree == 1:
                return ((a[0] * b[0]) % self.modulus,)
            return kernels.zmod_poly_mulmod(a, b, self.red_rows, self.modulus)
        flat = kernels.flat_mul(
            tuple(self.flatten(a)), tuple(self.flatten(b)), self.flat_struct, self.modulus
        )
        return self.unflatten(flat)

    def _structure_constants(self) -> tuple:
        rows = []
        for i in range(self.flat_rank):
            ei = [0] * self.flat_rank
            ei[i] = 1
            bi = self.unflatten(ei)
            row = []
            for j in range(self.flat_rank):
                ej = [0] * self.flat_rank
                ej[j] = 1
                row.append(tuple(self.flatten(self._mul_generic(bi, self.unflatten(ej)))))
            rows.append(tuple(row))
        return tuple(rows)

    def _mul_generic(self, a, b):
        d = self.degree
        conv = [self._below_zero() for _ in range(2 * d - 1)]
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                conv[i + j] = self._below_add(conv[i + j], self._below_mul(ai, bj))
        out = list(conv[:d])
        for t in range(d - 2, -1, -1):
            c = conv[d + t]
            row = self.red_rows[t]
            for j in range(d):
                out[j] = self._below_add(out[j], self._below_mul(c, row[j]))
        return tuple(out)

    def pow(self, a, k: int):
        result = self.one_elem
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def val_raw(self, a) -> int | None:
        """Valuation in this level's units; exact because the candidate
        values of the summands are pairwise distinct modulo the degree."""
        best: int | None = None
        for j, c in enumerate(a):
            v = self._below_val(c)
            if v is None:
                continue
            cand = v * self.degree + j
            if best is None or cand < best:
                best = cand
        return best

    def is_zero_raw(self, a) -> bool:
        return self.val_raw(a) is None

    def flatten(self, a) -> list[int]:
        if isinstance(self.below, ZpBase):
            return list(a)
        out: list[int] = []
        for c in a:
            out.extend(self.below.flatten(c))
        return out

    def unflatten(self, coords: Sequence[int]):
        if isinstance(self.below, ZpBase):
            return tuple(c % self.modulus for c in coords)
        step = len(coords) // self.degree
        return tuple(
            self.below.unflatten(coords[j * step : (j + 1) * step])
            for j in range(self.degree)
        )

    @property
    def flat_rank(self) -> int:
        if isinstance(self.below, ZpBase):
            return self.degree
        return self.degree * self.below.flat_rank


class OElem:
    """Element of O_K or O_L, pinned to its level."""

    __slots__ = ("level", "data")

    def __init__(self, level: ExtLevel, data: tuple):
        self.level = level
        self.data = data

    def _coerce(self, other) -> "OElem":
        if isinstance(other, OElem):
            if other.level is not self.level:
                raise ValueError("operands live at different tower levels")
            return other
        if isinstance(other, int):
            return OElem(self.level, self.level.from_int(other))
        raise TypeError(f"cannot combine OElem with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        return OElem(self.level, self.level.add(self.data, other.data))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return OElem(self.level, self.level.sub(self.data, other.data))

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __neg__(self):
        return OElem(self.level, self.level.neg(self.data))

    def __mul__(self, other):
        if isinstance(other, int):
            return OElem(self.level, self.level.scale_int(self.data, other))
        other = self._coerce(other)
        return OElem(self.level, self.level.mul(self.data, other.data))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of an integral element")
        return OElem(self.level, self.level.pow(self.data, k))

    def __eq__(self, other):
        if isinstance(other, int):
            other = OElem(self.level, self.level.from_int(other))
        return (
            isinstance(other, OElem)
            and other.level is self.level
            and other.data == self.data
        )

    def __hash__(self):
        return hash((id(self.level), self.data))

    def __repr__(self):
        return f"OElem<{self.level.name}>{self.data}"


class LevelRing:
    """Ring adapter (zero/one/from_int) for polynomial evaluation."""

    def __init__(self, level: ExtLevel):
        self.level = level
        self.zero = OElem(level, level.zero_elem)
        self.one = OElem(level, level.one_elem)

    def from_int(self, k: int) -> OElem:
        return OElem(self.level, self.level.from_int(k))

    def __repr__(self):
        return f"LevelRing({self.level.name})"


# ---------------------------------------------------------------------------
# valuation-pivoted linear algebra over Z/p^M


@dataclass
class SmithForm:
    """U*A*V = diag(p^v) with U, V invertible mod p^M; Uinv tracks U^-1."""

    pivots: list[int]
    U: list[list[int]]
    Uinv: list[list[int]]
    V: list[list[int]]
    rows: int
    cols: int
    p: int
    modulus: int
    digits: int

    def kernel_basis(self) -> list[list[int]]:
        n, mod = self.cols, self.modulus
        basis = []
        for k, v in enumerate(self.pivots):
            if v > 0:
                scale = self.p ** (self.digits - v)
                basis.append([(self.V[i][k] * scale) % mod for i in range(n)])
        for k in range(len(self.pivots), n):
            basis.append([self.V[i][k] % mod for i in range(n)])
        return basis

    def image_basis(self) -> list[list[int]]:
        m, mod = self.rows, self.modulus
        return [
            [(self.Uinv[i][k] * self.p**v) % mod for i in range(m)]
            for k, v in enumerate(self.pivots)
        ]


def smith_normal_form(matrix: Sequence[Sequence[int]], p: int, digits: int) -> SmithForm:
    modulus = p**digits
    A = [[x % modulus for x in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Uinv = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    pivots: list[int] = []

    def vp(x: int) -> int:
        v = _vp_int(x, p, digits)
        return digits if v is None else v

    for k in range(min(m, n)):
        best, bi, bj = digits, -1, -1
        for i in range(k, m):
            for j in range(k, n):
                v = vp(A[i][j])
                if v < best:
                    best, bi, bj = v, i, j
        if bi < 0:
            break
        if bi != k:
            A[k], A[bi] = A[bi], A[k]
            U[k], U[bi] = U[bi], U[k]
            for r in range(m):
                Uinv[r][k], Uinv[r][bi] = Uinv[r][bi], Uinv[r][k]
        if bj != k:
            for r in range(m):
                A[r][k], A[r][bj] = A[r][bj], A[r][k]
            for r in range(n):
                V[r][k], V[r][bj] = V[r][bj], V[r][k]
        v = best
        unit = A[k][k] // p**v
        uinv = pow(unit, -1, modulus)
        for j in range(k, n):
            A[k][j] = (A[k][j] * uinv) % modulus
        for j in range(m):
            U[k][j] = (U[k][j] * uinv) % modulus
        for r in range(m):
            Uinv[r][k] = (Uinv[r][k] * unit) % modulus
        pv = p**v
        for i in range(k + 1, m):
            if A[i][k]:
                mult = A[i][k] // pv
                for j in range(k, n):
                    A[i][j] = (A[i][j] - mult * A[k][j]) % modulus
                for j in range(m):
                    U[i][j] = (U[i][j] - mult * U[k][j]) % modulus
                for r in range(m):
                    Uinv[r][k] = (Uinv[r][k] + mult * Uinv[r][i]) % modulus
        for j in range(k + 1, n):
            if A[k][j]:
                mult = A[k][j] // pv
                for r in range(m):
                    A[r][j] = (A[r][j] - mult * A[r][k]) % modulus
                for r in range(n):
                    V[r][j] = (V[r][j] - mult * V[r][k]) % modulus
        pivots.append(v)
    return SmithForm(pivots, U, Uinv, V, m, n, p, modulus, digits)


@dataclass
class LinearSolution:
    particular: list[int]
    kernel: list[list[int]]
    delta: int


def linsolve(
    matrix: Sequence[Sequence[int]],
    rhs: Sequence[int],
    p: int,
    digits: int,
    snf: SmithForm | None = None,
) -> LinearSolution:
    """Solve A*x = rhs over Z/p^digits; pivots are minimal-valuation entries.

    Returns a particular solution and a kernel basis, or raises
    :class:`NoSolutionAtPrecision` whose depth is the digit count at
    which the system is already contradictory.
    """
    if snf is None:
        snf = smith_normal_form(matrix, p, digits)
    modulus = snf.modulus
    m, n = snf.rows, snf.cols
    uc = [
        sum(snf.U[i][j] * rhs[j] for j in range(m)) % modulus for i in range(m)
    ]
    delta = max(snf.pivots, default=0)
    z = [0] * n
    r = len(snf.pivots)
    for k, v in enumerate(snf.pivots):
        if v == 0:
            z[k] = uc[k]
            continue
        vv = _vp_int(uc[k], p, digits)
        if vv is not None and vv < v:
            raise NoSolutionAtPrecision(vv + 1, delta)
        z[k] = (uc[k] // p**v) % modulus
    for k in range(r, m):
        if uc[k]:
            vv = _vp_int(uc[k], p, digits)
            raise NoSolutionAtPrecision((digits if vv is None else vv) + 1, delta)
    particular = [
        sum(snf.V[i][k] * z[k] for k in range(n)) % modulus for i in range(n)
    ]
    return LinearSolution(particular, snf.kernel_basis(), delta)


# ---------------------------------------------------------------------------
# the tower


def _strip_monic(coeffs: Sequence, name: str) -> list:
    """Coefficient lists are little-endian and carry the leading 1."""
    coeffs = list(coeffs)
    if len(coeffs) < 2:
        raise NotEisenstein(f"{name}: need degree >= 1")
    lead = coeffs[-1]
    if not (lead == 1 or lead == [1] or lead == ["1"] or lead == "1"):
        raise NotEisenstein(f"{name}: leading coefficient must be 1, got {lead!r}")
    return coeffs[:-1]


def precision_policy(p: int, e_k: int, s_bound: int, witt_length: int) -> int:
    """Smallest advertised N whose cap covers the planned assertions."""
    need = 2 * witt_length * (s_bound + p * e_k) + 8
    return -(-need // (p * e_k))


class ExtensionTower:
    """L/K/Q_p with a chosen Galois generator and precomputed maps."""

    def __init__(
        self,
        p: int,
        N: int,
        e_k_coeffs: Sequence[int] | None,
        e_l_coeffs: Sequence,
        *,
        witt_length_hint: int = 4,
        sigma_choice: int = 0,
        seed: int = 0,
    ):
        full_e_k = [str(c) for c in e_k_coeffs] if e_k_coeffs else None
        full_e_l = [
            c if isinstance(c, str) else ([str(x) for x in c] if isinstance(c, list) else str(c))
            for c in e_l_coeffs
        ]
        e_k_coeffs = _strip_monic(e_k_coeffs, "E_K") if e_k_coeffs else None
        e_l_coeffs = _strip_monic(e_l_coeffs, "E_L")
        self.p = p
        self.N = N
        self.seed = seed
        self.e_K = len(e_k_coeffs) if e_k_coeffs else 1
        self.e_L = p * self.e_K
        # guard digits: sized from the generic bound on the derivative
        # valuation, so lifted roots stay exact in the working ring
        dv_bound = p * self.e_K + 2 * p + 4
        self.N_int = N + 2 + -(-dv_bound // (p * self.e_K))
        self.base = ZpBase(p, self.N_int)

        if e_k_coeffs:
            self.K = ExtLevel(
                self.base, [self.base.from_int(int(c)) for c in e_k_coeffs], "O_K"
            )
        else:
            self.K = ExtLevel(self.base, [self.base.from_int(-p)], "O_K")
        el = []
        for c in e_l_coeffs:
            if isinstance(c, list):
                el.append(self.K.unflatten([int(x) for x in c]))
            else:
                el.append(self.K.from_int(int(c)))
        if len(el) != p:
            raise NotEisenstein(f"top step must have degree {p}, got {len(el)}")
        self.L = ExtLevel(self.K, el, "O_L")

        self.val_cap = p * self.e_K * N
        self.val_cap_K = self.e_K * N
        self.cap_int = p * self.e_K * self.N_int

        self.KR = LevelRing(self.K)
        self.LR = LevelRing(self.L)

        self._find_roots_and_sigma(sigma_choice)
        self._build_matrices()

        smin = precision_policy(p, self.e_K, self.s, witt_length_hint)
        if N < smin:
            raise PrecisionTooLow(
                f"N={N} below the policy minimum {smin} for Witt length "
                f"{witt_length_hint} at s={self.s}"
            )

        self.description = {
            "p": p,
            "N": N,
            "E_K": full_e_k,
            "E_L": full_e_l,
            "seed": seed,
        }
        blob = json.dumps(self.description, sort_keys=True, separators=(",", ":"))
        self.tower_hash = hashlib.sha256(blob.encode()).hexdigest()

    # -- construction helpers ------------------------------------------

    def _eval_top(self, x):
        """E_L at an O_L point, by Horner."""
        acc = self.L.one_elem
        for j in range(self.p - 1, -1, -1):
            acc = self.L.add(self.L.mul(acc, x), self.L.embed(self.L.ecoeffs[j]))
        return acc

    def _find_roots_and_sigma(self, sigma_choice: int) -> None:
        L, p = self.L, self.p
        pi = L.pi_elem
        dpoly = [
            self.L.embed(self.K.scale_int(L.ecoeffs[j], j)) for j in range(1, p)
        ]

        def eval_deriv(x):
            acc = self.L.from_int(p)
            for j in range(p - 2, -1, -1):
                acc = L.add(L.mul(acc, x), dpoly[j])
            return acc

        dv = L.val_raw(eval_deriv(pi))
        if dv is None:
            raise PrecisionTooLow("derivative of the top polynomial vanishes at precision")
        if dv % (p - 1):
            raise NotNormal(
                f"derivative valuation {dv} is not a multiple of p-1; "
                "the step cannot be cyclic of degree p"
            )
        s_pre = dv // (p - 1) - 1
        if s_pre < 1:
            raise NotNormal("ramification break would be < 1")

        k_stop = self.cap_int - dv
        pi_pows = [L.one_elem]
        for _ in range(k_stop):
            pi_pows.append(L.mul(pi_pows[-1], pi))
        digits = [L.from_int(d) for d in range(p)]

        def threshold(k: int) -> int:
            return min(k + (p - 1) * min(k, s_pre + 1), self.cap_int)

        candidates = [L.zero_elem]
        for k in range(k_stop):
            t = threshold(k + 1)
            nxt = []
            for cand in candidates:
                for d in range(p):
                    c2 = cand if d == 0 else L.add(cand, L.mul(digits[d], pi_pows[k]))
                    v = L.val_raw(self._eval_top(c2))
                    if v is None or v >= t:
                        nxt.append(c2)
            candidates = nxt
            if len(candidates) > 4 * p * p:
                raise NotNormal("root search diverged; step is not a clean Galois step")
        roots = [c for c in candidates if L.is_zero_raw(self._eval_top(c))]
        if len(roots) != p:
            raise NotNormal(
                f"found {len(roots)} roots of the top polynomial at precision, need {p}"
            )
        others = sorted(
            (r for r in roots if r != pi), key=lambda r: tuple(L.flatten(r))
        )
        if len(others) != p - 1:
            raise NotNormal("uniformizer is not among the lifted roots")
        self.dv = dv
        self.sigma_root = others[sigma_choice % (p - 1)]

        # power tables for sigma^i: conj[i] = sigma^i(pi), then its powers
        conj = [pi]
        for _ in range(p - 1):
            conj.append(self._subst(conj[-1], self.sigma_root))
        wrap = self._subst(conj[-1], self.sigma_root)
        if not self._close_raw(wrap, pi, self.val_cap):
            raise NotNormal("Galois substitution does not have order p at precision")
        for i in range(1, p):
            if self._close_raw(conj[i], pi, self.val_cap):
                raise NotNormal("Galois substitution has order < p at precision")
        self.sigma_pows = []
        for i in range(p):
            pows = [L.one_elem]
            for _ in range(p - 1):
                pows.append(L.mul(pows[-1], conj[i]))
            self.sigma_pows.append(pows)

        diff = L.sub(conj[1], pi)
        vdiff = L.val_raw(diff)
        if vdiff is None or vdiff >= self.val_cap:
            raise PrecisionTooLow("sigma(pi) - pi vanishes at precision")
        self.s = vdiff - 1
        if self.s * (p - 1) > p * self.e_K:
            raise NotNormal(
                f"break {self.s} exceeds the wild bound {p * self.e_K}/(p-1)"
            )

    def _subst(self, a, point):
        """Evaluate the coefficient polynomial of ``a`` at another root."""
        L = self.L
        acc = L.zero_elem
        for j in range(self.p - 1, -1, -1):
            acc = L.add(L.mul(acc, point), L.embed(a[j]))
        return acc

    def _close_raw(self, a, b, cap: int) -> bool:
        v = self.L.val_raw(self.L.sub(a, b))
        return v is None or v >= cap

    def _build_matrices(self) -> None:
        rank = self.L.flat_rank
        tcols, scols = [], []
        for m in range(rank):
            coords = [0] * rank
            coords[m] = 1
            basis = self.L.unflatten(coords)
            tcols.append(self.K.flatten(self._trace_raw(basis, check=False)))
            scols.append(self.L.flatten(self.L.sub(self._galois_raw(basis, 1), basis)))
        self.trace_mat = [
            [tcols[m][r] for m in range(rank)] for r in range(self.K.flat_rank)
        ]
        self.sigma_minus_one_mat = [
            [scols[m][r] for m in range(rank)] for r in range(rank)
        ]
        self._trace_snf = smith_normal_form(self.trace_mat, self.p, self.N_int)
        self._smo_snf = smith_normal_form(self.sigma_minus_one_mat, self.p, self.N_int)
        self._smo_snf_cache: dict[int, SmithForm] = {}

    # -- raw (tuple-level) operations -----------------------------------

    def _galois_raw(self, a, times: int):
        times %= self.p
        if times == 0:
            return a
        L = self.L
        pows = self.sigma_pows[times]
        acc = L.zero_elem
        for j in range(self.p):
            acc = L.add(acc, L.mul(L.embed(a[j]), pows[j]))
        return acc

    def _trace_raw(self, a, check: bool = True):
        L = self.L
        acc = a
        for i in range(1, self.p):
            acc = L.add(acc, self._galois_raw(a, i))
        if check:
            for j in range(1, self.p):
                v = self.K.val_raw(acc[j])
                if v is not None and v < self.val_cap_K:
                    raise TraceNotRational(
                        f"trace has a pi_L^{j} coefficient of valuation {v}"
                    )
        return acc[0]

    # -- public element API ----------------------------------------------

    @property
    def pi_L(self) -> OElem:
        return OElem(self.L, self.L.pi_elem)

    @property
    def pi_K(self) -> OElem:
        return OElem(self.K, self.K.pi_elem)

    def K_elem(self, coords: Sequence[int]) -> OElem:
        return OElem(self.K, self.K.unflatten(list(coords)))

    def L_elem(self, coeffs: Sequence[OElem | int]) -> OElem:
        data = []
        for c in coeffs:
            data.append(self.K.from_int(c) if isinstance(c, int) else c.data)
        while len(data) < self.p:
            data.append(self.K.zero_elem)
        return OElem(self.L, tuple(data))

    def embed_K(self, a: OElem) -> OElem:
        if a.level is not self.K:
            raise ValueError("embed_K expects an O_K element")
        return OElem(self.L, self.L.embed(a.data))

    def galois(self, a: OElem, times: int = 1) -> OElem:
        if a.level is self.K:
            return a
        return OElem(self.L, self._galois_raw(a.data, times))

    def trace(self, a: OElem) -> OElem:
        if a.level is not self.L:
            raise ValueError("trace expects an O_L element")
        return OElem(self.K, self._trace_raw(a.data))

    def valuation(self, a: OElem) -> ValExtended:
        if a.level is self.L:
            return self.vL(a)
        return self.vK(a)

    def vL(self, a: OElem) -> ValExtended:
        if a.level is self.K:
            a = self.embed_K(a)
        v = self.L.val_raw(a.data)
        if v is None or v >= self.val_cap:
            return ValExtended(None, self.val_cap)
        return ValExtended(v, self.val_cap)

    def vK(self, a: OElem) -> ValExtended:
        if a.level is not self.K:
            raise ValueError("vK expects an O_K element")
        v = self.K.val_raw(a.data)
        if v is None or v >= self.val_cap_K:
            return ValExtended(None, self.val_cap_K)
        return ValExtended(v, self.val_cap_K)

    def is_zero_at_precision(self, a: OElem) -> bool:
        return not self.valuation(a).finite

    def eq_at_precision(self, a: OElem, b: OElem) -> bool:
        return self.is_zero_at_precision(a - b)

    def in_K_at_precision(self, a: OElem) -> bool:
        """True when every pi_L coefficient beyond degree 0 vanishes."""
        if a.level is self.K:
            return True
        return all(
            (v := self.K.val_raw(c)) is None or v >= self.val_cap_K
            for c in a.data[1:]
        )

    def project_to_K(self, a: OElem) -> OElem:
        if a.level is self.K:
            return a
        if not self.in_K_at_precision(a):
            raise TraceNotRational("element does not lie in O_K at precision")
        return OElem(self.K, a.data[0])

    def ramification_break(self) -> int:
        return self.s

    def strict_break_regime(self) -> bool:
        """True when s > e_K/(p-1) strictly; towers sitting exactly on
        the bound are the delicate boundary cases, labeled False."""
        return self.s * (self.p - 1) > self.e_K

    # -- linear solving ----------------------------------------------------

    def flatten_L(self, a: OElem) -> list[int]:
        return self.L.flatten(a.data)

    def unflatten_L(self, coords: Sequence[int]) -> OElem:
        return OElem(self.L, self.L.unflatten(list(coords)))

    def flatten_K(self, a: OElem) -> list[int]:
        return self.K.flatten(a.data)

    def unflatten_K(self, coords: Sequence[int]) -> OElem:
        return OElem(self.K, self.K.unflatten(list(coords)))

    def solve_trace_eq(self, c: OElem) -> tuple[OElem, list[OElem], int]:
        """x with tr(x) = c, plus a trace-kernel basis at precision."""
        if c.level is not self.K:
            raise ValueError("solve_trace_eq expects an O_K right-hand side")
        sol = linsolve(
            self.trace_mat, self.flatten_K(c), self.p, self.N_int, snf=self._trace_snf
        )
        kernel = [self.unflatten_L(k) for k in sol.kernel]
        return self.unflatten_L(sol.particular), kernel, sol.delta

    def trace_kernel_basis(self) -> list[OElem]:
        return [self.unflatten_L(k) for k in self._trace_snf.kernel_basis()]

    def solve_sigma_minus_one(self, c: OElem, digits: int | None = None) -> tuple[OElem, int]:
        """y with (sigma-1)y = c at the given base precision (advertised
        precision and above only); raises NoSolutionAtPrecision otherwise."""
        if c.level is not self.L:
            raise ValueError("solve_sigma_minus_one expects an O_L right-hand side")
        if digits is None:
            digits = self.N_int
        if digits < self.N:
            raise PrecisionTooLow("cannot solve below the advertised precision")
        sol = linsolve(
            self.sigma_minus_one_mat,
            self.flatten_L(c),
            self.p,
            digits,
            snf=self._smo_snf_at(digits),
        )
        y = self.unflatten_L(sol.particular)
        if not self.eq_at_precision(self.galois(y) - y, c):
            raise TraceNotRational("solver postcondition failed")  # pragma: no cover
        return y, sol.delta

    def _smo_snf_at(self, digits: int) -> SmithForm:
        if digits == self.N_int:
            return self._smo_snf
        cached = self._smo_snf_cache.get(digits)
        if cached is None:
            cached = smith_normal_form(self.sigma_minus_one_mat, self.p, digits)
            self._smo_snf_cache[digits] = cached
        return cached

    # -- sampling -----------------------------------------------------------

    def random_K_elem(self, rng) -> OElem:
        return self.unflatten_K(
            [rng.randrange(self.base.modulus) for _ in range(self.K.flat_rank)]
        )

    def random_L_elem(self, rng, spread_valuation: bool = False) -> OElem:
        a = self.unflatten_L(
            [rng.randrange(self.base.modulus) for _ in range(self.L.flat_rank)]
        )
        if spread_valuation:
            shift = rng.randrange(0, max(1, self.val_cap // 3))
            a = a * (self.pi_L ** shift if shift else 1)
        return a

    def random_L_unit(self, rng) -> OElem:
        while True:
            a = self.random_L_elem(rng)
            v = self.L.val_raw(a.data)
            if v == 0:
                return a

    def enumerate_K_translates(self, budget: int) -> Iterable[OElem]:
        """Small O_K elements for coset searches, by growing digit depth."""
        p, e = self.p, self.K.flat_rank
        depth = 1
        seen = 0
        while seen < budget:
            for coords in itertools.product(range(p**depth), repeat=e):
                yield self.unflatten_K(list(coords))
                seen += 1
                if seen >= budget:
                    return
            depth += 1

    def to_obj(self) -> dict:
        return dict(self.description)


def build_tower(
    p: int,
    N: int | str,
    e_l_coeffs: Sequence,
    e_k_coeffs: Sequence[int] | None = None,
    *,
    witt_length_hint: int = 4,
    sigma_choice: int = 0,
    seed: int = 0,
) -> ExtensionTower:
    """Construct and validate a tower; ``N="auto"`` applies the policy
    with the generic bound on the ramification break."""
    e_k = len(e_k_coeffs) if e_k_coeffs else 1
    if N == "auto":
        s_bound = (p * e_k) // (p - 1)
        N = precision_policy(p, e_k, s_bound, witt_length_hint)
    if not isinstance(N, int) or N < 4:
        raise PrecisionTooLow(f"N={N!r} is not an acceptable precision")
    return ExtensionTower(
        p,
        N,
        e_k_coeffs,
        e_l_coeffs,
        witt_length_hint=witt_length_hint,
        sigma_choice=sigma_choice,
        seed=seed,
    )


def tower_from_obj(obj: dict, **overrides) -> ExtensionTower:
    e_l = []
    for c in obj["E_L"]:
        e_l.append([int(x) for x in c] if isinstance(c, list) else int(c))
    e_k = [int(c) for c in obj["E_K"]] if obj.get("E_K") else None
    kwargs = {
        "witt_length_hint": overrides.get("witt_length_hint", 4),
        "sigma_choice": overrides.get("sigma_choice", 0),
        "seed": overrides.get("seed", obj.get("seed", 0)),
    }
    n_prec = overrides.get("N", obj.get("N", "auto"))
    return build_tower(int(obj["p"]), n_prec, e_l, e_k, **kwargs)


def load_tower(path: str, **overrides) -> ExtensionTower:
    with open(path, "r", encoding="utf-8") as fh:
        return tower_from_obj(json.load(fh), **overrides)
