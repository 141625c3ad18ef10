"""Jump coefficient families for the half-line factorization problem.

A coefficient is a 2x2 matrix function M(z), analytic in a strip around the
cut, normally tending to the identity up the cut (declared by .decays).
Built-in families: constant, rational-entry, commutative (Khrapkov) class,
and scalar problems lifted to diag(m(z), 1).

Polynomials are ascending-power complex coefficient arrays; rational
functions are numerator/denominator pairs of such arrays.
"""

from __future__ import annotations

import hashlib

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import EvaluationFailure, ZeroArgument

_DEN_EPS = 1e-12
_ZERO_PROBE_POINTS = 1024
_ZERO_PROBE_SPAN = 50.0


def _ascending(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
    if c.ndim != 1 or c.size == 0:
        raise ValueError("polynomial coefficients must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("polynomial coefficients must be finite")
    return c


def _trim(coeffs: np.ndarray) -> np.ndarray:
    """Drop trailing coefficients that are negligible against the largest."""
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return coeffs[:1] * 0.0
    keep = np.nonzero(np.abs(coeffs) > 1e-14 * scale)[0]
    if keep.size == 0:
        return coeffs[:1] * 0.0
    return coeffs[: keep[-1] + 1]


def poly_degree(coeffs) -> int:
    """Degree after trimming; the zero polynomial reports -1."""
    t = _trim(_ascending(coeffs))
    if t.size == 1 and t[0] == 0.0:
        return -1
    return t.size - 1


def _fmt_coeffs(c: np.ndarray) -> str:
    return ";".join(f"{v.real:.17g},{v.imag:.17g}" for v in c)


class RationalFn:
    """Ratio of two polynomials in ascending-coefficient form."""

    def __init__(self, num, den=(1.0,)):
        self.num = _ascending(num)
        self.den = _ascending(den)
        if np.all(self.den == 0.0):
            raise ValueError("rational function with zero denominator")

    def __call__(self, z):
        num = P.polyval(z, self.num)
        den = P.polyval(z, self.den)
        bad = np.abs(den) <= _DEN_EPS * (1.0 + np.abs(num))
        if np.any(bad):
            zbad = np.asarray(z)[bad].flat[0] if np.ndim(z) else z
            raise EvaluationFailure(
                f"denominator vanishes near z = {zbad}", point=complex(zbad)
            )
        return num / den

    def key(self) -> str:
        return f"{_fmt_coeffs(self.num)}/{_fmt_coeffs(self.den)}"


def as_rational(obj) -> RationalFn:
    """Coerce a RationalFn, a polynomial coefficient list, or a constant."""
    if isinstance(obj, RationalFn):
        return obj
    return RationalFn(obj)


class JumpCoefficient:
    """Base class: evaluation plus the cut base and declared decay."""

    family = "custom"

    def __init__(self, base: complex, decays: bool = True):
        self.base = complex(base)
        self.decays = bool(decays)

    def eval(self, z: complex) -> np.ndarray:
        raise NotImplementedError

    def eval_many(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=np.complex128)
        out = np.empty(zs.shape + (2, 2), dtype=np.complex128)
        for idx in np.ndindex(zs.shape):
            out[idx] = self.eval(complex(zs[idx]))
        return out

    def spec_key(self) -> str:
        raise NotImplementedError

    def cache_hash(self) -> str:
        return hashlib.sha256(self.spec_key().encode()).hexdigest()[:16]


def eval_jump(coef: JumpCoefficient, z: complex) -> np.ndarray:
    """Evaluate M(z), rejecting non-finite results."""
    m = np.asarray(coef.eval(complex(z)), dtype=np.complex128)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise EvaluationFailure(f"coefficient not finite at z = {z}", point=complex(z))
    return m


class ConstantCoefficient(JumpCoefficient):
    """Fixed matrix jump; never decays unless it is the identity."""

    family = "constant"

    def __init__(self, matrix, base: complex):
        k = np.asarray(matrix, dtype=np.complex128)
        if k.shape != (2, 2) or not np.all(np.isfinite(k)):
            raise ValueError("constant coefficient needs a finite 2x2 matrix")
        ident = bool(np.max(np.abs(k - np.eye(2))) == 0.0)
        super().__init__(base, decays=ident)
        self.matrix = k

    def eval(self, z):
        return self.matrix.copy()

    def eval_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        return np.broadcast_to(self.matrix, zs.shape + (2, 2)).copy()

    def spec_key(self):
        return "constant:" + _fmt_coeffs(self.matrix.ravel())


class KhrapkovCoefficient(JumpCoefficient):
    """Commutative-class coefficient M(z) = c(z) I + p(z) L(z).

    L(z) = [[l, m], [n, -l]] has polynomial entries and f = l^2 + m n must
    have degree at most 2 (checked on coefficients at construction); c and p
    are rational. Eigenvalues are c +/- p sqrt(f) with (1, t) eigenvectors,
    t = (+/- sqrt(f) - l)/m.
    """

    family = "khrapkov"

    def __init__(self, c, p, l, m, n, base: complex, decays: bool = True):
        super().__init__(base, decays=decays)
        self.c = as_rational(c)
        self.p = as_rational(p)
        self.l = _trim(_ascending(l))
        self.m = _trim(_ascending(m))
        self.n = _trim(_ascending(n))
        f = P.polyadd(P.polymul(self.l, self.l), P.polymul(self.m, self.n))
        f = _trim(np.atleast_1d(np.asarray(f, dtype=np.complex128)))
        if f.size - 1 > 2:
            raise ValueError(
                f"l^2 + m n has degree {f.size - 1}; the commutative class "
                "requires degree <= 2"
            )
        self.f = f

    def c_at(self, z):
        return self.c(z)

    def p_at(self, z):
        return self.p(z)

    def f_at(self, z):
        return P.polyval(z, self.f)

    def L_at(self, z):
        z = np.asarray(z, dtype=np.complex128)
        lv = P.polyval(z, self.l)
        mv = P.polyval(z, self.m)
        nv = P.polyval(z, self.n)
        out = np.empty(z.shape + (2, 2), dtype=np.complex128)
        out[..., 0, 0] = lv
        out[..., 0, 1] = mv
        out[..., 1, 0] = nv
        out[..., 1, 1] = -lv
        return out

    def eval(self, z):
        return self.eval_many(np.asarray(z, dtype=np.complex128))

    def eval_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        cv = self.c(zs)
        pv = self.p(zs)
        out = self.L_at(zs)
        out *= np.asarray(pv)[..., None, None]
        out[..., 0, 0] += cv
        out[..., 1, 1] += cv
        return out

    def spec_key(self):
        return (
            f"khrapkov:c={self.c.key()}|p={self.p.key()}|l={_fmt_coeffs(self.l)}"
            f"|m={_fmt_coeffs(self.m)}|n={_fmt_coeffs(self.n)}"
            f"|b={self.base.real:.17g},{self.base.imag:.17g}"
        )


def khrapkov_f(coef: KhrapkovCoefficient) -> np.ndarray:
    """Coefficients of f = l^2 + m n (ascending, degree <= 2)."""
    return coef.f.copy()


class RationalCoefficient(JumpCoefficient):
    """Coefficient with four independent rational entries."""

    family = "rational"

    def __init__(self, entries, base: complex, decays: bool = True):
        super().__init__(base, decays=decays)
        ent = np.asarray(entries, dtype=object)
        if ent.shape != (2, 2):
            raise ValueError("need a 2x2 arrangement of rational entries")
        self.entries = [[as_rational(ent[i, j]) for j in range(2)] for i in range(2)]

    def eval(self, z):
        return self.eval_many(np.asarray(z, dtype=np.complex128))

    def eval_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        out = np.empty(zs.shape + (2, 2), dtype=np.complex128)
        for i in range(2):
            for j in range(2):
                out[..., i, j] = self.entries[i][j](zs)
        return out

    def validate_on_mesh(self, mesh) -> None:
        """Check all four denominators against the mesh nodes."""
        for i in range(2):
            for j in range(2):
                e = self.entries[i][j]
                den = np.abs(P.polyval(mesh.nodes, e.den))
                num = np.abs(P.polyval(mesh.nodes, e.num))
                bad = den <= _DEN_EPS * (1.0 + num)
                if np.any(bad):
                    k = int(np.argmax(bad))
                    raise EvaluationFailure(
                        f"entry ({i},{j}) denominator vanishes at node {k} "
                        f"(tau = {mesh.nodes[k]})",
                        node=k,
                        point=complex(mesh.nodes[k]),
                    )

    def spec_key(self):
        cells = "|".join(
            f"{i}{j}=" + self.entries[i][j].key() for i in range(2) for j in range(2)
        )
        return f"rational:{cells}|b={self.base.real:.17g},{self.base.imag:.17g}"


class ScalarCoefficient(JumpCoefficient):
    """Scalar problem lifted to the matrix setting: M(z) = diag(m(z), 1)."""

    family = "scalar"

    def __init__(self, m, base: complex, decays: bool = True, name: str = ""):
        super().__init__(base, decays=decays)
        self.m = m
        self.name = name or getattr(m, "__name__", "callable")

    def scalar_at(self, z):
        return self.m(z)

    def eval(self, z):
        out = np.eye(2, dtype=np.complex128)
        out[0, 0] = complex(self.m(complex(z)))
        return out

    def eval_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        try:
            vals = np.asarray(self.m(zs), dtype=np.complex128)
            if vals.shape != zs.shape:
                raise ValueError
        except Exception:
            vals = np.array([complex(self.m(complex(z))) for z in zs.ravel()])
            vals = vals.reshape(zs.shape)
        out = np.zeros(zs.shape + (2, 2), dtype=np.complex128)
        out[..., 0, 0] = vals
        out[..., 1, 1] = 1.0
        return out

    def spec_key(self):
        if isinstance(self.m, RationalFn):
            return (
                f"scalar:{self.m.key()}"
                f"|b={self.base.real:.17g},{self.base.imag:.17g}"
            )
        return f"scalar:callable:{self.name}"


def lift_scalar(
    m,
    base: complex,
    decays: bool = True,
    probe_height: float | None = None,
    name: str = "",
) -> ScalarCoefficient:
    """Lift a scalar jump m(z) to diag(m(z), 1).

    Rejects an m that vanishes along the cut, spot-checked by dense sampling
    between the base and probe_height (default: 50 above the base).
    Analyticity and nonvanishing off the samples remain the caller's contract.
    """
    coef = ScalarCoefficient(m, base, decays=decays, name=name)
    b = complex(base)
    top = b.imag + _ZERO_PROBE_SPAN if probe_height is None else float(probe_height)
    ys = np.linspace(b.imag, top, _ZERO_PROBE_POINTS)
    vals = coef.eval_many(b.real + 1j * ys)[..., 0, 0]
    mags = np.abs(vals)
    if not np.all(np.isfinite(mags)):
        k = int(np.argmin(np.isfinite(mags)))
        raise EvaluationFailure(
            f"scalar coefficient not finite near {b.real + 1j * ys[k]}",
            point=complex(b.real + 1j * ys[k]),
        )
    if np.min(mags) <= 1e-10 * max(np.max(mags), 1.0):
        k = int(np.argmin(mags))
        raise ZeroArgument(
            f"scalar coefficient vanishes near z = {b.real + 1j * ys[k]} "
            "(zero on the cut)",
            index=k,
        )
    # A half-turn phase flip between adjacent probe samples means the value
    # passed through (or within roundoff of) zero between them.
    dphase = np.abs(np.angle(vals[1:] * np.conj(vals[:-1])))
    if np.any(dphase >= np.pi * (1.0 - 1e-6)):
        k = int(np.argmax(dphase >= np.pi * (1.0 - 1e-6)))
        mid = b.real + 0.5j * (ys[k] + ys[k + 1])
        raise ZeroArgument(
            f"scalar coefficient crosses zero near z = {mid} (zero on the cut)",
            index=k,
        )
    return coef


def demo_coefficient() -> KhrapkovCoefficient:
    """Built-in demonstration coefficient, the simplest commutative-class
    member: M(z) = I + z**-2 [[1, z], [-z, -1]] on the cut based at 2i.

    Here c = 1, p = 1/z**2, L = [[1, z], [-z, -1]], f = 1 - z**2.
    """
    coef = KhrapkovCoefficient(
        c=RationalFn([1.0]),
        p=RationalFn([1.0], [0.0, 0.0, 1.0]),
        l=[1.0],
        m=[0.0, 1.0],
        n=[0.0, -1.0],
        base=2j,
    )
    coef.family = "demo"
    return coef
