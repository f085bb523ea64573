"""Numerical checks on the traceless SU(2) character variety of the twice-punctured torus.

Quaternions ``t + x i + y j + z k`` stand for SU(2) matrices with
``i = -i sigma_x``, ``j = -i sigma_y``, ``k = -i sigma_z``.  A representation is
a tuple ``(A, B, a, b)`` with ``[A, B] a b = 1`` and ``a, b`` traceless.

Points of the 2-dimensional slice where ``a = b^{-1} = i`` and ``A, B`` lie in
``span{1, k}`` are described by angles ``(alpha, beta)`` modulo ``2 pi`` and the
involution ``(alpha, beta) -> (-alpha, -beta)``.  Intersection counts are done
on the torus double cover, where every point of the slice has two preimages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

__all__ = [
    "Quat",
    "RepPoint",
    "ChartDomain",
    "NonTransverse",
    "ONE",
    "I",
    "J",
    "K",
    "rep_residual",
    "trace_defect",
    "standard_point",
    "chart_point",
    "w0_point",
    "l0_point",
    "parametrized_point",
    "alpha1_squared",
    "slice_class",
    "slice_class_of",
    "f_coordinates",
    "fd_checks",
    "slice_curve",
    "flow",
    "pushoff_and_count",
    "P_D",
    "sample_points",
    "residual_summary",
    "l0_off_slice_gap",
    "richardson_consistent",
    "intersection_points",
]


class ChartDomain(ValueError):
    pass


class NonTransverse(ArithmeticError):
    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


@dataclass(frozen=True)
class Quat:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __mul__(self, o: "Quat | float") -> "Quat":
        if not isinstance(o, Quat):
            return Quat(self.t * o, self.x * o, self.y * o, self.z * o)
        t1, x1, y1, z1 = self.t, self.x, self.y, self.z
        t2, x2, y2, z2 = o.t, o.x, o.y, o.z
        return Quat(
            t1 * t2 - x1 * x2 - y1 * y2 - z1 * z2,
            t1 * x2 + x1 * t2 + y1 * z2 - z1 * y2,
            t1 * y2 - x1 * z2 + y1 * t2 + z1 * x2,
            t1 * z2 + x1 * y2 - y1 * x2 + z1 * t2,
        )

    __rmul__ = __mul__

    def __add__(self, o: "Quat") -> "Quat":
        return Quat(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Quat") -> "Quat":
        return Quat(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self) -> "Quat":
        return Quat(-self.t, -self.x, -self.y, -self.z)

    def conj(self) -> "Quat":
        return Quat(self.t, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.t ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def inv(self) -> "Quat":
        n2 = self.norm() ** 2
        return self.conj() * (1.0 / n2)

    def trace(self) -> float:
        return 2.0 * self.t

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def matrix(self) -> np.ndarray:
        """The 2x2 complex matrix ``t 1 + x i + y j + z k``."""
        return np.array(
            [[self.t - 1j * self.z, -self.y - 1j * self.x], [self.y - 1j * self.x, self.t + 1j * self.z]]
        )

    def close(self, o: "Quat", tol: float = 1e-12) -> bool:
        return (self - o).norm() <= tol


ONE, I, J, K = Quat(1.0), Quat(0.0, 1.0), Quat(0.0, 0.0, 1.0), Quat(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class RepPoint:
    A: Quat
    B: Quat
    a: Quat
    b: Quat

    def conjugate(self, g: Quat) -> "RepPoint":
        gi = g.inv()
        return RepPoint(*(g * m * gi for m in (self.A, self.B, self.a, self.b)))


def _unit(q: Quat) -> Quat:
    return q * (1.0 / q.norm())


def rep_residual(p: RepPoint) -> float:
    """Frobenius norm of ``[A,B] a b - 1``, computed on 2x2 matrices."""
    A, B, a, b = (q.matrix() for q in (p.A, p.B, p.a, p.b))
    word = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B) @ a @ b
    return float(np.linalg.norm(word - np.eye(2)))


def trace_defect(p: RepPoint) -> float:
    """Largest of ``|tr a|``, ``|tr b|`` and the deviations of the four norms from 1."""
    return max(
        abs(p.a.trace()),
        abs(p.b.trace()),
        *(abs(q.norm() - 1.0) for q in (p.A, p.B, p.a, p.b)),
    )


def standard_point(alpha: float, beta: float, s: float = 0.0) -> RepPoint:
    """The representative with ``ab = 1`` in standard coordinates ``(alpha, beta, s)``."""
    A = Quat(math.cos(alpha), 0.0, 0.0, math.sin(alpha))
    B = Quat(math.cos(beta), 0.0, 0.0, math.sin(beta))
    a = Quat(0.0, math.cos(s), 0.0, math.sin(s))
    return RepPoint(A, B, a, a.inv())


def chart_point(chart: int, alpha: float, beta: float, s: float, t: float, tol: float = 1e-12) -> RepPoint:
    """Point with extended coordinates ``(alpha_k, beta_k, s_k, t_k)`` for chart ``k``."""
    if chart not in (1, 2):
        raise ChartDomain(f"no chart {chart}")
    if chart == 1 and abs(math.sin(alpha)) <= tol:
        raise ChartDomain(f"chart 1 needs sin(alpha) != 0, got alpha={alpha}")
    if chart == 2 and abs(math.sin(beta)) <= tol:
        raise ChartDomain(f"chart 2 needs sin(beta) != 0, got beta={beta}")
    if abs(math.cos(s)) <= tol or abs(math.cos(t)) <= tol:
        raise ChartDomain("tan s or tan t is undefined")
    arg = (math.cos(alpha) if chart == 1 else math.cos(beta)) * math.tan(s) * math.tan(t)
    if abs(arg) > 1.0:
        raise ChartDomain(f"arcsin argument {arg} outside [-1, 1]")
    theta = alpha + beta - math.asin(arg)
    if chart == 1:
        A = Quat(math.cos(alpha), 0.0, 0.0, math.sin(alpha))
        B = Quat(math.cos(t) * math.cos(beta), math.sin(t), 0.0, math.cos(t) * math.sin(beta))
    else:
        A = Quat(math.cos(t) * math.cos(alpha), math.sin(t), 0.0, math.cos(t) * math.sin(alpha))
        B = Quat(math.cos(beta), 0.0, 0.0, math.sin(beta))
    a = Quat(0.0, math.cos(s) * math.cos(theta), math.cos(s) * math.sin(theta), math.sin(s))
    b = (A * B * A.inv() * B.inv() * a).inv()
    return RepPoint(A, B, a, b)


def w0_point(chi: float, psi: float) -> RepPoint:
    A = Quat(math.cos(chi), 0.0, 0.0, math.sin(chi))
    a = Quat(0.0, math.cos(psi), 0.0, math.sin(psi))
    return RepPoint(A, ONE, a, a.inv())


def l0_point(phi: float, theta: float, eps: float) -> RepPoint:
    nu = eps * math.sin(phi)
    cn, sn, st, ct = math.cos(nu), math.sin(nu), math.sin(theta), math.cos(theta)
    d = cn ** 2 + sn ** 2 * st ** 2
    A = (Quat(0.0, cn, 0.0, sn * st) * (1.0 / math.sqrt(d))) * Quat(
        math.cos(phi), math.sin(phi) * ct, math.sin(phi) * st, 0.0
    )
    B = Quat(cn, sn * ct, sn * st, 0.0)
    b = Quat(0.0, math.sin(2 * nu) * st, 0.0, -(cn ** 2 - sn ** 2 * st ** 2)) * (1.0 / d)
    return RepPoint(A, B, K, b)


def l0_sphere_point(x: float, y: float, z: float, eps: float) -> RepPoint:
    """``L_0`` at a point of the unit sphere given in Cartesian form."""
    return l0_point(math.atan2(math.hypot(x, y), z), math.atan2(y, x), eps)


def alpha1_squared(alpha: float, beta: float) -> tuple[float, float]:
    """Action of the squared braid generator on the slice coordinates."""
    return alpha, math.pi + beta - 2 * alpha


def parametrized_point(which: str, params: tuple[float, float], eps: float = 1e-2):
    """``W0``/``L0`` as representations; ``W2``/``L2`` as slice coordinates.

    The winding-two Lagrangians are only available on the slice, where the
    squared braid action is known: ``W2`` at ``psi = 0`` and ``L2`` at
    ``theta`` in ``{0, pi}``.
    """
    u, v = params
    if which == "W0":
        return w0_point(u, v)
    if which == "L0":
        return l0_point(u, v, eps)
    if which == "W2":
        if abs(v) > 1e-12:
            raise ChartDomain("W2 leaves the slice unless psi = 0")
        return alpha1_squared(u, 0.0)
    if which == "L2":
        if min(abs(v), abs(abs(v) - math.pi)) > 1e-12:
            raise ChartDomain("L2 leaves the slice unless theta is 0 or pi")
        al, be = l0_slice_coords(u, v, eps)
        return alpha1_squared(al, be)
    raise ChartDomain(f"unknown Lagrangian {which!r}")


def l0_slice_coords(phi: float, theta: float, eps: float) -> tuple[float, float]:
    """Slice coordinates of ``L0(phi, theta)`` for ``theta`` in ``{0, pi}``.

    The ``theta = pi`` branch is the ``theta = 0`` formula continued to
    negative ``phi`` (the same point of the sphere).
    """
    sign = 1.0 if abs(theta) < 1.0 else -1.0
    ph = sign * phi
    return ph + math.pi / 2, eps * math.sin(ph)


def slice_class(p: RepPoint) -> np.ndarray:
    """Conjugation invariants ``(cos alpha, cos beta, sin alpha sin beta)`` of a slice point."""
    return np.array([p.A.t, p.B.t, float(np.dot(p.A.vector, p.B.vector))])


def slice_class_of(alpha: float, beta: float) -> np.ndarray:
    return np.array([math.cos(alpha), math.cos(beta), math.sin(alpha) * math.sin(beta)])


def invariants(p: RepPoint) -> np.ndarray:
    """Traces of all words of length at most three in ``A, B, a``."""
    gens = [p.A, p.B, p.a, p.A.inv(), p.B.inv(), p.a.inv()]
    out = []
    for g1 in gens:
        out.append(g1.trace())
        for g2 in gens:
            out.append((g1 * g2).trace())
            for g3 in gens:
                out.append((g1 * g2 * g3).trace())
    return np.array(out)


def sample_points(eps: float = 1e-2, n: int = 9) -> list[tuple[str, RepPoint]]:
    """Chart and Lagrangian sample points on fixed grids."""
    out: list[tuple[str, RepPoint]] = []
    grid = np.linspace(0.1, math.pi - 0.1, n)
    small = np.linspace(-0.6, 0.6, 5)
    for chart in (1, 2):
        for u in grid:
            for v in grid[::2]:
                for s in small:
                    for t in small:
                        al, be = (u, v - math.pi / 2) if chart == 1 else (v - math.pi / 2, u)
                        try:
                            out.append((f"chart{chart}", chart_point(chart, al, be, s, t)))
                        except ChartDomain:
                            pass
    for u in grid:
        for v in np.linspace(-math.pi, math.pi, n):
            out.append(("W0", w0_point(u, v)))
            out.append(("L0", l0_point(u, v, eps)))
    return out


def residual_summary(eps: float = 1e-2, n: int = 9) -> dict[str, dict[str, float]]:
    """Largest representation residual and trace defect per point family."""
    out: dict[str, dict[str, float]] = {}
    for kind, p in sample_points(eps, n):
        row = out.setdefault(kind, {"points": 0, "residual": 0.0, "trace": 0.0})
        row["points"] += 1
        row["residual"] = max(row["residual"], rep_residual(p))
        row["trace"] = max(row["trace"], trace_defect(p))
    return out


def l0_off_slice_gap(eps: float = 1e-2, n: int = 7) -> float:
    """Smallest ``|ab - 1|`` over sampled ``L0(phi, theta)`` with ``theta`` away from ``0, pi``."""
    gaps = []
    for phi in np.linspace(0.2, math.pi - 0.2, n):
        for theta in (0.3, 1.0, math.pi / 2, 2.2, -0.7, -2.0):
            p = l0_point(phi, theta, eps)
            gaps.append((p.a * p.b - ONE).norm())
    return min(gaps)


# -- coordinates near the double point ---------------------------------------------

P_D = RepPoint(K, ONE, I, -I)
P_D_CHART1 = (math.pi / 2, 0.0, 0.0, 0.0)


def f_coordinates(p: RepPoint) -> np.ndarray:
    """The functions ``f^1..f^4`` built from traces."""
    A, B, a, b = p.A, p.B, p.a, p.b
    return np.array(
        [
            -0.5 * A.trace(),
            -0.5 * ((A * B).trace() - A.trace()),
            -0.5 * (A * a).trace(),
            -0.25 * ((A * a).trace() + (A * b).trace()),
        ]
    )


def h4(p: RepPoint) -> float:
    return 0.25 * ((p.B * p.a).trace() + (p.B * p.b).trace())


def _central(fn: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    return (np.asarray(fn(h)) - np.asarray(fn(-h))) / (2 * h)


@dataclass
class FDCheck:
    name: str
    measured: list[float]
    expected: list[float]
    error: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.error <= self.tol

    def row(self) -> str:
        return f"{self.name}: err={self.error:.2e} tol={self.tol:.1e} {'ok' if self.ok else 'FAIL'}"


def _check(name, measured, expected, tol) -> FDCheck:
    m, e = np.asarray(measured, float), np.asarray(expected, float)
    return FDCheck(name, m.round(12).tolist(), e.tolist(), float(np.max(np.abs(m - e))), tol)


CHART_SAMPLES = ((1.0, 0.7, 0.3), (math.pi / 2, 0.0, 0.0), (2.0, -0.4, 0.8), (0.6, 1.9, -0.5))


def _tangent(curve: Callable[[float], RepPoint], h: float) -> np.ndarray:
    return _central(lambda u: f_coordinates(curve(u)), h)


def _l0_pole_curves(eps: float, north: bool):
    """Curves through a pole of the sphere along the two oriented directions."""
    zs = 1.0 if north else -1.0
    # d/dphi at the poles: +x at the north pole and -x at the south pole
    dphi = lambda u: l0_sphere_point(zs * math.sin(u), 0.0, zs * math.cos(u), eps)
    dy = lambda u: l0_sphere_point(0.0, math.sin(u), zs * math.cos(u), eps)
    return dphi, dy


def _slice_curve_tangent(coords: Callable[[float], tuple[float, float]], u0: float, h: float) -> np.ndarray:
    return _central(lambda u: f_coordinates(standard_point(*coords(u0 + u))), h)


def fd_checks(tol_fd: float = 1e-5, eps_values: Iterable[float] = (1e-2, 1e-3), h: float = 1e-5) -> list[FDCheck]:
    """Finite-difference checks of chart derivatives and tangent vectors at the double point."""
    out: list[FDCheck] = []
    for al, be, s in CHART_SAMPLES:
        grad = [
            _central(lambda u, i=i: f_coordinates(chart_point(1, *_bump((al, be, s, 0.0), i, u)))[3], h)
            for i in range(4)
        ]
        out.append(_check(f"chart1 d f4 at {(al, be, s)}", grad, [0, 0, 0, math.sin(al) ** 2 * math.cos(s)], tol_fd))
        if abs(math.sin(be)) > 1e-6:
            grad = [_central(lambda u, i=i: h4(chart_point(2, *_bump((al, be, s, 0.0), i, u))), h) for i in range(4)]
            out.append(
                _check(f"chart2 d h4 at {(al, be, s)}", grad, [0, 0, 0, math.sin(be) ** 2 * math.cos(s)], tol_fd)
            )
    jac = np.array(
        [_central(lambda u, i=i: f_coordinates(chart_point(1, *_bump(P_D_CHART1, i, u))), h) for i in range(4)]
    ).T
    out.append(_check("d_nu f^mu at p_D", jac.ravel(), np.eye(4).ravel(), tol_fd))
    out.append(_check("W0 d_chi", _tangent(lambda u: w0_point(math.pi / 2 + u, 0.0), h), [1, 0, 0, 0], tol_fd))
    out.append(_check("W0 d_psi", _tangent(lambda u: w0_point(math.pi / 2, u), h), [0, 0, 1, 0], tol_fd))
    out.append(
        _check("W2 d_chi", _slice_curve_tangent(lambda c: alpha1_squared(c, 0.0), math.pi / 2, h), [1, -2, 0, 0], tol_fd)
    )
    for eps in eps_values:
        # the printed vectors are first order in eps; allow the second-order remainder
        tol = tol_fd + 10 * eps ** 2
        expect = {
            ("L0", True): ([1, eps, 0, 0], [0, 0, 1 + eps, eps]),
            ("L0", False): ([-1, eps, 0, 0], [0, 0, 1 - eps, -eps]),
        }
        for north in (True, False):
            pole = "north" if north else "south"
            dphi, dy = _l0_pole_curves(eps, north)
            e_phi, e_y = expect[("L0", north)]
            out.append(_check(f"L0 {pole} d_phi eps={eps}", _tangent(dphi, h), e_phi, tol))
            out.append(_check(f"L0 {pole} d_y eps={eps}", _tangent(dy, h), e_y, tol))
            phi0 = 0.0 if north else math.pi
            l2 = lambda u, e=eps: alpha1_squared(*l0_slice_coords(u, 0.0, e))
            e_l2 = [1, -(2 - eps), 0, 0] if north else [-1, 2 + eps, 0, 0]
            out.append(_check(f"L2 {pole} d_phi eps={eps}", _slice_curve_tangent(l2, phi0, h), e_l2, tol))
    return out


def _bump(point, i, u):
    vals = list(point)
    vals[i] += u
    return vals


def richardson_consistent(checks: list[FDCheck], tol_fd: float = 1e-5) -> dict[str, bool]:
    """Two-eps consistency of each tangent check.

    A check is consistent when both errors sit below ``tol_fd`` (the
    eps-linear vector is exact to finite-difference accuracy) or when the
    error shrinks at least like ``eps^1.5`` between the two eps values.
    """
    by_name: dict[str, dict[float, float]] = {}
    for ch in checks:
        if " eps=" in ch.name:
            base, e = ch.name.rsplit(" eps=", 1)
            by_name.setdefault(base, {})[float(e)] = ch.error
    out = {}
    for base, errs in by_name.items():
        (e1, a), (e2, b) = sorted(errs.items(), reverse=True)[:2]
        if max(a, b) <= tol_fd:
            out[base] = True
        else:
            out[base] = b > 0 and math.log(a / b) / math.log(e1 / e2) >= 1.5
    return out


# -- Hamiltonian pushoff and intersection counting -----------------------------------

TWO_PI = 2 * math.pi


def slice_curve(which: str, eps: float = 1e-2, samples: int = 4001) -> list[np.ndarray]:
    """Polylines (rows ``(alpha, beta)``) tracing a Lagrangian in the slice.

    Each returned polyline is a closed loop in the torus cover; the involution
    image is included, so every slice point appears twice.
    """
    u = np.linspace(-math.pi, math.pi, samples)
    if which in ("W0", "W2"):
        # the open arc chi in (0, pi) together with its image: the full circle beta = 0
        al, be = u.copy(), np.zeros_like(u)
        if which == "W2":
            be = math.pi + be - 2 * al
        return [np.column_stack([al, be])]
    if which in ("L0", "L2"):
        # phi in [-pi, pi] joins the theta = 0 and theta = pi branches into a loop
        al, be = u + math.pi / 2, eps * np.sin(u)
        if which == "L2":
            be = math.pi + be - 2 * al
        loop = np.column_stack([al, be])
        return [loop, -loop]
    raise ValueError(f"unknown Lagrangian {which!r}")


def _field(pts: np.ndarray, eta: float) -> np.ndarray:
    return np.column_stack([-eta * np.sin(pts[:, 1]), np.sin(pts[:, 0])])


def flow(pts: np.ndarray, eta: float = 0.2, tau: float = -0.2, steps: int = 16) -> np.ndarray:
    """Classical RK4 for the Hamiltonian vector field on the slice."""
    h = tau / steps
    y = np.array(pts, dtype=float)
    for _ in range(steps):
        k1 = _field(y, eta)
        k2 = _field(y + 0.5 * h * k1, eta)
        k3 = _field(y + 0.5 * h * k2, eta)
        k4 = _field(y + h * k3, eta)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def converged_flow(pts: np.ndarray, eta: float, tau: float, tol: float = 1e-8) -> tuple[np.ndarray, int]:
    """Double the step count until the endpoints move by less than ``tol``."""
    steps = 4
    prev = flow(pts, eta, tau, steps)
    while True:
        steps *= 2
        cur = flow(pts, eta, tau, steps)
        if np.max(np.abs(cur - prev)) < tol:
            return cur, steps
        if steps > 1 << 16:
            raise ArithmeticError("pushoff integration did not converge")
        prev = cur


def _segment_hits(p: np.ndarray, q: np.ndarray, angle_tol: float) -> list[tuple[float, float]]:
    """Intersections of two polylines on the torus ``(R / 2 pi)^2``."""
    from scipy.spatial import cKDTree

    p0, dp = p[:-1], np.diff(p, axis=0)
    q0, dq = q[:-1], np.diff(q, axis=0)
    mid_p = np.mod(p0 + 0.5 * dp, TWO_PI)
    mid_q = np.mod(q0 + 0.5 * dq, TWO_PI)
    reach = np.linalg.norm(dp, axis=1).max() + np.linalg.norm(dq, axis=1).max()
    tree_p = cKDTree(mid_p, boxsize=TWO_PI)
    tree_q = cKDTree(mid_q, boxsize=TWO_PI)
    pairs = tree_p.query_ball_tree(tree_q, reach)
    ii = np.array([i for i, js in enumerate(pairs) for _ in js], dtype=int)
    jj = np.array([j for js in pairs for j in js], dtype=int)
    if ii.size == 0:
        return []
    # move each q segment to the lattice translate nearest its p partner
    shift = TWO_PI * np.round(((p0[ii] + 0.5 * dp[ii]) - (q0[jj] + 0.5 * dq[jj])) / TWO_PI)
    r, s = dp[ii], dq[jj]
    w = q0[jj] + shift - p0[ii]
    denom = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    cross_w = w[:, 0] * r[:, 1] - w[:, 1] * r[:, 0]
    if np.any((denom == 0.0) & (np.abs(cross_w) < 1e-14)):
        raise NonTransverse("collinear overlap")
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = (w[:, 0] * s[:, 1] - w[:, 1] * s[:, 0]) / denom
        tq = cross_w / denom
    hit = (denom != 0.0) & (tp >= 0.0) & (tp < 1.0) & (tq >= 0.0) & (tq < 1.0)
    hits = []
    for k in np.nonzero(hit)[0]:
        sine = abs(denom[k]) / (np.linalg.norm(r[k]) * np.linalg.norm(s[k]))
        loc = p0[ii[k]] + tp[k] * r[k]
        if sine < angle_tol:
            raise NonTransverse(f"tangential intersection near {tuple(loc.round(6))}", tuple(loc))
        hits.append((float(loc[0] % TWO_PI), float(loc[1] % TWO_PI)))
    return hits


PUNCTURES = ((0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi))


def pushoff_and_count(
    curve1: str,
    curve2: str,
    eta: float = 0.2,
    tau: float = -0.2,
    eps: float = 1e-2,
    samples: int = 4001,
    angle_tol: float = 1e-6,
    puncture_radius: float = 1e-6,
) -> int:
    """Count points of ``curve1`` pushed off by the flow meeting static ``curve2``.

    Intersections are counted on the torus cover and halved.
    """
    moving = [converged_flow(c, eta, tau)[0] for c in slice_curve(curve1, eps, samples)]
    static = slice_curve(curve2, eps, samples)
    hits = []
    for m in moving:
        for s in static:
            hits += _segment_hits(m, s, angle_tol)
    kept = []
    for h in hits:
        if any(_torus_dist(h, pt) < puncture_radius for pt in PUNCTURES):
            continue  # the four reducible points are not part of the slice
        if any(_torus_dist(h, k) < 1e-9 for k in kept):
            continue
        kept.append(h)
    if len(kept) % 2:
        raise NonTransverse(f"odd number of lifted intersections ({len(kept)})", kept)
    return len(kept) // 2


def _torus_dist(p, q) -> float:
    d = [(u - v + math.pi) % TWO_PI - math.pi for u, v in zip(p, q)]
    return math.hypot(*d)


def intersection_points(curve1: str, curve2: str, **kw) -> list[tuple[float, float]]:
    """The lifted intersection points (both preimages of each slice point)."""
    eta, tau, eps = kw.get("eta", 0.2), kw.get("tau", -0.2), kw.get("eps", 1e-2)
    samples = kw.get("samples", 4001)
    moving = [converged_flow(c, eta, tau)[0] for c in slice_curve(curve1, eps, samples)]
    out = []
    for m in moving:
        for s in slice_curve(curve2, eps, samples):
            out += _segment_hits(m, s, kw.get("angle_tol", 1e-6))
    return out
