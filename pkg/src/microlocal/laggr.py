"""Linear Lagrangian planes in T*C^n = R^{4n}: phases, short-path angles and degrees.

Real coordinates are ordered (q_x, q_y, p_x, p_y), each block of length n.  A
complex point (q_z, p_z) has q_x = Re q_z, q_y = Im q_z, p_x = Re p_z,
p_y = -Im p_z.  Phases and angles use the complex structure z = q + i p, for
which the volume form is Omega(u) = det(Q + i P) on a basis u.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-8
BUILD_TOL = 1e-12
EDGE = 1e-10


class NotTransverse(ValueError):
    pass


class Ungraded(ValueError):
    pass


@dataclass
class LagrangianPlane:
    n: int
    span: np.ndarray  # 2n x 4n, rows are basis vectors
    theta: float | None = None

    def __post_init__(self):
        self.span = np.asarray(self.span, dtype=float)
        if self.span.shape != (2 * self.n, 4 * self.n):
            raise ValueError(f"span must be {2 * self.n} x {4 * self.n}")
        if np.linalg.matrix_rank(self.span, tol=TOL) < 2 * self.n:
            raise ValueError("degenerate span")

    def orthonormal(self) -> np.ndarray:
        """Columns form an orthonormal basis (4n x 2n)."""
        q, _ = np.linalg.qr(self.span.T)
        return q

    def complex_frame(self) -> np.ndarray:
        """Unitary 2n x 2n matrix Q + iP of an orthonormal basis."""
        V = self.orthonormal()
        m = 2 * self.n
        return V[:m] + 1j * V[m:]

    def isotropy_residual(self) -> float:
        V = self.orthonormal()
        return float(np.abs(V.T @ omega_matrix(self.n) @ V).max())

    def with_theta(self, theta: float) -> "LagrangianPlane":
        return LagrangianPlane(self.n, self.span, theta)

    def to_json(self) -> dict:
        return {"n": self.n, "rows": self.span.tolist(), "theta": self.theta}

    @staticmethod
    def from_json(obj: dict) -> "LagrangianPlane":
        L = LagrangianPlane(int(obj["n"]), np.array(obj["rows"], dtype=float), obj.get("theta"))
        if L.isotropy_residual() > 1e-10:
            raise ValueError("plane is not Lagrangian")
        return L


def omega_matrix(n: int) -> np.ndarray:
    """Standard symplectic form sum dp ^ dq on R^{4n}."""
    m = 2 * n
    w = np.zeros((2 * m, 2 * m))
    w[m:, :m] = np.eye(m)
    w[:m, m:] = -np.eye(m)
    return w


def complex_structure(k: int) -> np.ndarray:
    """Multiplication by i on (x-block, y-block) coordinates of C^k."""
    J = np.zeros((2 * k, 2 * k))
    J[k:, :k] = np.eye(k)
    J[:k, k:] = -np.eye(k)
    return J


def realify(vectors: np.ndarray, n: int) -> np.ndarray:
    """Complex vectors (q_z, p_z) in C^{2n} to real rows; w and i w both contribute."""
    rows = []
    for w in vectors:
        for u in (w, 1j * w):
            q, p = u[:n], u[n:]
            rows.append(np.concatenate([q.real, q.imag, p.real, -p.imag]))
    return np.array(rows)


def real_block(S: np.ndarray) -> np.ndarray:
    """Real matrix of q_z -> S q_z in (x, y) coordinates, with the sign flip on p_y."""
    a, b = S.real, S.imag
    return np.block([[a, -b], [-b, -a]])


def random_holomorphic_plane(n: int, k: int, seed: int | None = None, rng=None) -> LagrangianPlane:
    """Tangent plane spanned by q_{z_i} + sum S_{i mu} p_{z_mu} (i <= k) and p_{z_j} (j > k)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    rng = rng if rng is not None else np.random.default_rng(seed)
    X = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    S = (X + X.T) / 2
    vecs = []
    for i in range(k):
        w = np.zeros(2 * n, dtype=complex)
        w[i] = 1
        w[n:n + k] = S[i]
        vecs.append(w)
    for j in range(k, n):
        w = np.zeros(2 * n, dtype=complex)
        w[n + j] = 1
        vecs.append(w)
    return LagrangianPlane(n, realify(np.array(vecs).reshape(n, 2 * n), n), 0.0)


def zero_section(n: int, theta: float = 0.0) -> LagrangianPlane:
    return LagrangianPlane(n, np.eye(4 * n)[:2 * n], theta)


def fiber(n: int, theta: float = 0.0) -> LagrangianPlane:
    return random_holomorphic_plane(n, 0, 0).with_theta(theta)


def graph_plane(H: np.ndarray, theta: float | None = None) -> LagrangianPlane:
    """Graph of dF for F with real symmetric Hessian H on R^{2n}; grading lifted from the zero section."""
    H = np.asarray(H, dtype=float)
    m = H.shape[0]
    n = m // 2
    span = np.hstack([np.eye(m), H.T])
    if theta is None:
        theta = float(np.sum(np.arctan(np.linalg.eigvalsh(H))) / np.pi)
    return LagrangianPlane(n, span, theta)


def random_unitary_plane(n: int, rng) -> LagrangianPlane:
    """A random Lagrangian plane U R^{2n}, generically not holomorphic."""
    m = 2 * n
    Z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    U, _ = np.linalg.qr(Z)
    return LagrangianPlane(n, np.vstack([U.real, U.imag]).T, None)


def phase_squared(L: LagrangianPlane) -> complex:
    """Omega(u)^2 / |Omega(u)|^2 for any basis u."""
    m = 2 * L.n
    W = L.span[:, :m] + 1j * L.span[:, m:]
    v = np.linalg.det(W)
    if abs(v) < TOL:
        raise ValueError("degenerate span")
    return complex(v * v / abs(v) ** 2)


@dataclass
class ShortPathAngles:
    angles: np.ndarray
    frame: np.ndarray  # orthonormal basis of L0 (complex 2n x 2n columns) adapted to the angles

    @property
    def multiplicities(self) -> dict:
        out: dict = {}
        for a in np.round(self.angles, 8):
            out[float(a)] = out.get(float(a), 0) + 1
        return out

    def pairing_defect(self) -> float:
        """Largest distance of an angle from a partner -1/2 - alpha (greedy matching)."""
        rest = sorted(self.angles.tolist())
        worst = 0.0
        while rest:
            a = rest.pop(0)
            j = min(range(len(rest)), key=lambda t: abs(rest[t] + 0.5 + a)) if rest else None
            if j is None:
                return float("inf")
            worst = max(worst, abs(rest[j] + 0.5 + a))
            rest.pop(j)
        return worst

    def to_json(self) -> dict:
        return {"angles": self.angles.tolist(), "sum": float(self.angles.sum())}


def check_transverse(L0: LagrangianPlane, L1: LagrangianPlane) -> None:
    s = np.linalg.svd(np.vstack([L0.orthonormal().T, L1.orthonormal().T]), compute_uv=False)
    if s.min() < TOL:
        raise NotTransverse("planes are not transverse")


def short_path_angles(L0: LagrangianPlane, L1: LagrangianPlane) -> ShortPathAngles:
    """Angles alpha in (-1/2, 0) with L1 spanned by e^{2 pi i alpha_k} e_k, e_k orthonormal in L0."""
    check_transverse(L0, L1)
    W0, W1 = L0.complex_frame(), L1.complex_frame()
    M = W0.conj().T @ W1
    S = M @ M.T  # symmetric unitary; eigenvalues e^{4 pi i alpha}
    # real and imaginary parts commute, so a real orthogonal eigenbasis exists
    Hs = S.real + np.pi * S.imag
    _, O = np.linalg.eigh((Hs + Hs.T) / 2)
    lam = np.diag(O.T @ S @ O)
    alpha = np.angle(lam) / (4 * np.pi)
    alpha = np.where(alpha > 0, alpha - 0.5, alpha)
    if np.any(alpha > -EDGE) or np.any(alpha < -0.5 + EDGE):
        raise NotTransverse("an angle sits at the edge of (-1/2, 0)")
    return ShortPathAngles(alpha, W0 @ O)


def rotate(L0: LagrangianPlane, angles: ShortPathAngles) -> np.ndarray:
    """Real 4n x 2n basis of the rotated plane."""
    R = angles.frame @ np.diag(np.exp(2j * np.pi * angles.angles))
    return np.vstack([R.real, R.imag])


def subspace_distance(A: np.ndarray, B: np.ndarray) -> float:
    qa, _ = np.linalg.qr(A)
    qb, _ = np.linalg.qr(B)
    return float(np.linalg.norm(qa @ qa.T - qb @ qb.T, 2))


def calibrate(seed: int = 0, n: int = 2, trials: int = 20) -> float:
    """Scale c in deg = theta1 - theta0 - c sum(alpha) fixed by Morse indices of exact graphs.

    L0 is the graph of dF for a nondegenerate quadratic F, L1 the zero section; the
    degree must equal the number of negative Hessian eigenvalues."""
    rng = np.random.default_rng(seed)
    cs = []
    for _ in range(trials):
        X = rng.normal(size=(2 * n, 2 * n))
        H = (X + X.T) / 2
        ev = np.linalg.eigvalsh(H)
        if np.min(np.abs(ev)) < 1e-3:
            continue
        L0, L1 = graph_plane(H), zero_section(n)
        s = short_path_angles(L0, L1).angles.sum()
        index = int(np.sum(ev < 0))
        cs.append((L1.theta - L0.theta - index) / s)
    c = float(np.median(cs))
    if max(abs(x - c) for x in cs) > 1e-6:
        raise AssertionError("calibration is not a constant")
    return c


DEGREE_SCALE = 2.0


def intersection_degree(L0: LagrangianPlane, L1: LagrangianPlane, scale: float = DEGREE_SCALE) -> float:
    if L0.theta is None or L1.theta is None:
        raise Ungraded("both planes need a grading")
    a = short_path_angles(L0, L1)
    return float(L1.theta - L0.theta - scale * a.angles.sum())


@dataclass
class PairRecord:
    n: int
    phase0: complex
    phase1: complex
    angle_sum: float
    pairing: float
    degree: float
    reconstruction: float

    def to_json(self) -> dict:
        return {"n": self.n, "phase0": [self.phase0.real, self.phase0.imag],
                "phase1": [self.phase1.real, self.phase1.imag], "angle_sum": self.angle_sum,
                "pairing": self.pairing, "degree": self.degree, "reconstruction": self.reconstruction}


def random_holomorphic_pair(n: int, rng) -> tuple[LagrangianPlane, LagrangianPlane]:
    k0, k1 = int(rng.integers(0, n + 1)), int(rng.integers(0, n + 1))
    while True:
        L0 = random_holomorphic_plane(n, k0, rng=rng)
        L1 = random_holomorphic_plane(n, k1, rng=rng)
        try:
            check_transverse(L0, L1)
            return L0, L1
        except NotTransverse:
            k1 = int(rng.integers(0, n + 1))


def degree_law_run(count: int = 1000, seed: int = 0, ns=(1, 2, 3, 4)) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for t in range(count):
        n = ns[t % len(ns)]
        L0, L1 = random_holomorphic_pair(n, rng)
        a = short_path_angles(L0, L1)
        out.append(PairRecord(n, phase_squared(L0), phase_squared(L1), float(a.angles.sum()), a.pairing_defect(),
                              intersection_degree(L0, L1), subspace_distance(rotate(L0, a), L1.orthonormal())))
    return out
