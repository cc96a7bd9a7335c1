"""CHSH observables, correlations, the Bell functional, and its maximum.

Measurement directions are unit vectors parametrized by polar angles; the
single-qubit observable is the traceless

    w.sigma = [[cos(theta), exp(-i phi) sin(theta)],
               [exp(i phi) sin(theta), -cos(theta)]]

with eigenvalues exactly +-1, as dichotomic outcomes require.  The Bell
functional is

    B = a.sigma x (b + b').sigma + a'.sigma x (b - b').sigma

and its exact maximum over all four directions has the closed form
2 sqrt(m1 + m2), where m1 >= m2 are the two largest eigenvalues of T^t T
and T_ij = Tr(rho sigma_i x sigma_j).  The closed form serves as an oracle
for the numerical 8-angle maximization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation
from .linalg import I2, PAULIS, as_matrix, kron
from .optimize import nelder_mead_batch
from .sampling import RngStream

CLASSICAL_BOUND = 2.0
QUANTUM_BOUND = 2.0 * math.sqrt(2.0)

OUTCOMES = (1, -1)

_TWO_PI = 2.0 * math.pi

# sigma_i x sigma_j stack, axes (i, j, row, col)
_PAULI_PAIRS = np.array([[np.kron(p, q) for q in PAULIS] for p in PAULIS])


@dataclass(frozen=True)
class MeasurementSetting:
    """Direction on the Bloch sphere: theta in [0, pi], phi in [0, 2 pi).

    Out-of-range angles are folded onto the sphere without changing the
    direction they describe.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        th = float(self.theta)
        ph = float(self.phi)
        if not (math.isfinite(th) and math.isfinite(ph)):
            raise ValueError("angles must be finite")
        th = th % _TWO_PI
        if th > math.pi:
            th = _TWO_PI - th
            ph += math.pi
        ph = ph % _TWO_PI
        object.__setattr__(self, "theta", min(max(th, 0.0), math.pi))
        object.__setattr__(self, "phi", ph)

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


def observable(s: MeasurementSetting) -> np.ndarray:
    """Traceless +-1-valued observable w.sigma for the given direction."""
    st = math.sin(s.theta)
    ct = math.cos(s.theta)
    off = st * complex(math.cos(s.phi), math.sin(s.phi))
    return np.array([[ct, off.conjugate()], [off, -ct]])


@dataclass(frozen=True)
class SettingsQuad:
    """The four CHSH directions: a, a' for one side, b, b' for the other."""

    a: MeasurementSetting
    a_prime: MeasurementSetting
    b: MeasurementSetting
    b_prime: MeasurementSetting

    @classmethod
    def from_angles(cls, angles) -> "SettingsQuad":
        """Build from eight angles ordered (theta, phi) for a, a', b, b'."""
        v = [float(x) for x in np.asarray(angles).ravel()]
        if len(v) != 8:
            raise ValueError(f"expected 8 angles, got {len(v)}")
        s = [MeasurementSetting(v[2 * i], v[2 * i + 1]) for i in range(4)]
        return cls(*s)

    @property
    def angles(self) -> np.ndarray:
        """The eight angles in from_angles order."""
        out = []
        for s in (self.a, self.a_prime, self.b, self.b_prime):
            out += [s.theta, s.phi]
        return np.array(out)


def _outcome_index(a: int) -> int:
    if a == 1:
        return 0
    if a == -1:
        return 1
    raise ValueError(f"outcome must be +1 or -1, got {a}")


def _setting_index(x: int) -> int:
    if x not in (1, 2):
        raise ValueError(f"setting label must be 1 or 2, got {x}")
    return x - 1


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Outcome probabilities p(a, b | x, y) for the four setting pairs.

    ``table`` has axes (a, b, x, y); outcomes map +1 -> 0, -1 -> 1 and
    setting labels 1, 2 map to 0, 1.
    """

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2, 2, 2, 2):
            raise ValueError(f"expected a (2, 2, 2, 2) table, got {t.shape}")
        if t.min() < -1e-12 or t.max() > 1 + 1e-12:
            raise BoundViolation("probabilities outside [0, 1] beyond slack")
        sums = t.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > 1e-10:
            raise BoundViolation("outcome probabilities do not sum to 1")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    def prob(self, a: int, b: int, x: int, y: int) -> float:
        """p(a, b | x, y) with outcomes in {+1, -1} and settings in {1, 2}."""
        return float(self.table[_outcome_index(a), _outcome_index(b), _setting_index(x), _setting_index(y)])

    def setting_slice(self, x: int, y: int) -> np.ndarray:
        """2x2 outcome table for one setting pair, outcomes ordered (+1, -1)."""
        return self.table[:, :, _setting_index(x), _setting_index(y)]

    def correlation(self, x: int, y: int) -> float:
        """Two-point correlator sum_ab a b p(a, b | x, y)."""
        p = self.setting_slice(x, y)
        return float(p[0, 0] - p[0, 1] - p[1, 0] + p[1, 1])


def born_probabilities(rho, q: SettingsQuad) -> ProbabilityTable:
    """Outcome probabilities Tr(rho M_x^a x M_y^b) for projective +-1 measurements."""
    rho = as_matrix(rho)
    table = np.empty((2, 2, 2, 2))
    for xi, sa in enumerate((q.a, q.a_prime)):
        wa = observable(sa)
        for yi, sb in enumerate((q.b, q.b_prime)):
            wb = observable(sb)
            for ai, a in enumerate(OUTCOMES):
                ma = (I2 + a * wa) / 2
                for bi, b in enumerate(OUTCOMES):
                    mb = (I2 + b * wb) / 2
                    table[ai, bi, xi, yi] = np.trace(rho @ kron(ma, mb)).real
    return ProbabilityTable(table)


def correlation(rho, sa: MeasurementSetting, sb: MeasurementSetting) -> float:
    """Two-point correlator Tr(rho (a.sigma x b.sigma))."""
    rho = as_matrix(rho)
    return float(np.trace(rho @ kron(observable(sa), observable(sb))).real)


def bell_operator(q: SettingsQuad) -> np.ndarray:
    """The CHSH operator a.sigma x (b+b').sigma + a'.sigma x (b-b').sigma."""
    wa = observable(q.a)
    wap = observable(q.a_prime)
    wb = observable(q.b)
    wbp = observable(q.b_prime)
    return kron(wa, wb + wbp) + kron(wap, wb - wbp)


def bell_value(rho, q: SettingsQuad) -> float:
    """|Tr(B rho)| for the CHSH operator at the given settings."""
    rho = as_matrix(rho)
    return abs(float(np.trace(bell_operator(q) @ rho).real))


def correlation_matrices(rhos: np.ndarray) -> np.ndarray:
    """Stack of 3x3 correlation matrices T_ij = Tr(rho sigma_i x sigma_j)."""
    rhos = np.asarray(rhos)
    return np.einsum("ijkl,mlk->mij", _PAULI_PAIRS, rhos).real


def correlation_matrix(rho) -> np.ndarray:
    """Real 3x3 matrix T_ij = Tr(rho sigma_i x sigma_j), entries in [-1, 1]."""
    return correlation_matrices(as_matrix(rho)[None])[0]


def horodecki_from_t(ts: np.ndarray) -> np.ndarray:
    """Closed-form CHSH maxima for a stack of correlation matrices."""
    w = np.linalg.eigvalsh(ts.transpose(0, 2, 1) @ ts)
    return 2.0 * np.sqrt(np.clip(w[:, -1] + w[:, -2], 0.0, None))


def horodecki_max(rho) -> float:
    """Exact CHSH maximum 2 sqrt(m1 + m2) from the correlation matrix.

    m1, m2 are the two largest eigenvalues of T^t T.  This is the closed
    form the 8-angle maximization is checked against.
    """
    return float(horodecki_from_t(correlation_matrices(as_matrix(rho)[None]))[0])


@dataclass(frozen=True)
class BellResult:
    """Outcome of a CHSH maximization."""

    value: float
    settings: SettingsQuad
    oracle_value: float | None = None
    classical_bound: float = CLASSICAL_BOUND
    quantum_bound: float = QUANTUM_BOUND

    def __post_init__(self):
        if not 0.0 <= self.value <= QUANTUM_BOUND + 1e-6:
            raise BoundViolation(f"CHSH value {self.value} outside [0, 2 sqrt 2]")
        if self.oracle_value is not None and self.value > self.oracle_value + 1e-6:
            raise BoundViolation(
                f"CHSH value {self.value} exceeds its oracle {self.oracle_value}"
            )


def _bell_from_angles(x: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """|<B>| for (m, 8) angle rows against (m, 3, 3) correlation matrices."""
    th = x[:, 0::2]
    ph = x[:, 1::2]
    st = np.sin(th)
    v = np.empty(th.shape + (3,))
    v[..., 0] = st * np.cos(ph)
    v[..., 1] = st * np.sin(ph)
    v[..., 2] = np.cos(th)
    plus = v[:, 2] + v[:, 3]
    minus = v[:, 2] - v[:, 3]
    val = np.einsum("mi,mij,mj->m", v[:, 0], ts, plus)
    val += np.einsum("mi,mij,mj->m", v[:, 1], ts, minus)
    return np.abs(val)


def _draw_starts(streams, starts: int) -> np.ndarray:
    """(len(streams), starts, 8) start angles: theta ~ U[0, pi], phi ~ U[0, 2 pi)."""
    x0 = np.empty((len(streams), starts, 8))
    for i, stream in enumerate(streams):
        gen = stream.generator()
        x0[i, :, 0::2] = gen.uniform(0.0, math.pi, size=(starts, 4))
        x0[i, :, 1::2] = gen.uniform(0.0, _TWO_PI, size=(starts, 4))
    return x0


def maximize_bell_block(
    ts: np.ndarray,
    streams,
    *,
    starts: int = 50,
    oracle: np.ndarray | None = None,
    stop_tol: float = 1e-9,
    chunk: int = 8,
):
    """Multistart CHSH maximization for a stack of correlation matrices.

    Start angles for state ``i`` are drawn from ``streams[i]`` up front, then
    refined in chunks; when ``oracle`` values are given, a state stops early
    once its running best is within ``stop_tol`` of the oracle.  Results are
    independent of ``chunk``.

    Returns ``(values, angles)`` with shapes (S,) and (S, 8).
    """
    ts = np.asarray(ts)
    n_states = ts.shape[0]
    if starts < 1:
        raise ValueError("starts must be at least 1")
    x0_all = _draw_starts(streams, starts)
    best_val = np.full(n_states, -1.0)
    best_x = np.zeros((n_states, 8))
    active = np.arange(n_states)

    for lo in range(0, starts, chunk):
        width = min(chunk, starts - lo)
        x0 = x0_all[active, lo : lo + width, :].reshape(-1, 8)
        state_of = np.repeat(active, width)

        def objective(x, rows):
            return -_bell_from_angles(x, ts[state_of[rows]])

        xb, fb, _, _ = nelder_mead_batch(objective, x0)
        vals = (-fb).reshape(active.size, width)
        xs = xb.reshape(active.size, width, 8)
        arg = vals.argmax(axis=1)
        pick = np.arange(active.size)
        wave_val = vals[pick, arg]
        wave_x = xs[pick, arg]
        improve = wave_val > best_val[active]
        rows = active[improve]
        best_val[rows] = wave_val[improve]
        best_x[rows] = wave_x[improve]
        if oracle is not None:
            active = active[best_val[active] < oracle[active] - stop_tol]
        if active.size == 0:
            break
    return best_val, best_x


def optimize_bell(rho, starts: int = 50, rng: RngStream | None = None) -> BellResult:
    """Multistart maximization of bell_value over all four directions.

    Draws ``starts`` random angle vectors from ``rng`` and refines each with
    a derivative-free simplex search; the closed-form maximum is computed
    alongside and returned as ``oracle_value``.  Starts are processed in
    chunks and stop early once the oracle is matched to 1e-9; the refined
    best is unchanged, later chunks could only tie it within that slack.
    """
    rho = as_matrix(rho)
    if rng is None:
        rng = RngStream(0)
    ts = correlation_matrices(rho[None])
    oracle = horodecki_from_t(ts)
    vals, xs = maximize_bell_block(ts, [rng], starts=starts, oracle=oracle)
    settings = SettingsQuad.from_angles(xs[0])
    return BellResult(
        value=bell_value(rho, settings),
        settings=settings,
        oracle_value=float(oracle[0]),
    )
