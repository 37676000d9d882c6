"""Site, sublattice, momentum, and spectral observables.

Sublattice conventions: even sites form chain A, odd sites chain B. The
per-chain expectation values carry a factor 2 (each chain holds half the
weight of an equally split state), so

    <l_A> = 2 * sum_{even l} l |psi(l)|^2,    <l> = (<l_A> + <l_B>) / 2,

and the sublattice momentum density uses psi~(k) = sqrt(2/N) * sum over
one sublattice of exp(-i k l) psi(l) on the printed grid k = 2 pi n / N,
n = 0..N-1. The expectation <k_AB> is the plain grid sum of k |psi~(k)|^2
with no renormalization, so its absolute value is grid-convention
dependent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .oracles import dense_hamiltonian
from .statevector import Statevector


def _amplitudes(state) -> np.ndarray:
    if isinstance(state, Statevector):
        return state.amplitudes
    return np.asarray(state, dtype=complex).ravel()


def site_probabilities(state) -> np.ndarray:
    """|psi(l)|^2 over the chain."""
    return np.abs(_amplitudes(state)) ** 2


def two_particle_probability(state, l1: int, l2: int) -> float:
    """|psi(l1, l2)|^2 from a two-register state."""
    amps = _amplitudes(state)
    n = math.isqrt(amps.size)
    if n * n != amps.size:
        raise ValueError("state is not a two-register amplitude vector")
    if not (0 <= l1 < n and 0 <= l2 < n):
        raise ValueError(f"sites ({l1}, {l2}) out of range [0, {n})")
    return float(np.abs(amps[l1 * n + l2]) ** 2)


def sublattice_probability(state) -> tuple[float, float]:
    """(sum of |psi|^2 over even sites, over odd sites)."""
    p = site_probabilities(state)
    return float(np.sum(p[0::2])), float(np.sum(p[1::2]))


def sublattice_position(state) -> tuple[float, float, float]:
    """(<l_A>, <l_B>, <l>) with the per-chain factor 2 and their plain mean."""
    p = site_probabilities(state)
    l = np.arange(p.size)
    l_a = 2.0 * float(np.sum(l[0::2] * p[0::2]))
    l_b = 2.0 * float(np.sum(l[1::2] * p[1::2]))
    return l_a, l_b, 0.5 * (l_a + l_b)


def momentum_grid(n_sites: int) -> np.ndarray:
    """k = 2 pi n / N for n = 0..N-1."""
    return 2.0 * np.pi * np.arange(n_sites) / n_sites


def sublattice_momentum_density(state) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k grid, |psi~_A(k)|^2, |psi~_B(k)|^2) with the sqrt(2/N) normalization."""
    amps = _amplitudes(state)
    n = amps.size
    mask_even = np.zeros(n)
    mask_even[0::2] = 1.0
    ft_a = np.fft.fft(amps * mask_even) * math.sqrt(2.0 / n)
    ft_b = np.fft.fft(amps * (1.0 - mask_even)) * math.sqrt(2.0 / n)
    return momentum_grid(n), np.abs(ft_a) ** 2, np.abs(ft_b) ** 2


def sublattice_momentum(state) -> tuple[float, float]:
    """(<k_A>, <k_B>) as plain grid sums of k |psi~(k)|^2."""
    k, dens_a, dens_b = sublattice_momentum_density(state)
    return float(np.sum(k * dens_a)), float(np.sum(k * dens_b))


def dispersion(params: ModelParams, k) -> tuple[np.ndarray, np.ndarray]:
    """Two-band energies (upper, lower) at crystal momentum k.

    eps_+-(k) = +- (1/4) sqrt(delta_a^2 + delta_b^2 + 2 delta_a delta_b cos 2k);
    at delta_a = delta_b the gap closes and the branches merge into
    +-(delta/2)|cos k|.
    """
    k = np.asarray(k, dtype=float)
    root = 0.25 * np.sqrt(
        params.delta_a ** 2
        + params.delta_b ** 2
        + 2.0 * params.delta_a * params.delta_b * np.cos(2.0 * k)
    )
    return root, -root


def spectrum(params: ModelParams, f_const: float) -> np.ndarray:
    """Ascending eigenvalues of the chain Hamiltonian at constant tilt f_const."""
    h = dense_hamiltonian(
        ModelParams(
            delta_a=params.delta_a,
            delta_b=params.delta_b,
            f_dc=f_const,
            n_sites=params.n_sites,
        )
    )
    return np.linalg.eigvalsh(h)


@dataclass(frozen=True)
class LadderSpectrum:
    """Uniformly spaced rung energies of one band's tilted-ladder estimate."""

    band: str
    alphas: np.ndarray
    energies: np.ndarray
    offset: float


def _eigenvector_phase(params: ModelParams, band: str, k: np.ndarray) -> np.ndarray:
    """Even-sublattice Bloch amplitude D(k) = -4 eps(k) / (da e^{ik} + db e^{-ik})."""
    sign = 1.0 if band == "+" else -1.0
    upper, lower = dispersion(params, k)
    eps = upper if sign > 0 else lower
    den = params.delta_a * np.exp(1j * k) + params.delta_b * np.exp(-1j * k)
    return -4.0 * eps / den


def _berry_connection(params: ModelParams, band: str, k: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """X(k) = Re[(i/2) conj(D) dD/dk] by central differences.

    D is a pure phase, so X is real analytically; the real part discards
    rounding. At delta_a == delta_b the bands touch, D is piecewise
    constant, and the connection vanishes identically — returned directly
    because a finite difference straddling the touching point is garbage.
    """
    if params.delta_a == params.delta_b:
        return np.zeros_like(np.asarray(k, dtype=float))
    d0 = _eigenvector_phase(params, band, k)
    dp = _eigenvector_phase(params, band, k + h)
    dm = _eigenvector_phase(params, band, k - h)
    return np.real(0.5j * np.conj(d0) * (dp - dm) / (2.0 * h))


def _simpson(f, lo: float, hi: float, tol: float = 1e-8, max_doublings: int = 18) -> float:
    """Composite Simpson with panel doubling until the estimate settles."""
    panels = 8
    prev = None
    for _ in range(max_doublings):
        x = np.linspace(lo, hi, panels + 1)
        y = f(x)
        step = (hi - lo) / panels
        total = step / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2]))
        if prev is not None and abs(total - prev) < tol:
            return total
        prev = total
        panels *= 2
    raise RuntimeError("quadrature did not settle within the doubling budget")


def stark_ladder(params: ModelParams, f_const: float, alpha_range: tuple[int, int],
                 band: str = "-") -> LadderSpectrum:
    """Rung energies E_alpha = 2 F alpha + offset for one band.

    offset = F + (1/pi) * integral over half the zone of [eps(k) - F X(k)],
    evaluated with endpoint-nudged Simpson doubling (the phase D has a
    removable 0/0 at the zone edge when the gap closes).

    The extra half-rung F comes from the quantization condition: the Bloch
    eigenvector section is antiperiodic over the zone (phi_{k+pi} = -phi_k,
    because D(k+pi) = -D(k) and the site phase e^{-ikl} staggers), so the
    accumulated phase around the zone must be pi mod 2pi rather than 0.
    Without it the rungs land half a spacing away from the dense spectrum;
    with it they agree up to an O(F^2) adiabatic residual (about 0.12 F^2
    for delta_a=5, delta_b=1), checked against exact diagonalization.
    """
    if band not in ("+", "-"):
        raise ValueError(f"band must be '+' or '-', got {band!r}")
    alpha_lo, alpha_hi = alpha_range
    if alpha_hi < alpha_lo:
        raise ValueError("empty alpha range")
    edge = np.pi / 2.0 - 1e-9

    def integrand(k: np.ndarray) -> np.ndarray:
        upper, lower = dispersion(params, k)
        eps = upper if band == "+" else lower
        return eps - f_const * _berry_connection(params, band, k)

    offset = f_const + _simpson(integrand, -edge, edge) / np.pi
    alphas = np.arange(alpha_lo, alpha_hi + 1)
    energies = 2.0 * f_const * alphas + offset
    return LadderSpectrum(band=band, alphas=alphas, energies=energies, offset=float(offset))


@dataclass(frozen=True)
class ObservableSeries:
    """A labelled time series with one or more value columns."""

    kind: str
    times: np.ndarray
    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.shape[0] != np.asarray(self.times).size:
            values = values.T
        if values.shape[0] != np.asarray(self.times).size:
            raise ValueError("values and times are not aligned")
        if values.shape[1] != len(self.labels):
            raise ValueError("one label per value column required")
        object.__setattr__(self, "values", values)


def position_series(traj) -> ObservableSeries:
    """(<l_A>, <l_B>, <l>) along a single-particle trajectory."""
    rows = []
    for k in range(len(traj)):
        p = traj.probabilities[k]
        l = np.arange(p.size)
        l_a = 2.0 * np.sum(l[0::2] * p[0::2])
        l_b = 2.0 * np.sum(l[1::2] * p[1::2])
        rows.append((l_a, l_b, 0.5 * (l_a + l_b)))
    return ObservableSeries("position", traj.times, np.array(rows), ("pos_a", "pos_b", "pos_mean"))


def probability_series(traj) -> ObservableSeries:
    """Sublattice probability sums along a trajectory."""
    rows = [
        (np.sum(traj.probabilities[k][0::2]), np.sum(traj.probabilities[k][1::2]))
        for k in range(len(traj))
    ]
    return ObservableSeries("probability", traj.times, np.array(rows), ("prob_a", "prob_b"))


def momentum_series(traj) -> ObservableSeries:
    """Sublattice momentum expectations along a trajectory (needs amplitudes)."""
    rows = [sublattice_momentum(traj.amplitudes(k)) for k in range(len(traj))]
    return ObservableSeries("momentum", traj.times, np.array(rows), ("mom_a", "mom_b"))


def write_series_csv(series_list: list[ObservableSeries], path) -> None:
    """Side-by-side CSV of series sharing one time grid: t, then value columns."""
    if not series_list:
        raise ValueError("nothing to write")
    times = series_list[0].times
    for s in series_list[1:]:
        if s.times.size != times.size or np.max(np.abs(s.times - times)) > 0.0:
            raise ValueError("series do not share a time grid")
    header = ["t"]
    for s in series_list:
        header.extend(s.labels)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for i, t in enumerate(times):
            row = [repr(float(t))]
            for s in series_list:
                row.extend(repr(float(v)) for v in s.values[i])
            fh.write(",".join(row) + "\n")
