"""Time evolution of state vectors under constant and scheduled operators.

Two integrators are shipped: a reference exact propagator (dense
eigendecomposition with a scaling-and-squaring fallback when the
eigenvector matrix is ill-conditioned, which it always is for long open
chains with asymmetric hoppings) and a fast fixed-step RK4 path that only
touches the banded structure.  Schedules model instantaneous parameter
quenches: the state is continuous across a switch, only the operator
changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "StateVector",
    "ScheduleSegment",
    "Schedule",
    "Trajectory",
    "GainRunawayError",
    "evolve_exact",
    "evolve_rk4",
    "evolve_schedule",
    "normalized_profile",
    "normalized_profile_matrix",
]

#: RK4 stability guard: dt must not exceed DT_SAFETY / max|H entry|
DT_SAFETY = 0.05
#: any |c_n| beyond this aborts the run as gain runaway
OVERFLOW_LIMIT = 1e150
#: eigendecompositions with cond(V) above this fall back to expm stepping
COND_LIMIT = 1e8

_TIME_EPS = 1e-9


class GainRunawayError(RuntimeError):
    """Raised when amplitudes overflow (net gain exceeding attenuation)."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes on labeled lattice sites."""

    amplitudes: np.ndarray
    site_labels: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        labels = np.ascontiguousarray(self.site_labels, dtype=int)
        if amps.ndim != 1 or labels.shape != amps.shape:
            raise ValueError("amplitudes and site_labels must be 1D arrays of equal length")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "site_labels", labels)

    @property
    def norm(self) -> float:
        """Total intensity S = sum |c_n|^2."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class ScheduleSegment:
    t_start: float
    hamiltonian: object


@dataclass(frozen=True)
class Schedule:
    """Ordered piecewise-constant sequence of operators with switch times."""

    segments: tuple

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValueError("schedule needs at least one segment")
        if segments[0].t_start != 0.0:
            raise ValueError("first segment must start at t = 0")
        starts = [s.t_start for s in segments]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must be strictly increasing")
        dim = segments[0].hamiltonian.dim
        labels = segments[0].hamiltonian.site_labels
        for s in segments[1:]:
            if s.hamiltonian.dim != dim or not np.array_equal(s.hamiltonian.site_labels, labels):
                raise ValueError("all segments must share dim and site labels")
        object.__setattr__(self, "segments", segments)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled states plus the derived intensity series."""

    times: np.ndarray
    amplitudes: np.ndarray  # shape (n_samples, dim)
    site_labels: np.ndarray
    norm_series: np.ndarray
    method_tag: str
    method_detail: tuple = ()

    def __post_init__(self):
        for name in ("times", "amplitudes", "norm_series", "site_labels"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return len(self.times)

    def state(self, k: int) -> StateVector:
        return StateVector(self.amplitudes[k], self.site_labels)

    def index_at_time(self, t: float) -> int:
        """Index of the sample nearest to t (t must lie inside the span)."""
        if t < self.times[0] - _TIME_EPS or t > self.times[-1] + _TIME_EPS:
            raise ValueError(f"time {t} outside trajectory span [{self.times[0]}, {self.times[-1]}]")
        return int(np.argmin(np.abs(self.times - t)))


def normalized_profile(c: StateVector) -> np.ndarray:
    """rho_n = sqrt(|c_n|^2 / S); invariant under any nonzero rescaling of c."""
    s = c.norm
    if s <= 0.0:
        raise ValueError("cannot normalize a zero-norm state")
    return np.abs(c.amplitudes) / math.sqrt(s)

def normalized_profile_matrix(traj: Trajectory) -> np.ndarray:
    """rho_n(t_k) for all samples, shape (n_samples, dim)."""
    mags = np.abs(traj.amplitudes)
    norms = np.sqrt(np.sum(mags**2, axis=1))
    if np.any(norms <= 0.0):
        raise ValueError("trajectory contains a zero-norm snapshot")
    return mags / norms[:, None]


def _sample_times(t_final: float, sample_dt: float) -> np.ndarray:
    if sample_dt <= 0.0:
        raise ValueError(f"sample_dt must be > 0, got {sample_dt}")
    if t_final < 0.0 or not math.isfinite(t_final):
        raise ValueError(f"t_final must be finite and >= 0, got {t_final}")
    n = int(math.floor(t_final / sample_dt + _TIME_EPS))
    return np.arange(n + 1) * sample_dt


def _initial_amplitudes(h, c0: StateVector) -> np.ndarray:
    if c0.amplitudes.shape != (h.dim,):
        raise ValueError(f"state dimension {c0.amplitudes.shape[0]} != operator dim {h.dim}")
    if not np.array_equal(c0.site_labels, h.site_labels):
        raise ValueError("state and operator site labels differ")
    if c0.norm <= 0.0:
        raise ValueError("initial state must have positive norm")
    return c0.amplitudes.astype(complex, copy=True)


def _finish(times, states, labels, tag, detail) -> Trajectory:
    states = np.asarray(states)
    norms = np.sum(np.abs(states) ** 2, axis=1)
    return Trajectory(
        times=np.asarray(times, dtype=float),
        amplitudes=states,
        site_labels=np.asarray(labels, dtype=int),
        norm_series=norms,
        method_tag=tag,
        method_detail=tuple(detail),
    )


class _ExactPropagator:
    """exp(-iHt) applied via eigendecomposition or expm stepping."""

    def __init__(self, h):
        self.dense = h.to_dense()
        self.dim = h.dim
        self.detail = "expm"
        self._eig = None
        if self.dim == 1:
            self.detail = "eig"
            self._eig = (np.diag(self.dense), np.eye(1, dtype=complex))
            return
        w, v = np.linalg.eig(self.dense)
        cond = np.linalg.cond(v)
        if np.isfinite(cond) and cond <= COND_LIMIT:
            self.detail = "eig"
            self._eig = (w, v)

    def states_at(self, offsets: np.ndarray, c0: np.ndarray) -> np.ndarray:
        """States exp(-iH*offset) @ c0 for ascending offsets >= 0."""
        with np.errstate(over="ignore", invalid="ignore"):
            if self._eig is not None:
                w, v = self._eig
                coeff = np.linalg.solve(v, c0)
                phases = np.exp(np.outer(offsets, -1j * w))
                out = (phases * coeff) @ v.T
                out[np.asarray(offsets) == 0.0] = c0  # exp(0) = identity, exactly
                _check_amplitudes(out)
                return out
            out = np.empty((len(offsets), self.dim), dtype=complex)
            state = c0
            prev_t = 0.0
            prev_gap = None
            step = None
            for k, t in enumerate(offsets):
                gap = t - prev_t
                if gap > 0.0:
                    if step is None or not math.isclose(gap, prev_gap, rel_tol=1e-12, abs_tol=1e-15):
                        step = scipy.linalg.expm(-1j * self.dense * gap)
                        prev_gap = gap
                    state = step @ state
                    _check_amplitudes(state)
                out[k] = state
                prev_t = t
        return out


def evolve_exact(h, c0: StateVector, t_final: float, sample_dt: float) -> Trajectory:
    """Reference propagator: snapshots are exp(-iH t_k) @ c0.

    Uses the dense eigendecomposition when the eigenvector matrix is well
    conditioned (cond <= 1e8) and scaling-and-squaring expm stepping
    otherwise; the route taken is recorded in ``method_detail``.
    """
    amps0 = _initial_amplitudes(h, c0)
    times = _sample_times(t_final, sample_dt)
    prop = _ExactPropagator(h)
    states = prop.states_at(times, amps0)
    return _finish(times, states, h.site_labels, "exact", (prop.detail,))


def _check_amplitudes(state: np.ndarray) -> None:
    peak = float(np.max(np.abs(state)))
    if not math.isfinite(peak) or peak > OVERFLOW_LIMIT:
        raise GainRunawayError(
            f"amplitude magnitude {peak!r} exceeds {OVERFLOW_LIMIT:g}; "
            "gain outruns attenuation"
        )


def _rk4_step(h, c: np.ndarray, dt: float) -> np.ndarray:
    k1 = -1j * h.matvec(c)
    k2 = -1j * h.matvec(c + (0.5 * dt) * k1)
    k3 = -1j * h.matvec(c + (0.5 * dt) * k2)
    k4 = -1j * h.matvec(c + dt * k3)
    return c + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _steps_per_sample(dt: float, sample_dt: float) -> int:
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    ratio = sample_dt / dt
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-6:
        raise ValueError(f"sample_dt={sample_dt} must be an integer multiple of dt={dt}")
    return n


def _guard_dt(dt: float, hs) -> None:
    peak = max(h.max_abs_entry for h in hs)
    if peak > 0.0 and dt > DT_SAFETY / peak:
        raise ValueError(
            f"dt={dt} exceeds stability guard {DT_SAFETY / peak:.3e} "
            f"(= {DT_SAFETY}/max|H| with max|H|={peak:g})"
        )


def evolve_rk4(h, c0: StateVector, t_final: float, dt: float, sample_dt: float) -> Trajectory:
    """Classical fixed-step RK4 integration of dc/dt = -iHc.

    Only banded matrix-vector products are used, so cost scales linearly
    with the chain length.  dt is rejected above 0.05/max|H entry|;
    amplitudes beyond 1e150 abort with GainRunawayError.
    """
    sched = Schedule((ScheduleSegment(0.0, h),))
    return _rk4_schedule(sched, c0, t_final, dt, sample_dt)


def _rk4_schedule(schedule: Schedule, c0: StateVector, t_final: float,
                  dt: float, sample_dt: float) -> Trajectory:
    hs = [s.hamiltonian for s in schedule.segments]
    _guard_dt(dt, hs)
    per_sample = _steps_per_sample(dt, sample_dt)
    amps0 = _initial_amplitudes(hs[0], c0)
    times = _sample_times(t_final, sample_dt)
    total_steps = (len(times) - 1) * per_sample
    # switch instants snapped onto the integration grid
    switch_steps = [round(s.t_start / dt) for s in schedule.segments]
    if any(b <= a for a, b in zip(switch_steps, switch_steps[1:])):
        raise ValueError("segment switch times collide on the integration grid")

    states = np.empty((len(times), len(amps0)), dtype=complex)
    states[0] = amps0
    state = amps0
    seg = 0
    sample_idx = 1
    for step in range(total_steps):
        while seg + 1 < len(hs) and step >= switch_steps[seg + 1]:
            seg += 1
        state = _rk4_step(hs[seg], state, dt)
        if (step + 1) % per_sample == 0:
            _check_amplitudes(state)
            states[sample_idx] = state
            sample_idx += 1
    return _finish(times, states, hs[0].site_labels, "rk4", ("rk4",) * len(hs))


def _exact_schedule(schedule: Schedule, c0: StateVector, t_final: float,
                    dt: float, sample_dt: float) -> Trajectory:
    hs = [s.hamiltonian for s in schedule.segments]
    amps0 = _initial_amplitudes(hs[0], c0)
    times = _sample_times(t_final, sample_dt)
    # same snapped switch times as the RK4 path, so the two agree
    snapped = [round(s.t_start / dt) * dt for s in schedule.segments]
    if any(b <= a for a, b in zip(snapped, snapped[1:])):
        raise ValueError("segment switch times collide on the integration grid")
    bounds = snapped[1:] + [math.inf]

    states = np.empty((len(times), len(amps0)), dtype=complex)
    details = []
    state = amps0
    k = 0
    for seg, (h, t0, t1) in enumerate(zip(hs, snapped, bounds)):
        prop = _ExactPropagator(h)
        details.append(prop.detail)
        seg_end = min(t1, times[-1])
        offsets = []
        while k < len(times) and (times[k] < t1 - _TIME_EPS or seg == len(hs) - 1):
            offsets.append(times[k] - t0)
            k += 1
        need_boundary = seg < len(hs) - 1
        offs = list(offsets) + ([seg_end - t0] if need_boundary else [])
        if offs:
            out = prop.states_at(np.asarray(offs), state)
            for i in range(len(offsets)):
                states[k - len(offsets) + i] = out[i]
            if need_boundary:
                state = out[-1]
        if k >= len(times) and not need_boundary:
            break
    _check_amplitudes(states[-1])
    return _finish(times, states, hs[0].site_labels, "exact", details)


def evolve_schedule(schedule: Schedule, c0: StateVector, t_final: float,
                    dt: float, sample_dt: float, method: str = "rk4") -> Trajectory:
    """Evolve under a piecewise-constant schedule.

    Each segment's operator acts on [t_start_k, t_start_{k+1}); the state is
    continuous across switches (instantaneous quench) and switch times are
    snapped onto the dt grid for both methods so they stay comparable.
    """
    if t_final < schedule.segments[-1].t_start:
        raise ValueError("t_final must not precede the last segment start")
    if method == "rk4":
        return _rk4_schedule(schedule, c0, t_final, dt, sample_dt)
    if method == "exact":
        return _exact_schedule(schedule, c0, t_final, dt, sample_dt)
    raise ValueError(f"unknown method {method!r} (use 'rk4' or 'exact')")
