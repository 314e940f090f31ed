"""Lattice parameterizations and banded Hamiltonian builders.

Models one-dimensional tight-binding chains whose nearest-neighbour
couplings are complex, ``kappa + i*beta*exp(+/- i*phi)``, so the imaginary
part of the dispersion relation can be steered by the phase ``phi`` while
the real part (and hence the group velocity) stays fixed.  Also covered:
the quasi-1D sawtooth two-sublattice model that realizes those couplings
physically, the heterogeneous capture structure (two phase-opposed
non-Hermitian leads around a finite Hermitian segment with boundary
defects ``V_c + i*xi``), and the adiabatic elimination of the far-detuned
auxiliary sublattice.

Convention throughout::

    i dc/dt = H c

with row n of H holding the coefficients of the evolution equation of
site n.  All builders are pure functions of their specs; every value is
immutable after construction and safe to share between workers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DefectSpec",
    "ChainSpec",
    "SawtoothSpec",
    "SandwichSpec",
    "Hamiltonian",
    "BandedOperator",
    "ReducedChain",
    "build_chain_hamiltonian",
    "build_sawtooth_hamiltonian",
    "build_sandwich_hamiltonian",
    "dispersion",
    "group_velocity",
    "adiabatic_reduce",
    "reduce_phase",
]

#: adiabaticity_ratio above this value flags the reduction as unreliable
ADIABATICITY_WARN_THRESHOLD = 0.2


def reduce_phase(phi: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi!r}")
    r = math.remainder(phi, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class DefectSpec:
    """On-site defect: real potential plus imaginary offset (positive = gain)."""

    site: int
    v_real: float = 0.0
    xi_imag: float = 0.0

    def __post_init__(self):
        _require_finite("v_real", self.v_real)
        _require_finite("xi_imag", self.xi_imag)


@dataclass(frozen=True)
class ChainSpec:
    """Homogeneous chain with complex hoppings kappa + i*beta*e^{+/-i*phi}.

    Sites are labeled ``index_origin .. index_origin + n_sites - 1``.
    ``gamma`` is the uniform on-site loss (may be negative for net gain);
    defects add ``v_real + i*xi_imag`` to the diagonal of their site.
    """

    kappa: float
    beta: float
    gamma: float
    phi: float
    n_sites: int
    index_origin: int = 0
    boundary: str = "open"
    defects: tuple = ()

    def __post_init__(self):
        for name in ("kappa", "beta", "gamma"):
            _require_finite(name, getattr(self, name))
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        object.__setattr__(self, "phi", reduce_phase(self.phi))
        object.__setattr__(self, "defects", tuple(self.defects))
        lo, hi = self.site_range
        seen = set()
        for d in self.defects:
            if not isinstance(d, DefectSpec):
                raise TypeError("defects must be DefectSpec instances")
            if not (lo <= d.site <= hi):
                raise ValueError(f"defect site {d.site} outside site range [{lo}, {hi}]")
            if d.site in seen:
                raise ValueError(f"duplicate defect site {d.site}")
            seen.add(d.site)

    @property
    def site_range(self) -> tuple:
        return (self.index_origin, self.index_origin + self.n_sites - 1)

    @property
    def site_labels(self) -> np.ndarray:
        return np.arange(self.index_origin, self.index_origin + self.n_sites)

    @property
    def is_purely_dissipative(self) -> bool:
        """True when no Bloch mode is net-amplified (gamma >= 2*beta)."""
        return self.gamma >= 2.0 * self.beta


@dataclass(frozen=True)
class SawtoothSpec:
    """Two-sublattice sawtooth model: main chain A, auxiliary sites B.

    Row a_n carries diagonal ``v_a[n] - i*gamma_a``, couplings ``kappa`` to
    a_{n+/-1}, ``j*e^{i*theta}`` to b_n and ``j*e^{-i*theta}`` to b_{n-1};
    row b_n carries diagonal ``u_b``, couplings ``j*e^{i*theta}`` to a_{n+1}
    and ``j*e^{-i*theta}`` to a_n.  Both sublattices have ``n_cells`` sites;
    couplings to missing neighbours at the open ends are dropped.
    """

    kappa: float
    j: float
    theta: float
    gamma_a: float
    u_b: complex
    n_cells: int
    v_a: tuple = None

    def __post_init__(self):
        for name in ("kappa", "j", "theta", "gamma_a"):
            _require_finite(name, getattr(self, name))
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.j <= 0:
            raise ValueError(f"j must be > 0, got {self.j}")
        if self.gamma_a < 0:
            raise ValueError(f"gamma_a must be >= 0, got {self.gamma_a}")
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be positive, got {self.n_cells}")
        u_b = complex(self.u_b)
        if not (math.isfinite(u_b.real) and math.isfinite(u_b.imag)):
            raise ValueError(f"u_b must be finite, got {u_b!r}")
        if abs(u_b) == 0.0:
            raise ValueError("u_b must be nonzero")
        object.__setattr__(self, "u_b", u_b)
        v_a = self.v_a
        if v_a is None:
            v_a = (0.0,) * self.n_cells
        v_a = tuple(float(v) for v in v_a)
        if len(v_a) != self.n_cells:
            raise ValueError(f"v_a must have length n_cells={self.n_cells}, got {len(v_a)}")
        for v in v_a:
            _require_finite("v_a entry", v)
        object.__setattr__(self, "v_a", v_a)

    @property
    def adiabaticity_ratio(self) -> float:
        """max(j, 2*kappa) / |u_b|; must be << 1 for the reduction to hold."""
        return max(self.j, 2.0 * self.kappa) / abs(self.u_b)


@dataclass(frozen=True)
class SandwichSpec:
    """Capture structure: NH lead | boundary | Hermitian core | boundary | NH lead.

    The Hermitian core occupies ``-n_half < n < n_half``; the boundary sites
    at ``n = +/-n_half`` carry ``v_c + i*xi``.  The left lead uses hoppings
    for phase ``-q0`` so a packet with central wave number ``q0`` enters
    losslessly, the right lead uses the opposite phase so transmission out
    of the core is evanescent.  Only kappa, beta, gamma and the site range
    are read from ``chain``; its own phi/defects are not consulted.
    """

    chain: ChainSpec
    n_half: int
    q0: float
    v_c: float
    xi: float

    def __post_init__(self):
        if self.n_half < 1:
            raise ValueError(f"n_half must be a positive integer, got {self.n_half}")
        _require_finite("v_c", self.v_c)
        _require_finite("xi", self.xi)
        object.__setattr__(self, "q0", reduce_phase(self.q0))
        if self.chain.boundary != "open":
            raise ValueError("sandwich structure requires an open-boundary chain")
        lo, hi = self.chain.site_range
        if not (lo < -self.n_half and hi > self.n_half):
            raise ValueError(
                f"site range [{lo}, {hi}] must strictly contain [-{self.n_half}, {self.n_half}]"
            )


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Tridiagonal complex operator with optional periodic wrap entries.

    ``upper[k]`` couples row k to column k+1, ``lower[k]`` couples row k+1
    to column k.  ``corner_upper`` is the top-right dense entry (row 0,
    column dim-1) and ``corner_lower`` the bottom-left one.
    """

    dim: int
    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    site_labels: np.ndarray
    corner_upper: complex = None
    corner_lower: complex = None

    def __post_init__(self):
        diag = np.ascontiguousarray(self.diag, dtype=complex)
        upper = np.ascontiguousarray(self.upper, dtype=complex)
        lower = np.ascontiguousarray(self.lower, dtype=complex)
        labels = np.ascontiguousarray(self.site_labels, dtype=int)
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if diag.shape != (self.dim,):
            raise ValueError(f"diag must have length {self.dim}")
        if upper.shape != (self.dim - 1,) or lower.shape != (self.dim - 1,):
            raise ValueError(f"upper/lower must have length {self.dim - 1}")
        if labels.shape != (self.dim,):
            raise ValueError(f"site_labels must have length {self.dim}")
        for arr in (diag, upper, lower):
            if arr.size and not np.all(np.isfinite(arr)):
                raise ValueError("Hamiltonian entries must be finite")
        if (self.corner_upper is None) != (self.corner_lower is None):
            raise ValueError("corner entries must be given together or not at all")
        if self.corner_upper is not None:
            cu, cl = complex(self.corner_upper), complex(self.corner_lower)
            if not all(math.isfinite(x) for x in (cu.real, cu.imag, cl.real, cl.imag)):
                raise ValueError("corner entries must be finite")
            object.__setattr__(self, "corner_upper", cu)
            object.__setattr__(self, "corner_lower", cl)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "site_labels", labels)
        diag.setflags(write=False)
        upper.setflags(write=False)
        lower.setflags(write=False)
        labels.setflags(write=False)

    @property
    def is_hermitian(self) -> bool:
        ok = bool(np.all(self.diag.imag == 0.0))
        ok = ok and np.array_equal(self.lower, np.conj(self.upper))
        if self.corner_upper is not None:
            ok = ok and self.corner_lower == self.corner_upper.conjugate()
        return ok

    @property
    def max_abs_entry(self) -> float:
        best = float(np.max(np.abs(self.diag)))
        if self.dim > 1:
            best = max(best, float(np.max(np.abs(self.upper))), float(np.max(np.abs(self.lower))))
        if self.corner_upper is not None:
            best = max(best, abs(self.corner_upper), abs(self.corner_lower))
        return best

    def matvec(self, c: np.ndarray) -> np.ndarray:
        out = self.diag * c
        if self.dim > 1:
            out[:-1] += self.upper * c[1:]
            out[1:] += self.lower * c[:-1]
        if self.corner_upper is not None:
            out[0] += self.corner_upper * c[-1]
            out[-1] += self.corner_lower * c[0]
        return out

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        np.fill_diagonal(h, self.diag)
        idx = np.arange(self.dim - 1)
        h[idx, idx + 1] = self.upper
        h[idx + 1, idx] = self.lower
        if self.corner_upper is not None:
            h[0, -1] += self.corner_upper
            h[-1, 0] += self.corner_lower
        return h


@dataclass(frozen=True, eq=False)
class BandedOperator:
    """General banded complex operator: band ``k`` stores H[i, i+k]."""

    dim: int
    offsets: tuple
    bands: tuple
    site_labels: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        offsets = tuple(int(k) for k in self.offsets)
        if len(set(offsets)) != len(offsets):
            raise ValueError("offsets must be distinct")
        bands = []
        for k, band in zip(offsets, self.bands, strict=True):
            band = np.ascontiguousarray(band, dtype=complex)
            if band.shape != (self.dim - abs(k),):
                raise ValueError(f"band for offset {k} must have length {self.dim - abs(k)}")
            if band.size and not np.all(np.isfinite(band)):
                raise ValueError("operator entries must be finite")
            band.setflags(write=False)
            bands.append(band)
        labels = np.ascontiguousarray(self.site_labels, dtype=int)
        if labels.shape != (self.dim,):
            raise ValueError(f"site_labels must have length {self.dim}")
        labels.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "bands", tuple(bands))
        object.__setattr__(self, "site_labels", labels)

    @property
    def is_hermitian(self) -> bool:
        h = self.to_dense()
        return np.array_equal(h, h.conj().T)

    @property
    def max_abs_entry(self) -> float:
        return max(float(np.max(np.abs(b))) if b.size else 0.0 for b in self.bands)

    def matvec(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros_like(c)
        for k, band in zip(self.offsets, self.bands):
            if k >= 0:
                out[: self.dim - k] += band * c[k:]
            else:
                out[-k:] += band * c[: self.dim + k]
        return out

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for k, band in zip(self.offsets, self.bands):
            if k >= 0:
                idx = np.arange(self.dim - k)
                h[idx, idx + k] = band
            else:
                idx = np.arange(-k, self.dim)
                h[idx, idx + k] = band
        return h


def build_chain_hamiltonian(spec: ChainSpec) -> Hamiltonian:
    """Assemble the homogeneous chain operator.

    diag[n] = -i*gamma + v_real(n) + i*xi_imag(n),
    H[n, n+1] = kappa + i*beta*e^{+i*phi},
    H[n+1, n] = kappa + i*beta*e^{-i*phi},
    with the same convention continued around the wrap for periodic chains.
    """
    n = spec.n_sites
    hop_up = spec.kappa + 1j * spec.beta * cmath.exp(1j * spec.phi)
    hop_dn = spec.kappa + 1j * spec.beta * cmath.exp(-1j * spec.phi)
    diag = np.full(n, -1j * spec.gamma, dtype=complex)
    for d in spec.defects:
        diag[d.site - spec.index_origin] += d.v_real + 1j * d.xi_imag
    upper = np.full(n - 1, hop_up, dtype=complex)
    lower = np.full(n - 1, hop_dn, dtype=complex)
    corner_upper = corner_lower = None
    if spec.boundary == "periodic":
        if n < 3:
            raise ValueError("periodic chains need n_sites >= 3 (a 2-ring double-couples one pair)")
        corner_upper = hop_dn  # row 0 to its wrapped left neighbour
        corner_lower = hop_up  # last row to its wrapped right neighbour
    return Hamiltonian(
        dim=n,
        diag=diag,
        upper=upper,
        lower=lower,
        site_labels=spec.site_labels,
        corner_upper=corner_upper,
        corner_lower=corner_lower,
    )


def build_sawtooth_hamiltonian(spec: SawtoothSpec) -> BandedOperator:
    """Assemble the two-sublattice operator on the interleaved basis.

    State ordering is (a_1, b_1, a_2, b_2, ...), which keeps the bandwidth
    at 2: the a-a couplings sit on offsets +/-2 (zero on b rows) and every
    offset +/-1 entry is j*e^{+/-i*theta}.
    """
    m = spec.n_cells
    if m < 2:
        raise ValueError(f"n_cells must be >= 2, got {m}")
    dim = 2 * m
    phase = cmath.exp(1j * spec.theta)
    diag = np.empty(dim, dtype=complex)
    diag[0::2] = np.asarray(spec.v_a, dtype=complex) - 1j * spec.gamma_a
    diag[1::2] = spec.u_b
    band_p1 = np.full(dim - 1, spec.j * phase, dtype=complex)
    band_m1 = np.full(dim - 1, spec.j * phase.conjugate(), dtype=complex)
    band_p2 = np.zeros(dim - 2, dtype=complex)
    band_p2[0::2] = spec.kappa  # a_n -> a_{n+1}; b rows have no second-neighbour coupling
    band_m2 = np.zeros(dim - 2, dtype=complex)
    band_m2[0::2] = spec.kappa
    return BandedOperator(
        dim=dim,
        offsets=(-2, -1, 0, 1, 2),
        bands=(band_m2, band_m1, diag, band_p1, band_p2),
        site_labels=np.arange(dim),
    )


def build_sandwich_hamiltonian(spec: SandwichSpec) -> Hamiltonian:
    """Assemble the five-region capture operator.

    Outer rows carry -i*gamma with phase -q0 hoppings on the left lead and
    +q0 on the right; boundary rows at +/-n_half carry v_c + i*xi with the
    mixed hoppings (plain kappa toward the core); core rows are Hermitian.
    """
    ch = spec.chain
    n_half = spec.n_half
    hop_q_plus = ch.kappa + 1j * ch.beta * cmath.exp(1j * spec.q0)
    hop_q_minus = ch.kappa + 1j * ch.beta * cmath.exp(-1j * spec.q0)
    kap = complex(ch.kappa)

    def row(n: int) -> tuple:
        # (diagonal, coefficient of c_{n+1}, coefficient of c_{n-1})
        if n < -n_half:
            return (-1j * ch.gamma, hop_q_minus, hop_q_plus)
        if n == -n_half:
            return (spec.v_c + 1j * spec.xi, kap, hop_q_plus)
        if n < n_half:
            return (0j, kap, kap)
        if n == n_half:
            return (spec.v_c + 1j * spec.xi, hop_q_plus, kap)
        return (-1j * ch.gamma, hop_q_plus, hop_q_minus)

    labels = ch.site_labels
    dim = ch.n_sites
    diag = np.empty(dim, dtype=complex)
    upper = np.empty(dim - 1, dtype=complex)
    lower = np.empty(dim - 1, dtype=complex)
    for i, n in enumerate(labels):
        d, to_next, to_prev = row(int(n))
        diag[i] = d
        if i < dim - 1:
            upper[i] = to_next
        if i > 0:
            lower[i - 1] = to_prev
    return Hamiltonian(dim=dim, diag=diag, upper=upper, lower=lower, site_labels=labels)


def dispersion(kappa: float, beta: float, gamma: float, phi: float, q):
    """Bloch-band energy 2*kappa*cos(q) + 2i*beta*cos(q+phi) - i*gamma."""
    q = np.asarray(q)
    e = 2.0 * kappa * np.cos(q) + 2.0j * beta * np.cos(q + phi) - 1j * gamma
    return complex(e) if e.ndim == 0 else e


def group_velocity(kappa: float, q):
    """Packet transport speed -2*kappa*sin(q); independent of beta, gamma, phi."""
    q = np.asarray(q)
    v = -2.0 * kappa * np.sin(q)
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class ReducedChain:
    """Effective chain produced by eliminating the auxiliary sublattice.

    ``j1``/``j2`` are the forward/backward effective hoppings and ``u_eff``
    the per-site effective potential.  ``adiabaticity_warning`` is the
    machine-readable flag for max(j, 2*kappa)/|u_b| > 0.2.
    """

    kappa: float
    j1: complex
    j2: complex
    u_eff: tuple
    n_sites: int
    adiabaticity_ratio: float
    adiabaticity_warning: bool

    def to_chain_spec(self, index_origin: int = 0, boundary: str = "open",
                      atol: float = 1e-12) -> ChainSpec:
        """Map onto a ChainSpec with hoppings kappa + i*beta*e^{+/-i*phi}.

        Only possible when the hopping asymmetry has that exact form (the
        u_b = i*j^2/beta working point); otherwise raises ValueError.
        """
        d1 = self.j1 - self.kappa
        d2 = self.j2 - self.kappa
        beta = abs(d1)
        if beta == 0.0:
            phi = 0.0
            if abs(d2) > atol:
                raise ValueError("hoppings do not have the kappa + i*beta*e^{+/-i*phi} form")
        else:
            phi = cmath.phase(d1 / (1j * beta))
            if abs(d2 - 1j * beta * cmath.exp(-1j * phi)) > atol * max(1.0, abs(d2)):
                raise ValueError("hoppings do not have the kappa + i*beta*e^{+/-i*phi} form")
        u = np.asarray(self.u_eff, dtype=complex)
        u0 = complex(u[0])
        scale = max(1.0, abs(u0))
        if np.max(np.abs(u - u0)) > atol * scale:
            raise ValueError("effective potential is not uniform; no ChainSpec equivalent")
        if abs(u0.real) > atol * scale:
            raise ValueError("effective potential has a real part; no ChainSpec equivalent")
        return ChainSpec(
            kappa=self.kappa,
            beta=beta,
            gamma=-u0.imag,
            phi=phi,
            n_sites=self.n_sites,
            index_origin=index_origin,
            boundary=boundary,
        )


def adiabatic_reduce(spec: SawtoothSpec) -> ReducedChain:
    """Eliminate the auxiliary sublattice, slaving b_n to its a neighbours.

    j1 = kappa - j^2*e^{+2i*theta}/u_b, j2 = kappa - j^2*e^{-2i*theta}/u_b,
    u_eff[n] = v_a[n] - i*gamma_a - 2*j^2/u_b.  At u_b = i*j^2/beta this is
    the chain with phi = 2*theta and gamma = gamma_a - 2*beta.
    """
    j_sq = spec.j * spec.j
    j1 = spec.kappa - j_sq * cmath.exp(2j * spec.theta) / spec.u_b
    j2 = spec.kappa - j_sq * cmath.exp(-2j * spec.theta) / spec.u_b
    shift = 2.0 * j_sq / spec.u_b
    u_eff = tuple(v - 1j * spec.gamma_a - shift for v in spec.v_a)
    ratio = spec.adiabaticity_ratio
    return ReducedChain(
        kappa=spec.kappa,
        j1=j1,
        j2=j2,
        u_eff=u_eff,
        n_sites=spec.n_cells,
        adiabaticity_ratio=ratio,
        adiabaticity_warning=ratio > ADIABATICITY_WARN_THRESHOLD,
    )
