"""States, observables, channels, measurement models, and multimeter programming."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    TOL_PSD,
    as_matrix,
    hermitianize,
    require_hermitian,
    tensor,
)

ATOL_TRACE = 1e-9
ATOL_COMPLETE = 1e-9     # sum of effects vs identity
ATOL_SHARP = 1e-8
NEG_MASS_TOL = 1e-9      # repairable negative eigenvalue mass in a state
PROB_CLIP = 1e-12        # outcome probabilities this far below zero are noise


@dataclass(eq=False)
class DensityState:
    """Positive unit-trace matrix.

    Tiny negative eigenvalue mass (below ``NEG_MASS_TOL``) from upstream
    arithmetic is re-projected onto the PSD cone and the trace renormalized;
    anything larger is rejected as a real bug.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = require_hermitian(self.matrix)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > ATOL_TRACE:
            raise ValueError(f"state trace {tr!r} is not 1 within {ATOL_TRACE:.1e}")
        w, v = np.linalg.eigh(hermitianize(m))
        neg_mass = float(-np.sum(w[w < 0.0]))
        if neg_mass > NEG_MASS_TOL:
            raise ValueError(f"state has negative eigenvalue mass {neg_mass:.3e}")
        if neg_mass > 0.0:
            w = np.clip(w, 0.0, None)
            m = (v * w) @ v.conj().T
            m = hermitianize(m / float(np.trace(m).real))
        self.matrix = m

    @classmethod
    def from_vector(cls, psi) -> "DensityState":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise ValueError("cannot build a state from the zero vector")
        v = v / n
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityState":
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def transpose(self) -> "DensityState":
        """Transpose in the fixed computational basis (still a valid state)."""
        return DensityState(self.matrix.T.copy())


@dataclass(eq=False)
class Observable:
    """Finite outcome-labelled POVM: positive effects summing to the identity."""

    effects: list
    outcomes: list = None
    atol_complete: float = ATOL_COMPLETE

    def __post_init__(self):
        self.effects = [as_matrix(e) for e in self.effects]
        if not self.effects:
            raise ValueError("observable needs at least one effect")
        d = self.effects[0].shape[0]
        for e in self.effects:
            if e.shape != (d, d):
                raise ValueError("effects must be square matrices of equal dimension")
            require_hermitian(e)
            low = float(np.linalg.eigvalsh(hermitianize(e))[0])
            if low < -TOL_PSD:
                raise ValueError(f"effect has eigenvalue {low:.3e} below -{TOL_PSD:.1e}")
        total = sum(self.effects)
        defect = float(np.max(np.abs(total - np.eye(d))))
        if defect > self.atol_complete:
            raise ValueError(
                f"effects sum to identity only within {defect:.3e} > {self.atol_complete:.1e}"
            )
        if self.outcomes is None:
            self.outcomes = [str(i) for i in range(len(self.effects))]
        self.outcomes = [str(x) for x in self.outcomes]
        if len(self.outcomes) != len(self.effects):
            raise ValueError("one outcome label per effect required")

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def is_sharp(self, tol: float = ATOL_SHARP) -> bool:
        return all(float(np.max(np.abs(e @ e - e))) <= tol for e in self.effects)

    def conjugated(self, u) -> "Observable":
        """Observable with effects U† E(x) U (same outcome labels)."""
        u = as_matrix(u)
        return Observable(
            [u.conj().T @ e @ u for e in self.effects],
            outcomes=list(self.outcomes),
            atol_complete=self.atol_complete,
        )

    def allclose(self, other: "Observable", atol: float = 1e-9) -> bool:
        if self.n_outcomes != other.n_outcomes or self.dim != other.dim:
            return False
        return all(
            np.allclose(a, b, atol=atol, rtol=0.0)
            for a, b in zip(self.effects, other.effects)
        )


def trivial_observable(dim: int, n_outcomes: int = 1) -> Observable:
    eye = np.eye(dim, dtype=complex)
    return Observable([eye / n_outcomes] * n_outcomes)


@dataclass(eq=False)
class QuantumChannel:
    """Completely positive trace-preserving map in Kraus form."""

    kraus: list

    def __post_init__(self):
        self.kraus = [as_matrix(k) for k in self.kraus]
        if not self.kraus:
            raise ValueError("channel needs at least one Kraus operator")
        shape = self.kraus[0].shape
        for k in self.kraus:
            if k.shape != shape:
                raise ValueError("Kraus operators must share a common shape")
        total = sum(k.conj().T @ k for k in self.kraus)
        defect = float(np.max(np.abs(total - np.eye(self.in_dim))))
        if defect > ATOL_COMPLETE:
            raise ValueError(f"channel is not trace preserving: defect {defect:.3e}")

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def dual_matrix(self, b: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action on an operator: sum of K† B K."""
        return sum(k.conj().T @ b @ k for k in self.kraus)

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls([np.eye(dim, dtype=complex)])

    @classmethod
    def unitary(cls, u) -> "QuantumChannel":
        u = as_matrix(u)
        if float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) > 1e-10:
            raise ValueError("matrix is not unitary")
        return cls([u])


def apply_channel(channel: QuantumChannel, rho: DensityState) -> DensityState:
    if rho.dim != channel.in_dim:
        raise ValueError(f"state dim {rho.dim} != channel input dim {channel.in_dim}")
    return DensityState(channel.apply_matrix(rho.matrix))


def dual_apply(channel: QuantumChannel, e: Observable) -> Observable:
    """Pull an observable back through a channel (Heisenberg picture)."""
    if e.dim != channel.out_dim:
        raise ValueError(f"observable dim {e.dim} != channel output dim {channel.out_dim}")
    return Observable(
        [hermitianize(channel.dual_matrix(eff)) for eff in e.effects],
        outcomes=list(e.outcomes),
    )


def stinespring_dilation(channel: QuantumChannel) -> tuple[np.ndarray, int]:
    """Unitary dilation of a square channel.

    Returns ``(u, anc_dim)`` with ``anc_dim`` = number of Kraus operators,
    such that the channel equals rho -> tr_anc[u (rho x |0><0|) u†] on the
    system-first ordering (system x ancilla).
    """
    if channel.in_dim != channel.out_dim:
        raise ValueError("dilation implemented for square channels only")
    d = channel.in_dim
    r = len(channel.kraus)
    iso = np.zeros((d * r, d), dtype=complex)
    for i, k in enumerate(channel.kraus):
        # column j of iso = sum_i (K_i e_j) x e_i
        iso[i::r, :] += k
    u = np.zeros((d * r, d * r), dtype=complex)
    u[:, 0::r] = iso
    if r > 1:
        # complete the isometry columns to a unitary with the orthogonal
        # complement of their span
        q = np.linalg.qr(iso, mode="complete")[0]
        comp = q[:, d:]
        cols = [j for j in range(d * r) if j % r != 0]
        u[:, cols] = comp
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(d * r))))
    if defect > 1e-10:
        raise ValueError(f"dilation failed to produce a unitary (defect {defect:.3e})")
    return u, r


def outcome_distribution(e: Observable, rho: DensityState) -> np.ndarray:
    """Outcome probabilities tr[E(x) rho] as a clipped, normalized vector."""
    if e.dim != rho.dim:
        raise ValueError(f"observable dim {e.dim} != state dim {rho.dim}")
    p = np.array([float(np.trace(eff @ rho.matrix).real) for eff in e.effects])
    low = p.min() if p.size else 0.0
    if low < -PROB_CLIP:
        raise ValueError(f"probability {low:.3e} below -{PROB_CLIP:.1e}; broken inputs")
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {s!r}, not 1")
    return p


_REL_RANK_CLIP = 1e-12


def _state_root(m: np.ndarray) -> np.ndarray:
    # relative clip decides the numerical rank; without it, sqrt of noise
    # eigenvalues (~1e-16) pollutes rank-deficient states at the 1e-8 level
    w, v = np.linalg.eigh(hermitianize(m))
    w = np.clip(w, 0.0, None)
    if w.size:
        w[w < w.max() * _REL_RANK_CLIP] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho1: DensityState, rho2: DensityState) -> float:
    """State fidelity tr sqrt(sqrt(rho1) rho2 sqrt(rho1)), in [0, 1].

    Evaluated as the trace norm of the product of the two state roots, which
    is the same quantity with far better behavior on pure states.
    """
    if rho1.dim != rho2.dim:
        raise ValueError("states must share a dimension")
    prod = _state_root(rho1.matrix) @ _state_root(rho2.matrix)
    val = float(np.linalg.svd(prod, compute_uv=False).sum())
    return min(max(val, 0.0), 1.0)


def pure_fidelity(psi1: np.ndarray, psi2: np.ndarray) -> float:
    """|<psi1|psi2>| for unit vectors; equals fidelity of the projectors."""
    return float(abs(np.vdot(psi1, psi2)))


@dataclass(eq=False)
class Multimeter:
    """Programmable device: probe space, pointer observable, interaction channel.

    The probe state is left free; supplying one (see ``program``) turns the
    device into a measurement model realizing an observable on the system.
    """

    probe_dim: int
    pointer: Observable
    interaction: QuantumChannel

    def __post_init__(self):
        if self.pointer.dim != self.probe_dim:
            raise ValueError("pointer must act on the probe space")
        if self.interaction.in_dim != self.interaction.out_dim:
            raise ValueError("interaction must preserve the system x probe space")
        if self.interaction.in_dim % self.probe_dim != 0:
            raise ValueError("interaction dimension is not a multiple of probe_dim")
        self._dual_pointer = None

    @property
    def system_dim(self) -> int:
        return self.interaction.in_dim // self.probe_dim

    def dual_pointer_effects(self) -> list:
        """Pointer effects pulled back through the interaction, cached.

        These depend only on the device, so repeated programming reuses them.
        """
        if self._dual_pointer is None:
            eye = np.eye(self.system_dim, dtype=complex)
            self._dual_pointer = [
                self.interaction.dual_matrix(tensor(eye, z)) for z in self.pointer.effects
            ]
        return self._dual_pointer


@dataclass(eq=False)
class MeasurementModel:
    """A multimeter together with its initial probe state."""

    multimeter: Multimeter
    probe_state: DensityState

    def __post_init__(self):
        if self.probe_state.dim != self.multimeter.probe_dim:
            raise ValueError(
                f"probe state dim {self.probe_state.dim} != probe dim {self.multimeter.probe_dim}"
            )

    @property
    def probe_dim(self) -> int:
        return self.multimeter.probe_dim

    @property
    def pointer(self) -> Observable:
        return self.multimeter.pointer

    @property
    def interaction(self) -> QuantumChannel:
        return self.multimeter.interaction


def induced_observable(model: MeasurementModel) -> Observable:
    """Observable realized on the system by a measurement model.

    Effects are tr_probe of (dual interaction of 1 x Z(x)) composed with
    1 x probe state; a completeness defect beyond 1e-8 signals a broken
    interaction channel.
    """
    mm = model.multimeter
    d_sys, d_probe = mm.system_dim, mm.probe_dim
    xi = model.probe_state.matrix
    effects = []
    for dual in mm.dual_pointer_effects():
        d4 = dual.reshape(d_sys, d_probe, d_sys, d_probe)
        eff = np.einsum("ikml,lk->im", d4, xi)
        effects.append(hermitianize(eff))
    return Observable(effects, outcomes=list(mm.pointer.outcomes), atol_complete=1e-8)


def program(multimeter: Multimeter, xi: DensityState) -> Observable:
    """Program a multimeter by inserting a probe state."""
    return induced_observable(MeasurementModel(multimeter, xi))
