"""Finite groups, projective representations, covariant observables, and the
coset method for sharpening them into projective measurements."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .linalg import as_matrix, hermitianize, tensor
from .postprocessing import PostProcessing
from .quantum import DensityState, Multimeter, Observable, QuantumChannel

UNITARY_TOL = 1e-10
MULTIPLIER_TOL = 1e-9
EIGVEC_INVARIANCE_TOL = 1e-9
DEGENERACY_TOL = 1e-8

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(eq=False)
class FiniteGroup:
    """Finite group as an element-name list plus a multiplication index table."""

    names: list
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=int)
        n = len(self.names)
        if t.shape != (n, n):
            raise ValueError(f"table shape {t.shape} does not match {n} elements")
        ar = np.arange(n)
        if not np.all(np.sort(t, axis=1) == ar[None, :]):
            raise ValueError("multiplication table rows are not permutations")
        if not np.all(np.sort(t, axis=0) == ar[:, None]):
            raise ValueError("multiplication table columns are not permutations")
        # associativity, checked exhaustively (vectorized, fine for order <= ~200)
        left = t[t]                                   # left[a, b, c] = t[t[a, b], c]
        right = t[:, t.reshape(-1)].reshape(n, n, n)  # right[a, b, c] = t[a, t[b, c]]
        if not np.array_equal(left, right):
            raise ValueError("multiplication table is not associative")
        idn = [g for g in range(n) if np.array_equal(t[g], ar) and np.array_equal(t[:, g], ar)]
        if len(idn) != 1:
            raise ValueError("table does not have a unique identity")
        self.table = t
        self.identity = idn[0]
        inv = np.empty(n, dtype=int)
        for g in range(n):
            hits = np.nonzero(t[g] == self.identity)[0]
            if hits.size != 1 or t[hits[0], g] != self.identity:
                raise ValueError(f"element {self.names[g]} lacks a two-sided inverse")
            inv[g] = hits[0]
        self.inverse = inv

    @property
    def order(self) -> int:
        return len(self.names)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def power(self, g: int, k: int) -> int:
        out = self.identity
        for _ in range(k):
            out = self.mul(out, g)
        return out

    def element_order(self, g: int) -> int:
        out, k = g, 1
        while out != self.identity:
            out = self.mul(out, g)
            k += 1
        return k


@dataclass(eq=False)
class CyclicSubgroup:
    """Cyclic subgroup recorded as its generator and the cycle of its powers."""

    group: FiniteGroup
    generator: int

    def __post_init__(self):
        elems = [self.group.identity]
        g = self.generator
        while g != self.group.identity:
            elems.append(g)
            g = self.group.mul(g, self.generator)
        self.elements = tuple(elems)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_set(self) -> frozenset:
        return frozenset(self.elements)


def cyclic_subgroups(group: FiniteGroup, n: int) -> list:
    """All distinct cyclic subgroups of order ``n``, deduplicated as element sets."""
    found = {}
    for g in range(group.order):
        if group.element_order(g) == n:
            sub = CyclicSubgroup(group, g)
            key = sub.element_set()
            if key not in found:
                found[key] = sub
    if n == 1:
        found.setdefault(frozenset({group.identity}), CyclicSubgroup(group, group.identity))
    return sorted(found.values(), key=lambda s: s.generator)


def _require_subgroup(group: FiniteGroup, sub: CyclicSubgroup):
    elems = set(sub.elements)
    if sub.group is not group and not np.array_equal(sub.group.table, group.table):
        raise ValueError("subgroup belongs to a different group")
    for a in elems:
        for b in elems:
            if group.mul(a, b) not in elems:
                raise ValueError("subgroup elements are not closed under the group product")


def left_cosets(group: FiniteGroup, sub: CyclicSubgroup) -> list:
    """Partition of element indices into left cosets of ``sub``.

    The coset containing the identity comes first; every coset is sorted and
    represented by its smallest element index.
    """
    _require_subgroup(group, sub)
    h = list(sub.elements)
    cosets = []
    seen = set()
    first = sorted(group.mul(group.identity, x) for x in h)
    cosets.append(first)
    seen.update(first)
    for g in range(group.order):
        if g in seen:
            continue
        coset = sorted(group.mul(g, x) for x in h)
        cosets.append(coset)
        seen.update(coset)
    return cosets


def coset_postprocessing(group: FiniteGroup, sub: CyclicSubgroup) -> PostProcessing:
    """Deterministic kernel merging group-labelled outcomes by left coset."""
    cosets = left_cosets(group, sub)
    kernel = np.zeros((group.order, len(cosets)))
    labels = []
    for j, coset in enumerate(cosets):
        labels.append(group.names[coset[0]])
        for g in coset:
            kernel[g, j] = 1.0
    return PostProcessing(kernel, out_labels=labels)


@dataclass(eq=False)
class ProjectiveRepresentation:
    """One unitary per group element, homomorphic up to a unit-modulus multiplier."""

    group: FiniteGroup
    matrices: list

    def __post_init__(self):
        mats = [as_matrix(u) for u in self.matrices]
        if len(mats) != self.group.order:
            raise ValueError("one matrix per group element required")
        d = mats[0].shape[0]
        eye = np.eye(d)
        for u in mats:
            if u.shape != (d, d):
                raise ValueError("representation matrices must share a dimension")
            if float(np.max(np.abs(u.conj().T @ u - eye))) > UNITARY_TOL:
                raise ValueError("representation matrix is not unitary")
        u = np.stack(mats)
        prod = np.einsum("gab,hbc->ghac", u, u)
        target = u[self.group.table]
        mu = np.einsum("ghab,ghab->gh", prod, target.conj()) / d
        if float(np.max(np.abs(np.abs(mu) - 1.0))) > MULTIPLIER_TOL:
            raise ValueError("multiplier is not unit modulus; not a projective representation")
        defect = float(np.max(np.abs(prod - mu[:, :, None, None] * target)))
        if defect > MULTIPLIER_TOL:
            raise ValueError(f"products deviate from the group law by {defect:.3e}")
        self.matrices = mats
        self.multiplier = mu

    @property
    def degree(self) -> int:
        return self.matrices[0].shape[0]

    def unitary(self, g: int) -> np.ndarray:
        return self.matrices[g]


def covariant_observable(rep: ProjectiveRepresentation, seed: DensityState) -> Observable:
    """Group-covariant POVM with effects (d/#G) U(g) seed U(g)†.

    Completeness of the effect family is exactly the operational consequence
    of irreducibility, so a normalization failure is reported as such.
    """
    d, n = rep.degree, rep.group.order
    if seed.dim != d:
        raise ValueError(f"seed dim {seed.dim} != representation degree {d}")
    effects = [
        hermitianize((d / n) * u @ seed.matrix @ u.conj().T) for u in rep.matrices
    ]
    try:
        return Observable(effects, outcomes=list(rep.group.names))
    except ValueError as exc:
        raise ValueError(
            f"covariant effects do not form an observable ({exc}); "
            "the representation is likely not irreducible"
        ) from exc


# ---------------------------------------------------------------------------
# fixtures


def _q8_data():
    axes = ["1", "i", "j", "k"]
    # products of the unit quaternions as (axis, sign)
    basic = {
        ("1", "1"): ("1", 1),
        ("1", "i"): ("i", 1), ("i", "1"): ("i", 1),
        ("1", "j"): ("j", 1), ("j", "1"): ("j", 1),
        ("1", "k"): ("k", 1), ("k", "1"): ("k", 1),
        ("i", "i"): ("1", -1), ("j", "j"): ("1", -1), ("k", "k"): ("1", -1),
        ("i", "j"): ("k", 1), ("j", "i"): ("k", -1),
        ("j", "k"): ("i", 1), ("k", "j"): ("i", -1),
        ("k", "i"): ("j", 1), ("i", "k"): ("j", -1),
    }
    names = []
    for a in axes:
        names.append(a)
        names.append("-" + a)
    index = {nm: i for i, nm in enumerate(names)}

    def name_of(axis, sign):
        return axis if sign > 0 else "-" + axis

    n = 8
    table = np.zeros((n, n), dtype=int)
    for a in axes:
        for sa in (1, -1):
            for b in axes:
                for sb in (1, -1):
                    axis, s = basic[(a, b)]
                    table[index[name_of(a, sa)], index[name_of(b, sb)]] = index[
                        name_of(axis, s * sa * sb)
                    ]
    return names, table


@lru_cache(maxsize=None)
def q8_group() -> FiniteGroup:
    names, table = _q8_data()
    return FiniteGroup(names, table)


@lru_cache(maxsize=None)
def q8_representation() -> ProjectiveRepresentation:
    """Degree-2 irreducible representation of the quaternion group.

    Element order is 1, -1, i, -i, j, -j, k, -k with U(i) = i sigma_x,
    U(j) = -i sigma_y, U(k) = i sigma_z.
    """
    group = q8_group()
    eye = np.eye(2, dtype=complex)
    base = {"1": eye, "i": 1j * PAULI_X, "j": -1j * PAULI_Y, "k": 1j * PAULI_Z}
    mats = []
    for name in group.names:
        if name.startswith("-"):
            mats.append(-base[name[1:]])
        else:
            mats.append(base[name])
    return ProjectiveRepresentation(group, mats)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, int(n**0.5) + 1):
        if n % p == 0:
            return False
    return True


@lru_cache(maxsize=None)
def weyl_heisenberg(d: int) -> ProjectiveRepresentation:
    """Displacement representation of Z_d x Z_d on a d-dimensional space.

    U(x, y) maps basis vector phi_k to omega^(y k) phi_(k+x) with
    omega = exp(2 pi i / d). Requires prime d.
    """
    if not _is_prime(d):
        raise ValueError(f"dimension must be prime, got {d}")
    names = [f"({x},{y})" for x in range(d) for y in range(d)]
    n = d * d
    table = np.zeros((n, n), dtype=int)
    for x1 in range(d):
        for y1 in range(d):
            a = x1 * d + y1
            for x2 in range(d):
                for y2 in range(d):
                    table[a, x2 * d + y2] = ((x1 + x2) % d) * d + (y1 + y2) % d
    group = FiniteGroup(names, table)
    omega = np.exp(2j * np.pi / d)
    ks = np.arange(d)
    mats = []
    for x in range(d):
        for y in range(d):
            u = np.zeros((d, d), dtype=complex)
            u[(ks + x) % d, ks] = omega ** (y * ks)
            mats.append(u)
    return ProjectiveRepresentation(group, mats)


def wh_element_index(d: int, x: int, y: int) -> int:
    return (x % d) * d + (y % d)


# ---------------------------------------------------------------------------
# programming vectors and sharp observables


@dataclass(eq=False)
class ProgramVectors:
    """Orthonormal eigenvectors of U(generator), ordered by eigenvalue phase."""

    vectors: np.ndarray      # columns
    eigenvalues: np.ndarray
    degenerate: np.ndarray   # per-vector flag: eigenvalue shared with a neighbor


def eigenvector_program_states(rep: ProjectiveRepresentation, generator: int) -> ProgramVectors:
    """Eigenvectors of U(generator), each an invariant seed for the subgroup it generates.

    The generator must produce a cyclic subgroup of order #G / degree, the
    regime where coset merging of the covariant observable turns sharp.
    """
    group = rep.group
    want = group.order // rep.degree
    have = group.element_order(generator)
    if have != want:
        raise ValueError(
            f"generator has order {have}, expected #G/degree = {want}"
        )
    u = rep.unitary(generator)
    # Schur form of a normal matrix: unitary eigenbasis regardless of degeneracy
    t, z = scipy.linalg.schur(u, output="complex")
    eigvals = np.diag(t).copy()
    phases = np.mod(np.angle(eigvals), 2 * np.pi)
    order = np.argsort(phases, kind="stable")
    eigvals = eigvals[order]
    vecs = z[:, order].copy()
    for col in range(vecs.shape[1]):
        pivot = np.argmax(np.abs(vecs[:, col]))
        phase = vecs[pivot, col] / abs(vecs[pivot, col])
        vecs[:, col] = vecs[:, col] / phase
    deg = np.zeros(len(eigvals), dtype=bool)
    for a in range(len(eigvals)):
        for b in range(len(eigvals)):
            if a != b and abs(eigvals[a] - eigvals[b]) < DEGENERACY_TOL:
                deg[a] = True
    for col in range(vecs.shape[1]):
        p = np.outer(vecs[:, col], vecs[:, col].conj())
        if float(np.max(np.abs(u @ p @ u.conj().T - p))) > EIGVEC_INVARIANCE_TOL:
            raise ValueError("schur vector failed the invariance check")
    return ProgramVectors(vecs, eigvals, deg)


def sharp_from_subgroup(
    rep: ProjectiveRepresentation, sub: CyclicSubgroup, psi: np.ndarray
) -> Observable:
    """Sharp observable from coset-merging the covariant POVM seeded with psi.

    psi must be an eigenvector of U(generator); the effects are the orbit of
    its projection under coset representatives.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != rep.degree:
        raise ValueError("vector dimension does not match the representation degree")
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError("psi must be a unit vector")
    p = np.outer(psi, psi.conj())
    u_gen = rep.unitary(sub.generator)
    if float(np.max(np.abs(u_gen @ p @ u_gen.conj().T - p))) > EIGVEC_INVARIANCE_TOL:
        raise ValueError("psi is not an eigenvector of the subgroup generator")
    cosets = left_cosets(rep.group, sub)
    effects, labels = [], []
    for coset in cosets:
        rep_el = coset[0]
        u = rep.unitary(rep_el)
        effects.append(hermitianize(u @ p @ u.conj().T))
        labels.append(rep.group.names[rep_el])
    return Observable(effects, outcomes=labels)


# ---------------------------------------------------------------------------
# the covariant multimeter


def maximally_entangled_vector(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


def pointer_vector(rep: ProjectiveRepresentation, g: int) -> np.ndarray:
    """Unit vector u(g) = (U(g) x 1) applied to the maximally entangled vector."""
    d = rep.degree
    return tensor(rep.unitary(g), np.eye(d)) @ maximally_entangled_vector(d)


def partial_swap_channel(d: int) -> QuantumChannel:
    """Unitary channel permuting A x B x C to B x A x C on three d-dim factors."""
    n = d**3
    perm = np.empty(n, dtype=int)
    for a in range(d):
        for b in range(d):
            for c in range(d):
                perm[a * d * d + b * d + c] = b * d * d + a * d + c
    w = np.eye(n)[perm]
    return QuantumChannel([w.astype(complex)])


def covariant_multimeter(rep: ProjectiveRepresentation) -> Multimeter:
    """Single device programming every covariant observable of a representation.

    The probe is a doubled system space; the pointer effects are scaled
    projections onto the vectors u(g); the interaction swaps the system with
    the probe's first factor. Programming with eta x transpose(seed) realizes
    the covariant observable of the seed for any eta.
    """
    d, n = rep.degree, rep.group.order
    scale = d * d / n
    effects = []
    for g in range(n):
        u = pointer_vector(rep, g)
        effects.append(scale * np.outer(u, u.conj()))
    try:
        pointer = Observable(effects, outcomes=list(rep.group.names))
    except ValueError as exc:
        raise ValueError(f"pointer effects failed to normalize: {exc}") from exc
    return Multimeter(
        probe_dim=d * d,
        pointer=pointer,
        interaction=partial_swap_channel(d),
    )


def covariant_program_state(eta: DensityState, seed: DensityState) -> DensityState:
    """Probe state eta x transpose(seed) that programs the seed's observable."""
    return DensityState(tensor(eta.matrix, seed.matrix.T))
