"""Independent brute-force oracles used only by the tests."""

import itertools

import numpy as np


def kron_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product by explicit index enumeration."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def simplex_grid(n: int, subdivisions: int) -> np.ndarray:
    """Barycentric lattice on the probability simplex of n outcomes."""
    points = []
    for cuts in itertools.combinations(range(subdivisions + n - 1), n - 1):
        prev = -1
        parts = []
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(subdivisions + n - 2 - prev)
        points.append(parts)
    return np.asarray(points, dtype=float) / subdivisions


def bloch_vector_state(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _bloch_grid(theta_lo, theta_hi, phi_lo, phi_hi, n_theta, n_phi, closed_phi):
    thetas = np.linspace(theta_lo, theta_hi, n_theta)
    phis = np.linspace(phi_lo, phi_hi, n_phi, endpoint=closed_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    states = np.empty((tt.size, 2), dtype=complex)
    states[:, 0] = np.cos(tt / 2)
    states[:, 1] = np.exp(1j * pp) * np.sin(tt / 2)
    return states, tt, pp


def bloch_grid_infimum(e1, e2, n_theta=25, n_phi=40, zooms=2, eps_den=1e-8):
    """Brute-force infimum of the divergence ratio over pure qubit pairs.

    Each stage enumerates a full product grid (n_theta * n_phi states per
    side, about 1e6 pairs) and then zooms the boxes around the argmin; the
    zoom stages squeeze out the discretization gap of the coarse pass.
    """
    s1 = np.stack(e1.effects)
    s2 = np.stack(e2.effects)
    boxes = [(0.0, np.pi, 0.0, 2 * np.pi), (0.0, np.pi, 0.0, 2 * np.pi)]
    best = np.inf
    arg = None
    for stage in range(zooms + 1):
        closed = stage > 0
        g1, t1, p1 = _bloch_grid(*boxes[0], n_theta, n_phi, closed)
        g2, t2, p2 = _bloch_grid(*boxes[1], n_theta, n_phi, closed)
        q1 = np.clip(np.einsum("si,xij,sj->sx", g1.conj(), s1, g1).real, 0.0, None)
        q2 = np.clip(np.einsum("si,xij,sj->sx", g2.conj(), s2, g2).real, 0.0, None)
        b = np.sqrt(q1) @ np.sqrt(q2).T
        f = np.abs(g1.conj() @ g2.T)
        ratio = np.where(f >= eps_den, b / np.maximum(f, eps_den), np.inf)
        i, j = np.unravel_index(np.argmin(ratio), ratio.shape)
        if ratio[i, j] < best:
            best = float(ratio[i, j])
            arg = (t1[i], p1[i], t2[j], p2[j])
        dth = (boxes[0][1] - boxes[0][0]) / (n_theta - 1)
        dph = (boxes[0][3] - boxes[0][2]) / n_phi
        boxes = [
            (
                max(arg[0] - 2 * dth, 0.0),
                min(arg[0] + 2 * dth, np.pi),
                arg[1] - 2 * dph,
                arg[1] + 2 * dph,
            ),
            (
                max(arg[2] - 2 * dth, 0.0),
                min(arg[2] + 2 * dth, np.pi),
                arg[3] - 2 * dph,
                arg[3] + 2 * dph,
            ),
        ]
    return best


def smeared_qubit_observable(axis, eta=0.5):
    """Two-outcome qubit observable with effects (1 +- eta axis.sigma)/2."""
    from qmultimeter import Observable
    from qmultimeter.groups import PAULI_X, PAULI_Y, PAULI_Z

    axis = np.asarray(axis, dtype=float)
    m = axis[0] * PAULI_X + axis[1] * PAULI_Y + axis[2] * PAULI_Z
    eye = np.eye(2)
    return Observable([(eye + eta * m) / 2, (eye - eta * m) / 2])
