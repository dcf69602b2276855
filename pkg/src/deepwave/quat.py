"""Quaternion arithmetic on arrays whose last axis holds (q0, q1, q2, q3)."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])


def quat(q0: float = 0.0, q1: float = 0.0, q2: float = 0.0, q3: float = 0.0) -> NDArray:
    return np.array([q0, q1, q2, q3], dtype=float)


def qmul(p: ArrayLike, q: ArrayLike) -> NDArray:
    """Hamilton product, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(p, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def conj(q: ArrayLike) -> NDArray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def re(q: ArrayLike) -> NDArray:
    return np.asarray(q, dtype=float)[..., 0]


def vec(q: ArrayLike) -> NDArray:
    """Vector part, returned as a quaternion with zero scalar part."""
    q = np.array(q, dtype=float)
    q[..., 0] = 0.0
    return q


def dagger(q: ArrayLike) -> NDArray:
    """k q k, which reflects a vector across the i,j-plane."""
    q = np.asarray(q, dtype=float)
    return q * np.array([-1.0, 1.0, 1.0, -1.0])


def norm(q: ArrayLike) -> NDArray:
    return np.sqrt(np.sum(np.asarray(q, dtype=float) ** 2, axis=-1))


def dot(p: ArrayLike, q: ArrayLike) -> NDArray:
    """Euclidean inner product of the four components."""
    return np.sum(np.asarray(p, dtype=float) * np.asarray(q, dtype=float), axis=-1)


def cross(p: ArrayLike, q: ArrayLike) -> NDArray:
    """Cross product of the vector parts, as a vector quaternion."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    c = np.cross(p[..., 1:], q[..., 1:])
    return np.concatenate([np.zeros(c.shape[:-1] + (1,)), c], axis=-1)


def exp_j(theta: ArrayLike) -> NDArray:
    """cos(theta) + j sin(theta)."""
    theta = np.asarray(theta, dtype=float)
    z = np.zeros_like(theta)
    return np.stack([np.cos(theta), z, np.sin(theta), z], axis=-1)


def triple_product_pair(f: ArrayLike, g: ArrayLike, v: ArrayLike, tol: float = 1e-12):
    """Return (f . (v g), g . (v f)) for a vector-valued v.

    The two numbers are negatives of each other.
    """
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(re(v)) > tol):
        raise ValueError("v must have zero scalar part")
    return dot(f, qmul(v, g)), dot(g, qmul(v, f))


def to_pair(q: ArrayLike) -> tuple[NDArray, NDArray]:
    """Split q = u + w i with u, w in span{1, j}, returned as complex arrays.

    The complex unit stands for j, so u = q0 + i q2 and w = q1 - i q3.
    """
    q = np.asarray(q, dtype=float)
    return q[..., 0] + 1j * q[..., 2], q[..., 1] - 1j * q[..., 3]


def from_pair(u: ArrayLike, w: ArrayLike) -> NDArray:
    u = np.asarray(u)
    w = np.asarray(w)
    return np.stack([u.real, w.real, u.imag, -w.imag], axis=-1)
