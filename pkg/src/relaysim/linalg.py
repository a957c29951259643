"""Small complex linear-algebra helpers used by the beamformers.

Vectors are 1-D numpy arrays of complex128.  The Hermitian inner product
follows the convention <a, b> = a^H b (conjugate on the first argument), so
herm_inner(a, a).real equals norm(a)**2.
"""

import numpy as np

from relaysim.errors import DegenerateInputError, DimensionError


def _as_vector(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {a.shape}")
    return a


def herm_inner(a, b):
    """a^H b = sum_k conj(a_k) b_k."""
    a = _as_vector(a)
    b = _as_vector(b)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(a, b))


def norm(a):
    """Euclidean norm sqrt(a^H a), real and nonnegative."""
    return float(np.linalg.norm(_as_vector(a)))


def normalize(a):
    """a / ||a||.  Raises DegenerateInputError on the zero vector."""
    a = _as_vector(a)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise DegenerateInputError("cannot normalize the zero vector")
    return a / n

def matvec(mat, x):
    """Matrix-vector product mat @ x with shape checking."""
    mat = np.asarray(mat, dtype=np.complex128)
    x = _as_vector(x)
    if mat.ndim != 2 or mat.shape[1] != x.shape[0]:
        raise DimensionError(
            f"cannot multiply shape {mat.shape} by vector of length {x.shape[0]}"
        )
    return mat @ x


def rank1_mmse_direction(g, rho, h):
    """Unnormalized maximizer of |u^H h|^2 / (rho |u^H g|^2 + ||u||^2).

    For a rank-one interference covariance I + rho g g^H the optimum is
    (I + rho g g^H)^{-1} h, which by the Sherman-Morrison identity collapses
    to  h - (rho (g^H h) / (1 + rho ||g||^2)) g.  No matrix is ever formed.
    """
    g = _as_vector(g)
    h = _as_vector(h)
    if g.shape != h.shape:
        raise DimensionError(f"length mismatch: {g.shape[0]} vs {h.shape[0]}")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    g2 = float(np.vdot(g, g).real)
    coef = rho * complex(np.vdot(g, h)) / (1.0 + rho * g2)
    return h - coef * g


def project_orthogonal(h, g):
    """Component of h orthogonal to g: h - (g^H h / ||g||^2) g.

    The zero direction g = 0 imposes no constraint, so h is returned as is.
    """
    g = _as_vector(g)
    h = _as_vector(h)
    if g.shape != h.shape:
        raise DimensionError(f"length mismatch: {g.shape[0]} vs {h.shape[0]}")
    g2 = float(np.vdot(g, g).real)
    if g2 == 0.0:
        return h.copy()
    return h - (complex(np.vdot(g, h)) / g2) * g


def random_orthonormal_pair(m, rng):
    """Two random orthonormal vectors in C^m (m >= 2).

    Draws two isotropic complex Gaussian vectors and runs modified
    Gram-Schmidt with one re-orthogonalization pass, which keeps
    |u^H q| at the machine-precision level even for nearly parallel draws.
    """
    if m < 2:
        raise DimensionError("an orthonormal pair needs dimension >= 2")
    u = _complex_normal(m, rng)
    u = u / np.linalg.norm(u)
    while True:
        q = _complex_normal(m, rng)
        q = q - np.vdot(u, q) * u
        q = q - np.vdot(u, q) * u  # second pass scrubs rounding residue
        nq = float(np.linalg.norm(q))
        if nq > 1e-12:
            return u, q / nq


def _complex_normal(m, rng):
    z = rng.standard_normal((m, 2))
    return (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)
