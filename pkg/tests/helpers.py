"""Shared test utilities: seeded matrix generators and independent oracles."""

import numpy as np

from sorlab import hermitian, hermitian_from_factor


def random_hermitian(n, rng, complex_entries=False):
    M = rng.standard_normal((n, n))
    if complex_entries:
        M = M + 1j * rng.standard_normal((n, n))
    return hermitian(M + M.conj().T)


def random_psd_unit(n, rng, complex_entries=False, m=None):
    """Random PSD matrix with exactly unit diagonal, via a Gaussian factor."""
    m = m if m is not None else n
    A = rng.standard_normal((n, m))
    if complex_entries:
        A = A + 1j * rng.standard_normal((n, m))
    return hermitian_from_factor(A, normalize_rows=True)


def charpoly_eigs_bisect(B, tol=1e-12, grid=4001):
    """Eigenvalues of Hermitian B as characteristic-polynomial roots.

    Independent of the eigensolver under test: scans det(B - x I) (computed
    by LU) for sign changes on a Gershgorin interval and bisects each
    bracket. Assumes simple eigenvalues, which holds almost surely for the
    random matrices this is used on.
    """
    B = np.asarray(B)
    n = B.shape[0]
    eye = np.eye(n)

    def f(x):
        return float(np.linalg.det(B - x * eye).real)

    bound = float(np.abs(B).sum(axis=1).max()) + 1.0
    xs = np.linspace(-bound, bound, grid)
    fs = np.array([f(x) for x in xs])
    roots = []
    for k in range(grid - 1):
        if fs[k] == 0.0:
            roots.append(xs[k])
            continue
        if fs[k] * fs[k + 1] < 0:
            lo, hi = xs[k], xs[k + 1]
            flo = fs[k]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fmid = f(mid)
                if fmid == 0.0:
                    lo = hi = mid
                elif flo * fmid < 0:
                    hi = mid
                else:
                    lo, flo = mid, fmid
            roots.append(0.5 * (lo + hi))
    if fs[-1] == 0.0:
        roots.append(xs[-1])
    return np.array(sorted(roots, reverse=True))


def forward_substitute_unit(L_strict, rhs):
    """Solve (I + L) z = rhs for strictly lower triangular L, by hand."""
    n = len(rhs)
    z = np.zeros(n, dtype=np.result_type(L_strict, rhs))
    for i in range(n):
        z[i] = rhs[i] - L_strict[i, :i] @ z[:i]
    return z
