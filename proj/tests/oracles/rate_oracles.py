"""Independent reference values frozen into the C++ tests.

Second-order finite-volume solves (scipy sparse direct) with Richardson
extrapolation; analytic closed forms; scipy Student-t quantiles.
"""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import stats


def circle_closed_form(a):
    r = np.sqrt(1 - a * a)
    return (1 - r) / 8, 0.5 * (1 - r)


def fv_quadratic_coefficient(n, a=1.0, b=0.5, shift=1.0, D=0.5):
    """K for torus-cosine, C0 = J grad U, p ~ exp(-2U(x - shift, y))."""
    h = 2 * np.pi / n
    x = np.arange(n) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    p = np.exp(-2 * (a * np.cos(X - shift) + b * np.cos(Y)))
    p /= p.mean()
    idx = np.arange(n * n).reshape(n, n)
    rows, cols, vals = [], [], []
    rhs = np.zeros((n, n))
    for axis in (0, 1):
        pf = 0.5 * (p + np.roll(p, -1, axis=axis))
        # face midpoints
        if axis == 0:
            Xf, Yf = X + h / 2, Y
            c = -b * np.sin(Yf)           # C0_x = dU/dy
        else:
            Xf, Yf = X, Y + h / 2
            c = a * np.sin(Xf)            # C0_y = -dU/dx
        up = np.roll(idx, -1, axis=axis)
        w = pf / h**2
        flux = pf * c / h
        for i, j, s in ((idx, idx, w), (up, up, w), (idx, up, -w), (up, idx, -w)):
            rows.append(i.ravel()); cols.append(j.ravel()); vals.append(s.ravel())
        rhs += flux - np.roll(flux, 1, axis=axis)  # -div(p C0) * ... sign below
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n * n, n * n))
    A = A + sp.csr_matrix((np.full(n * n, 1e-12), (np.arange(n * n), np.arange(n * n))))
    # A xi = div(p C0)... weak form: sum p_f (C0 + G xi) G g = 0  ->  A xi = -G^T (p_f C0)
    r = rhs.ravel()
    xi = spla.spsolve(A.tocsc(), -r)
    xi -= xi.mean()
    xi = xi.reshape(n, n)
    K = 0.0
    for axis in (0, 1):
        pf = 0.5 * (p + np.roll(p, -1, axis=axis))
        g = (np.roll(xi, -1, axis=axis) - xi) / h
        K += np.mean(pf * g * g)
    return K / (4 * D)


if __name__ == "__main__":
    i0, k = circle_closed_form(0.5)
    print(f"circle a=0.5: I0={i0:.15g} K={k:.15g} total(delta=1)={i0 + k:.15g}")
    print(f"t_{{0.025,9}} = {stats.t.ppf(1 - 0.025, 9):.12g}")
    print(f"t_{{0.025,13}} = {stats.t.ppf(1 - 0.025, 13):.12g}")
    print(f"t_{{0.005,3}} = {stats.t.ppf(1 - 0.005, 3):.12g}")
    ks = {n: fv_quadratic_coefficient(n) for n in (64, 128, 256)}
    for n, v in ks.items():
        print(f"FV K(N={n}) = {v:.12g}")
    r1 = (4 * ks[128] - ks[64]) / 3
    r2 = (4 * ks[256] - ks[128]) / 3
    print(f"Richardson: {r1:.12g} {r2:.12g} -> {(16 * r2 - r1) / 15:.12g}")
