"""Richardson-extrapolated central differences.

Used only as an independent oracle for the jet machinery; never on the
computation path.
"""
import numpy as np


def _richardson(d_h, d_h2):
    return (4.0 * d_h2 - d_h) / 3.0


def gradient(f, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    out = np.empty(m)
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0

        def d(step):
            return (f(x + step * e) - f(x - step * e)) / (2.0 * step)

        out[i] = _richardson(d(h), d(h / 2))
    return out


def hessian(f, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    f0 = f(x)
    H = np.empty((m, m))
    eye = np.eye(m)
    for i in range(m):
        def dii(step):
            return (f(x + step * eye[i]) - 2.0 * f0 + f(x - step * eye[i])) / step ** 2

        H[i, i] = _richardson(dii(h), dii(h / 2))
        for j in range(i + 1, m):
            def dij(step):
                a, b = step * eye[i], step * eye[j]
                return (f(x + a + b) - f(x + a - b) - f(x - a + b) + f(x - a - b)) / (4.0 * step ** 2)

            H[i, j] = H[j, i] = _richardson(dij(h), dij(h / 2))
    return H


def relative_error(approx, reference, floor=1e-12):
    """Max-norm error relative to the reference's max-norm."""
    approx = np.asarray(approx)
    reference = np.asarray(reference)
    scale = max(float(np.max(np.abs(reference))), floor)
    return float(np.max(np.abs(approx - reference))) / scale
