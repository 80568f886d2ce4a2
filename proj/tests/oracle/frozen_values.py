"""Independent reference values for the unit tests.

Dense (2n)^2 x (2n)^2 representation of Y -> G Y G^T - w Y w^T, Moore-Penrose
inverse by SVD, Fisher information from the definitions. Run with numpy and
paste the printed constants into tests/support/frozen.hpp.
"""
import numpy as np


def omega(n):
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [-i, z]])


def qfi(gamma, dgamma, dd):
    n = gamma.shape[0] // 2
    w = omega(n)
    dense = np.kron(gamma, gamma) - np.kron(w, w)
    y = (np.linalg.pinv(dense, rcond=1e-12) @ dgamma.reshape(-1, order="F")).reshape(gamma.shape, order="F")
    second = 0.5 * np.trace(dgamma @ y)
    first = 2.0 * dd @ np.linalg.solve(gamma, dd)
    a = np.linalg.solve(gamma, dgamma)
    wigner = 0.5 * np.trace(a @ a) + first
    return first + second, wigner, y


def symplectic_eigenvalues(gamma):
    n = gamma.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(n) @ gamma))
    return np.sort(ev)[::-1][::2]


points = {
    "explicit1": (
        np.array([[2.0, 0.3], [0.3, 1.5]]),
        np.array([[0.2, 0.0], [0.0, -0.1]]),
        np.array([1.0, 0.0]),
    ),
    "explicit2": (
        np.array([
            [2.0, 0.4, 0.1, 0.0],
            [0.4, 1.8, 0.0, -0.2],
            [0.1, 0.0, 1.6, 0.3],
            [0.0, -0.2, 0.3, 2.2],
        ]),
        np.array([
            [0.5, 0.1, 0.0, 0.2],
            [0.1, -0.3, 0.1, 0.0],
            [0.0, 0.1, 0.4, -0.1],
            [0.2, 0.0, -0.1, 0.1],
        ]),
        np.array([0.3, -0.1, 0.0, 0.2]),
    ),
}

for name, (g, dg, dd) in points.items():
    q, wf, y = qfi(g, dg, dd)
    print(f"// {name}")
    print(f"qfi = {q:.17g}")
    print(f"wigner = {wf:.17g}")
    print("nu =", ", ".join(f"{v:.17g}" for v in symplectic_eigenvalues(g)))
    print("L =", ", ".join(f"{v:.17g}" for v in y.reshape(-1)))
    print("b =", ", ".join(f"{v:.17g}" for v in 2 * np.linalg.solve(g, dd)))
    print(f"c = {-0.5 * np.trace(y @ g):.17g}")
