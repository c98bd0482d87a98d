"""Independent numpy oracle for the cubic normal-form coefficients.

Computes b and c twice: by projection of the cubic remainders onto the dual
eigenfunction (after solving the quadratic center-manifold equations with
numpy), and by the unsimplified complex expressions. Writes the canonical
values (alpha = 2, d1 = d2 = 1, L = pi) to crates/core/data/oracle_canonical.json
and prints the worst route discrepancy over 200 random admissible sets.

Run: python3 oracle/oracle.py
"""
import json
import math
import pathlib

import numpy as np


def run(al, d1, d2):
    b1 = 1 + al**2 + d1 + d2
    w = math.sqrt(al**2 * (1 + d1 - d2) - d2**2)
    V = np.array([1, (-al**2 - d2 + 1j * w) / al**2])

    def M(n):
        return np.array([[-n * n * d1 + b1 - 1, al**2], [-b1, -n * n * d2 - al**2]], dtype=complex)

    def R20(u, v):
        s = al * (u[0] * v[1] + u[1] * v[0]) + b1 / al * u[0] * v[0]
        return np.array([s, -s])

    def R30(u, v, x):
        s = (u[0] * v[0] * x[1] + u[0] * v[1] * x[0] + u[1] * v[0] * x[0]) / 3
        return np.array([s, -s])

    Vb = V.conj()
    I = np.eye(2)
    p11 = np.linalg.solve(M(0), -2 * R20(V, Vb))  # mode 0
    p20 = np.linalg.solve(2j * w * I - M(2), R20(V, V))  # mode 2
    p1001 = np.linalg.solve(M(2), -2 * R20(V, Vb))  # mode 2
    p101 = np.linalg.solve(2j * w * I - M(0), 2 * R20(V, V))  # mode 0
    p0011 = np.linalg.solve(M(0), -2 * R20(V, Vb))  # mode 0
    W = 1j * al**2 / (4 * math.pi * w) * np.array([(d2 + al**2 - 1j * w) / al**2, 1])

    def ip(f):
        return 2 * math.pi * (f @ W.conj())

    a = ip(np.array([1, -1]) * V[0])
    b = ip(2 * R20(V, p11) + 2 * R20(Vb, p20) + 3 * R30(V, V, Vb))
    c = ip(2 * R20(V, p0011) + 2 * R20(V, p1001) + 2 * R20(Vb, p101) + 6 * R30(V, V, Vb))

    def P2(l):
        return l * l + 3 * (d1 + d2) * l + (al**2 * (4 * d1 - 4 * d2 + 1) + 12 * d1 * d2 - 4 * d2**2)

    def P0(l):
        return l * l - (d1 + d2) * l + al**2

    pr = -1j * (d2 + 1j * w) / (2 * w)
    bd = pr * (
        (5 * (al**2 + d2) - 4 * b1 + 1j * w) / al**2
        + 2 / P2(2j * w) * (-2 * (al**2 + d2) + b1 + 2j * w) / al
        * (-al * (2j * w + 4 * d1 + 1) - (2j * w + 4 * d2) / al * (1j * w - 1 - d1))
    )
    C1 = 4 / P2(0) * (2 * (al**2 + d2) - b1) / al * (al * (4 * d1 + 1) - 4 * d2 / al * (1j * w + 1 + d1))
    C2 = 4 / P0(2j * w) * (2 * (-al**2 - d2 + 1j * w) + b1) / al * (-al * (2j * w + 1) + 2j * w / al * (-1j * w + 1 + d1))
    cd = pr * ((2 * (al**2 + d2) - 4 * b1 + 2j * w) / al**2 + C1 + C2)
    return dict(
        beta1=b1, omega=w, a=a, b_projection=b, c_projection=c, b_direct=bd, c_direct=cd,
        p2_two_i_omega=P2(2j * w), p0_two_i_omega=P0(2j * w),
        psi_11000=p11, psi_20000=p20, psi_10010=p1001, psi_10100=p101,
    )


def encode(v):
    if isinstance(v, np.ndarray):
        return [encode(x) for x in v]
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def main():
    r = run(2.0, 1.0, 1.0)
    out = {k: (v if isinstance(v, float) else encode(v)) for k, v in r.items()}
    path = pathlib.Path(__file__).resolve().parent.parent / "crates/core/data/oracle_canonical.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    for k, v in r.items():
        print(k, v)

    rng = np.random.default_rng(1)
    worst, n = 0.0, 0
    while n < 200:
        al, d1, d2 = rng.uniform(0.3, 4), rng.uniform(0.1, 3), rng.uniform(0.1, 3)
        b1 = 1 + al**2 + d1 + d2
        if al**2 * (1 + d1 - d2) - d2**2 <= 0 or not b1 < (1 + al * math.sqrt(d1 / d2)) ** 2:
            continue
        n += 1
        r = run(al, d1, d2)
        worst = max(
            worst,
            abs(r["b_projection"] - r["b_direct"]) / (1 + abs(r["b_projection"])),
            abs(r["c_projection"] - r["c_direct"]) / (1 + abs(r["c_projection"])),
        )
    print("worst projection/direct discrepancy over 200 sets:", worst)


if __name__ == "__main__":
    main()
