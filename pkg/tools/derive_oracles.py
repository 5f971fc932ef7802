"""Reference values for the test suite, derived with sympy.

Nothing here imports the package: each metric is written out as a 4x4
sympy matrix straight from its line element and every quantity is
obtained by symbolic differentiation, then evaluated at a point. The
printed numbers are frozen into tests/reference_values.py.

    python tools/derive_oracles.py
"""

import sympy as sp

t, r, th, ph = sp.symbols("t r theta phi", real=True)
X = (t, r, th, ph)


def kerr_newman_g(m, a, e):
    sigma = r**2 + a**2 * sp.cos(th) ** 2
    delta = r**2 + a**2 + e**2 - 2 * m * r
    g = sp.zeros(4, 4)
    g[0, 0] = -(delta - a**2 * sp.sin(th) ** 2) / sigma
    g[0, 3] = g[3, 0] = -a * (r**2 + a**2 - delta) * sp.sin(th) ** 2 / sigma
    g[1, 1] = sigma / delta
    g[2, 2] = sigma
    g[3, 3] = ((r**2 + a**2) ** 2 - delta * a**2 * sp.sin(th) ** 2) / sigma * sp.sin(th) ** 2
    return g


def flrw_g(scale):
    return sp.diag(-1, scale**2, scale**2, scale**2)


def christoffel(g):
    gi = g.inv()
    return [[[sp.Rational(1, 2) * sum(gi[a, d] * (sp.diff(g[d, b], X[c]) + sp.diff(g[d, c], X[b])
                                                   - sp.diff(g[b, c], X[d])) for d in range(4))
              for c in range(4)] for b in range(4)] for a in range(4)]


def ricci(g, point):
    """Coordinate Ricci tensor at a point, R_bd = ∂_a Γ^a_db − ∂_d Γ^a_ab + ΓΓ − ΓΓ."""
    G = christoffel(g)
    sub = dict(zip(X, point))
    Gv = [[[sp.N(G[a][b][c].subs(sub), 30) for c in range(4)] for b in range(4)] for a in range(4)]
    dG = [[[[sp.N(sp.diff(G[a][b][c], X[e]).subs(sub), 30) for e in range(4)] for c in range(4)]
            for b in range(4)] for a in range(4)]
    R = sp.zeros(4, 4)
    for b in range(4):
        for d in range(4):
            s = 0
            for a in range(4):
                s += dG[a][d][b][a] - dG[a][a][b][d]
                for f in range(4):
                    s += Gv[a][a][f] * Gv[f][d][b] - Gv[a][d][f] * Gv[f][a][b]
            R[b, d] = s
    return R, Gv


def threading(g, point):
    """Φ², ξ_i, h_ij, c_i and ω_ij (with δ_i = ∂_i + Φ⁻²ξ_i ∂_0) at a point."""
    sub = dict(zip(X, point))
    phi2 = -g[0, 0]
    xi = [g[0, i] for i in (1, 2, 3)]
    n = [x / phi2 for x in xi]
    h = sp.Matrix(3, 3, lambda i, j: g[i + 1, j + 1] + xi[i] * xi[j] / phi2)
    c = [sp.diff(phi2, X[i + 1]) / (2 * phi2) for i in range(3)]

    def delta(f, i):
        return sp.diff(f, X[i + 1]) + n[i] * sp.diff(f, t)

    # ω_ij = ½(δ_j n_i − δ_i n_j), the curvature of the spatial distribution
    w = sp.Matrix(3, 3, lambda i, j: sp.Rational(1, 2) * (delta(n[i], j) - delta(n[j], i)))
    ev = lambda f: float(sp.N(f.subs(sub), 20))  # noqa: E731
    return {
        "phi2": ev(phi2),
        "xi": [ev(x) for x in xi],
        "h": [[ev(h[i, j]) for j in range(3)] for i in range(3)],
        "c": [ev(x) for x in c],
        "omega": [[ev(w[i, j]) for j in range(3)] for i in range(3)],
    }


def frame_ricci(g, point):
    """Ricci components on the threading frame e_0 = ∂_0, e_i = ∂_i + n_i ∂_0."""
    R, _ = ricci(g, point)
    sub = dict(zip(X, point))
    phi2 = -g[0, 0]
    E = sp.eye(4)
    for i in (1, 2, 3):
        E[0, i] = sp.N((g[0, i] / phi2).subs(sub), 30)
    F = E.T * R * E
    return [[float(F[a, b]) for b in range(4)] for a in range(4)]


def main():
    print("# Kerr-Newman m=1, a=1/2, e=3/10 at (0, 3, pi/3, 0)")
    g = kerr_newman_g(1, sp.Rational(1, 2), sp.Rational(3, 10))
    p = (0, 3, sp.pi / 3, 0)
    for k, v in threading(g, p).items():
        print(k, v)
    F = frame_ricci(g, p)
    print("frame ricci R_00, R_11, R_13, R_22, R_33:", F[0][0], F[1][1], F[1][3], F[2][2], F[3][3])
    print("frame ricci R_i0:", F[1][0], F[2][0], F[3][0])

    print("# Kerr m=1, a=1/2 at (0, 5, 1, 0.3): Ricci")
    g = kerr_newman_g(1, sp.Rational(1, 2), 0)
    F = frame_ricci(g, (0, 5, 1, sp.Rational(3, 10)))
    print("max |R|", max(abs(v) for row in F for v in row))

    print("# Schwarzschild m=1 at r=4: Gamma^1_00, c_1")
    g = kerr_newman_g(1, 0, 0)
    G = christoffel(g)
    print(float(G[1][0][0].subs({r: 4, th: 1})), threading(g, (0, 4, sp.pi / 2, 0))["c"])
    # circular orbit at r=6: dphi/dt² = m/r³
    print("circular omega^2 at r=6:", sp.Rational(1, 216))

    print("# FLRW a = exp(t) at (1.3, 0.4, 1, 0.2) and Milne a = t")
    F = frame_ricci(flrw_g(sp.exp(t)), (sp.Rational(13, 10), sp.Rational(2, 5), 1, sp.Rational(1, 5)))
    print("R_00", F[0][0], "R_11 / a^2", F[1][1] / float(sp.exp(sp.Rational(13, 5))))

    print("# Reissner-Nordstrom m=1, e=3/2 (no horizon): static observer at r = e^2/m")
    g = kerr_newman_g(1, 0, sp.Rational(3, 2))
    G = christoffel(g)
    print("Gamma^1_00 at r=9/4:", sp.simplify(G[1][0][0].subs({r: sp.Rational(9, 4)})))


if __name__ == "__main__":
    main()
