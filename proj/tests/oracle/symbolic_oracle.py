#!/usr/bin/env python3
"""Symbolic reference values for the C++ test suites.

Independent of the C++ evaluation path: everything here is computed with
sympy from the closed-form metrics. Run it to regenerate the constants that
are frozen in tests/*.cpp.

Conventions match the library:
  Gamma^c_ab = 1/2 g^cd (d_a g_bd + d_b g_ad - d_d g_ab)
  R^d_abc    = d_b Gamma^d_ca - d_c Gamma^d_ba + Gamma^d_be Gamma^e_ca - Gamma^d_ce Gamma^e_ba
  Ric_ac     = R^b_abc
"""
import sympy as sp


def christoffel(g, xs):
    n = len(xs)
    gi = sp.simplify(g.inv())
    G = [[[sp.simplify(sum(gi[c, d] * (sp.diff(g[b, d], xs[a]) + sp.diff(g[a, d], xs[b])
                                        - sp.diff(g[a, b], xs[d])) for d in range(n)) / 2)
           for b in range(n)] for a in range(n)] for c in range(n)]
    return G


def riemann(G, xs):
    n = len(xs)
    R = [[[[sp.simplify(sp.diff(G[d][c][a], xs[b]) - sp.diff(G[d][b][a], xs[c])
                        + sum(G[d][b][e] * G[e][c][a] - G[d][c][e] * G[e][b][a] for e in range(n)))
            for c in range(n)] for b in range(n)] for a in range(n)] for d in range(n)]
    return R


def ricci(R, n):
    return sp.Matrix(n, n, lambda a, c: sp.simplify(sum(R[b][a][b][c] for b in range(n))))


def clifton_pohl():
    x, y = sp.symbols('x y', real=True)
    r2 = x**2 + y**2
    g = sp.Matrix([[0, 1 / (2 * r2)], [1 / (2 * r2), 0]])
    G = christoffel(g, [x, y])
    names = 'xy'
    print('# Clifton-Pohl Christoffels at (1,0)')
    for c in range(2):
        for a in range(2):
            for b in range(a, 2):
                val = G[c][a][b].subs({x: 1, y: 0})
                print(f'Gamma^{names[c]}_{names[a]}{names[b]} = {val}   [{G[c][a][b]}]')
    # geodesic y == 0: xddot = -Gamma^x_xx xdot^2
    print('on y=0: xddot =', sp.simplify(-G[0][0][0].subs(y, 0)), '* xdot^2')
    t = sp.symbols('t')
    X = 1 / (1 - t)
    print('closed form residual:', sp.simplify(sp.diff(X, t, 2) - 2 * sp.diff(X, t)**2 / X))


def clifton_pohl_3d():
    x, y, z = sp.symbols('x y z', real=True)
    r2 = x**2 + y**2
    h = 1 / (2 * r2)
    g = sp.Matrix([[0, h, h], [h, 0, h], [h, h, 0]])
    G = christoffel(g, [x, y, z])
    print('# Clifton-Pohl 3d: nabla_a d_z = Gamma^c_{a z}')
    for a in range(3):
        print('  a=%d:' % a, [sp.simplify(G[c][a][2]) for c in range(3)])
    pts = [(1, 0), (1, 1), (sp.Rational(3, 2), -1)]
    for p in pts:
        m = max(abs(float(G[c][a][2].subs({x: p[0], y: p[1]}))) for a in range(3) for c in range(3))
        print('  max |nabla d_z| at', p, '=', m)


def rosen_exp():
    u, v, x = sp.symbols('u v x', real=True)
    g = sp.Matrix([[0, 1, 0], [1, 0, 0], [0, 0, sp.exp(2 * u)]])
    G = christoffel(g, [u, v, x])
    print('# Rosen 2dudv + e^{2u} dx^2 at u=0')
    print('Gamma^x_ux =', G[2][0][2].subs(u, 0), ' Gamma^v_xx =', G[1][2][2].subs(u, 0),
          ' Gamma^u_xx =', G[0][2][2].subs(u, 0))


def ppwave(Hf, label):
    u, v, z1, z2 = sp.symbols('u v z1 z2', real=True)
    H = Hf(u, z1, z2)
    xs = [u, v, z1, z2]
    g = sp.Matrix([[2 * H, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    G = christoffel(g, xs)
    R = riemann(G, xs)
    Ric = ricci(R, 4)
    lap = sp.simplify(sp.diff(H, z1, 2) + sp.diff(H, z2, 2))
    print(f'# pp-wave H = {H}')
    print('  Ricci =', Ric)
    print('  Laplacian_z H =', lap)
    if lap != 0:
        print('  Ric_uu / Laplacian =', sp.simplify(Ric[0, 0] / lap))
    print('  Gamma^z1_uu =', G[2][0][0], '  (B_1 = -Gamma^z1_uu =', -G[2][0][0], ')')
    return G


def cahen_wallach():
    # H = l1 z1^2 + l2 z2^2; geodesic with udot = 1: zddot_i = -Gamma^i_uu
    l1, l2 = sp.symbols('l1 l2', real=True)
    G = ppwave(lambda u, a, b: l1 * a**2 + l2 * b**2, 'cw')
    u, v, z1, z2 = sp.symbols('u v z1 z2', real=True)
    acc = sp.simplify(-G[2][0][0])
    print('# Cahen-Wallach: zddot_1 =', acc, ' => c =', sp.simplify(acc / (l1 * z1)))
    t = sp.symbols('t')
    w = sp.sqrt(2)
    z0, zd0 = sp.symbols('z0 zd0')
    sol = z0 * sp.cos(w * t) + zd0 / w * sp.sin(w * t)
    print('  lambda=-1: closed form z(t) =', sol, ' residual:',
          sp.simplify(sp.diff(sol, t, 2) - 2 * (-1) * sol))


if __name__ == '__main__':
    clifton_pohl()
    clifton_pohl_3d()
    rosen_exp()
    ppwave(lambda u, a, b: a**2 - b**2, 'harmonic')
    ppwave(lambda u, a, b: a**2 + b**2, 'sum of squares')
    ppwave(lambda u, a, b: a**2, 'z1^2')
    cahen_wallach()
