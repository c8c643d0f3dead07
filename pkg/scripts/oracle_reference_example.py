"""Symbolic oracle for the bundled ``example43.json`` immersion.

Independent of the ``skewprod`` package: everything here is sympy on the raw
component formulas. The printed numbers are frozen into the test-suite.
"""

import sympy as sp

x, y, z, u, v = sp.symbols("x y z u v", real=True)
X = sp.Symbol("x", positive=True)
params = [x, y, z, u, v]
phi = sp.Matrix([
    x + y, x - y, x * sp.cos(u), x * sp.sin(u), z,
    -z, x, 2 / sp.sqrt(3) * y, x * sp.cos(v), x * sp.sin(v),
])
F = sp.diag(*([1] * 5 + [-1] * 5))

J = phi.jacobian(params)
G = sp.simplify(J.T * J)
print("induced metric:", G)

Tc = sp.simplify(J.T * F * J)          # g(F phi_a, phi_b)
T = sp.simplify(G.inv() * Tc)          # T in coordinate basis
T2 = sp.simplify(T * T)
print("T^2 eigenvalues:", T2.eigenvals())

lam = sp.Rational(1, 25)
cot2 = lam / (1 - lam)
# grad ln f for f = x, norm with inverse metric
sigma = sp.log(x)
dsig = sp.Matrix([sp.diff(sigma, p) for p in params])
grad_norm2 = sp.simplify((dsig.T * G.inv() * dsig)[0])
print("|grad ln f|^2 =", grad_norm2)
rhs = sp.simplify(2 * (0 + cot2 * grad_norm2))
print("chen rhs =", rhs, " at x=1:", sp.N(rhs.subs(x, 1), 17))

# second fundamental form: normal part of second partials
P_tan = J * G.inv() * J.T
Pn = sp.eye(10) - P_tan


def h(a, b):
    return sp.simplify(Pn * phi.diff(params[a]).diff(params[b]))


def nvec(w):
    return Pn * F * w


ex = J[:, 0] / sp.sqrt(5)
eu = J[:, 3] / x
ev = J[:, 4] / x
N_ex = sp.simplify(nvec(ex))
huu = h(3, 3) / x**2
hvv = h(4, 4) / x**2
lhs_u = sp.simplify((huu.T * N_ex)[0])
lhs_v = sp.simplify((hvv.T * N_ex)[0])
Tex = P_tan * F * ex
dTsig = sp.simplify((dsig.T * G.inv() * J.T * Tex)[0])
print("g(h(e_u,e_u), N e_x) =", lhs_u, "   e_v:", lhs_v)
print("T e_x (ln f) =", dTsig, "  (verbatim right-hand side for X=Y unit)")
print("g(e_u, F e_u) =", sp.simplify((eu.T * F * eu)[0]),
      " g(e_v, F e_v) =", sp.simplify((ev.T * F * ev)[0]))

dZsig = sp.simplify((dsig.T * G.inv() * J.T * ex)[0])
for name, lhs, gF in (("e_u", lhs_u, 1), ("e_v", lhs_v, -1)):
    print(f"X = Y = {name}: lhs {lhs}, T e_x(ln f) {dTsig}, "
          f"with - e_x(ln f) g(X, FX) term {sp.simplify(dTsig - dZsig * gF)}")

hsq = 0
# |h|^2 over an orthonormal frame: sum_{ab,cd} G^{ac} G^{bd} <h_ab, h_cd>
Gi = G.inv()
H = [[h(a, b) for b in range(5)] for a in range(5)]
for a in range(5):
    for b in range(5):
        for c in range(5):
            for d in range(5):
                w = Gi[a, c] * Gi[b, d]
                if w != 0:
                    hsq += w * (H[a][b].T * H[c][d])[0]
hsq = sp.simplify(hsq)
print("|h|^2 =", hsq, "  at x=1:", sp.N(hsq.subs(x, 1), 17))
print("mixed h(x,u), h(y,u), h(z,u):", [sp.simplify(h(0, 3)).T, sp.simplify(h(1, 3)).T, h(2, 3).T])
