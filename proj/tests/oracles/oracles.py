"""Independent sympy derivations of the values frozen into the C++ tests.

Run: python3 tests/oracles/oracles.py
"""
import sympy as sp

u, v, s, t, m = sp.symbols("u v s t m")


def branch(F, n=5):
    # u(t) = sum a_k t^k solving F(u, t) = 0 with a_1 > 0, by coefficient matching
    a = sp.symbols(f"a1:{n + 1}")
    U = sum(a[k] * t ** (k + 1) for k in range(n))
    ser = sp.expand(sp.series(F.subs(u, U), t, 0, n + 2).removeO())
    sol = {}
    for k in range(2, n + 2):
        eq = ser.coeff(t, k).subs(sol)
        unknown = a[k - 2]
        roots = sp.solve(eq, unknown)
        roots = [r for r in roots if k > 2 or r > 0]
        sol[unknown] = sp.nsimplify(roots[0])
    return [sol[a[k]] for k in range(n)]


print("branch -t^2+u^2+u^3:", branch(-t**2 + u**2 + u**3))
print("branch -t^2+(1-m t^2)u^2:", [sp.simplify(x) for x in branch(-t**2 + (1 - m * t**2) * u**2, 4)])

# alpha_3 for the general F33 = s + c1 u s + c2(s) u^2 + c3 u^3 + c4 u^4, s = -t^2
c1, c20, c2s, c3, c4 = sp.symbols("c1 c20 c2s c3 c4", positive=True)
F = s + c1 * u * s + (c20**2 + c2s * s) * u**2 + c3 * u**3 + c4 * u**4
al = branch(sp.expand(F.subs(s, -t**2)), 3)
print("alpha1", sp.simplify(al[0]))
print("alpha2", sp.simplify(al[1]))
closed = ((c1**2 + 4 * c2s) * c20**4 - 2 * (3 * c1 * c3 + 2 * c4) * c20**2 + 5 * c3**2) / (8 * c20**7)
print("alpha3 - corrected closed form:", sp.simplify(al[2] - closed))

# map inversion of (u, v(1+u))
V = v * (1 + u)
W = sp.series(v / (1 + u), u, 0, 6).removeO()
print("V(u, W) - v:", sp.expand(sp.series(V.subs(v, W), u, 0, 6).removeO()) - v)


def frenet(g):
    d1 = g.diff(t)
    d2 = d1.diff(t)
    d3 = d2.diff(t)
    c = d1.cross(d2)
    kappa = sp.sqrt(c.dot(c)) / sp.sqrt(d1.dot(d1)) ** 3
    tau = c.dot(d3) / c.dot(c)
    k0 = sp.nsimplify(sp.simplify(kappa.subs(t, 0)))
    kp0 = sp.simplify(sp.diff(kappa, t).subs(t, 0))
    return k0, sp.simplify(tau.subs(t, 0)), kp0


# singular locus v = 0, u = t (F33 = s + u^2) for germs already in normal form
for name, f2, f3 in [
    ("(u, v^2+u^2, v^3+u^2 v+s v)", v**2 + u**2, v**3 + u**2 * v + s * v),
    ("(u, v^2+u^2+us, u^2+v^3+u^2 v+v s)", v**2 + u**2 + u * s, u**2 + v**3 + u**2 * v + v * s),
    ("(u, v^2+u^2+u^3, u^2-u^3+v^3+u^2 v+v s+u s)", v**2 + u**2 + u**3, u**2 - u**3 + v**3 + u**2 * v + v * s + u * s),
]:
    g = sp.Matrix([t, f2.subs({u: t, v: 0, s: -t**2}), f3.subs({u: t, v: 0, s: -t**2})])
    print(name, "kappa0, tau0, kappa'0 =", frenet(g))

# umbrella of f^{-st^2,+} at (st, 0): f_u, f_uv, f_vv and the invariant formulas
st = sp.Rational(1, 10)
fu = sp.Matrix([1, 0, 0])
fuv = sp.Matrix([0, 0, 2 * st])
fvv = sp.Matrix([0, 2, 0])
fuu = sp.Matrix([0, 0, 0])
A = fu.dot(fu)
B = fu.cross(fvv).dot(fu.cross(fvv))
C = fu.dot(fuv.cross(fvv))
print("f^{-0.01,+} at (0.1,0): C =", C, " a02 =", sp.sqrt(A) * B ** sp.Rational(3, 2) / C**2)

# sphere patch K numerator at 0
X = sp.Matrix([u, v, sp.sqrt(1 - u**2 - v**2)])
n = X.diff(u).cross(X.diff(v))
L = X.diff(u, 2).dot(n)
M = X.diff(u, v).dot(n)
N = X.diff(v, 2).dot(n)
print("sphere K at 0:", sp.simplify((L * N - M**2).subs({u: 0, v: 0})))
