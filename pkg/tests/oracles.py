"""Independent high-precision references.

These are transcribed from the inequality statements directly and share no
code with the package: plain mpmath at 60 digits, no half-angle rewriting,
no series. Derivatives come from mpmath's numerical differentiation.
"""
import mpmath

DPS = 60

# literal reference values (30 recorded digits), produced by the functions below
with mpmath.workdps(DPS):
    G_PI_1_1 = mpmath.mpf("0.575222039230620284612069850161")       # 10 - 3 pi
    G_HALFPI_0_0 = mpmath.mpf("2.42477796076937971538793014984")    # 3 pi - 7
    F_0_2_2 = mpmath.mpf("9.25834039867532481503813808820")         # 12 atanh(1/2) + 8/3


def close(a, b, tol):
    """|a - b| < tol, evaluated at full oracle precision."""
    with mpmath.workdps(DPS):
        return abs(mpmath.mpf(a) - mpmath.mpf(b)) < tol


def _prec():
    # never lower an ambient precision (mpmath.diff raises it internally)
    return mpmath.workdps(max(DPS, mpmath.mp.dps))


def G(theta, x, y):
    with _prec():
        th, x, y = mpmath.mpf(theta), mpmath.mpf(x), mpmath.mpf(y)
        s, c = mpmath.sin(th), mpmath.cos(th)
        val = (s**3 * x * y + (c**3 - 3 * c + 2) * (x + y) - s**3 - 6 * s - 6 * th + 6 * mpmath.pi
               - 6 * mpmath.atan(x) + 2 * x / (1 + x**2) - 6 * mpmath.atan(y) + 2 * y / (1 + y**2))
        return +val


def F(ell, x, y):
    with _prec():
        l, x, y = mpmath.mpf(ell), mpmath.mpf(x), mpmath.mpf(y)
        s, c = mpmath.sinh(l), mpmath.cosh(l)
        val = (s**3 * x * y - (c**3 - 3 * c + 2) * (x + y) + s**3 - 6 * s - 6 * l
               + 6 * mpmath.atanh(1 / x) + 2 * x / (x**2 - 1) + 6 * mpmath.atanh(1 / y) + 2 * y / (y**2 - 1))
        return +val


def value(mode, t, x, y):
    return G(t, x, y) if mode == "trig" else F(t, x, y)


def four_A_quad(x):
    """4 * int_0^x s^4/(1+s^2)^2 ds by quadrature (the closed form is not used)."""
    with mpmath.workdps(DPS):
        return 4 * mpmath.quad(lambda s: s**4 / (1 + s**2) ** 2, [0, mpmath.mpf(x)])


def gradient(mode, t, x, y):
    f = G if mode == "trig" else F
    with mpmath.workdps(DPS):
        args = [mpmath.mpf(t), mpmath.mpf(x), mpmath.mpf(y)]
        out = []
        for i in range(3):
            def g(z, i=i):
                a = list(args)
                a[i] = z
                return f(*a)
            out.append(mpmath.diff(g, args[i]))
        return out


def hessian_xy(mode, t, x, y):
    f = G if mode == "trig" else F
    with mpmath.workdps(DPS):
        t, x, y = mpmath.mpf(t), mpmath.mpf(x), mpmath.mpf(y)
        hxx = mpmath.diff(lambda z: f(t, z, y), x, 2)
        hyy = mpmath.diff(lambda z: f(t, x, z), y, 2)
        hxy = mpmath.diff(lambda a, b: f(t, a, b), (x, y), (1, 1))
        return hxx, hxy, hyy


def manifold(mode, t):
    with mpmath.workdps(DPS):
        t = mpmath.mpf(t)
        return mpmath.cot(t / 2) if mode == "trig" else mpmath.coth(t / 2)
