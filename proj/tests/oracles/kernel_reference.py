"""Reference kernel values at 40 working digits with mpmath, written as a C++ table.

Usage: python3 kernel_reference.py > ../kernel_reference.inc
"""
import mpmath as mp

mp.mp.dps = 40
CUTS = [0] + [mp.mpf(10) ** (-k) for k in range(9, 0, -1)] + [mp.pi / 2, mp.pi]

POINTS = [
    # (lambda, t, x, y)
    (0.3, 1.0, 1.0, 2.0),
    (0.3, 0.01, 1.0, 1.001),
    (0.3, 5.0, 0.02, 40.0),
    (0.5, 0.1, 2.0, 2.0),
    (0.5, 1e-3, 10.0, 10.0005),
    (1.5, 0.3, 0.7, 0.2),
    (2.5, 1.0, 1.0, 2.0),
    (2.5, 0.05, 3.0, 3.01),
    (2.5, 20.0, 0.5, 0.6),
    (4.0, 0.2, 1.0, 1.3),
]


def poisson(l, t, x, y, k_extra=0, weight_u=False):
    l, t, x, y = map(mp.mpf, (l, t, x, y))

    def f(th):
        s = mp.cos(th)
        d = x * x + y * y + t * t - 2 * x * y * s
        w = mp.sin(th) ** (2 * l - 1)
        return w / d ** (l + 1)

    return 2 * l * t / mp.pi * mp.quad(f, CUTS)


def heat(l, t, x, y):
    # closed form of the theta-integral through the modified Bessel function:
    # int_0^pi e^{z cos th} (sin th)^{2l-1} dth = sqrt(pi) Gamma(l) (2/z)^{l-1/2} I_{l-1/2}(z)
    l, t, x, y = map(mp.mpf, (l, t, x, y))
    c = mp.mpf(2) ** ((1 - 2 * l) / 2) / (mp.gamma(l) * mp.sqrt(mp.pi)) * t ** (-l - mp.mpf(1) / 2)
    z = x * y / t
    half = l - mp.mpf(1) / 2
    theta = mp.sqrt(mp.pi) * mp.gamma(l) * (2 / z) ** half * mp.besseli(half, z)
    return c * mp.exp(-(x * x + y * y) / (2 * t)) * theta


def dt(l, t, x, y):
    return mp.diff(lambda tt: poisson(l, tt, x, y), mp.mpf(t))


def dx(l, t, x, y):
    return mp.diff(lambda xx: poisson(l, t, xx, y), mp.mpf(x))


def dydt(l, t, x, y):
    return mp.diff(lambda tt, yy: poisson(l, tt, x, yy), (mp.mpf(t), mp.mpf(y)), (1, 1))


print("// generated by tests/oracles/kernel_reference.py (mpmath, 40 working digits)")
print("// lambda, t, x, y, P, W, dP/dt, dP/dx, d2P/dydt")
for (l, t, x, y) in POINTS:
    vals = [poisson(l, t, x, y), heat(l, t, x, y), dt(l, t, x, y), dx(l, t, x, y), dydt(l, t, x, y)]
    print("{%r, %r, %r, %r, %s}," % (l, t, x, y, ", ".join(mp.nstr(v, 20, min_fixed=1, max_fixed=0) for v in vals)))
