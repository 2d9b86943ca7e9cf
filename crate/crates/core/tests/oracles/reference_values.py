"""Arbitrary-precision reference amplitudes used as frozen constants in tests/oracle_values.rs.

Transverse amplitudes (longitudinal phase exp(i m V_x (L + x) / (2 hbar)) factored out),
computed by direct quadrature of the kernel products with mpmath at 40 digits.
Run: python3 reference_values.py
"""
import mpmath as mp

mp.mp.dps = 40
hbar = mp.mpf("1.054571817e-34")
m = mp.mpf("9.1093837015e-31")
k = m / hbar
vx = mp.mpf("1.3e8")
L = mp.mpf("0.01")
b = mp.mpf("0.5e-7")
T = L / vx


def kern(s):
    return mp.sqrt(1 / (2j * mp.pi * hbar * s / m))


def classical(x, y, xi):
    t = x / vx
    f = lambda d: mp.exp(-d**2 / (2 * b**2) + 0.5j * k * ((xi + d)**2 / T + (y - xi - d)**2 / t))
    pts = mp.linspace(-12 * b, 12 * b, 49)
    return kern(T) * kern(t) * mp.quad(f, pts)


def hop_time(a, c):
    return (a - c)**2 * mp.sqrt(2) * m / hbar


def nonclassical(x, y, xi, xj):
    t = x / vx
    tau = hop_time(xi, xj)

    def inner(dc):
        g = lambda db: mp.exp(-dc**2 / (2 * b**2) - db**2 / (2 * b**2) + 0.5j * k * (
            (xi + dc)**2 / T + (xi + dc - xj - db)**2 / tau + (y - xj - db)**2 / t))
        return mp.quad(g, mp.linspace(-12 * b, 12 * b, 25))

    pts = mp.linspace(-12 * b, 12 * b, 25)
    return kern(T) * kern(tau) * kern(t) * mp.quad(inner, pts)


if __name__ == "__main__":
    print("hop_time(1e-6)", mp.nstr(hop_time(mp.mpf("1e-6"), 0), 20))
    for args in [(0.01, 0.0, 1e-6), (0.005, 0.3e-6, 0.0)]:
        v = classical(*[mp.mpf(repr(a)) for a in args])
        print("classical", args, mp.nstr(v.real, 17), mp.nstr(v.imag, 17))
    mp.mp.dps = 25
    for args in [(0.01, 1e-6, 0.0, 1e-6), (0.01, 0.5e-6, -1e-6, 0.0)]:
        v = nonclassical(*[mp.mpf(repr(a)) for a in args])
        print("nonclassical", args, mp.nstr(v.real, 17), mp.nstr(v.imag, 17))
