"""Regenerate the frozen reference values used by the unit tests.

Independent 40-digit mpmath routes: direct quadrature of the phase
density, direct sums for psi_pb and the cos^4 series, and mpmath's own
Bessel function for I0 and N. Run ``python tests/oracles.py``.
"""

import mpmath as mp

mp.mp.dps = 40


def density(nb, dxi, terms=120):
    c = [mp.sqrt(mp.e ** (-nb) * nb ** n / mp.factorial(n)) for n in range(terms)]
    return lambda p: abs(mp.fsum(cn * mp.expj(n * (p - dxi)) for n, cn in enumerate(c))) ** 2 / (2 * mp.pi)


def mean_and_variance(nb, dxi):
    f = density(mp.mpf(nb), mp.mpf(dxi))
    pts = mp.linspace(0, 2 * mp.pi, 9)
    m1 = mp.quad(lambda p: p * f(p), pts)
    m2 = mp.quad(lambda p: p * p * f(p), pts)
    return m1, m2 - m1 ** 2


def psi_pb(nb):
    nb = mp.mpf(nb)
    return mp.e ** (-nb) * mp.nsum(
        lambda n: nb ** (n + mp.mpf(1) / 2) / mp.sqrt(mp.factorial(n) * mp.factorial(n + 1)), [0, mp.inf])


def normalization(a1, a2):
    a1, a2 = mp.mpf(a1), mp.mpf(a2)
    return 1 - mp.e ** (-a1 - a2) * mp.besseli(0, abs(a1 - a2) / 2) * mp.besseli(0, (a1 + a2) / 2)


def cos4(x):
    x = mp.mpf(x)
    u = x / 16
    a = mp.nsum(lambda m: u ** (m + 3) / mp.factorial(m + 1) ** 2 * (m * m + 2 * m - 2)
                / mp.sqrt(6 * (2 * m + 3) * (m + 2) ** 3 * (2 * m + 5) * (m + 3) ** 3) / 4, [0, mp.inf])

    def b_term(m3, m5):
        d = m3 + m5
        return (u ** (d + 4) / (mp.factorial(m3 + 2) * mp.factorial(m5 + 2)) ** 2
                * ((d + 4) * (d + 3) - 4 * (m3 + 2) * (m5 + 2))
                / mp.sqrt(6 * (2 * d + 5) * (d + 3) * (2 * d + 7) * (d + 4)) / 8)

    b = mp.nsum(b_term, [0, mp.inf], [0, mp.inf])
    n = 1 - mp.e ** (-x) * mp.besseli(0, x / 2) ** 2
    return mp.mpf(3) / 8 - mp.mpf(3) / 2 * mp.e ** (-x) * (-x ** 2 / 12288 + a + b) / n


if __name__ == "__main__":
    for nb, d in [(4, mp.pi), (1, 0.5), (0.25, 2.0), (10, 1.0)]:
        m, v = mean_and_variance(nb, d)
        print("moments", nb, mp.nstr(mp.mpf(d), 8), mp.nstr(m, 17), mp.nstr(v, 17))
    for nb in [0.1, 1, 4, 10, 50]:
        p = psi_pb(nb)
        print("psi_pb", nb, mp.nstr(p, 17), "1-psi^4", mp.nstr(1 - p ** 4, 17), "1-psi^2", mp.nstr(1 - p ** 2, 17))
    for a1, a2 in [(0, 4), (1, 2), (3, 3), (0, 0.5)]:
        print("N", a1, a2, mp.nstr(normalization(a1, a2), 17))
    for x in [0, 1, 10.5, 15, 30, 60]:
        print("I0", x, mp.nstr(mp.besseli(0, x), 20))
    for x in [0.1, 0.5, 1, 4, 10, 20]:
        print("cos4", x, mp.nstr(cos4(x), 17))
