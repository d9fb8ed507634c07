"""Independent high-precision values of H, H' and the barrier for the test suite.

Run once; the printed numbers are frozen into tests/test_geometry.cpp and
tests/test_elliptic.cpp.
"""
import mpmath as mp

mp.mp.dps = 40


def psi_pe(q):
    return lambda r: r * mp.e ** (r ** q / q)


def dH(psi, n, r):
    pr = psi(r)
    return mp.quad(lambda z: (psi(z) / pr) ** (n - 1), [0, r * 0.9, r * 0.99, r])


def H(psi, n, r):
    return mp.quad(lambda s: dH(psi, n, s), mp.linspace(0, r, 9))


def barrier(psi, n, p, alpha, R, r):
    C = (2 * (3 * p + 1) / (p - 1) ** 2) ** (1 / (p - 1))
    HR = H(psi, n, R)
    return alpha ** (-1 / (p - 1)) * C * HR ** (1 / (p - 1)) / (HR - H(psi, n, r)) ** (2 / (p - 1))


if __name__ == "__main__":
    pe3 = psi_pe(mp.mpf(3))
    for r in (1, 2, 5):
        print(f"pe3 n=3 H({r}) = {mp.nstr(H(pe3, 3, r), 17)}  H' = {mp.nstr(dH(pe3, 3, r), 17)}")
    sinh = mp.sinh
    print("hyp n=3 H(1.5) =", mp.nstr(H(sinh, 3, mp.mpf(1.5)), 17))
    print("hyp n=2 H(2) =", mp.nstr(2 * mp.log(mp.cosh(1)), 17))
    ident = lambda r: r
    print("barrier eucl n=3 p=2 R=20 r=1 =", mp.nstr(barrier(ident, 3, 2, 1, 20, 1), 17))
    print("barrier pe3 n=3 p=2 R=10 r=1 =", mp.nstr(barrier(pe3, 3, 2, 1, 10, 1), 17))
    print("barrier hyp n=3 p=3 R=2 r=0.5 =", mp.nstr(barrier(sinh, 3, 3, 1, 2, mp.mpf(0.5)), 17))
    print("alpha(1/2,1) =", mp.nstr((2 - 2 * mp.e ** -1) ** -1, 17))
    print("shell eucl n=3 [1,2] =", mp.nstr(4 * mp.pi * (8 - 1) / 3, 17))
