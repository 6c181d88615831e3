"""Regenerates the frozen reference numbers used in the unit tests (50 digits)."""
from mpmath import mp, mpf, exp, sqrt, polyroots

mp.dps = 50


def kappa(g):
    roots = polyroots([1, 2 * exp(2 * g), 1], maxsteps=200, extraprec=200)
    return max(r.real for r in roots)  # the root in (-1, 0)


def rho_hat(g):
    k = kappa(g)
    rho2 = 2 * g * (1 + k * k + 2 * k * exp(-2 * g))
    return sqrt(rho2 / (1 - exp(-4 * g)))


def show(name, v):
    print(f"{name:28s} {mp.nstr(v, 17)}")


for g in (mpf(1), mpf(5), sqrt(2), mpf("0.5")):
    show(f"kappa({mp.nstr(g, 6)})", kappa(g))
    show(f"rho_hat({mp.nstr(g, 6)})", rho_hat(g))
g = mpf(1)
k = kappa(g)
show("rho^2(1)", 2 * g * (1 + k * k + 2 * k * exp(-2 * g)))
show("vplus(+1) at 1", 1 / rho_hat(g))
show("vplus(-1) at 1", -k / rho_hat(g))
show("B'' entry (2,0)-(1,0)", mpf(1) / (rho_hat(sqrt(2)) * rho_hat(mpf(1))))
show("jump, traces (1,0)", -2 / (1 - exp(-4)))
show("project (1,0) a+", 1 / (1 - exp(-4)))
show("project (1,0) a-", -exp(-2) / (1 - exp(-4)))
show("project (1,1)", 1 / (1 + exp(-2)))
show("trace_gap(u+)", (1 + exp(-2)) * 2 - 2 * (1 + exp(-4)))
show("c_2 at nu=1", sqrt(4) / (sqrt(2 * sqrt(2)) * sqrt(2 * mpf(1))))
show("27 e^-3 / 4", 27 * exp(-3) / 4)
# brute-force count of the two-channel synthetic problem is in test_secular.cpp
