"""Independent high-precision reference values frozen into the Rust tests.

Everything here is computed with mpmath / scipy directly from the defining
integrals or closed forms, without touching the Rust implementation.
Run: python3 tools/oracle_values.py
"""
import mpmath as mp
from scipy import optimize

mp.mp.dps = 40

Phi = lambda x: mp.ncdf(x)


def gauss_hs_quad(sigma, sens, eps):
    # integral of (N(sens, s^2) - e^eps N(0, s^2))_+ ; crossing point known
    p = lambda t: mp.npdf(t, sens, sigma)
    q = lambda t: mp.npdf(t, 0, sigma)
    t0 = eps * sigma**2 / sens + sens / 2
    return mp.quad(lambda t: p(t) - mp.e**eps * q(t), [t0, t0 + 5 * sigma, t0 + 40 * sigma, mp.inf])


def gauss_closed(sigma, sens, eps):
    a = mp.mpf(sens) / (2 * sigma)
    b = mp.mpf(eps) * sigma / sens
    return Phi(a - b) - mp.e**eps * Phi(-a - b)


def solve(f, target, lo, hi):
    # bisection on log f, f monotone decreasing
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


print("gauss sigma=4 sens=1 eps=0", mp.nstr(gauss_closed(4, 1, 0), 20), mp.nstr(gauss_hs_quad(4, 1, 0), 20))
print("gauss sigma=4 sens=1 eps=1", mp.nstr(gauss_closed(4, 1, 1), 20), mp.nstr(gauss_hs_quad(4, 1, 1), 20))
for s in (1, 4):
    for d in (1, 2):
        worst = max(abs(gauss_closed(s, d, e / 2) - gauss_hs_quad(s, d, e / 2)) for e in range(11))
        print("closed vs quad", s, d, mp.nstr(worst, 5))

e_m1 = solve(lambda e: gauss_closed(4, 2, e), mp.mpf("1e-6"), 0, 20)
print("eps gauss sigma=4 sens=2 delta=1e-6", mp.nstr(e_m1, 15))
e_m1000 = solve(lambda e: 1000 * gauss_closed(4, 2, e), mp.mpf("1e-6"), 0, 20)
print("eps rnm m=1000 sigma=4 delta=1e-6", mp.nstr(e_m1000, 15))
print("rnm closed sigma=4 m=1000", mp.nstr(mp.mpf(2) / 16 + mp.mpf(2) / 4 * mp.sqrt(2 * mp.log(mp.mpf(10) ** 9)), 15))


def canonne(alpha, epsp, eps):
    alpha = mp.mpf(alpha)
    return mp.e ** ((alpha - 1) * (epsp - eps)) / alpha * (1 - 1 / alpha) ** (alpha - 1)


print("canonne a=2 e'=1 e=3", mp.nstr(canonne(2, 1, 3), 20))
# dense alpha scan for the Gaussian RDP curve alpha/(2 sigma^2), sigma=4, eps=1
dense = min(canonne(1 + k / 1000.0, (1 + k / 1000.0) / 32, 1) for k in range(1, 511001, 7))
grid = [1 + k / 10 for k in range(1, 91)] + list(range(11, 257))
on_grid = min(canonne(a, mp.mpf(a) / 32, 1) for a in grid)
print("gauss rdp->dp sigma=4 eps=1 dense", mp.nstr(dense, 15), "grid", mp.nstr(on_grid, 15))

# truncated negative binomial eta=0
g = mp.mpf("0.1")
print("tnb eta=0 gamma=0.1 mean", mp.nstr((1 / g - 1) / mp.log(1 / g), 20))
gam = solve(lambda g: (1 / g - 1) / mp.log(1 / g), 10, mp.mpf("1e-6"), mp.mpf("0.5"))
print("tnb eta=0 m=10 gamma", mp.nstr(gam, 20))

# sigma for (1.5, 1e-6)
sig = solve(lambda s: gauss_closed(s, 1, 1.5), mp.mpf("1e-6"), 0.5, 20)
print("sigma for eps=1.5 delta=1e-6", mp.nstr(sig, 20))

# rnm exact m=2 mu=(0,0) mu'=(-1,1) sigma=1 eps=0
print("rnm exact toy", mp.nstr(mp.mpf(1) / 2 - Phi(-mp.sqrt(2)), 20))

# subsampled gaussian pair: P = (1-q) N(0,s^2) + q N(1,s^2), Q = N(0,s^2)
q = mp.mpf(256) / 60000
s = mp.mpf("1.1")
P = lambda t: (1 - q) * mp.npdf(t, 0, s) + q * mp.npdf(t, 1, s)
Q = lambda t: mp.npdf(t, 0, s)


def sg_hs(eps, remove=True):
    e = mp.e**eps
    # remove: loss increasing in t; crossing where (1-q) + q exp((2t-1)/(2 s^2)) = e^eps
    x = (e - (1 - q)) / q
    if remove:
        if x <= 0:
            return 1 - e
        t0 = s**2 * mp.log(x) + mp.mpf(1) / 2
        return mp.quad(lambda t: P(t) - e * Q(t), [t0, t0 + 5 * s, t0 + 40 * s, mp.inf])
    # add: P=N(0), Q=mix, loss decreasing in t; (Q/P) = (1-q)+q exp(..) <= e^-eps
    x = (mp.e**(-eps) - (1 - q)) / q
    if x <= 0:
        return mp.mpf(0)
    t0 = s**2 * mp.log(x) + mp.mpf(1) / 2
    return mp.quad(lambda t: Q(t) - e * P(t), [-mp.inf, t0 - 40 * s, t0 - 5 * s, t0])


for eps in (0, 0.5, 1):
    print("subsampled T=1 eps", eps, "remove", mp.nstr(sg_hs(eps, True), 20), "add", mp.nstr(sg_hs(eps, False), 20))


def renyi(alpha, remove=True, qq=q, ss=s):
    alpha = mp.mpf(alpha)
    Pm = lambda t: (1 - qq) * mp.npdf(t, 0, ss) + qq * mp.npdf(t, 1, ss)
    Q0 = lambda t: mp.npdf(t, 0, ss)
    if remove:
        f = lambda t: (Pm(t) / Q0(t)) ** alpha * Q0(t)
    else:
        f = lambda t: (Q0(t) / Pm(t)) ** alpha * Pm(t)
    pts = sorted(set([-mp.inf, -20 * ss, 0, 1, alpha, 1 - alpha, alpha + 20 * ss, mp.inf]))
    return mp.log(mp.quad(f, pts)) / (alpha - 1)


print("renyi q=256/60000 s=1.1 a=16 remove", mp.nstr(renyi(16, True), 20), "add", mp.nstr(renyi(16, False), 20))
print("renyi q=256/60000 s=1.1 a=2.5 remove", mp.nstr(renyi(2.5, True), 20))
print("renyi q=0.01 s=2 a=1.0001 remove", mp.nstr(renyi(1.0001, True, mp.mpf("0.01"), 2), 20))
