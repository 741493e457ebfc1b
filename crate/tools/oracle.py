"""Extended-precision reference values for the kernel test suite.

Evaluates every closed form term by term at 60 significant digits with
mpmath. Output is frozen into the Rust tests; rerun after changing a case.
"""
from mpmath import mp, mpf, sqrt

mp.dps = 60


def p(x, h):
    x = mpf(x)
    return mpf(0) if x == 0 else abs(x) ** (2 * mpf(h))


def fbm_cov(h, s, t):
    return (p(t, h) + p(s, h) - p(mpf(t) - mpf(s), h)) / 2


def sfbm_cov(h, s, t):
    s, t = mpf(s), mpf(t)
    return p(s, h) + p(t, h) - (p(s + t, h) + p(t - s, h)) / 2


def cov(a, H, s, t):
    return sum(mpf(ai) ** 2 * sfbm_cov(hi, s, t) for ai, hi in zip(a, H))


def mcov(a, H, s, t):
    return sum(mpf(ai) ** 2 * fbm_cov(hi, s, t) for ai, hi in zip(a, H))


def var(a, H, t):
    return cov(a, H, t, t)


def inc_cov(a, H, u, v, s, t):
    return cov(a, H, v, t) - cov(a, H, v, s) - cov(a, H, u, t) + cov(a, H, u, s)


def inc_moment(a, H, s, t):
    return var(a, H, t) + var(a, H, s) - 2 * cov(a, H, s, t)


def lag_c(a, H, x, n):
    x = mpf(x)
    return inc_cov(a, H, x, x + 1, x + n, x + n + 1)


def lag_r(a, H, n):
    return sum(mpf(ai) ** 2 / 2 * (p(n + 1, hi) - 2 * p(n, hi) + p(n - 1, hi)) for ai, hi in zip(a, H))


def lag_asym(a, H, q, n):
    return sum(2 * (1 - mpf(hi)) * mpf(hi) * (2 * mpf(hi) - 1) * (2 * q + 1) * mpf(ai) ** 2 * mpf(n) ** (2 * mpf(hi) - 3) for ai, hi in zip(a, H))


def markov(a, H, s, t, u):
    return cov(a, H, s, u) * var(a, H, t) - cov(a, H, s, t) * cov(a, H, t, u)


def cond_var(a, H, t, s):
    return var(a, H, t) - cov(a, H, s, t) ** 2 / var(a, H, s)


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


show("fbm_cov(0.75,-1,1)", fbm_cov("0.75", -1, 1))
show("fbm_cov(0.7,3,3)", fbm_cov("0.7", 3, 3))
show("sfbm_cov(0.75,1,2)", sfbm_cov("0.75", 1, 2))
show("sfbm_cov(0.75,1,1)", sfbm_cov("0.75", 1, 1))
show("msfbm_cov((1,1),(.5,.75),1,2)", cov([1, 1], ["0.5", "0.75"], 1, 2))
show("mfbm_cov((1,1),(.5,.75),1,2)", mcov([1, 1], ["0.5", "0.75"], 1, 2))
show("inc_moment(.75,1,2)", inc_moment([1], ["0.75"], 1, 2))
show("inc_cov(.75,0,1,1,2)", inc_cov([1], ["0.75"], 0, 1, 1, 2))
show("inc_cov(.25,0,1,1,2)", inc_cov([1], ["0.25"], 0, 1, 1, 2))
show("lower(.25)", 2 - mpf(2) ** mpf("-0.5"))
show("lag_asym(.75,0,10)", lag_asym([1], ["0.75"], 0, 10))
show("lag_r(.75,1)", lag_r([1], ["0.75"], 1))
show("gap(.75,x=0,n=1)", lag_c([1], ["0.75"], 0, 1) - lag_r([1], ["0.75"], 1))
show("markov(.75,1,2,4)", markov([1], ["0.75"], 1, 2, 4))
show("cond_var(.75,2,1)", cond_var([1], ["0.75"], 2, 1))
show("var(.75,2)", var([1], ["0.75"], 2))
show("gram22 (1,1),(.5,.75) t=2", var([1, 1], ["0.5", "0.75"], 2))
show("gram11 (1,1),(.5,.75) t=1", var([1, 1], ["0.5", "0.75"], 1))
# rescaling identity: Cov(spec, 2s, 2t) for a=(1,2), H=(0.3,0.8)
for s, t in [("0.37", "1.9"), ("2.5", "7.25"), ("0.01", "9.99")]:
    show(f"cov((1,2),(.3,.8),2*{s},2*{t})", cov([1, 2], ["0.3", "0.8"], 2 * mpf(s), 2 * mpf(t)))
# lag closed form at larger arguments
for h, q, n in [("0.75", 0, 1000), ("0.75", 3, 1000), ("0.6", 10, 1000), ("0.9", 0, 100000), ("0.3", 2, 50)]:
    show(f"C(H={h},p={q},n={n})", lag_c([1], [h], q, n))
for h, x in [("0.75", 1000), ("0.75", 100000), ("0.75", "31622.7766")]:
    show(f"gap(H={h},x={x},n=1)", lag_c([1], [h], mpf(x), 1) - lag_r([1], [h], 1))
# Markov residual at the designated triples
for h in ["0.55", "0.6", "0.75", "0.9"]:
    t = mpf(1000)
    show(f"markov(H={h}, sqrt(t),t,t^2 t=1e3)", markov([1], [h], sqrt(t), t, t * t))
for h in ["0.05", "0.1", "0.2", "0.3", "0.4", "0.45"]:
    t = mpf("0.001")
    show(f"markov(H={h}, t^2,t,sqrt(t) t=1e-3)", markov([1], [h], t * t, t, sqrt(t)))
show("markov mix (1,1),(.5,.8)", markov([1, 1], ["0.5", "0.8"], sqrt(mpf(1000)), 1000, 10 ** 6))
show("markov mix (1,1),(.3,.5)", markov([1, 1], ["0.3", "0.5"], mpf("1e-6"), mpf("1e-3"), sqrt(mpf("1e-3"))))
