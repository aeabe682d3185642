#!/usr/bin/env python3
"""Independent mpmath recomputation of the Padovan/base-3 constants.

Usage:
    padovan_oracle.py                 print the oracle values
    padovan_oracle.py CERT.json       check a certificate against them
"""

import json
import sys

from mpmath import mp, mpf, log, exp, polyroots, floor, nint, fabs

mp.dps = 120


def padovan(n):
    p = [0, 1, 1]
    while len(p) <= n:
        p.append(p[-2] + p[-3])
    return p[: n + 1]


def roots():
    rs = polyroots([1, 0, -1, -1], maxsteps=200, extraprec=400)
    alpha = max((r for r in rs if abs(r.imag) < mpf(10) ** -100), key=lambda r: r.real).real
    beta = [r for r in rs if abs(r.imag) > mpf(10) ** -100][0]
    return alpha, beta


def binet(alpha, beta):
    # Q_k = P_{k+1} = a alpha^k + b beta^k + conj(b) conj(beta)^k
    a = alpha * (alpha + 1) / (3 * alpha**2 - 1)
    b = beta * (beta + 1) / (3 * beta**2 - 1)
    return a, b


def cf(x, count):
    out = []
    for _ in range(count):
        q = int(floor(x))
        out.append(q)
        x = 1 / (x - q)
    return out


def convergents(quotients):
    p, q = [], []
    pm2, pm1, qm2, qm1 = 0, 1, 1, 0
    for a in quotients:
        pk, qk = a * pm1 + pm2, a * qm1 + qm2
        p.append(pk)
        q.append(qk)
        pm2, pm1, qm2, qm1 = pm1, pk, qm1, qk
    return p, q


def dist(x):
    return fabs(x - nint(x))


def matveev_c(t, d):
    return mpf("1.4") * mpf(30) ** (t + 3) * mpf(t) ** mpf("4.5") * d**2 * (1 + log(d))


def chain(log_alpha, log3, h_a_d, offsets):
    d = 3
    c = matveev_c(3, d)
    mv = lambda a1: c * a1 * log_alpha * (d * log3)
    la, lb, l1, l2, l3 = offsets
    v = {}
    v["lambda"] = mv(h_a_d)
    v["c_min"] = v["lambda"] + max(la, lb, 0)
    base = h_a_d + d * log(2)
    v["lambda1_a1"] = base + v["c_min"]
    v["case1"] = mv(v["lambda1_a1"]) + max(l1, 0)
    v["lambda2_a1"] = h_a_d + d * v["c_min"]
    v["case2"] = mv(v["lambda2_a1"]) + max(l2, 0)
    v["lambda3_a1"] = max(base + v["c_min"] + d * v["case1"], base + v["case2"] + d * v["c_min"])
    v["K"] = (mv(v["lambda3_a1"]) + max(l3, 0)) / log_alpha
    y = exp(1) * v["K"]
    v["N_max"] = 8 * y * log(y) ** 3 / exp(1)
    return v


def reduction(tau, mu, a_const, b_log, m_bound, qs):
    for k, q in enumerate(qs):
        if q <= 6 * m_bound:
            continue
        eps = dist(mu * q) - m_bound * dist(tau * q)
        if eps > 0:
            return k, q, eps, log(a_const * q / eps) / b_log
    return None


def oracle():
    alpha, beta = roots()
    a, b = binet(alpha, beta)
    la, l3 = log(alpha), log(3)
    h_a = log(23) / 3  # 23x^3 - 23x^2 + 6x - 1, all conjugates inside the unit disc
    offsets = (5 * la, l3, l3, 5 * la, 4 * la)
    tau = la / l3
    quotients = cf(tau, 95)
    p, q = convergents(quotients)
    m_bound = 2 * mpf(10) ** 46
    out = {
        "alpha": alpha,
        "beta_abs": abs(beta),
        "a": a,
        "b_abs": abs(b),
        "log_alpha": la,
        "log_base": l3,
        "h_a": h_a,
        "h_a_times_D": 3 * h_a,
        "log_base_over_log_alpha": l3 / la,
    }
    out.update(chain(la, l3, 3 * h_a, offsets))
    k, qk, eps, w = reduction(tau, log(a) / l3, 36, la, m_bound, q)
    return out, quotients, p, q, (k, qk, eps, w)


def within(value, interval):
    lo, hi = mpf(interval["lo"]), mpf(interval["hi"])
    slack = fabs(value) * mpf(10) ** -27 + mpf(10) ** -60
    return lo - slack <= value <= hi + slack


def check(path):
    values, quotients, p, q, (k, qk, eps, w) = oracle()
    cert = json.load(open(path))
    stages = {s["name"]: s for s in cert["stages"]}
    failures = 0

    def expect(cond, what):
        nonlocal failures
        print(("ok   " if cond else "FAIL ") + what)
        failures += 0 if cond else 1

    recorded = dict(stages["constants"]["certified_constants"])
    recorded.update(stages["absolute_bound"]["certified_constants"])
    for name, value in values.items():
        if name in recorded:
            expect(within(value, recorded[name]), f"{name} = {mp.nstr(value, 20)}")
    pos = stages["reduction_gamma"]["certified_constants"]["orientations"][0]["alpha"]["outcome"]
    expect(pos["convergent_index"] == k, f"round 1 convergent index {k}")
    expect(pos["q"] == str(qk), "round 1 q")
    expect(within(eps, pos["epsilon"]), f"round 1 epsilon = {mp.nstr(eps, 20)}")
    expect(within(w, pos["w"]), f"round 1 w = {mp.nstr(w, 20)}")
    threshold_n = stages["conclusion"]["conclusion"]["threshold_n"]
    u = padovan(threshold_n)[threshold_n]
    implied = max(mm for mm in range(0, 400) if 2 * 3**mm <= 3 * u)
    expect(stages["conclusion"]["conclusion"]["threshold_m"] == implied, f"threshold m = {implied}")
    return failures


def main():
    if len(sys.argv) > 1:
        sys.exit(1 if check(sys.argv[1]) else 0)
    values, quotients, p, q, red = oracle()
    for name, value in values.items():
        print(f"{name} = {mp.nstr(value, 40)}")
    print("quotients", quotients[:20])
    print("reciprocal quotients", cf(values["log_base_over_log_alpha"], 12))
    print("p88 =", p[88])
    print("q88 =", q[88])
    print("round 1 (36, alpha):", red[0], mp.nstr(red[2], 30), mp.nstr(red[3], 30))


if __name__ == "__main__":
    main()
