"""Independent oracle for the frozen expected values used in the C++ tests.

Brute-force evaluation with numpy; shares no code with the library.
Run: python3 tests/oracles/derive_values.py
"""
import itertools
import math

import numpy as np


def pgg_payoff(alpha, r, i, a):
    n = len(alpha)
    pool = sum(r[j] * alpha[j] * a[j] for j in range(n)) / n
    return pool - alpha[i] * a[i]


def fermi(beta, x):
    return 1.0 / (1.0 + math.exp(beta * x))


def states(n):
    # bitmask order: player 1 = least significant bit
    for idx in range(2 ** n):
        yield idx, [(idx >> k) & 1 for k in range(n)]


def transition_matrix(payoff, n, beta, mu_c, mu_d):
    t = np.zeros((2 ** n, 2 ** n))
    for idx, a in states(n):
        for i in range(n):
            b = list(a)
            b[i] = 1 - a[i]
            jdx = idx ^ (1 << i)
            diff = payoff(i, a) - payoff(i, b)
            mut = mu_c[i] if b[i] == 1 else mu_d[i]
            t[idx, jdx] = ((1 - mu_c[i] - mu_d[i]) * fermi(beta[i], diff) + mut) / n
        t[idx, idx] = 1 - t[idx].sum()
    return t


def stationary(t):
    w, v = np.linalg.eig(t.T)
    k = np.argmin(abs(w - 1))
    pi = np.real(v[:, k])
    return pi / pi.sum()


def label(a):
    return "".join("C" if x else "D" for x in a)


print("payoff CCC p1:", pgg_payoff([1, 2, 3], [1, 3, 9], 0, [1, 1, 1]))
print("pgg delta p3:", pgg_payoff([1, 2, 3], [1, 3, 9], 2, [1, 1, 0]) - pgg_payoff([1, 2, 3], [1, 3, 9], 2, [1, 1, 1]))
print("fermi(5,0.6) = %.12g" % fermi(5, 0.6))
print("fermi(2,-6) = %.12g" % fermi(2, -6))
print("fermi(2,2/3) = %.12g" % fermi(2, 2 / 3))
print("DDD->CDD = %.12g" % ((0.8 * fermi(2, 2 / 3) + 0.1) / 3))

alpha, r = [1, 2, 3], [1, 3, 9]
t = transition_matrix(lambda i, a: pgg_payoff(alpha, r, i, a), 3, [2] * 3, [0.1] * 3, [0.1] * 3)
pi = stationary(t)
print("table1 exact (reading order):")
for a in itertools.product([0, 1], repeat=3):
    idx = sum(x << k for k, x in enumerate(a))
    print("  ", label(a), idx, "%.10f" % pi[idx])
ps = [sum(pi[idx] for idx, a in states(3) if a[i]) for i in range(3)]
print("table1 marginals", ["%.12f" % p for p in ps], "pC = %.12f" % (sum(ps) / 3))

# donation game M1, b=1, c=(0.6,0.1)
def m1(b, c):
    return lambda i, a: -c[i] * a[i] + b * a[1 - i]

t = transition_matrix(m1(1, [0.6, 0.1]), 2, [5, 5], [0.05] * 2, [0.15] * 2)
pi = stationary(t)
print("remark1 pi (CC,CD,DC,DD):", ["%.6f" % pi[k] for k in (3, 1, 2, 0)])
print("remark1 p:", "%.6f %.6f" % (pi[1] + pi[3], pi[2] + pi[3]))

# stag hunt M2: f1 = (b-c1) if CC, -c1 if CD, 0 otherwise
def m2(b, c):
    def f(i, a):
        if a[i] == 1:
            return (b if a[1 - i] == 1 else 0) - c[i]
        return 0.0
    return f

t = transition_matrix(m2(1, [0.6, 0.1]), 2, [5, 5], [0.05] * 2, [0.15] * 2)
pi = stationary(t)
p1, p2 = pi[1] + pi[3], pi[2] + pi[3]
prod = [(1 - p1) * (1 - p2), p1 * (1 - p2), (1 - p1) * p2, p1 * p2]
print("stag hunt product gap:", max(abs(pi[k] - prod[k]) for k in range(4)))
t = transition_matrix(m2(1, [0.6, 0.1]), 2, [5, 5], [0.1] * 2, [0.1] * 2)
pi = stationary(t)
p1, p2 = pi[1] + pi[3], pi[2] + pi[3]
prod = [(1 - p1) * (1 - p2), p1 * (1 - p2), (1 - p1) * p2, p1 * p2]
print("stag hunt (mu=0.1) product gap:", max(abs(pi[k] - prod[k]) for k in range(4)))

# Figure 1 left panel configuration, N=5 and N=6
for n in (5, 6):
    alpha = [i + 1 for i in range(n)]
    r = [2 * n] * n
    t = transition_matrix(lambda i, a: pgg_payoff(alpha, r, i, a), n, [0.5] * n, [0.05] * n, [0.15] * n)
    pi = stationary(t)
    pc = sum(pi[idx] * sum(a) / n for idx, a in states(n))
    print("fig1 left N=%d exact pC = %.12f" % (n, pc))

# summary statistics, linear-interpolation quartiles (type 7)
vals = [0.41, 0.52, 0.38, 0.47, 0.55, 0.44, 0.50, 0.39, 0.61, 0.46,
        0.43, 0.58, 0.49, 0.36, 0.53, 0.45, 0.48, 0.57, 0.42]
print("quartiles19:", ["%.12g" % q for q in np.percentile(vals, [25, 50, 75])], "mean %.12g" % np.mean(vals))
print("quartiles4:", np.percentile([0.1, 0.2, 0.3, 0.4], [25, 50, 75]))
print("threshold ex: bound %.12f p=%.12f" % (math.log(0.4 / 0.2), fermi(2, 0.1) * 0.6 + 0.3))
