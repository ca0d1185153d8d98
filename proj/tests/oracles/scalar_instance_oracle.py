"""Exact rational evaluation of the gain recursions for the scalar test instance.

N=1, d_x=d_u0=d_u1=1, A=1, B=[1 1], R_t=I_3, p=1/2, T=2,
mu0=1, Sigma0=1, Sigma_w=1. Values printed here are frozen into the C++ tests.
"""
import sympy as sp

A = sp.Matrix([[1]])
B = sp.Matrix([[1, 1]])  # columns (u0, u1)
B_loc = sp.Matrix([[1]])
R = sp.eye(3)
RXX, RXU, RUU = R[:1, :1], R[:1, 1:], R[1:, 1:]
p = sp.Rational(1, 2)
T = 2
mu0, S0, Sw = sp.Integer(1), sp.Integer(1), sp.Integer(1)


def omega(P, A, B, R11, R22, R12):
    H = R22 + B.T * P * B
    return R11 + A.T * P * A - (R12 + A.T * P * B) * H.inv() * (R12.T + B.T * P * A)


def psi(P, A, B, R22, R12):
    return -(R22 + B.T * P * B).inv() * (R12.T + B.T * P * A)


P = {T + 1: sp.zeros(1, 1)}
Pt = {T + 1: sp.zeros(1, 1)}
K, Kt = {}, {}
e = {T + 1: sp.Integer(0)}
for t in range(T, -1, -1):
    P[t] = omega(P[t + 1], A, B, RXX, RUU, RXU)
    K[t] = psi(P[t + 1], A, B, RUU, RXU)
    mix = (1 - p) * P[t + 1] + p * Pt[t + 1]
    Pt[t] = omega(mix, A, B_loc, RXX, RUU[1:, 1:], RXU[:, 1:])
    Kt[t] = psi(mix, A, B_loc, RUU[1:, 1:], RXU[:, 1:])
    e[t] = e[t + 1] + (mix * Sw)[0, 0]

for t in range(T + 2):
    print(f"t={t} P={P[t][0,0]} Pt={Pt[t][0,0]} e={e[t]}")
for t in range(T + 1):
    print(f"t={t} K={list(K[t])} Kt={Kt[t][0,0]}")
v_prior = (P[0][0, 0] * mu0**2 + Pt[0][0, 0] * S0 + e[0])
v_expected = P[0][0, 0] * mu0**2 + ((1 - p) * P[0][0, 0] + p * Pt[0][0, 0]) * S0 + e[0]
print("V0(prior belief) =", v_prior, float(v_prior))
print("E[V0(post-observation belief)] =", v_expected, sp.N(v_expected, 20))


# Independent check: enumerate every channel sequence gamma_{0:T} and propagate
# exact second moments of (x, xhat) under the optimal linear policy.
import itertools

Kc = {t: K[t] for t in K}
total = sp.Integer(0)
for gam in itertools.product([0, 1], repeat=T + 1):
    prob = sp.Integer(1)
    for g in gam:
        prob *= (1 - p) if g else p
    # moments of z = (x, xhat): mean vector and second moment matrix
    m = sp.Matrix([mu0, mu0])
    M = sp.Matrix([[S0 + mu0**2, mu0**2], [mu0**2, mu0**2]])
    cost = sp.Integer(0)
    for t in range(T + 1):
        if gam[t]:
            Rst = sp.Matrix([[1, 0], [1, 0]])  # xhat <- x
            m, M = Rst * m, Rst * M * Rst.T
        # actions: u0 = Kc0 xhat, ubar = Kc1 xhat, u1 = ubar + Kt (x - xhat)
        L = sp.Matrix([[1, 0],
                       [0, Kc[t][0]],
                       [Kt[t][0, 0], Kc[t][1] - Kt[t][0, 0]]])
        cost += (L.T * R * L * M).trace()
        # x' = x + u0 + u1 + w ; xhat' (drop) = xhat + u0 + ubar
        F = sp.Matrix([[1 + Kt[t][0, 0], Kc[t][0] + Kc[t][1] - Kt[t][0, 0]],
                       [0, 1 + Kc[t][0] + Kc[t][1]]])
        m = F * m
        M = F * M * F.T + sp.Matrix([[Sw, 0], [0, 0]])
    total += prob * cost
print("enumerated expected cost =", sp.nsimplify(total), sp.N(total, 20))
