"""Straight-line scalar re-evaluation of the SINR, rate and outage formulas.

Written with plain Python loops and ``cmath`` so it shares no code path with
the vectorized implementation it checks.
"""

import cmath
import math


def effective(direct, ris_in, phases, ris_out):
    h = complex(direct)
    for a, th, b in zip(ris_in, phases, ris_out):
        h += complex(b) * cmath.exp(1j * th) * complex(a)
    return h


def evaluate(center, edge, bs_ris, ris_edge, phases, active, P, zeta, J, noise, rth_c, rth_e):
    """Everything for one trial.

    center[b][u], edge[b], bs_ris[r][k], ris_edge[r][k], phases[r][k],
    active[r][k]; BS b < J cooperates.
    """
    I = len(edge)
    H = []
    for b in range(I):
        ins = [bs_ris[b][k] if active[b][k] else 0.0 for k in range(len(bs_ris[b]))]
        H.append(effective(edge[b], ins, phases[b], ris_edge[b]))
    gain = [abs(h) ** 2 for h in H]

    y_f = 0.0
    for m in range(J, I):
        y_f += P[m] * gain[m]
    num = den = 0.0
    for j in range(J):
        num += zeta[j] * P[j] * gain[j]
        den += (1 - zeta[j]) * P[j] * gain[j]
    gamma_e = num / (den + y_f + noise)

    gamma_sic, gamma_own, y_c = [], [], []
    for i in range(I):
        y = 0.0
        for m in range(J, I):
            if m != i:
                y += P[m] * abs(center[m][i]) ** 2
        n1 = d1 = d2 = 0.0
        for j in range(J):
            g = abs(center[j][i]) ** 2
            n1 += zeta[j] * P[j] * g
            d1 += (1 - zeta[j]) * P[j] * g
            if j != i:
                d2 += (1 - zeta[j]) * P[j] * g
        gamma_sic.append(n1 / (d1 + y + noise))
        gamma_own.append((1 - zeta[i]) * P[i] * abs(center[i][i]) ** 2 / (d2 + y + noise))
        y_c.append(y)

    gf = 2 ** rth_e - 1
    gc = 2 ** rth_c - 1
    return {
        "gamma_edge": gamma_e,
        "gamma_sic": gamma_sic,
        "gamma_center": gamma_own,
        "y_edge": y_f,
        "y_center": y_c,
        "rate_edge": math.log2(1 + gamma_e),
        "rate_center": [math.log2(1 + g) for g in gamma_own],
        "outage_edge": not gamma_e > gf,
        "outage_center": [not (gamma_sic[i] > gf and gamma_own[i] > gc) for i in range(I)],
    }
