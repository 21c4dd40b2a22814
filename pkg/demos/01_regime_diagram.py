"""Map the (beta, q) parameter plane.

Three closed-form criteria partition the plane: where the discretization is
fine enough that the constrained minimizer is provably unique (the dynamics
is certainly well defined), where the antipodal constraint certifies
non-uniqueness (the limiting rates break down), and where the
equidistribution is purely attractive.  Only outside that last region does
the disordered state have an unstable rotation mode.

Writes regime_diagram.csv; plots a PNG when matplotlib is importable.
"""

import numpy as np

from meanrotor import classify_regime

betas = np.linspace(2.05, 100.0, 240)
qs = np.arange(3, 101)

rows = []
codes = np.zeros((len(betas), len(qs)))
for i, beta in enumerate(betas):
    for j, q in enumerate(qs):
        lab = classify_regime(float(beta), int(q))
        rows.append((beta, q, int(lab.uniqueness), int(lab.non_uniqueness),
                     int(lab.equidistribution_attractive)))
        # 0 unknown, 1 uniqueness, 2 non-uniqueness, 3 purely attractive eq
        codes[i, j] = (1 if lab.uniqueness else 2 if lab.non_uniqueness else 0)
        if lab.equidistribution_attractive:
            codes[i, j] = 3

with open("regime_diagram.csv", "w") as fh:
    fh.write("beta,q,uniqueness,non_uniqueness,eq_attractive\n")
    for beta, q, u, n, a in rows:
        fh.write(f"{beta:.17g},{q},{u},{n},{a}\n")

n_total = len(rows)
for name, col in (("uniqueness", 2), ("non-uniqueness", 3), ("eq attractive", 4)):
    frac = sum(r[col] for r in rows) / n_total
    print(f"{name:16s}: {frac:6.1%} of the grid")
print("wrote regime_diagram.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    im = ax.pcolormesh(qs, betas, codes, cmap="Greys_r", shading="nearest")
    ax.set_xlabel("q (number of arcs)")
    ax.set_ylabel("beta (coupling strength)")
    ax.set_title("black: uniqueness guaranteed / gray: unknown /\n"
                 "light: non-uniqueness, white: purely attractive equidistribution")
    fig.tight_layout()
    fig.savefig("regime_diagram.png", dpi=150)
    print("wrote regime_diagram.png")
except ImportError:
    pass
