"""How often the relay has to transmit, per policy, as the rate grows.

SDF switches the relay on whenever it decoded the source. ISDF also asks
the destination: it stays silent if the direct link alone already carries
the rate. The saving is large at low rate and vanishes around 5 bit/s/Hz,
where the direct link is nearly always in outage anyway.
"""

import sys

import numpy as np

from fdrelay import SystemParams, analytic, sweep_rate

n_blocks = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
params = SystemParams.from_db(10, 20, 20, 10, rate=1.0)
rates = np.arange(0.5, 8.01, 0.5)

rows = []
for kind in ("SDF", "ISDF"):
    reps = sweep_rate(kind, params, rates, n_blocks, seed=4)
    rows.append([100 * r.relay_active_fraction for r in reps])
    rows.append([100 * analytic.cooperation_fraction(kind, params.with_rate(r)) for r in rates])

print("  rate  SDF sim  SDF form  ISDF sim  ISDF form   (percent of blocks)")
for i, r in enumerate(rates):
    print(f"{r:6.1f} " + " ".join(f"{col[i]:8.2f}" for col in rows))

try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

labels = ["SDF simulated", "SDF closed form", "ISDF simulated", "ISDF closed form"]
for col, label in zip(rows, labels):
    plt.plot(rates, col, "o" if "simulated" in label else "-", label=label)
plt.xlabel("R [bit/s/Hz]")
plt.ylabel("relay active [%]")
plt.legend()
plt.show()
