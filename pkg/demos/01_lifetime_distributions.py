"""The four lifetime-distribution families behind every timed event.

Shows closed-form means and transforms next to Monte Carlo estimates,
for the default parameter settings of each variable group.
"""

import numpy as np

from rejuvkit import Deterministic, Erlang, Exponential, Hypoexponential

rng = np.random.default_rng(7)

catalog = [
    ("aging (exponential)", Exponential(0.0006857)),
    ("aging (Erlang-2)", Erlang(0.0013717, 2)),
    ("aging (hypoexponential)", Hypoexponential(0.0010816, 0.0018762)),
    ("failure (hypoexponential)", Hypoexponential(0.0013674, 0.0043860)),
    ("fixing (exponential)", Exponential(1.0)),
    ("reboot (Erlang-2)", Erlang(24.0, 2)),
    ("migration (exponential)", Exponential(120.5)),
    ("migration trigger (30 h step)", Deterministic(30.0)),
]

print(f"{'variable':<32}{'mean [h]':>12}{'sample mean':>14}{'LST(1e-3)':>12}")
for name, dist in catalog:
    draws = dist.sample(rng, size=200_000)
    print(f"{name:<32}{dist.mean():>12.4f}{draws.mean():>14.4f}{dist.lst(1e-3):>12.6f}")

print()
print("survival of the default failure law over the first two days:")
failure = Hypoexponential(0.0013674, 0.0043860)
for t in (0.0, 6.0, 12.0, 24.0, 36.0, 48.0):
    bar = "#" * int(60 * failure.survival(t))
    print(f"  t = {t:5.1f} h  S = {failure.survival(t):.6f}  {bar[:60]}")
