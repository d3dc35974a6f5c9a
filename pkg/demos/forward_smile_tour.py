"""
Forward smile of the Heston model
=================================

Prices forward-start calls by Fourier inversion, turns them into implied
vols, and compares with the small-maturity expansion.
"""

import math

import numpy as np

from fwdsmile import ForwardTenor, HestonParams, forward_call, forward_smile, smile_expansion

p = HestonParams(kappa=1.0, theta=0.07, xi=0.52, rho=-0.8, v=0.07)

# a one-month option that starts in a year
tenor = ForwardTenor(t=1.0, tau=1 / 12, k=0.1)
res = forward_call(tenor, p)
print("call", res.price, "error estimate", res.est_error, "flags", res.flags)

# the smile across strikes, exact against the first two expansion orders
print(f"{'k':>6} {'exact':>9} {'order0':>9} {'order1':>9}")
for k in np.linspace(-0.3, 0.3, 7):
    if abs(k) < 0.05:
        continue
    exact = forward_smile(ForwardTenor(1.0, 1 / 24, k), p).vol
    asym = [math.sqrt(smile_expansion(k, 1.0, 1 / 24, p, order=o)) for o in (0, 1)]
    print(f"{k:6.2f} {exact:9.4f} {asym[0]:9.4f} {asym[1]:9.4f}")

# the smile blows up like tau^(-1/4) as the maturity shrinks
for tau in (1 / 12, 1 / 100, 1 / 1000):
    vol = forward_smile(ForwardTenor(1.0, tau, 0.2), p).vol
    print(f"tau={tau:.4f}  vol={vol:.4f}  vol*tau^(1/4)={vol * tau**0.25:.4f}")
