"""
Large deviations of the forward return
======================================

Digital prices decay like exp(-rate/sqrt(tau)); the scaled log slope creeps
toward the rate function.
"""

import math

from fwdsmile import ForwardTenor, HestonParams, beta_t, forward_digital, rate_function

p = HestonParams(kappa=1.0, theta=0.07, xi=0.52, rho=-0.8, v=0.07)
k = 0.2
rate = rate_function(k, beta_t(p, 1.0))
print("rate", rate)

for tau in (1 / 12, 1 / 24, 1 / 50, 1 / 100, 1 / 1000):
    prob = forward_digital(ForwardTenor(1.0, tau, k), p).price
    print(f"tau={tau:.4f}  P={prob:.3e}  -sqrt(tau) log P={-math.sqrt(tau) * math.log(prob):.4f}")
