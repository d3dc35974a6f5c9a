"""
At-the-money forward vol
========================

The ATM forward smile stays bounded and tends to the mean future vol.
"""

from fwdsmile import ForwardTenor, HestonParams, atm_expansion, delta_moment, forward_smile

p = HestonParams(kappa=1.0, theta=0.07, xi=0.4, rho=-0.6, v=0.07)

for t in (0.25, 0.5, 1.0, 2.0):
    a = atm_expansion(t, p)
    exact = forward_smile(ForwardTenor(t, 1 / 12, 0.0), p).vol
    print(f"t={t:4.2f}  exact={exact:.5f}  sigma0={a.sigma0:.5f}  first order={a.vol(1 / 12):.5f}")

# sigma0 is E[sqrt(V_t)]; the first moment is the usual mean-reverting mean
print("E[sqrt V_1] =", delta_moment(1.0, 0.5, p))
print("E[V_1]      =", delta_moment(1.0, 1.0, p))
