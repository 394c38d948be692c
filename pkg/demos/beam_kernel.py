"""Boundary kernels of the Euler-Bernoulli beam stencil against the Bessel formula.

The beam stencil ``a = (-6, 4, -1)`` has the closed form
``f_0^1(t) = 2 J_1(2t) sin(2t) / t``; the numerical kernel should approach it
at second order in the step.
"""
import math

import numpy as np

from periabc import analytic_beam_kernel, beam_stencil, integrate_g, solve_f

beam = beam_stencil()
T = 18 * math.pi
print(f"{'dt':>10} {'|f - exact| at 3pi':>20} {'at 18pi':>12}")
for n in (250, 400, 500):
    dt = 3 * math.pi / n
    kt = solve_f(integrate_g(beam, dt, T))
    f = kt.kernel(1, 0)
    err = [abs(f[int(round(t / dt))] - analytic_beam_kernel(t)) for t in (3 * math.pi, T)]
    print(f"{dt:10.5f} {err[0]:20.3e} {err[1]:12.3e}")

# the other three kernels have no closed form; print their late values instead
kt = solve_f(integrate_g(beam, 3 * math.pi / 500, T))
for m in (1, 2):
    for n in (0, -1):
        print(f"f_{n}^{m}(18 pi) = {kt.kernel(m, n)[-1]: .6e}")
print("max |f| over the window:", np.abs(kt.f).max())
