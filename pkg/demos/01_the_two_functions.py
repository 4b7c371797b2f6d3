"""Evaluate G and F, look at their zero set and the curvature across it."""
import math

import numpy as np

from ineqcert import scalar
from ineqcert.critical import value_numpy
from ineqcert.scalar import EvalPoint

# a few reference values
print("G(pi, 1, 1)   =", scalar.G(math.pi, 1, 1))        # 10 - 3 pi
print("G(pi/2, 0, 0) =", scalar.G(math.pi / 2, 0, 0))    # 3 pi - 7
print("F(0, 2, 2)    =", scalar.F(0, 2, 2))

# both vanish on the diagonal curve x = y = cot(theta/2) (resp. coth(l/2))
for th in (0.5, 1.5, 2.5):
    m, _ = scalar.manifold_point("trig", th)
    print(f"theta={th}: x=y={m:.6f}  G={scalar.G(th, m, m):+.1e}  grad={scalar.grad_G(EvalPoint('trig', th, m, m))[:3]}")
for ell in (0.5, 2.0, 5.0):
    m, _ = scalar.manifold_point("hyp", ell)
    print(f"l={ell}: x=y={m:.6f}  F={scalar.F(ell, m, m):+.1e}")

# transversal Hessian is sin^3(theta) [[2,1],[1,2]]: positive definite, so the zero is a strict valley
th = 2.0
m, _ = scalar.manifold_point("trig", th)
print("H_xy at theta=2:", np.array(scalar.hessian_xy_G(EvalPoint("trig", th, m, m))))
print("sin^3(2) =", math.sin(th) ** 3)

# one slice of the landscape
x = np.linspace(0, 3, 7)
X, Y = np.meshgrid(x, x)
print(np.round(value_numpy("trig", 1.5, X, Y), 3))
