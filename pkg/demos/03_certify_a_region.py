"""Certify a small region of each lemma and inspect the tube machinery."""
import math

from ineqcert import certifier as C

# off the zero set: plain branch and bound gives a positive lower bound delta
outer = ((1.0, 1.2), (math.atan(5), math.atan(6)), (math.atan(5), math.atan(6)))
parts = C.certify_region("trig", outer, C.TubeSpec(), 0.0, 10_000)
print("off-manifold box:", parts["region"].status, "delta =", parts["region"].delta)

# one tube slice: Krawczyk proves a unique stationary point, the PD core covers the rest
ok, iters, box = C.krawczyk("hyp", (2.0, 2.0), (0.99, 1.01))
print("Krawczyk at l=2:", ok, iters, "x in", box[0], "(coth 1 = %.12f)" % (1 / math.tanh(1)))

cfg = C.CertConfig.default(2, t_range=(2.0, 2.2), u_range=(0.7, 1.4), budget=200_000)
cert = C.certify_lemma(2, cfg)
print("lemma 7.4 on l in [2, 2.2]:", cert.status, "delta =", cert.delta,
      "boxes =", cert.stats["boxes_processed"])

# negative control: with no tube the zero set refutes strictness
cert0 = C.certify_lemma(2, C.CertConfig.default(2, t_range=(2.0, 2.2), u_range=(0.7, 1.4), rho=0.0))
print("rho = 0:", cert0.status)
