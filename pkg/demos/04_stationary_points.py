"""Where does Newton on grad = 0 end up? Only on the zero set or the domain edge."""
from collections import Counter

from ineqcert import critical as K

for mode in ("trig", "hyp"):
    pts = K.multistart(mode, 300, seed=1)
    print(mode, dict(Counter(p.classification for p in pts)))
    worst = max(K.manifold_distance(p.point) for p in pts if p.classification == "manifold")
    print("  max distance of interior convergents from the curve:", worst)

# the reduced (alpha, beta) system has one admissible root
for s in K.solve_alpha_beta("trig"):
    print(s.branch, s.alpha, s.beta, s.admissible, s.reason)

print(K.brute_force_min("hyp", ((0.5, 3), (1.05, 10), (1.05, 10)), 80))
