"""Replay the algebraic ledger and watch a tampered step fail."""
from ineqcert import identities as I

rep = I.verify_all("both")
print(f"{sum(r.status == 'verified' for r in rep.steps)}/{len(rep.steps)} steps verified")
for r in rep.steps[:5]:
    print(r.id, r.name, r.status, r.witness)

step = I.get_step("G_subtract")
print(step.id, step.method, "-", step.citation)

bad = I.verify_step(step, fixture=I.tampered_fixture(step))
print("tampered:", bad.status, "witness", bad.witness[0][:60])

# the x- and y-stationarity equations are swapped by x <-> y
print("mirror:", I.mirror_check())
