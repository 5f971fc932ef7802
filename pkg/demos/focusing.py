"""Focal points of a contracting congruence: predicted interval vs integration."""

from spacethread import FocusingScenario, focusing_classify, focusing_evolve
from spacethread.errors import NoBlowup

# Theta0 = -2 with no curvature: Theta = 1 / (tau - 1/2)
for label, sc in [
    ("R = R*, Ric = 0        ", FocusingScenario(-2.0)),
    ("R < R*, Ric < R* - R   ", FocusingScenario(-2.0, r_star_profile=1.0)),
    ("R < R*, Ric >= R* - R  ", FocusingScenario(-2.0, r_star_profile=1.0, ric00_profile=3.0)),
    ("time-dependent source  ", FocusingScenario(-2.0, ric00_profile="(mul 2 tau)")),
]:
    res = focusing_evolve(sc)
    print(label, "case", res.interval.case, res.interval, "blow-up", round(res.blowup_tau, 9))

# the classifier alone
print(focusing_classify(-0.5), focusing_classify(-0.5, r_ge_rstar=False, ric_ge_gap=False))

# a source above 2 Theta^2 / 3 is not a consistent congruence
res = focusing_evolve(FocusingScenario(-2.0, ric00_profile=3.99))
print(res.blowup_tau, res.notes)

# large enough positive source holds Theta at a finite value
try:
    focusing_evolve(FocusingScenario(-1.0, ric00_profile=4.0, tau_max=5.0))
except NoBlowup as exc:
    print("no blow-up:", exc)
