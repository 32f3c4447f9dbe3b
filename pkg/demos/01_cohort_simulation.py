"""Generate a cohort and look at what the day-resolution simulator produces.

The process per day: still-unvaccinated individuals receive a first dose
according to the uptake curve, vaccine types follow the observed German mix,
second doses come 42 days (mRNA) or 84 days (AstraZeneca) later, and the
daily event probability is multiplied by rr_vacc inside the 21-day risk
window after an mRNA dose.
"""

import numpy as np

from linksim import (
    SimConfig,
    VaccineType,
    load_first_dose_curve,
    simulate_cohort,
    write_first_dose_curve,
)

# A scaled-down version of the study setting. The event probability is raised
# so that a small cohort still shows a few hundred events.
config = SimConfig(
    n_sim=50_000,
    n_days=550,
    campaign_start_day=366,
    p_event_year=0.01,
)

cohort = simulate_cohort(config, seed=7)

print(f"individuals:        {len(cohort):,}")
print(f"vaccinated:         {cohort.n_vaccinated:,} "
      f"({cohort.n_vaccinated / len(cohort):.1%} by day {config.n_days})")
for vt in VaccineType:
    n = int(np.count_nonzero(cohort.vaccine_type == vt))
    print(f"  {vt.name.lower():<12} {n:,}")
second = int(np.count_nonzero(cohort.dose2_day >= 0))
print(f"second doses:       {second:,} (doses past day {config.n_days} are dropped)")
print(f"events:             {len(cohort.event_day):,} in "
      f"{len(np.unique(cohort.event_subject)):,} individuals")

# the same (config, seed) always reproduces the same cohort
again = simulate_cohort(config, seed=7)
print("deterministic:     ", np.array_equal(cohort.event_day, again.event_day))

# one individual's history through the record view
someone = int(cohort.event_subject[0])
print("example individual:", cohort.individual(someone))

# uptake curves live in a two-column day,probability file
write_first_dose_curve("/tmp/linksim_curve.csv", config.first_dose_curve)
curve = load_first_dose_curve("/tmp/linksim_curve.csv")
print(f"curve file round-trip: {len(curve)} days, peak {curve.max():.4f}")
