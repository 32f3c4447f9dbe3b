"""Perturb a perfectly linked cohort with the two record-linkage error types.

Missing matches make vaccinated individuals look unvaccinated; false matches
swap two individuals' vaccination histories. Event histories are never
touched, and false matches conserve the multiset of vaccination records.
"""

import numpy as np

from linksim import SimConfig, inject_false_matches, inject_missing_matches, simulate_cohort

config = SimConfig(n_sim=100_000, p_event_year=0.01)
cohort = simulate_cohort(config, seed=13)
print(f"perfect linkage:  {cohort.n_vaccinated:,} vaccinated of {len(cohort):,}")

# drop 20% of the vaccinated individuals' records
missing = inject_missing_matches(cohort, 0.20, np.random.default_rng(1))
print(f"20% missing:      {missing.n_vaccinated:,} vaccinated "
      f"({cohort.n_vaccinated - missing.n_vaccinated:,} records removed)")

# swap records within 50-per-million random pairs
false = inject_false_matches(missing, 0.00005, np.random.default_rng(2))
swapped = int(np.count_nonzero(false.dose1_day != missing.dose1_day))
print(f"false matches:    up to {swapped:,} individuals hold someone else's record")

records = lambda c: sorted(zip(c.dose1_day, c.dose2_day, c.vaccine_type))
print("record multiset conserved by swapping:", records(false) == records(missing))
print("events untouched throughout:          ",
      np.array_equal(false.event_day, cohort.event_day))

# an individual who now looks unvaccinated still carries their events
hidden = np.flatnonzero((cohort.dose1_day >= 0) & (missing.dose1_day < 0))
with_events = [i for i in hidden if missing.events_of(int(i))]
pick = int(with_events[0]) if with_events else int(hidden[0])
print(f"individual {pick}: dose1 was day {cohort.dose1_day[pick]}, "
      f"now appears unvaccinated, events {missing.events_of(pick)}")
