import numpy as np
import pytest

from linksim import SimConfig


@pytest.fixture
def small_config():
    """Eventful little cohort setting used across estimator tests."""
    return SimConfig(
        n_sim=2000,
        n_days=150,
        campaign_start_day=31,
        d_risk=14,
        d_immune=10,
        rr_vacc=2.5,
        p_event_year=0.10,
        first_dose_curve=np.full(120, 0.015),
    )
