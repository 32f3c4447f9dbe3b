import numpy as np
import pytest

from linksim import SimConfig, default_first_dose_curve, load_first_dose_curve, write_first_dose_curve
from linksim.config import DEFAULT_VACCINE_TYPE_DIST


def test_defaults_match_study_parameters():
    cfg = SimConfig(n_sim=770_000)
    assert cfg.n_days == 550
    assert cfg.campaign_start_day == 366
    assert cfg.d_risk == 21
    assert cfg.d_immune == 42
    assert cfg.rr_vacc == 3.24
    assert cfg.p_event_year == 0.00016
    assert cfg.second_dose_gap_mrna == 42
    assert cfg.second_dose_gap_az == 84
    assert len(cfg.first_dose_curve) == cfg.n_campaign_days == 185


def test_default_type_dist_normalized():
    assert abs(sum(DEFAULT_VACCINE_TYPE_DIST) - 1.0) < 1e-15
    # proportions stay within rounding distance of the published mix
    for got, published in zip(DEFAULT_VACCINE_TYPE_DIST, (0.6777, 0.08083, 0.1993, 0.04216)):
        assert abs(got - published) < 1e-4


@pytest.mark.parametrize("kwargs", [
    dict(n_sim=0),
    dict(n_sim=10, n_days=100, campaign_start_day=101),
    dict(n_sim=10, d_risk=-1),
    dict(n_sim=10, d_immune=-1),
    dict(n_sim=10, rr_vacc=0.0),
    dict(n_sim=10, p_event_year=1.5),
    dict(n_sim=10, vaccine_type_dist=(0.5, 0.5, 0.5, 0.0)),
    dict(n_sim=10, vaccine_type_dist=(0.25, 0.25, 0.25, 0.2)),
    dict(n_sim=10, first_dose_curve=np.full(10, 0.01)),     # shorter than the campaign
    dict(n_sim=10, first_dose_curve=np.full(185, 1.5)),
    dict(n_sim=10, p_event_year=1.0, rr_vacc=3.24),          # daily probability * rr > 1
])
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_longer_curve_accepted():
    cfg = SimConfig(n_sim=10, n_days=100, campaign_start_day=91,
                    first_dose_curve=np.full(50, 0.01))
    assert cfg.n_campaign_days == 10


def test_default_curve_is_logistic_ramp():
    curve = default_first_dose_curve(185)
    assert curve.shape == (185,)
    assert np.all(curve >= 0) and np.all(curve <= 1)
    assert np.all(np.diff(curve) > 0)  # monotone ramp
    assert curve[0] < curve[-1] / 10   # slow start


def test_curve_roundtrip(tmp_path):
    path = tmp_path / "curve.csv"
    curve = np.array([0.001, 0.002, 0.0035])
    write_first_dose_curve(path, curve)
    assert np.array_equal(load_first_dose_curve(path), curve)


def test_curve_file_parse(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("day,probability\n0,0.001\n1,0.002\n")
    assert np.array_equal(load_first_dose_curve(path), [0.001, 0.002])


@pytest.mark.parametrize("content,match", [
    ("day,probability\n0,0.001\n2,0.002\n", "contiguous"),
    ("day,probability\n0,1.5\n", "outside"),
    ("day,probability\n", "no data rows"),
    ("", "empty"),
    ("foo,bar\n0,0.1\n", "header"),
])
def test_curve_file_errors(tmp_path, content, match):
    path = tmp_path / "curve.csv"
    path.write_text(content)
    with pytest.raises(ValueError, match=match):
        load_first_dose_curve(path)
