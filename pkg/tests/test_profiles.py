"""Synthetic year generation, profile file IO, and core type validation."""

import datetime

import numpy as np
import pytest

from gridplan.core import (
    AnnualProfiles,
    CostBook,
    DeviceParams,
    load_profiles,
    save_profiles,
    synth_profiles,
)
from gridplan.core.profiles_io import year_dates
from gridplan.errors import DataError


def test_synth_shapes_and_ranges(roomy_net):
    prof = synth_profiles(roomy_net, seed=3)
    assert prof.load_kw.shape == (365, 3, 24)
    assert prof.pv_factor.shape == (365, 24)
    assert np.all(prof.load_kw >= 0)
    assert prof.pv_factor.min() >= 0
    assert prof.pv_factor.max() == pytest.approx(1.0, abs=1e-12)
    assert len(prof.day_dates) == 365


def test_synth_deterministic(roomy_net):
    a = synth_profiles(roomy_net, seed=11)
    b = synth_profiles(roomy_net, seed=11)
    assert np.array_equal(a.load_kw, b.load_kw)
    assert np.array_equal(a.pv_factor, b.pv_factor)
    c = synth_profiles(roomy_net, seed=12)
    assert not np.array_equal(a.load_kw, c.load_kw)


def test_synth_has_seasonal_contrast(roomy_net):
    prof = synth_profiles(roomy_net, seed=0)
    months = np.array([d.month for d in prof.day_dates])
    summer = np.isin(months, (12, 1, 2))
    winter = np.isin(months, (6, 7, 8))
    # austral summer should carry noticeably more PV energy than winter
    assert prof.pv_factor[summer].sum() > 1.2 * prof.pv_factor[winter].sum()


def test_profile_round_trip(tmp_path, roomy_net):
    prof = synth_profiles(roomy_net, seed=5)
    load_path = tmp_path / "load.csv"
    pv_path = tmp_path / "pv.csv"
    save_profiles(prof, load_path, pv_path, bus_ids=roomy_net.buses)
    back = load_profiles(load_path, roomy_net, pv_path)
    assert np.array_equal(back.load_kw, prof.load_kw)
    assert np.array_equal(back.pv_factor, prof.pv_factor)


def test_load_profiles_missing_file(tmp_path, roomy_net):
    with pytest.raises(DataError, match="not found"):
        load_profiles(tmp_path / "load.csv", roomy_net)


def _tiny_files(tmp_path, roomy_net, mutate_load=None, mutate_pv=None):
    prof = synth_profiles(roomy_net, seed=5)
    load_path = tmp_path / "load.csv"
    pv_path = tmp_path / "pv.csv"
    save_profiles(prof, load_path, pv_path, bus_ids=roomy_net.buses)
    if mutate_load:
        load_path.write_text(mutate_load(load_path.read_text()))
    if mutate_pv:
        pv_path.write_text(mutate_pv(pv_path.read_text()))
    return load_path, pv_path


def test_load_profiles_bad_header(tmp_path, roomy_net):
    load_path, pv_path = _tiny_files(
        tmp_path, roomy_net, mutate_load=lambda t: t.replace("day,hour,bus,kw", "d,h,b,v", 1)
    )
    with pytest.raises(DataError, match="header must be"):
        load_profiles(load_path, roomy_net, pv_path)


def test_load_profiles_unknown_bus(tmp_path, roomy_net):
    load_path, pv_path = _tiny_files(
        tmp_path, roomy_net, mutate_load=lambda t: t.replace("\n1,0,1,", "\n1,0,9,", 1)
    )
    with pytest.raises(DataError, match="bus 9 not in network"):
        load_profiles(load_path, roomy_net, pv_path)


def test_load_profiles_incomplete_year(tmp_path, roomy_net):
    def drop_one(text):
        lines = text.splitlines(keepends=True)
        return "".join(lines[:1] + lines[2:])

    load_path, pv_path = _tiny_files(tmp_path, roomy_net, mutate_load=drop_one)
    with pytest.raises(DataError, match="incomplete year"):
        load_profiles(load_path, roomy_net, pv_path)


def test_pv_rescaled_to_unit_peak(tmp_path, roomy_net):
    def halve(text):
        lines = text.splitlines()
        out = [lines[0]]
        for ln in lines[1:]:
            d, h, f = ln.split(",")
            out.append(f"{d},{h},{float(f) * 0.5!r}")
        return "\n".join(out) + "\n"

    load_path, pv_path = _tiny_files(tmp_path, roomy_net, mutate_pv=halve)
    prof = load_profiles(load_path, roomy_net, pv_path)
    assert prof.pv_factor.max() == pytest.approx(1.0, abs=1e-9)


def test_year_dates_non_leap():
    dates = year_dates()
    assert len(dates) == 365
    assert dates[0] == datetime.date(2023, 1, 1)
    assert not any(d.month == 2 and d.day == 29 for d in dates)


# ---------------------------------------------------------------------------
# core type validation


def _profiles(load=None, pv=None, dates=None):
    load = np.zeros((365, 2, 24)) if load is None else load
    pv = np.zeros((365, 24)) if pv is None else pv
    dates = year_dates() if dates is None else dates
    return AnnualProfiles(load_kw=load, pv_factor=pv, day_dates=dates)


def test_profiles_reject_bad_shape():
    with pytest.raises(DataError, match="shaped"):
        _profiles(load=np.zeros((364, 2, 24)))


def test_profiles_reject_leap_day():
    start = datetime.date(2024, 1, 1)  # leap year
    dates = tuple(start + datetime.timedelta(days=d) for d in range(365))
    with pytest.raises(DataError, match="leap day"):
        _profiles(dates=dates)


def test_profiles_reject_negative_load():
    load = np.zeros((365, 2, 24))
    load[0, 0, 0] = -1
    with pytest.raises(DataError, match="non-negative"):
        _profiles(load=load)


def test_profiles_reject_pv_above_one():
    pv = np.zeros((365, 24))
    pv[0, 12] = 1.5
    with pytest.raises(DataError, match=r"\[0, 1\]"):
        _profiles(pv=pv)


def test_device_params_validation():
    DeviceParams()  # defaults are valid
    with pytest.raises(DataError, match="efficienc"):
        DeviceParams(eta_ch=1.2)
    with pytest.raises(DataError, match="state-of-charge"):
        DeviceParams(soc_min_frac=0.6, soc_init_frac=0.5)
    with pytest.raises(DataError, match="c-rate"):
        DeviceParams(c_rate_kw_per_kwh=0.0)
    with pytest.raises(DataError, match="repair"):
        DeviceParams(mttr_pv_h=0.0)


def test_cost_book_validation():
    with pytest.raises(DataError, match="investment costs"):
        CostBook(c_pv_per_kw=0.0, c_b_per_kwh=500.0)
    with pytest.raises(DataError, match="discount"):
        CostBook(c_pv_per_kw=1.0, c_b_per_kwh=1.0, discount_rate=0.0)
    with pytest.raises(DataError, match="fraction"):
        CostBook(c_pv_per_kw=1.0, c_b_per_kwh=1.0, epsilon_rel=1.0)
    # a zero threshold is a legal (hard) reliability target
    CostBook(c_pv_per_kw=1.0, c_b_per_kwh=1.0, epsilon_rel=0.0)


def test_annuity_factor_matches_direct_sum():
    costs = CostBook(c_pv_per_kw=1.0, c_b_per_kwh=1.0, discount_rate=0.05, horizon_years=10)
    direct = sum(1.05 ** (-t) for t in range(1, 11))
    assert costs.annuity_factor() == pytest.approx(direct, abs=1e-12)
