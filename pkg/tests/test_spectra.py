import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dark_port_mzi
from weaktrace import (
    ModulationPlan,
    NoiseModel,
    SiteModulation,
    apply_block,
    default_plan,
    plan_from_network,
    readout_timeseries,
    run_blocking_suite,
    run_spectral_experiment,
    set_modulation,
    spectrum,
    standard_nested_mzi,
)
from weaktrace.errors import DegeneratePointerError, UnknownLabelError
from weaktrace.spectra import (
    ABSENT,
    BELOW_THRESHOLD,
    STRONG,
    _fft_radix2,
)

BINS = {"A": 13, "B": 17, "C": 19, "E": 23, "F": 29}


def plan_with(deltas, samples=4096):
    return ModulationPlan(
        sites=tuple(SiteModulation(s, d, BINS[s]) for s, d in deltas.items()),
        samples=samples,
    )


# ---------------------------------------------------------------- plans


def test_default_plan():
    plan = default_plan()
    assert plan.samples == 4096
    assert [(sm.site, sm.bin) for sm in plan.sites] == [
        ("A", 13),
        ("B", 17),
        ("C", 19),
        ("E", 23),
        ("F", 29),
    ]
    assert all(sm.delta == 0.01 for sm in plan.sites)


@pytest.mark.parametrize(
    "sites,samples",
    [
        ((("A", 0.01, 13), ("B", 0.01, 13)), 4096),  # bin collision
        ((("A", 0.01, 13), ("A", 0.01, 17)), 4096),  # site twice
        ((("A", 0.01, 0),), 4096),  # DC bin
        ((("A", 0.01, 2048),), 4096),  # at Nyquist
        ((("A", -0.01, 13),), 4096),  # negative depth
        ((("A", 0.01, 13),), 1000),  # not a power of two
        ((("A", 0.01, 13),), 2),  # too short
    ],
)
def test_plan_validation_rejects(sites, samples):
    with pytest.raises(ValueError):
        ModulationPlan(
            sites=tuple(SiteModulation(*s) for s in sites), samples=samples
        )


def test_plan_from_network_roundtrip():
    net = standard_nested_mzi()
    net = set_modulation(net, "A", delta=0.02, bin=11)
    net = set_modulation(net, "C", delta=0.01, bin=7)
    plan = plan_from_network(net, samples=512)
    assert plan == ModulationPlan(
        sites=(SiteModulation("A", 0.02, 11), SiteModulation("C", 0.01, 7)),
        samples=512,
    )


# ---------------------------------------------------------------- FFT


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_fft_matches_numpy(data):
    n = 2 ** data.draw(st.integers(2, 9))
    values = data.draw(
        st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n)
    )
    x = np.asarray(values)
    ours = _fft_radix2(x.astype(complex))
    ref = np.fft.fft(x)
    scale = max(1.0, float(np.max(np.abs(ref))))
    assert np.max(np.abs(ours - ref)) < 1e-9 * scale


def test_fft_fixed_random_vectors():
    rng = np.random.default_rng(42)
    for n in (4, 64, 1024, 4096):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert np.allclose(_fft_radix2(x), np.fft.fft(x), atol=1e-9 * n)


def test_spectrum_pure_sinusoid_is_exact():
    n = 1024
    k = np.arange(n)
    for amp, b in ((1.0, 5), (0.25, 100), (3e-4, 511)):
        power = spectrum(amp * np.sin(2 * np.pi * b * k / n))
        assert power[b] == pytest.approx(amp**2, rel=1e-12)
        others = np.delete(power, b)
        assert np.max(others) < 1e-24 * amp**2
    assert power[0] == 0.0


def test_spectrum_rejects_bad_lengths():
    with pytest.raises(ValueError):
        spectrum(np.zeros(100))
    with pytest.raises(ValueError):
        spectrum(np.zeros(2))


# ---------------------------------------------------------------- readout


def test_readout_static_limit(std_net):
    plan = plan_with({"A": 0.0, "B": 0.0, "C": 0.0, "E": 0.0, "F": 0.0}, samples=256)
    xbar, rate = readout_timeseries(std_net, plan, sigma=1.0)
    assert np.all(xbar == 0.0)
    assert rate == pytest.approx(np.full(256, 0.25), abs=1e-12)


def test_readout_time_antisymmetry(std_net):
    # displacements are sums of sines, odd under k -> N-k, and the mean
    # reading inherits that parity while the rate is even
    xbar, rate = readout_timeseries(std_net, default_plan(0.01, 512), sigma=1.0)
    assert np.max(np.abs(xbar[1:] + xbar[:0:-1])) < 1e-12
    assert np.max(np.abs(rate[1:] - rate[:0:-1])) < 1e-12


def test_readout_first_order_peaks(std_net):
    # for tiny depths the reading reduces to delta*sigma*Re(W_site) at the
    # site's own bin; second-order corrections are ~delta^2 smaller
    delta, sigma = 1e-3, 1.3
    xbar, _ = readout_timeseries(std_net, default_plan(delta), sigma=sigma)
    power = spectrum(xbar)
    assert power[BINS["A"]] == pytest.approx((delta * sigma * 0.5) ** 2, rel=1e-3)
    assert power[BINS["B"]] == pytest.approx((delta * sigma * 0.5) ** 2, rel=1e-3)
    assert power[BINS["C"]] == pytest.approx((delta * sigma * 1.0) ** 2, rel=1e-3)


def test_second_order_mixing_bins_are_parity_forbidden(std_net):
    xbar, _ = readout_timeseries(std_net, default_plan(0.01), sigma=1.0)
    power = spectrum(xbar)
    # sum and difference bins of A(13), B(17), C(19) carry second-order
    # products, which an odd-parity readout cannot sustain
    for b in (4, 6, 30, 32, 36):
        assert power[b] < 1e-30
    # third-order mixing is allowed and visible well above machine noise
    for b in (7, 11, 25):
        assert power[b] > 1e-15


def test_probes_on_dark_arms_alone_leave_no_signal(std_net):
    # both inner routes traverse E and F together with opposite amplitudes,
    # so their pointer displacements coincide and cancel exactly in the
    # post-selected mean: the readout is identically zero, to the bit
    plan = plan_with({"E": 0.01, "F": 0.01})
    xbar, _ = readout_timeseries(std_net, plan, sigma=1.0)
    assert np.all(xbar == 0.0)
    assert np.all(spectrum(xbar) == 0.0)


def test_readout_unknown_site(std_net):
    with pytest.raises(UnknownLabelError):
        readout_timeseries(std_net, plan_with({"A": 0.01}), sigma=1.0, detector="D5")
    plan = ModulationPlan(sites=(SiteModulation("Z", 0.01, 13),))
    with pytest.raises(UnknownLabelError):
        readout_timeseries(std_net, plan, sigma=1.0)


def test_readout_degenerate_rate():
    net = make_dark_port_mzi()
    with pytest.raises(DegeneratePointerError):
        readout_timeseries(
            net,
            ModulationPlan(sites=(SiteModulation("X", 0.01, 13),), samples=256),
            sigma=1.0,
        )


def test_readout_rejects_bad_sigma(std_net):
    with pytest.raises(ValueError):
        readout_timeseries(std_net, default_plan(), sigma=0.0)


# ---------------------------------------------------------------- spectra


def test_noise_free_peak_powers(std_net):
    # frozen from an independent run of the overlap model; the leading
    # behavior is power ~ (delta*sigma*Re W)^2 with W = 1/2, 1/2, 1
    report = run_spectral_experiment(std_net, default_plan(0.01), sigma=1.0)
    peak = {p.site: p.power for p in report.peaks}
    assert peak["A"] == pytest.approx(2.499531e-05, rel=1e-5)
    assert peak["B"] == pytest.approx(2.499484e-05, rel=1e-5)
    assert peak["C"] == pytest.approx(9.999250e-05, rel=1e-5)
    assert peak["E"] == pytest.approx(2.196520e-13, rel=1e-4)
    assert peak["F"] == pytest.approx(1.076237e-13, rel=1e-4)
    assert {p.classification for p in report.peaks} == {STRONG}
    assert report.mean_rate - 0.25 == pytest.approx(1e-4 / 64, abs=1e-9)


def test_intermodulation_feeds_silent_site_bins(std_net):
    # with the inner-arm probes switched off, the bin assigned to E still
    # shows third-order mixing of the A/B/C probes (17+19-13 = 23), while
    # bin 29 has no third-order combination and drops to the noise floor
    plan = plan_with({"A": 0.01, "B": 0.01, "C": 0.01, "E": 0.0, "F": 0.0})
    report = run_spectral_experiment(std_net, plan, sigma=1.0)
    peak = {p.site: p for p in report.peaks}
    assert peak["E"].power == pytest.approx(8.7879e-15, rel=1e-3)
    assert peak["F"].power < 1e-20
    assert peak["F"].classification == ABSENT


def test_noise_classification_frozen_seed(std_net):
    report = run_spectral_experiment(
        std_net, default_plan(0.01), sigma=1.0, noise=NoiseModel(std=1e-4, seed=0)
    )
    cls = {p.site: p.classification for p in report.peaks}
    assert cls == {
        "A": STRONG,
        "B": STRONG,
        "C": STRONG,
        "E": BELOW_THRESHOLD,
        "F": BELOW_THRESHOLD,
    }
    # white noise of std s spreads 4 s^2 / N per bin; the floor is five
    # times the median of that exponential distribution
    assert 1e-11 < report.noise_floor < 1e-10


def test_peak_power_scaling_under_depth_halving(std_net):
    strong = run_spectral_experiment(std_net, default_plan(0.01), sigma=1.0)
    halved = run_spectral_experiment(std_net, default_plan(0.005), sigma=1.0)
    p1 = {p.site: p.power for p in strong.peaks}
    p2 = {p.site: p.power for p in halved.peaks}
    for site in "ABC":
        assert 3.8 < p1[site] / p2[site] < 4.2
    # the E/F bins are fed by third-order mixing, so their power falls
    # as the sixth power of the depths: a factor 64 per halving
    for site in "EF":
        assert 57.6 < p1[site] / p2[site] < 70.4


def test_spectral_determinism(std_net):
    noise = NoiseModel(std=1e-4, seed=12345)
    a = run_spectral_experiment(std_net, default_plan(0.01), 1.0, noise=noise)
    b = run_spectral_experiment(std_net, default_plan(0.01), 1.0, noise=noise)
    assert np.array_equal(a.xbar, b.xbar)
    assert np.array_equal(a.power, b.power)
    assert a.peaks == b.peaks
    assert a.noise_floor == b.noise_floor
    c = run_spectral_experiment(
        std_net, default_plan(0.01), 1.0, noise=NoiseModel(std=1e-4, seed=12346)
    )
    assert not np.array_equal(a.xbar, c.xbar)


def test_report_is_self_consistent(std_net):
    report = run_spectral_experiment(
        std_net, default_plan(0.01), 1.0, noise=NoiseModel(std=1e-5, seed=3)
    )
    assert np.array_equal(spectrum(report.xbar), report.power)
    assert report.samples == 4096
    assert report.detector == "D"
    assert report.power.shape == (2048,)


# ---------------------------------------------------------------- blocking


def test_blocking_suite_standard(std_net):
    suite = run_blocking_suite(std_net, default_plan(0.01), sigma=1.0)
    assert [c.name for c in suite.configs] == ["baseline", "block_E", "block_F"]

    base = suite.config("baseline")
    assert base.blocked_site is None
    assert base.static_probability == pytest.approx(0.25, abs=1e-12)
    assert {p.classification for p in base.report.peaks} == {STRONG}

    for name in ("block_E", "block_F"):
        cfg = suite.config(name)
        # the click rate does not budge when the blocked arm carried no net
        # amplitude, yet the inner-arm peaks disappear entirely
        assert cfg.static_probability == pytest.approx(0.25, abs=1e-12)
        peaks = {p.site: p for p in cfg.report.peaks}
        for site in ("A", "B", "E", "F"):
            assert peaks[site].power < 1e-20
            assert peaks[site].classification == ABSENT
        assert peaks["C"].classification == STRONG
        assert peaks["C"].power == pytest.approx(1e-4, rel=1e-3)


def test_blocking_inner_arm_changes_rate(std_net):
    suite = run_blocking_suite(
        std_net, default_plan(0.01), sigma=1.0, block_sites=("A",)
    )
    cfg = suite.config("block_A")
    # removing the +1/4 route leaves total 1/4: probability 1/16
    assert cfg.static_probability == pytest.approx(1 / 16, abs=1e-12)
    peaks = {p.site: p for p in cfg.report.peaks}
    # B no longer cancels against A, so E and F now carry first-order power
    assert peaks["B"].power > 1e-6
    assert peaks["E"].power > 1e-6
    assert peaks["F"].power > 1e-6
    # the blocked arm's own first-order signal is gone, but its bin still
    # picks up third-order mixing of the surviving probes (17 + 19 - 23 = 13),
    # which dwarfs the noise-free floor
    assert peaks["A"].power < 1e-10
    assert peaks["A"].power > 1e-14
    assert peaks["A"].power < 1e-6 * peaks["B"].power


def test_blocking_dark_arm_mean_rate_shift(std_net):
    suite = run_blocking_suite(std_net, default_plan(0.01), sigma=1.0)
    base = suite.config("baseline").report.mean_rate
    blocked = suite.config("block_F").report.mean_rate
    assert abs(blocked - base) <= 10 * 0.01**2
    assert blocked == pytest.approx(0.25, abs=1e-12)


def test_blocked_site_must_exist(std_net):
    with pytest.raises(UnknownLabelError):
        run_blocking_suite(std_net, default_plan(0.01), 1.0, block_sites=("Q",))
