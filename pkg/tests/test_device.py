import math

import pytest

from ntcp.device import (
    HBAR,
    PLANCK,
    TWO_PI,
    QubitKnobs,
    charge_regime,
    charging_energy,
    coupling_g,
    decoupled_knobs,
    drive_amplitude_for,
    ez_energy,
    flux_for_frequency,
    josephson_energy,
    kappa_inverse,
    ng_for_ez,
    reference_device,
    rabi_omega,
    vacuum_voltage,
)


def test_charging_energy_and_override():
    dev = reference_device()
    assert abs(charging_energy(dev) / PLANCK / 1e9 - 32.23) < 0.01
    assert charging_energy(reference_device(E_c=PLANCK * 32e9)) == PLANCK * 32e9


def test_josephson_zero_at_half_flux():
    dev = reference_device()
    assert josephson_energy(dev, 0.5) == 0.0
    assert math.isclose(josephson_energy(dev, 0.0), 2 * dev.E_J0)


def test_flux_inversion():
    dev = reference_device()
    w = TWO_PI * 5.045e9
    f = flux_for_frequency(dev, w)
    assert math.isclose(josephson_energy(dev, f) / HBAR, w, rel_tol=1e-12)
    with pytest.raises(ValueError):
        flux_for_frequency(dev, TWO_PI * 20e9)


def test_ez_and_inverse():
    dev = reference_device()
    assert ez_energy(dev, 0.5) == 0.0
    e = -1e-25
    assert math.isclose(ez_energy(dev, ng_for_ez(dev, e)), e, rel_tol=1e-9)


def test_drive_and_coupling():
    dev = reference_device()
    om = TWO_PI * 600e6
    assert math.isclose(rabi_omega(dev, drive_amplitude_for(dev, om)), om, rel_tol=1e-12)
    assert abs(drive_amplitude_for(dev, om) * 1e3 - 1.491) < 0.01
    assert vacuum_voltage(dev) > 0
    # circuit formula gives ~20 MHz with the listed hardware, not 100 MHz
    assert 15 < coupling_g(dev) / TWO_PI / 1e6 < 25


def test_kappa_and_regime():
    dev = reference_device()
    assert abs(kappa_inverse(dev) * 1e9 - 159.15) < 0.01
    names = [n for n, _, _ in charge_regime(dev)]
    assert names == ["E_c/E_J0"]


def test_knobs_validation():
    assert decoupled_knobs().is_decoupled
    assert not QubitKnobs(0.3, 0.5).is_decoupled
    with pytest.raises(ValueError):
        QubitKnobs(1.2, 0.5)
    with pytest.raises(ValueError):
        reference_device(C_g=-1.0)
