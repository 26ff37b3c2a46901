import math

import pytest
from hypothesis import given, strategies as st

from cascadecool.species import (
    AMU,
    DIPOLE,
    EmissionGeometry,
    Species,
    SpeciesError,
    doppler_limit,
    load_all,
    load_species,
    natural_units,
    parse_species_file,
)

MG_RECORD = {
    "name": "Mg",
    "mass_u": "24.305",
    "lambda1_nm": "285.29",
    "lambda2_nm": "880.92",
    "gamma1_over_2pi_MHz": "78.8",
    "gamma2_over_2pi_MHz": "2.0",
}


def test_mg_preset_matches_table(mg):
    row = mg.table_row()
    assert row["lambda1_nm"] == pytest.approx(285.29, rel=1e-14)
    assert row["lambda2_nm"] == pytest.approx(880.92, rel=1e-14)
    assert row["gamma1_over_2pi_MHz"] == pytest.approx(78.8, rel=1e-14)
    assert row["gamma2_over_2pi_MHz"] == pytest.approx(2.0, rel=1e-14)


def test_cs_upper_linewidth(cs):
    assert cs.gamma2 / (2 * math.pi) / 1e6 == pytest.approx(0.49, rel=1e-14)


def test_wavenumbers_derived_exactly(mg):
    assert mg.k1 == 2 * math.pi / mg.lambda1
    assert mg.k2 == 2 * math.pi / mg.lambda2


def test_all_presets_valid_cascades():
    table = load_all()
    assert set(table) == {"Mg", "Ca", "Cs"}
    for sp in table.values():
        assert sp.mass > 0 and sp.lambda1 > 0 and sp.lambda2 > 0
        assert sp.gamma1 > sp.gamma2 > 0


def test_record_round_trip():
    sp = load_species(MG_RECORD)
    assert sp.mass == 24.305 * AMU
    assert sp.gamma1 == pytest.approx(2 * math.pi * 78.8e6, rel=1e-15)


@pytest.mark.parametrize("key", ["gamma1_over_2pi_MHz", "mass_u", "lambda2_nm"])
def test_non_positive_field_rejected(key):
    bad = dict(MG_RECORD, **{key: "0"})
    with pytest.raises(SpeciesError, match=key):
        load_species(bad)


def test_missing_field_named():
    bad = {k: v for k, v in MG_RECORD.items() if k != "lambda1_nm"}
    with pytest.raises(SpeciesError, match="lambda1_nm"):
        load_species(bad)


def test_unknown_preset():
    with pytest.raises(SpeciesError, match="Xx"):
        load_species("Xx")


def test_species_file_parser_and_env_override(tmp_path, monkeypatch):
    text = "# test file\n[species]\n" + "\n".join(f"{k} = {v}  # c" for k, v in MG_RECORD.items()) + "\n"
    text = text.replace("name = Mg", "name = Mg2")
    path = tmp_path / "sp.dat"
    path.write_text(text)
    records = parse_species_file(text)
    assert records == [dict(MG_RECORD, name="Mg2")]
    monkeypatch.setenv("CASCADE_COOL_SPECIES_PATH", str(path))
    assert list(load_all()) == ["Mg2"]
    with pytest.raises(SpeciesError):
        load_species("Mg")


def test_species_file_rejects_unknown_key():
    with pytest.raises(SpeciesError, match="colour"):
        parse_species_file("[species]\ncolour = red\n")


@pytest.mark.parametrize(
    "name, which, expected, rel",
    [("Mg", 1, 1.9e-3, 0.02), ("Mg", 2, 48e-6, 0.02), ("Cs", 2, 12e-6, 0.05),
     ("Ca", 1, 0.833e-3, 0.01), ("Cs", 1, 0.125e-3, 0.01), ("Ca", 2, 127e-6, 0.01)],
)
def test_doppler_limits_table(name, which, expected, rel):
    sp = load_species(name)
    gamma = sp.gamma1 if which == 1 else sp.gamma2
    assert doppler_limit(gamma) == pytest.approx(expected, rel=rel)


@given(st.floats(1e3, 1e10))
def test_doppler_limit_linear(gamma):
    assert doppler_limit(2 * gamma) == 2 * doppler_limit(gamma)


def test_natural_units_mg(mg):
    nu = natural_units(mg)
    # 78.8 MHz * 285.29 nm, by hand
    assert nu.velocity == pytest.approx(22.480852, rel=1e-7)
    assert nu.to_frequency(mg.gamma1) == 1.0


def _scalar(bound):
    # keep clear of the underflow region, where the scaled value would turn subnormal
    return st.floats(-bound, bound).filter(lambda x: x == 0 or abs(x) > 1e-250)


@given(_scalar(1e9), _scalar(1e3), _scalar(1e-20))
def test_natural_units_round_trip(freq, vel, energy):
    nu = natural_units(load_species("Mg"))
    assert nu.from_frequency(nu.to_frequency(freq)) == pytest.approx(freq, rel=1e-12, abs=0)
    assert nu.from_velocity(nu.to_velocity(vel)) == pytest.approx(vel, rel=1e-12, abs=0)
    assert nu.from_energy(nu.to_energy(energy)) == pytest.approx(energy, rel=1e-12, abs=0)


def test_geometry_bounds():
    assert DIPOLE.chi1 == DIPOLE.chi2 == 0.4
    with pytest.raises(ValueError):
        EmissionGeometry(1.2, 0.4)


def test_species_gamma1_zero_rejected():
    with pytest.raises(SpeciesError):
        Species("X", 1e-26, 5e-7, 5e-7, 0.0, 1.0)
