import os

import numpy as np
import pytest

from bench.generators import (
    gen_majority,
    gen_multiplier,
    gen_parity,
    gen_sorting_net,
    is_generator,
    make_poly_spec,
    parse_generator,
)
from bench.pla import expand_cube, load_pla, parse_pla, read_pla, write_pla
from infra.config import mcnc_dir
from infra.errors import PlaFormatError, SpecError
from logic.boolfn import Isf, equal_on_care
from tests.helpers import random_isf

MCNC_FILES = ("5xp1", "z5xp1", "sao2", "f51m", "ex1010", "misex3", "misex3c")
FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def _bits(m, n):
    return [(m >> i) & 1 for i in range(n)]


def test_majority_and_parity_points():
    # x1=0, x2=1, x3=1, x4=1 is minterm 0b1110
    assert gen_majority(4).value(0b1110) == 1
    assert gen_majority(4).value(0b0110) == 0
    # x1=0, x2=1, x3=0, x4=1
    assert gen_parity(4).value(0b1010) == 0
    assert gen_parity(4).value(0b0010) == 1


def test_multiplier_two_by_three():
    fs = gen_multiplier(2, 3)
    assert len(fs) == 5
    # A = 3 on x1 x2, B = 5 on x3 x4 x5; product 15 read LSB first
    m = 3 | (5 << 2)
    assert [f.value(m) for f in fs] == [1, 1, 1, 1, 0]


def test_generators_match_arithmetic():
    for a_bits, b_bits in ((1, 1), (2, 3), (3, 3)):
        n = a_bits + b_bits
        fs = gen_multiplier(a_bits, b_bits)
        for m in range(1 << n):
            a, b = m & ((1 << a_bits) - 1), m >> a_bits
            assert [f.value(m) for f in fs] == _bits(a * b, n)
    for k in (1, 5, 6):
        fs = gen_sorting_net(k)
        for m in range(1 << k):
            ones = sum(_bits(m, k))
            assert [f.value(m) for f in fs] == [1 if ones >= j + 1 else 0 for j in range(k)]
    for n in (1, 7, 8):
        par, maj = gen_parity(n), gen_majority(n)
        for m in range(1 << n):
            ones = sum(_bits(m, n))
            assert par.value(m) == ones % 2
            assert maj.value(m) == int(2 * ones > n)


def test_generators_are_fully_specified():
    for f in gen_sorting_net(4) + gen_multiplier(2, 2) + [gen_parity(5), gen_majority(5)]:
        assert not f.dc.any()
        assert f.var_names[0] == "x1"


def test_parse_generator():
    assert len(parse_generator("mul:3x4")) == 7
    assert len(parse_generator("sort:6")) == 6
    assert parse_generator(" Parity:3 ")[0] == gen_parity(3)
    assert is_generator("majority:9")
    assert not is_generator("tests/fixtures/mcnc/sao2.pla")
    with pytest.raises(SpecError):
        parse_generator("adder:4")
    with pytest.raises(SpecError):
        parse_generator("parity:0")


def test_poly_spec_pairs_outputs():
    pfs = make_poly_spec(gen_multiplier(4, 4), gen_sorting_net(8))
    assert len(pfs) == 8
    assert all(pf.num_vars == 8 for pf in pfs)
    assert pfs[3].mode2 == gen_sorting_net(8)[3]


def test_poly_spec_rejects_arity_mismatch():
    with pytest.raises(SpecError) as err:
        make_poly_spec(gen_sorting_net(7), gen_sorting_net(8), labels=("sort:7", "sort:8"))
    assert "sort:7" in str(err.value) and "sort:8" in str(err.value)


def test_expand_cube():
    assert sorted(expand_cube("1-").tolist()) == [1, 3]
    assert expand_cube("01").tolist() == [2]
    assert sorted(expand_cube("--").tolist()) == [0, 1, 2, 3]


def test_parse_fd_pla():
    text = "# and gate\n.i 2\n.o 1\n11 1\n.e\n"
    (f,) = read_pla(text)
    assert f == Isf.from_truth(("x1", "x2"), [0, 0, 0, 1])


def test_fd_dont_cares_and_labels():
    text = ".i 2\n.o 2\n.ilb a b\n.ob p q\n1- 1-\n01 01\n.e\n"
    pla = parse_pla(text)
    assert pla.names() == ("a", "b")
    assert pla.outputs() == ("p", "q")
    p, q = pla.to_functions()
    assert [p.value(m) for m in range(4)] == [0, 1, 0, 1]
    assert [q.value(m) for m in range(4)] == [0, None, 1, None]


def test_fr_pla_leaves_the_rest_unspecified():
    text = ".i 2\n.o 1\n.type fr\n11 1\n00 0\n.e\n"
    (f,) = read_pla(text)
    assert [f.value(m) for m in range(4)] == [0, None, None, 1]


def test_fr_conflict_is_an_error():
    with pytest.raises(PlaFormatError):
        read_pla(".i 1\n.o 1\n.type fr\n1 1\n- 0\n.e\n")


def test_pla_errors_name_the_line():
    with pytest.raises(PlaFormatError) as err:
        parse_pla(".i 2\n.o 1\n111 1\n")
    assert err.value.line == 3
    with pytest.raises(PlaFormatError):
        parse_pla("11 1\n")
    with pytest.raises(PlaFormatError):
        parse_pla(".i 2\n.o 1\n1x 1\n")
    with pytest.raises(PlaFormatError):
        parse_pla(".i 2\n")


def test_combined_row_token():
    (f,) = read_pla(".i 2\n.o 1\n111\n.e\n")
    assert f.value(3) == 1


def test_pla_round_trip(rng):
    names = ("x1", "x2", "x3", "x4", "x5")
    fs = [random_isf(rng, names) for _ in range(3)]
    again = read_pla(write_pla(fs))
    assert again == fs


def test_written_generator_reads_back():
    fs = parse_generator("parity:7")
    text = write_pla(fs, output_labels=["p"])
    assert ".type fd" in text
    assert read_pla(text) == fs
    assert np.array_equal(read_pla(text)[0].on, gen_parity(7).on)


def test_fr_fixture_round_trip():
    pla = load_pla(os.path.join(FIXTURES, "pla", "half_adder_fr.pla"))
    assert pla.names() == ("a", "b", "c", "d")
    assert pla.outputs() == ("s", "co", "m")
    s, co, m = fs = pla.to_functions()
    # a on bit 0, b on bit 1
    assert [s.value(k) for k in range(4)] == [0, 1, 1, 0]
    assert [co.value(k) for k in range(4)] == [0, 0, 0, 1]
    assert [m.value(k) for k in range(4)] == [0, None, None, 1]
    assert read_pla(write_pla(fs, pla.names(), pla.outputs())) == fs


@pytest.mark.parametrize("name", MCNC_FILES)
def test_mcnc_round_trip(name):
    path = os.path.join(mcnc_dir(), f"{name}.pla")
    if not os.path.exists(path):
        pytest.skip(f"{name}.pla is not vendored; set POLYSYNTH_MCNC_DIR")
    pla = load_pla(path)
    fs = pla.to_functions()
    again = read_pla(write_pla(fs, pla.names(), pla.outputs()))
    assert len(again) == len(fs)
    for before, after in zip(fs, again):
        assert equal_on_care(before, after)
        assert np.array_equal(before.care, after.care)
