import numpy as np
import pytest

from qrpatterns.chartab import BudgetExceeded, build_character_table, chi, table_size
from qrpatterns.ntcore import legendre_euler

from oracles import square_set, trial_primes


@pytest.mark.parametrize("p, residues", [
    (7, [1, 2, 4]),
    (11, [1, 3, 4, 5, 9]),
    (19, [1, 4, 5, 6, 7, 9, 11, 16, 17]),
])
def test_residue_sets(p, residues):
    table = build_character_table(p)
    assert table.residue_set() == residues == sorted(square_set(p))


@pytest.mark.parametrize("a, expected", [(2, 1), (0, 0), (3, -1), (7, 0), (-5, 1), (9, 1)])
def test_chi_examples(a, expected):
    assert chi(build_character_table(7), a) == expected


@pytest.mark.parametrize("p", trial_primes(3, 600))
def test_table_invariants(p):
    table = build_character_table(p)
    bits = table.residues()
    assert table.popcount() == (p - 1) // 2
    assert bits[0] == 0 and bits[1] == 1
    if p % 4 == 3:
        assert np.all(bits[1:] ^ bits[1:][::-1] == 1)
        d = set(table.residue_set())
        neg = {p - x for x in d}
        assert not d & neg and len(d | neg) == p - 1 and 0 not in d | neg


def test_chi_sweep_matches_euler_small():
    for p in trial_primes(3, 400):
        table = build_character_table(p)
        assert [chi(table, a) for a in range(p)] == [legendre_euler(a, p) for a in range(p)]


def test_table_is_immutable():
    table = build_character_table(11)
    with pytest.raises(ValueError):
        table.residue_bits[0] = 0
    with pytest.raises(ValueError):
        table.residues()[0] = 1


def test_budget_exceeded_carries_size():
    p = 1_000_003
    with pytest.raises(BudgetExceeded) as info:
        build_character_table(p, memory_budget=1000)
    assert info.value.required == table_size(p) > 1000
    assert info.value.p == p


def test_large_table_spot_check():
    p = 2_000_003
    table = build_character_table(p)
    rng = np.random.default_rng(1)
    for a in rng.integers(0, p, 500).tolist():
        assert chi(table, a) == legendre_euler(a, p)
