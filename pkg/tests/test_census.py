import math
from itertools import combinations_with_replacement

import pytest

from bsretract import (
    NotAUnit,
    OrbitDatum,
    enumerate_orbits,
    from_orbit_datum,
    mult_order,
    order_bound,
    relation_residual,
    verify_orbit,
)
from bsretract.census import UnfactoredModulusWarning, divisors, validate_parameters

# Positive coprime pairs with distinct absolute values, |p|,|q| <= 7.
SMALL_PAIRS = [
    (p, q)
    for p in range(1, 8)
    for q in range(1, 8)
    if p != q and math.gcd(p, q) == 1
]


def test_validate_parameters_gate():
    validate_parameters(2, 3)
    validate_parameters(-1, 2)
    for bad in [(2, 2), (2, 4), (0, 3), (3, 0), (-2, 2), (6, 4)]:
        with pytest.raises(ValueError):
            validate_parameters(*bad)


def test_order_bound_values():
    assert order_bound(2, 3, 1) == 1
    assert order_bound(2, 3, 2) == 5
    assert order_bound(1, 2, 3) == 1 * 3 * 7 == 21
    assert order_bound(2, 3, 4) == 1 * 5 * 19 * 65 == 6175
    assert order_bound(1, 2, 2) == 3
    # arbitrary precision: no overflow at large n
    assert order_bound(2, 3, 40) % 5 == 0


def test_mult_order_values():
    assert mult_order(1, 7) == 1
    assert mult_order(4, 5) == 2  # 4^2 = 16 = 1 (mod 5)
    assert mult_order(2, 7) == 3  # 2^3 = 8 = 1 (mod 7)
    with pytest.raises(NotAUnit):
        mult_order(2, 4)


def test_divisors_basic():
    assert divisors(1) == [1]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(65) == [1, 5, 13, 65]


def test_divisors_reports_unfactored_cofactor():
    m = 1009 * 1013  # both prime, beyond a cap of 10
    with pytest.warns(UnfactoredModulusWarning):
        divs = divisors(m, cap=10)
    assert divs == [1]


def test_enumerate_23_dim1_trivial_only():
    data = enumerate_orbits(2, 3, 1)
    assert len(data) == 1
    assert (data[0].N, data[0].orbit, data[0].k) == (1, (0,), 1)


def test_enumerate_23_dim2_exact():
    data = enumerate_orbits(2, 3, 2)
    assert len(data) == 3
    nontrivial = [(d.N, d.orbit, d.u) for d in data if d.N > 1]
    assert nontrivial == [(5, (1, 4), 4), (5, (2, 3), 4)]


def test_enumerate_12_dim2_contains_mod3():
    data = enumerate_orbits(1, 2, 2)
    assert any(d.N == 3 and d.orbit == (1, 2) and d.u == 2 for d in data)


def test_enumerate_deterministic_order():
    a = enumerate_orbits(3, 5, 4)
    b = enumerate_orbits(3, 5, 4)
    assert a == b
    keys = [(d.k, d.N, d.orbit) for d in a]
    assert keys == sorted(keys)


def test_verify_orbit_examples():
    good = OrbitDatum(2, 3, 5, 4, (1, 4), 2)
    assert verify_orbit(good)
    tampered = OrbitDatum(2, 3, 5, 4, (1, 3), 2)
    assert not verify_orbit(tampered)
    trivial = OrbitDatum(2, 3, 1, 0, (0,), 1)
    assert verify_orbit(trivial)


def test_every_emitted_orbit_verifies_and_divides():
    for p, q in [(2, 3), (1, 2), (3, 5), (-2, 3), (2, -5)]:
        for d in enumerate_orbits(p, q, 4):
            assert verify_orbit(d)
            assert abs(p**d.k - q**d.k) % d.N == 0


def test_census_against_brute_force_orbit_partition():
    """Every orbit of x -> u*x on Z/N of length exactly k, reduced to
    lowest terms, must appear in the census at the reduced modulus (and
    nothing else may appear)."""
    for p, q in [(2, 3), (1, 2), (3, 5), (2, 7)]:
        for k in range(1, 5):
            m = abs(p**k - q**k)
            census_at = {}
            for d in enumerate_orbits(p, q, 4):
                census_at.setdefault((d.k, d.N), set()).add(d.orbit)
            for modulus in divisors(m):
                if modulus == 1 or math.gcd(modulus, abs(p * q)) != 1:
                    continue
                u = q * pow(p, -1, modulus) % modulus
                seen = set()
                for x in range(1, modulus):
                    if x in seen:
                        continue
                    orb = [x]
                    y = u * x % modulus
                    while y != x:
                        orb.append(y)
                        y = u * y % modulus
                    seen.update(orb)
                    if len(orb) != k:
                        continue
                    g = math.gcd(math.gcd(*orb), modulus) if len(orb) > 1 else math.gcd(orb[0], modulus)
                    reduced = tuple(v // g for v in orb)
                    i = reduced.index(min(reduced))
                    reduced = reduced[i:] + reduced[:i]
                    assert reduced in census_at.get((k, modulus // g), set()), (
                        p, q, k, modulus, orb)


def test_census_complete_no_extra_orbits():
    # Census orbits at (k, N) are exactly the unit orbits of length k.
    for p, q in [(2, 3), (3, 5)]:
        data = enumerate_orbits(p, q, 4)
        for d in data:
            if d.N == 1:
                continue
            count = sum(1 for e in data if (e.k, e.N) == (d.k, d.N))
            # Euler phi of N divided by the orbit length.
            phi = sum(1 for x in range(1, d.N) if math.gcd(x, d.N) == 1)
            assert count == phi // d.k


def test_block_round_trip_residual():
    for p, q in [(2, 3), (1, 2), (3, 5), (2, 7), (-2, 3)]:
        for d in enumerate_orbits(p, q, 6):
            if d.N > 10**4:
                continue
            rep = from_orbit_datum(d, 0.8 + 0.4j)
            assert relation_residual(rep) <= 1e-12, (p, q, d)


def test_lcm_of_block_moduli_divides_order_bound():
    """Exhaustive over n <= 4 and |p|,|q| <= 7: any multiset of orbit
    blocks with total dimension n has lcm of moduli dividing the bound."""
    for p, q in SMALL_PAIRS:
        pool = sorted({(d.k, d.N) for d in enumerate_orbits(p, q, 4)})
        for n in range(1, 5):
            bound = order_bound(p, q, n)
            for size in range(1, n + 1):
                for combo in combinations_with_replacement(pool, size):
                    if sum(k for k, _ in combo) != n:
                        continue
                    ell = math.lcm(*(N for _, N in combo))
                    assert bound % ell == 0, (p, q, n, combo)
