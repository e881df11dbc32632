import pytest

from rdfindex.synthetic import GenSpec, capacity, gen_synthetic, icbrt_ceil, icbrt_floor, icbrt_round, pool_size


@pytest.mark.parametrize("n", [0, 1, 7, 8, 9, 26, 27, 28, 10**6 - 1, 10**6, 10**18 + 1])
def test_integer_cube_roots(n):
    f = icbrt_floor(n)
    assert f**3 <= n < (f + 1) ** 3
    c = icbrt_ceil(n)
    assert (c - 1) ** 3 < n <= c**3 or n == 0
    r = icbrt_round(n)
    assert abs(r - n ** (1 / 3)) <= 0.5 + 1e-9


def test_pool_sizes():
    assert pool_size(10**6, 1) == 100
    assert pool_size(10**5, 1) == 47  # round() gives 46, whose cube is below 1e5
    assert pool_size(10**4, 1) == 22
    assert pool_size(10**6, 2) == 102
    for n in (1, 2, 9, 1000, 12345, 99999):
        for v in (1, 2):
            assert capacity(pool_size(n, v), v) >= n


@pytest.mark.parametrize("variant", [1, 2])
@pytest.mark.parametrize("n", [1, 2, 100, 5000])
def test_exact_size_and_pool(n, variant):
    g = gen_synthetic(GenSpec(n, variant, seed=5))
    assert len(g) == n
    atoms = {a for t in g for a in t}
    assert atoms <= {str(i).encode() for i in range(pool_size(n, variant))}
    if variant == 2:
        assert all(len(set(t)) == 3 for t in g)


def test_deterministic_under_seed():
    a = gen_synthetic(GenSpec(3000, 1, seed=1))
    assert a == gen_synthetic(GenSpec(3000, 1, seed=1))
    assert a != gen_synthetic(GenSpec(3000, 1, seed=2))


def test_full_capacity():
    g = gen_synthetic(GenSpec(27, 1))
    assert len(g) == 27 and len({a for t in g for a in t}) == 3


def test_bad_generator_settings():
    with pytest.raises(ValueError):
        GenSpec(0)
    with pytest.raises(ValueError):
        GenSpec(10, variant=3)
