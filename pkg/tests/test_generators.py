import pytest

from kvisguard.geometry import is_convex, is_reflex, polygon_problems
from kvisguard.generators import (
    FAMILIES,
    GenSpec,
    GenerationError,
    generate,
    is_x_monotone,
)


def reflex_count(ring_):
    return sum(1 for i in range(len(ring_)) if is_reflex(ring_, i))


@pytest.mark.parametrize("family,n", [
    ("random_simple", 10),
    ("random_simple", 20),
    ("monotone", 12),
    ("monotone", 16),
    ("comb", 12),
    ("comb", 20),
    ("spiral", 9),
    ("spiral", 13),
    ("staircase", 11),
    ("dart", 4),
    ("with_holes", 8),
])
def test_families_validate(family, n):
    poly = generate(GenSpec(family, n, seed=3))
    assert polygon_problems(poly) == []
    if family != "with_holes":
        assert len(poly.outer) == n


def test_comb_counts():
    poly = generate(GenSpec("comb", 12, seed=1))
    assert len(poly.outer) == 12
    assert reflex_count(poly.outer) == 5
    poly5 = generate(GenSpec("comb", 20, seed=1))
    assert reflex_count(poly5.outer) == 9


def test_spiral_counts():
    for turns in (1, 2, 3):
        poly = generate(GenSpec("spiral", 4 * turns + 5, seed=1))
        assert reflex_count(poly.outer) == 2 * turns + 1


def test_staircase_counts():
    for steps in (1, 3, 4):
        poly = generate(GenSpec("staircase", 2 * steps + 3, seed=1))
        assert reflex_count(poly.outer) == steps


def test_dart_is_nonconvex_simple_quad():
    for seed in range(20):
        poly = generate(GenSpec("dart", 4, seed=seed))
        assert len(poly.outer) == 4
        assert not is_convex(poly.outer)
        assert reflex_count(poly.outer) == 1


def test_monotone_passes_sweep_check():
    for seed in range(6):
        poly = generate(GenSpec("monotone", 16, seed=seed))
        assert is_x_monotone(poly.outer)


def test_reproducible():
    a = generate(GenSpec("random_simple", 14, seed=5))
    b = generate(GenSpec("random_simple", 14, seed=5))
    assert a.outer.vertices == b.outer.vertices
    c = generate(GenSpec("random_simple", 14, seed=6))
    assert a.outer.vertices != c.outer.vertices


def test_bad_specs_rejected():
    with pytest.raises(ValueError):
        generate(GenSpec("comb", 2, seed=1))
    with pytest.raises(ValueError):
        generate(GenSpec("comb", 13, seed=1))
    with pytest.raises(ValueError):
        generate(GenSpec("dart", 5, seed=1))
    with pytest.raises(ValueError):
        generate(GenSpec("nonsense", 8, seed=1))
    with pytest.raises(ValueError):
        generate(GenSpec("spiral", 8, seed=1))


def test_with_holes_counts():
    poly = generate(GenSpec("with_holes", 8, seed=2, param=2))
    assert len(poly.holes) == 2
    assert polygon_problems(poly) == []
