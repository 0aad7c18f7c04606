import random

import pytest

from semcom.library import SemanticLibrary, build_library, digit_library

# person <- [head, body, arms, hands, legs, feet]
PERSON_SPECS = [
    (0, "head", (), False),
    (1, "body", (), False),
    (2, "arms", (), False),
    (3, "hands", (), False),
    (4, "legs", (), False),
    (5, "feet", (), False),
    (6, "person", (0, 1, 2, 3, 4, 5), False),
]

# car <- [tire, frame]
CAR_SPECS = [
    (0, "tire", (), False),
    (1, "frame", (), False),
    (2, "car", (0, 1), False),
]


@pytest.fixture
def person_lib() -> SemanticLibrary:
    return build_library(PERSON_SPECS)


@pytest.fixture
def car_lib() -> SemanticLibrary:
    return build_library(CAR_SPECS)


@pytest.fixture
def digits() -> SemanticLibrary:
    return digit_library()


def make_random_library(rng: random.Random, n_leaves: int = 5, n_internal: int = 5,
                        max_children: int = 3, unambiguous: bool = False) -> SemanticLibrary:
    """Random layered DAG; children always reference already-created ids,
    so the result is acyclic by construction."""
    specs = [(i, f"leaf{i}", (), False) for i in range(n_leaves)]
    ids = list(range(n_leaves))
    patterns = set()
    next_id = n_leaves
    attempts = 0
    while len(specs) < n_leaves + n_internal and attempts < 200:
        attempts += 1
        k = rng.randint(2, max_children)
        children = tuple(rng.choice(ids) for _ in range(k))
        if unambiguous and children in patterns:
            continue
        patterns.add(children)
        specs.append((next_id, f"node{next_id}", children, False))
        ids.append(next_id)
        next_id += 1
    return build_library(specs)


def downward_closed_subset(lib: SemanticLibrary, rng: random.Random,
                           keep_prob: float = 0.5) -> SemanticLibrary:
    """A receiver-side sub-library: all leaves, plus a random subset of
    internal nodes pruned so every kept node has all its children kept."""
    kept = {i for i, n in lib.nodes.items() if n.is_leaf}
    kept |= {i for i, n in lib.nodes.items() if not n.is_leaf and rng.random() < keep_prob}
    changed = True
    while changed:
        changed = False
        for i in sorted(kept):
            node = lib.nodes[i]
            if any(c not in kept for c in node.children):
                kept.remove(i)
                changed = True
    specs = [(n.id, n.label, n.children, n.modifier)
             for n in lib.nodes.values() if n.id in kept]
    return build_library(specs)
