import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from svmfim.txdb import TransactionDb, canonical, db5


def random_db(seed, max_items=12, max_tx=200):
    rng = np.random.default_rng(seed)
    n_items = int(rng.integers(3, max_items + 1))
    n_tx = int(rng.integers(10, max_tx + 1))
    density = rng.uniform(0.15, 0.6)
    rows = []
    for _ in range(n_tx):
        row = canonical(np.flatnonzero(rng.random(n_items) < density))
        rows.append(row or (int(rng.integers(n_items)),))
    return TransactionDb(tuple(rows), n_items, source=f"random({seed})")


def oracle_supports(db, minsup):
    """Exhaustive enumeration; the threshold test is done in exact rationals."""
    n = len(db)
    q = Fraction(minsup).limit_denominator(10**6)
    out = {}
    sets = [set(t) for t in db.transactions]
    for k in range(1, db.n_items + 1):
        any_k = False
        for combo in itertools.combinations(range(db.n_items), k):
            c = sum(1 for t in sets if t.issuperset(combo))
            if c > 0 and Fraction(c, n) >= q:
                out[combo] = c
                any_k = True
        if not any_k:
            break
    return out


@st.composite
def small_dbs(draw, max_items=7, max_tx=25):
    n_items = draw(st.integers(1, max_items))
    rows = draw(st.lists(
        st.lists(st.integers(0, n_items - 1), min_size=1, max_size=n_items),
        min_size=1, max_size=max_tx))
    return TransactionDb(tuple(canonical(r) for r in rows), n_items)


@pytest.fixture
def toy():
    return db5()
