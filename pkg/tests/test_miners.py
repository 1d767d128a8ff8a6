import itertools

import pytest
from hypothesis import given, settings, strategies as st

from svmfim.errors import ConfigError, GuardError
from svmfim.miners import (MINERS, FrequentItemsets, MiningConfig, apriori_join, apriori_mine,
                           brute_force_mine, build_fptree, count_candidates, fpgrowth_mine, min_count)
from svmfim.txdb import TransactionDb

from conftest import oracle_supports, random_db, small_dbs

ALL = (brute_force_mine, apriori_mine, fpgrowth_mine)
PAIRS_DB5 = {(0,): 4, (1,): 4, (2,): 4, (0, 1): 3, (0, 2): 3, (1, 2): 3}


def _node(tree, *path):
    node = tree.root
    for item in path:
        node = node.children[item]
    return node


class TestDb5:
    @pytest.mark.parametrize("mine", ALL)
    def test_minsup_06(self, mine, toy):
        fi = mine(toy, MiningConfig(0.6))
        assert fi.counts == PAIRS_DB5
        assert fi.support((0, 1)) == pytest.approx(0.6)
        assert fi.support((0,)) == pytest.approx(0.8)

    @pytest.mark.parametrize("mine", ALL)
    def test_minsup_07(self, mine, toy):
        assert list(mine(toy, MiningConfig(0.7))) == [(0,), (1,), (2,)]

    @pytest.mark.parametrize("mine", ALL)
    def test_minsup_1_is_empty(self, mine, toy):
        assert len(mine(toy, MiningConfig(1.0))) == 0

    @pytest.mark.parametrize("mine", ALL)
    def test_triple_at_04(self, mine, toy):
        fi = mine(toy, MiningConfig(0.4))
        assert fi.counts[(0, 1, 2)] == 2

    @pytest.mark.parametrize("mine", ALL)
    def test_max_len(self, mine, toy):
        fi = mine(toy, MiningConfig(0.4, max_len=1))
        assert list(fi) == [(0,), (1,), (2,)]

    def test_fimi_output(self, toy):
        text = fpgrowth_mine(toy, MiningConfig(0.6)).to_fimi()
        assert text.splitlines()[:2] == ["0 #SUP: 4", "0 1 #SUP: 3"]


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.0000001, 2])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        MiningConfig(bad)


def test_max_len_rejects_zero():
    with pytest.raises(ConfigError):
        MiningConfig(0.5, max_len=0)


def test_bruteforce_guard():
    db = TransactionDb(((0, 25),), 26)
    with pytest.raises(GuardError):
        brute_force_mine(db, MiningConfig(0.5))


@pytest.mark.parametrize("mine", ALL)
def test_single_transaction(mine):
    db = TransactionDb(((2,),), 3)
    assert mine(db, MiningConfig(1.0)).counts == {(2,): 1}


@pytest.mark.parametrize("mine", ALL)
def test_identical_transactions(mine):
    t = (0, 2, 3)
    db = TransactionDb((t,) * 6, 4)
    fi = mine(db, MiningConfig(0.5))
    subsets = {c for k in range(1, 4) for c in itertools.combinations(t, k)}
    assert set(fi) == subsets
    assert all(fi.support(x) == 1.0 for x in fi)


@pytest.mark.parametrize("n,minsup,expected", [(5, 0.6, 3), (10, 0.3, 3), (3, 0.5, 2), (7, 1.0, 7), (200, 0.1, 20)])
def test_min_count(n, minsup, expected):
    assert min_count(minsup, n) == expected


class TestFpTree:
    def test_db5_shape(self, toy):
        tree = build_fptree(toy, MiningConfig(0.6))
        assert tree.item_order == [0, 1, 2]
        assert {i: tree.chain_count(i) for i in tree.header} == {0: 4, 1: 4, 2: 4}
        assert _node(tree, 0).count == 4
        assert _node(tree, 0, 1).count == 3
        assert _node(tree, 0, 1, 2).count == 2
        assert _node(tree, 0, 2).count == 1
        assert _node(tree, 1).count == 1
        assert _node(tree, 1, 2).count == 1
        assert set(tree.root.children) == {0, 1}

    def test_empty_after_filter(self, toy):
        tree = build_fptree(toy, MiningConfig(0.9))
        assert tree.root.children == {}
        assert tree.header == {}

    def test_repeated_transaction_single_path(self):
        db = TransactionDb(((1, 3, 4),) * 7, 5)
        tree = build_fptree(db, MiningConfig(0.5))
        node, depth = tree.root, 0
        while node.children:
            assert len(node.children) == 1
            node = next(iter(node.children.values()))
            assert node.count == 7
            depth += 1
        assert depth == 3

    @given(small_dbs(), st.sampled_from([0.1, 0.3, 0.5]))
    def test_header_conserves_singleton_counts(self, db, minsup):
        tree = build_fptree(db, MiningConfig(minsup))
        counts = db.item_counts()
        threshold = min_count(minsup, len(db))
        assert set(tree.header) == {i for i in range(db.n_items) if counts[i] >= threshold}
        for item in tree.header:
            assert tree.chain_count(item) == counts[item]

    @given(small_dbs())
    def test_child_counts_never_exceed_parent(self, db):
        tree = build_fptree(db, MiningConfig(0.1))
        stack = [tree.root]
        while stack:
            node = stack.pop()
            for child in node.sorted_children():
                if node is not tree.root:
                    assert child.count <= node.count
                stack.append(child)


class TestApriori:
    def test_join(self):
        assert apriori_join([(0, 1), (0, 2), (1, 2), (1, 3)]) == [(0, 1, 2)]

    def test_join_singletons(self):
        assert apriori_join([(0,), (2,), (5,)]) == [(0, 2), (0, 5), (2, 5)]

    def test_count_candidates(self, toy):
        assert count_candidates(toy.transactions, [(0, 1), (1, 2)], 2) == {(0, 1): 3, (1, 2): 3}


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("minsup", [0.1, 0.3, 0.5])
def test_oracle_sweep(seed, minsup):
    db = random_db(seed, max_items=10, max_tx=120)
    oracle = oracle_supports(db, minsup)
    for mine in ALL:
        assert mine(db, MiningConfig(minsup)).counts == oracle


@settings(max_examples=60, deadline=None)
@given(small_dbs(), st.sampled_from([0.05, 0.2, 0.34, 0.5, 0.8, 1.0]))
def test_miners_agree(db, minsup):
    cfg = MiningConfig(minsup)
    ref = brute_force_mine(db, cfg)
    assert apriori_mine(db, cfg) == ref
    assert fpgrowth_mine(db, cfg) == ref


@settings(max_examples=40, deadline=None)
@given(small_dbs(), st.sampled_from([0.1, 0.3, 0.5]))
def test_downward_closure(db, minsup):
    fi = fpgrowth_mine(db, MiningConfig(minsup))
    for x in fi:
        for k in range(1, len(x)):
            for sub in itertools.combinations(x, k):
                assert sub in fi
                assert fi.counts[sub] >= fi.counts[x]


def test_registry():
    assert set(MINERS) == {"apriori", "fpgrowth", "bruteforce"}


def test_equality_ignores_order():
    a = FrequentItemsets({(1,): 2, (0,): 3}, 5, 0.4)
    b = FrequentItemsets({(0,): 3, (1,): 2}, 5, 0.4)
    assert a == b
    assert list(a) == [(0,), (1,)]
