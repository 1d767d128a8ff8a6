import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from svmfim.errors import ConfigError, DomainError, EmptyDatabaseError, FormatError, ParseError
from svmfim.txdb import (SyntheticSpec, TransactionDb, dump_fimi, gen_synthetic, load_categorical_csv,
                         load_fimi, read_db, support)

from conftest import small_dbs


class TestLoadFimi:
    def test_hand_parse(self):
        db = load_fimi("1 2 3\n1 2\n2 3\n")
        assert db.transactions == ((1, 2, 3), (1, 2), (2, 3))
        assert db.n_items == 4

    def test_empty_text(self):
        with pytest.raises(EmptyDatabaseError):
            load_fimi("")

    def test_blank_lines_only(self):
        with pytest.raises(EmptyDatabaseError):
            load_fimi("\n  \n\t\n")

    def test_dedup_and_sort(self):
        assert load_fimi("2 2 1\n").transactions == ((1, 2),)

    def test_blank_lines_dropped(self):
        assert len(load_fimi("1\n\n2 3\n")) == 2

    def test_bad_token_position(self):
        with pytest.raises(ParseError) as exc:
            load_fimi("1 2\n3 x4 5\n")
        assert exc.value.line == 2
        assert exc.value.column == 3

    def test_negative_rejected(self):
        with pytest.raises(ParseError):
            load_fimi("1 -2\n")

    @given(small_dbs())
    def test_round_trip(self, db):
        back = load_fimi(dump_fimi(db))
        assert back.transactions == db.transactions
        assert back.n_items == max(i for t in db for i in t) + 1


class TestCategorical:
    def test_first_row_ids(self):
        db = load_categorical_csv("e,x,s\n")
        assert db.transactions == ((0, 1, 2),)
        assert db.item_labels == {0: "col0=e", 1: "col1=x", 2: "col2=s"}

    def test_identical_rows_reuse_ids(self):
        db = load_categorical_csv("e,x\ne,x\n")
        assert db.transactions == ((0, 1), (0, 1))
        assert db.n_items == 2

    def test_shared_value(self):
        db = load_categorical_csv("a,p\nb,p\n")
        assert db.transactions[1] == (1, 2)
        assert db.item_labels[1] == "col1=p"
        assert db.item_labels[2] == "col0=b"

    def test_same_value_in_different_columns_is_distinct(self):
        db = load_categorical_csv("x,x\n")
        assert db.n_items == 2

    def test_ragged(self):
        with pytest.raises(FormatError) as exc:
            load_categorical_csv("a,b,c\nd,e\n")
        assert exc.value.row == 1

    def test_empty(self):
        with pytest.raises(EmptyDatabaseError):
            load_categorical_csv("")

    def test_drop_columns(self):
        db = load_categorical_csv("1,e,x\n2,p,x\n", drop_columns=(0,))
        assert db.item_labels == {0: "col1=e", 1: "col2=x", 2: "col1=p"}
        assert all(len(t) == 2 for t in db)

    def test_delimiter(self):
        db = load_categorical_csv("a;b\n", delimiter=";")
        assert db.transactions == ((0, 1),)

    def test_read_db(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("a,b\nc,b\n")
        assert read_db(p, "csv") == load_categorical_csv("a,b\nc,b\n")
        with pytest.raises(ConfigError):
            read_db(p, "xml")


class TestSupport:
    def test_empty_itemset(self, toy):
        assert support(toy, ()) == 1.0

    def test_db5_values(self, toy):
        assert support(toy, (0,)) == pytest.approx(0.8)
        assert support(toy, (0, 1)) == pytest.approx(0.6)
        assert support(toy, (0, 1, 2)) == pytest.approx(0.4)

    def test_out_of_universe(self, toy):
        with pytest.raises(DomainError):
            support(toy, (3,))

    @given(small_dbs(), st.data())
    def test_anti_monotone(self, db, data):
        x = data.draw(st.sets(st.integers(0, db.n_items - 1), max_size=db.n_items))
        extra = data.draw(st.integers(0, db.n_items - 1))
        x = tuple(sorted(x))
        assert support(db, tuple(sorted(set(x) | {extra}))) <= support(db, x)

    @given(small_dbs())
    def test_singletons_match_linear_scan(self, db):
        for i in range(db.n_items):
            expected = sum(1 for t in db if i in t) / len(db)
            assert support(db, (i,)) == expected
            assert db.item_counts()[i] == sum(1 for t in db if i in t)

    def test_universe_checked_at_construction(self):
        with pytest.raises(DomainError):
            TransactionDb(((0, 5),), 3)


class TestSynthetic:
    def test_deterministic(self):
        spec = SyntheticSpec(200, 20, 3, 4.0, 0.5, rng_seed=7)
        assert gen_synthetic(spec) == gen_synthetic(spec)
        assert dump_fimi(gen_synthetic(spec)) == dump_fimi(gen_synthetic(spec))

    def test_seed_changes_output(self):
        a = gen_synthetic(SyntheticSpec(200, 20, rng_seed=1))
        b = gen_synthetic(SyntheticSpec(200, 20, rng_seed=2))
        assert a != b

    def test_shape(self):
        spec = SyntheticSpec(300, 30, 4, 5.0, 0.5, rng_seed=3, pattern_len=3)
        db = gen_synthetic(spec)
        assert len(db) == 300
        assert db.n_items == 30
        assert len(db.seed_patterns) == 4
        assert all(len(p) == 3 for p in db.seed_patterns)
        assert all(t and t == tuple(sorted(set(t))) for t in db)

    def test_injected_transactions_contain_pattern(self):
        db = gen_synthetic(SyntheticSpec(300, 30, 4, 5.0, 0.5, rng_seed=3))
        for t, w in zip(db, db.injections):
            if w >= 0:
                assert set(db.seed_patterns[w]) <= set(t)

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.6, 1.0])
    def test_injection_rate_binomial(self, p):
        n = 2000
        db = gen_synthetic(SyntheticSpec(n, 40, 5, 4.0, p, rng_seed=11))
        hits = sum(1 for w in db.injections if w >= 0)
        sd = math.sqrt(n * p * (1 - p))
        assert abs(hits - n * p) <= 5 * sd + 1e-9

    def test_pattern_support_floor(self):
        # each pattern is injected into about p/k of the transactions
        db = gen_synthetic(SyntheticSpec(2000, 40, 4, 4.0, 0.8, rng_seed=5))
        for pat in db.seed_patterns:
            assert support(db, pat) >= 0.8 / 4 - 0.05

    @pytest.mark.parametrize("kw", [
        {"n_transactions": 0}, {"n_items": 0}, {"n_seed_patterns": 0},
        {"pattern_injection_prob": 1.5}, {"mean_transaction_len": 0.5}, {"pattern_len": 100},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            gen_synthetic(SyntheticSpec(**{**dict(n_items=10), **kw}))

    def test_subset_keeps_injections(self):
        db = gen_synthetic(SyntheticSpec(50, 10, 2, 3.0, 0.5, rng_seed=0))
        sub = db.subset([3, 1])
        assert sub.transactions == (db.transactions[3], db.transactions[1])
        assert sub.injections == (db.injections[3], db.injections[1])
        assert np.array_equal(sub.item_counts().shape, (10,))
