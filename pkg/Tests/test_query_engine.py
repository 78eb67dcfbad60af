# Tests/test_query_engine.py
import logging

import pytest

from Models.errors import InvalidRangeError
from Models.query import SOURCE, TARGET, QueryGraph, QueryMode, Variant
from Models.timetable import DAY
from Services.oracle import oracle_ea, oracle_profile
from Services.query_engine import build_query_graph_pt, build_query_graph_st, run_query
from Services.router import answer, build_graph
from Services.verification import profile_window, random_queries
from Tests.conftest import A, B, C, D


def test_f1_pt_graph(f1_dataset):
    graph = build_query_graph_pt(f1_dataset.prefix_trees[A], C)
    assert graph.nodes == {(0, 0), (1, 0)}
    assert graph.edge_set() == {(SOURCE, (0, 0)), ((0, 0), (1, 0)), ((1, 0), TARGET)}
    assert graph.size == 2 + 3

    to_b = build_query_graph_pt(f1_dataset.prefix_trees[A], B)
    assert to_b.edge_set() == {(SOURCE, (0, 0)), ((0, 0), TARGET)}


def test_f1_st_graph_equals_pt_graph(f1_dataset):
    for dst in (B, C, D):
        pt = build_query_graph_pt(f1_dataset.prefix_trees[A], dst)
        st = build_query_graph_st(f1_dataset.split_prefix[A], f1_dataset.postfix[dst], A, dst, 4)
        assert st.edge_set() == pt.edge_set()


def test_empty_graphs(f1_dataset):
    assert build_query_graph_pt(f1_dataset.prefix_trees[A], A).is_empty()
    assert build_query_graph_st(f1_dataset.split_prefix[C], f1_dataset.postfix[A], C, A, 4).is_empty()


def test_query_graph_collapses_repeated_keys():
    graph = QueryGraph()
    graph.add_path([(0, 0), (1, 0)])
    graph.add_path([(0, 0), (1, 0)])
    graph.add_path([(0, 0)])
    assert graph.nodes == {(0, 0), (1, 0)}
    assert graph.num_edges == 4
    assert graph.roots == [(0, 0)]


@pytest.mark.parametrize("variant", [Variant.PT, Variant.ST])
def test_f1_tree_queries(f1_dataset, variant):
    tt, ts = f1_dataset.timetable, f1_dataset.transfers
    graph = build_graph(f1_dataset, variant, A, C)
    assert run_query(graph, tt, ts, QueryMode.EARLIEST_ARRIVAL, A, C, departure=28800) == {(30600, 1)}
    assert run_query(graph, tt, ts, QueryMode.PROFILE, A, C, edt=0, ldt=DAY) == {
        (28800, 30600, 1), (32400, 34200, 1)
    }
    assert answer(f1_dataset, variant, A, D, departure=28800).results == {(30780, 1)}


def test_run_query_arguments(f1_dataset):
    tt, ts = f1_dataset.timetable, f1_dataset.transfers
    graph = build_graph(f1_dataset, Variant.PT, A, C)
    with pytest.raises(InvalidRangeError):
        run_query(graph, tt, ts, QueryMode.EARLIEST_ARRIVAL, A, C)
    with pytest.raises(InvalidRangeError):
        run_query(graph, tt, ts, QueryMode.PROFILE, A, C, edt=5, ldt=1)
    with pytest.raises(ValueError):
        build_graph(f1_dataset, Variant.TB, A, C)


def test_closed_window_warns(f1_dataset, caplog):
    with caplog.at_level(logging.WARNING, logger="Services.query_engine"):
        answer(f1_dataset, Variant.ST, A, C, window=(0, 30000))
    assert "closes before its last departure" in caplog.text


def test_tb_answer_has_no_graph(f1_dataset):
    result = answer(f1_dataset, Variant.TB, A, C, departure=28800)
    assert result.graph_size is None
    assert result.results == {(30600, 1)}


def test_st_graph_contains_pt_graph(synthetic_dataset):
    n = synthetic_dataset.timetable.num_stops
    for src, dst, _ in random_queries(n, 60, seed=8):
        pt = build_graph(synthetic_dataset, Variant.PT, src, dst)
        st = build_graph(synthetic_dataset, Variant.ST, src, dst)
        assert st.contains(pt)


def test_three_way_agreement(synthetic_dataset):
    tt = synthetic_dataset.timetable
    for src, dst, departure in random_queries(tt.num_stops, 60, seed=1):
        expected = oracle_ea(tt, src, dst, departure)
        for variant in Variant:
            assert answer(synthetic_dataset, variant, src, dst, departure=departure).results == expected

    window = profile_window(synthetic_dataset)
    for src, dst, _ in random_queries(tt.num_stops, 12, seed=2):
        expected = oracle_profile(tt, src, dst, *window)
        for variant in Variant:
            assert answer(synthetic_dataset, variant, src, dst, window=window).results == expected
