import networkx as nx
import pytest

from helpers import connected_bipartite_graphs, connected_girth5_graphs, to_nx


def _atlas(n, keep):
    return [h for h in nx.graph_atlas_g() if h.number_of_nodes() == n and nx.is_connected(h) and keep(h)]


@pytest.mark.parametrize("n", range(1, 8))
def test_girth5_enumeration_matches_atlas(n):
    got = connected_girth5_graphs(n)[n]
    assert len(got) == len(_atlas(n, lambda h: nx.girth(h) >= 5))


@pytest.mark.parametrize("n", range(1, 8))
def test_bipartite_enumeration_matches_atlas(n):
    got = connected_bipartite_graphs(n)[n]
    assert len(got) == len(_atlas(n, nx.is_bipartite))
    assert all(nx.is_bipartite(to_nx(g)) and nx.is_connected(to_nx(g)) for g in got)
