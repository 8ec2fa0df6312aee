"""Series-parallel recognition by series and parallel reductions."""

from __future__ import annotations

from typing import TYPE_CHECKING

import networkx as nx

if TYPE_CHECKING:
    from span_decomp.models.structure import Structure


def is_series_parallel(structure: Structure) -> bool:
    """Whether every block of the Gaifman graph is series-parallel.

    Equivalently the graph has treewidth at most 2: it reduces to nothing by
    deleting vertices of degree at most 1 and suppressing vertices of degree
    2, parallel edges collapsing as they appear.
    """
    graph = nx.Graph(structure.gaifman)
    graph.remove_edges_from(list(nx.selfloop_edges(graph)))
    pending = [v for v in graph if graph.degree[v] <= 2]  # noqa: PLR2004
    while pending:
        v = pending.pop()
        if v not in graph or graph.degree[v] > 2:  # noqa: PLR2004
            continue
        around = list(graph.adj[v])
        graph.remove_node(v)
        if len(around) == 2:  # noqa: PLR2004
            graph.add_edge(*around)
        pending.extend(u for u in around if graph.degree[u] <= 2)  # noqa: PLR2004
    return graph.number_of_nodes() == 0
