"""depnet: class dependency network extraction and analysis.

Builds directed class dependency networks from object-oriented source
trees (or edge-list files) and analyzes them with complex-network
techniques: degree/power-law statistics, small-world measures,
centralities, structural controllability, module detection, package
prediction, and rule-based quality indicators.
"""

from .network import (
    DependencyKind,
    DependencyNetwork,
    DistanceField,
    NetworkInvariantError,
    Partition,
    UNREACHABLE,
    bfs_directed,
    bfs_undirected,
    reduce_to_lcc,
    weakly_connected_components,
)

__version__ = "0.1.0"

__all__ = [
    "DependencyKind",
    "DependencyNetwork",
    "DistanceField",
    "NetworkInvariantError",
    "Partition",
    "UNREACHABLE",
    "bfs_directed",
    "bfs_undirected",
    "reduce_to_lcc",
    "weakly_connected_components",
    "__version__",
]
