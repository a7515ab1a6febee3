"""Network topology under a given availability scenario."""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from gep_planner.scenarios.types import AvailabilityScenario
from gep_planner.system.model import SystemModel, TransmissionLine


def in_service_lines(
    model: SystemModel, availability: AvailabilityScenario
) -> tuple[TransmissionLine, ...]:
    return tuple(ln for ln in model.lines if availability.line_status(ln.id))


def islands(
    model: SystemModel, availability: AvailabilityScenario
) -> list[tuple[int, ...]]:
    """Bus ids of every connected component, each sorted, in order of lowest bus."""
    index = {bus: i for i, bus in enumerate(model.bus_ids)}
    edges = [
        (index[ln.from_bus], index[ln.to_bus])
        for ln in in_service_lines(model, availability)
    ]
    n = len(model.bus_ids)
    rows = [e[0] for e in edges]
    cols = [e[1] for e in edges]
    graph = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    groups: dict[int, list[int]] = {}
    for bus, label in zip(model.bus_ids, labels):
        groups.setdefault(int(label), []).append(bus)
    return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])


def island_pins(
    model: SystemModel, availability: AvailabilityScenario
) -> tuple[int, ...]:
    """Buses whose angle is fixed to zero.

    The slack bus pins its own island; every other island is pinned at its
    lowest-index bus. The slack bus is listed first.
    """
    slack = model.config.slack_bus
    pins = [slack]
    for island in islands(model, availability):
        if slack not in island:
            pins.append(island[0])
    return tuple(pins)
