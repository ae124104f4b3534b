from pathlib import Path

import pytest
import structlog

from src.wedge_sampler.config import EngineConfig, RunConfig
from src.wedge_sampler.engine import MapReduceEngine
from src.wedge_sampler.graph_io import write_records
from src.wedge_sampler.records import Edge

FIXTURES = Path(__file__).parent / "fixtures"

FIG2_EDGES = [
    Edge(1, 2),
    Edge(1, 3),
    Edge(2, 4),
    Edge(3, 4),
    Edge(3, 5),
    Edge(4, 5),
    Edge(4, 6),
]
FIG2_DEGREES = {1: 2, 2: 2, 3: 3, 4: 4, 5: 2, 6: 1}


@pytest.fixture
def fig2_path() -> Path:
    return FIXTURES / "fig2_edges.tsv"


@pytest.fixture
def fig2_edges() -> list[Edge]:
    return list(FIG2_EDGES)


@pytest.fixture
def fig2_degrees() -> dict[int, int]:
    return dict(FIG2_DEGREES)


@pytest.fixture
def small_engine_config(tmp_path) -> EngineConfig:
    """Tiny buffers so that every job spills and merges in several passes."""
    return EngineConfig(
        spill_records=3,
        merge_fan_in=2,
        map_workers=2,
        reduce_workers=2,
        tmp_dir=tmp_path,
    )


@pytest.fixture
def engine(small_engine_config) -> MapReduceEngine:
    return MapReduceEngine(small_engine_config, seed=7, reducer_count=3)


@pytest.fixture
def write_graph(tmp_path):
    """Write edges to a file under tmp_path and return its path."""

    def write(edges, name: str = "graph.tsv") -> Path:
        path = tmp_path / name
        write_records(path, edges)
        return path

    return write


@pytest.fixture
def run_config(tmp_path):
    """RunConfig factory with small split and reducer counts."""

    def make(input_path: Path, **overrides) -> RunConfig:
        values = {
            "input": input_path,
            "out": tmp_path / "out",
            "splits": 3,
            "reducers": 4,
            "seed": 11,
        }
        values.update(overrides)
        return RunConfig(**values)

    return make


@pytest.fixture(autouse=True)
def reset_logging():
    """Undo any structlog configuration a test (or cli.main) installed."""
    yield
    structlog.reset_defaults()
