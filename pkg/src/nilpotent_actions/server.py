import sys
from dataclasses import replace
from typing import Optional

from fastmcp import FastMCP

from nilpotent_actions.bounds import current_bounds
from nilpotent_actions.config import PipelineConfig
from nilpotent_actions.pipeline import (
    chern_document,
    dumps,
    lattice_document,
    run,
    theta_document,
    waring_document,
)

mcp = FastMCP("Nilpotent Actions")


def waring_solve(n: int, delta: int, S: list[int], minimal_cap: Optional[int] = None) -> str:
    """Extend S to a multiset T with Σ t^k ≡ 0 (mod delta) for 1 ≤ k ≤ n.

    Args:
        n: The highest power k
        delta: The modulus
        S: The entries that T must contain
        minimal_cap: If given, also search exhaustively for a smallest valid multiset of at most this size
    """
    return dumps(waring_document(n, S, delta, minimal_cap, current_bounds()))


def chern_certify(dim: int, c1: str, d: int = 1) -> str:
    """Certify a trivial complement bundle of rank R3(dim) for the line bundle with first Chern class c1.

    Args:
        dim: The real torus dimension m
        c1: The class as "e12:1,e34:1", one term per wedge of generators
        d: The divisibility required of ch(α ⊕ α[d]) - rank
    """
    return dumps(chern_document(dim, c1, d))


def theta_check(config: str) -> str:
    """Parametrise the config's Heisenberg factors by theta groups and check its admissible tuples.

    Args:
        config: Path to a YAML or JSON run configuration
    """
    return dumps(theta_document(PipelineConfig.from_yaml(config), current_bounds()))


def lattice_check(config: str) -> str:
    """Realise the config's Heisenberg factors as isotropic sublattice data and check its sublattice fragments.

    Args:
        config: Path to a YAML or JSON run configuration
    """
    return dumps(lattice_document(PipelineConfig.from_yaml(config), current_bounds()))


def pipeline_run(config: str, mode: Optional[str] = None) -> str:
    """Run the full pipeline and return the versioned pipeline report.

    Args:
        config: Path to a YAML or JSON run configuration
        mode: birational, diff or both; overrides the config when given
    """
    run_config = PipelineConfig.from_yaml(config)
    if mode:
        run_config = replace(run_config, mode=mode)
    return dumps(run(run_config, current_bounds()).to_json())


for tool in (waring_solve, chern_certify, theta_check, lattice_check, pipeline_run):
    mcp.tool(tool, name=tool.__name__, description=tool.__doc__)


if __name__ == "__main__":
    # Parse command-line arguments for transport selection
    transport = "stdio"

    if len(sys.argv) > 1:
        transport = sys.argv[1].lower()
        if transport not in ["stdio", "http"]:
            print(f"Invalid transport: {transport}. Valid options: stdio, http")
            print("Using stdio instead.")
            transport = "stdio"

    if transport == "http":
        print("Starting MCP server on HTTP at http://127.0.0.1:8000")
    mcp.run(transport=transport)
