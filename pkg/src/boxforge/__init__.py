"""boxforge: bipartite no-signaling boxes in the 222 Bell scenario --
construction, locality classification, quantum realizations, wiring
protocols, and nonlocality-distillation search."""

from .box_core import (
    Box222,
    BellFunctional,
    Fractions,
    HardyStats,
    LocalityVerdict,
    NCopyBox,
    VertexLabel,
    chsh,
    chsh_variant,
    chsh_variants,
    convex_mix,
    correlators,
    evaluate,
    fractions,
    hardy_stats,
    local_membership,
    local_vertices,
    make_vertex,
    marginal_copies,
    nonlocal_vertices,
    pr_box,
    tensor,
    tilted_chsh,
    uniform_box,
)

__version__ = "0.1.0"

__all__ = [
    "Box222",
    "BellFunctional",
    "Fractions",
    "HardyStats",
    "LocalityVerdict",
    "NCopyBox",
    "VertexLabel",
    "chsh",
    "chsh_variant",
    "chsh_variants",
    "convex_mix",
    "correlators",
    "evaluate",
    "fractions",
    "hardy_stats",
    "local_membership",
    "local_vertices",
    "make_vertex",
    "marginal_copies",
    "nonlocal_vertices",
    "pr_box",
    "tensor",
    "tilted_chsh",
    "uniform_box",
    "__version__",
]
