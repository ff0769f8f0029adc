"""Graphs that look locally like the lattice L^d: locality checks, covering maps from L^d,
deck groups and their quotients."""

from .cover import (
    CoverStatus,
    DeckGroup,
    ObstructionTag,
    PartialCover,
    QuotientKind,
    SurfaceKind,
    analyse_cover,
    available_backends,
    classify_2d,
    classify_d,
    default_backend,
    extend_cover,
    recover_deck_group,
    seed_map,
    validate_cover,
)
from .families import (
    build_gen_torus,
    build_grid,
    build_klein,
    build_strange,
    build_torus,
    klein_spec,
    strange_spec,
    torus_spec,
)
from .graph import (
    INFINITE,
    BallMode,
    Graph,
    RootedBall,
    are_isomorphic,
    distance,
    enumerate_4cycles,
    extract_ball,
    is_bipartite,
    read_edge_list,
    rooted_isomorphic,
    write_edge_list,
)
from .lattice import (
    LatticeAut,
    NonCocompactError,
    SignedPerm,
    SubgroupSpec,
    build_quotient,
    is_torsion_free,
    min_displacement,
    point_group_closure,
    read_group,
    remark_group,
    translation_group,
    write_group,
)
from .probe import is_locally_grid, is_r_locally, is_weakly_r_locally, opposite_partition
from .wheel import find_wheel_family, glue_surface, vertex_rotation_check

__version__ = "0.1.0"
