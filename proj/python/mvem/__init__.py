"""Mixed virtual element solver on general polygonal meshes.

Thin re-export of the compiled core: mesh generation, refinement, the mixed
solver with flux postprocessing, the residual estimator, and the adaptive
study driver.
"""

from ._core import (
    Error,
    ErrorNorms,
    Mesh,
    ProblemData,
    SolveResult,
    TestCase,
    VerifyReport,
    dof_count,
    distorted_quad_mesh,
    hex_mesh,
    initial_mesh,
    lshape_mesh,
    make_case,
    make_data,
    read_mesh,
    read_mesh_file,
    refine,
    relabel,
    run_study,
    solve,
    verify_manufactured,
    write_mesh,
    write_mesh_file,
)

__all__ = [
    "Error",
    "ErrorNorms",
    "Mesh",
    "ProblemData",
    "SolveResult",
    "TestCase",
    "VerifyReport",
    "dof_count",
    "distorted_quad_mesh",
    "hex_mesh",
    "initial_mesh",
    "lshape_mesh",
    "make_case",
    "make_data",
    "read_mesh",
    "read_mesh_file",
    "refine",
    "relabel",
    "run_study",
    "solve",
    "verify_manufactured",
    "write_mesh",
    "write_mesh_file",
]
