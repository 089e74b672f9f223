"""Laplacian spectra of finite graphs from scattering secular functions."""
from .bond import (DanglingSystem, evolution_operator, extended_secular, reconstruct_eigenvector,
                   s_dangling, stationary_vectors, vertex_sigma, z_D)
from .composition import (CompositionWiring, VertexAddition, add_vertex_resolvent,
                          add_vertex_secular, compose_secular, compose_spectrum,
                          single_lead_secular)
from .errors import GraphError, NumericalError
from .graph import InteriorGraph, WiringMatrix, direct_spectrum, full_wiring
from .lead import LeadSystem, find_resonances, s_lead, z_Ld, z_R, z_res
from .report import SpectrumReport
from .solver import scan, solve_spectrum

__all__ = [
    "CompositionWiring", "DanglingSystem", "GraphError", "InteriorGraph", "LeadSystem",
    "NumericalError", "SpectrumReport", "VertexAddition", "WiringMatrix",
    "add_vertex_resolvent", "add_vertex_secular", "compose_secular", "compose_spectrum",
    "direct_spectrum", "evolution_operator", "extended_secular", "find_resonances",
    "full_wiring", "reconstruct_eigenvector", "s_dangling", "s_lead", "scan",
    "single_lead_secular", "solve_spectrum", "stationary_vectors", "vertex_sigma",
    "z_D", "z_Ld", "z_R", "z_res",
]
