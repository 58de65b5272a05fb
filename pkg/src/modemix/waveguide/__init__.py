"""Waveguide index profiles."""

from modemix.waveguide.profile import (
    SUPERSTRATE_INDEX,
    GridGeometry,
    IndexGrid,
    PermittivityTensor,
    ProfileRow,
    depth_profile,
    index_profile,
    lateral_profile,
    render_profile,
)

__all__ = [
    "SUPERSTRATE_INDEX",
    "GridGeometry",
    "IndexGrid",
    "PermittivityTensor",
    "ProfileRow",
    "depth_profile",
    "index_profile",
    "lateral_profile",
    "render_profile",
]
