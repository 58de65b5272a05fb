"""Bulk material dispersion."""

from modemix.material.sellmeier import (
    AxisDispersion,
    AxisMapping,
    CrystalAxis,
    SellmeierForm,
    SellmeierModel,
    angular_frequency,
    group_index,
    index_derivative,
    load_material,
    refractive_index,
)

__all__ = [
    "AxisDispersion",
    "AxisMapping",
    "CrystalAxis",
    "SellmeierForm",
    "SellmeierModel",
    "angular_frequency",
    "group_index",
    "index_derivative",
    "load_material",
    "refractive_index",
]
