"""Persistence of tables, documents and images."""

from modemix.storage.files import (
    identification_to_dict,
    mode_to_dict,
    read_candidates,
    read_corrections,
    read_csv,
    read_json,
    read_measured_efficiencies,
    read_profile_csv,
    read_scan,
    read_scans,
    sidecar_path,
    write_band_map,
    write_candidates,
    write_corrections,
    write_cross_section,
    write_csv,
    write_document,
    write_efficiency_table,
    write_identification_report,
    write_json,
    write_mode_image,
    write_modes,
    write_profile,
    write_scan,
    write_separation_report,
    write_sidecar,
)
from modemix.storage.schema import SCHEMA_VERSION

__all__ = [
    "SCHEMA_VERSION",
    "identification_to_dict",
    "mode_to_dict",
    "read_candidates",
    "read_corrections",
    "read_csv",
    "read_json",
    "read_measured_efficiencies",
    "read_profile_csv",
    "read_scan",
    "read_scans",
    "sidecar_path",
    "write_band_map",
    "write_candidates",
    "write_corrections",
    "write_cross_section",
    "write_csv",
    "write_document",
    "write_efficiency_table",
    "write_identification_report",
    "write_json",
    "write_mode_image",
    "write_modes",
    "write_profile",
    "write_scan",
    "write_separation_report",
    "write_sidecar",
]
