"""Manifests, reports, the numeric oracle and the ``kenmo`` command line"""
from kenmo.workbench.manifest import dump_manifest, load_manifest, parse_manifest
from kenmo.workbench.oracle import OracleResult, OracleSettings, numeric_curvature, run_oracle
from kenmo.workbench.reports import RunReport, digest, write_report
