# mixedtraces/dataflows/__init__.py

from .config import get_config, initialize_config, resolve, set_config
from .tables import concat_tables, manifest_hash, save_table, sha256_file, write_json

# gridfn depends on mixedtraces.extension; import it as mixedtraces.dataflows.gridfn

__all__ = [
    # Configuration
    "get_config",
    "initialize_config",
    "resolve",
    "set_config",
    # Tables and bundle files
    "concat_tables",
    "manifest_hash",
    "save_table",
    "sha256_file",
    "write_json",
]
