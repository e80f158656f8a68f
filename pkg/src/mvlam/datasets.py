"""Tables and claimed figures shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .table import FunctionTable

_PKG = "mvlam.data"


def table_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files(_PKG).iterdir()
                  if p.name.endswith(".json") and p.name != "claims.json")


@lru_cache(maxsize=None)
def load_table(name: str) -> FunctionTable:
    """``load_table("belnap_oplus")``, ``load_table("run_matrix")``, ..."""
    path = resources.files(_PKG).joinpath(f"{name}.json")
    if not path.is_file():
        raise KeyError(f"no bundled table {name!r}; known: {', '.join(table_names())}")
    return FunctionTable.from_json(json.loads(path.read_text()))


@lru_cache(maxsize=None)
def _claims_text() -> str:
    return resources.files(_PKG).joinpath("claims.json").read_text()


def load_claims() -> dict:
    return json.loads(_claims_text())
