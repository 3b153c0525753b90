"""In-memory and on-disk caching of enumerated group tables.

Disk entries are content-addressed by a header string.  A loaded entry is
re-validated (shape, header, membership of the identity and closure under one
generator) and silently recomputed when anything looks wrong.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path

import numpy as np

from .errors import CapExceeded
from .group import DEFAULT_CAP, GroupContext, GroupTable, enumerate_group

_MEMORY: dict = {}


def table_header(ctx: GroupContext) -> str:
    return f"chevtab v1 group {ctx.rs.id} {ctx.rep.kind} {ctx.ring.name}"


def _path(cache_dir, header: str) -> Path:
    digest = hashlib.sha256(header.encode()).hexdigest()[:24]
    return Path(cache_dir) / f"chevtab-{digest}.npz"


def _load(ctx: GroupContext, path: Path, header: str) -> GroupTable | None:
    try:
        with np.load(path, allow_pickle=False) as data:
            if str(data["header"]) != header:
                return None
            elems = data["elements"]
            depth = int(data["depth"])
            gens = int(data["generators"])
    except (OSError, KeyError, ValueError):
        return None
    n = ctx.dim
    if elems.ndim != 3 or elems.shape[1:] != (n, n):
        return None
    table = GroupTable(ctx, elems, depth, gens)
    if ctx.identity() not in table:
        return None
    probe = ctx.x_one(ctx.rs.simple_roots[0])
    for i in np.linspace(0, table.size - 1, num=min(8, table.size), dtype=int):
        if table.element(int(i)) * probe not in table:
            return None
    return table


def _store(table: GroupTable, path: Path, header: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".{os.getpid()}.tmp")
    with open(tmp, "wb") as fh:
        np.savez(fh, header=np.array(header), elements=table.elements,
                 depth=np.array(table.depth), generators=np.array(table.generators))
    os.replace(tmp, path)


def group_table(ctx: GroupContext, cap: int = DEFAULT_CAP, cache_dir=None) -> GroupTable:
    """The enumerated group of ``ctx``, from memory, disk or a fresh enumeration."""
    header = table_header(ctx)
    if header in _MEMORY:
        table = _MEMORY[header]
        if table.size > cap:
            raise CapExceeded(f"{ctx.name}: more than {cap} elements")
        return table
    table = None
    if cache_dir:
        path = _path(cache_dir, header)
        if path.exists():
            table = _load(ctx, path, header)
            if table is not None and table.size > cap:
                raise CapExceeded(f"{ctx.name}: more than {cap} elements")
    if table is None:
        table = enumerate_group(ctx, cap=cap)
        if cache_dir:
            try:
                _store(table, _path(cache_dir, header), header)
            except OSError:
                pass
    _MEMORY[header] = table
    return table


def clear_memory():
    _MEMORY.clear()
