import numpy as np
import pytest

from chevdioph.errors import CapExceeded
from chevdioph.group import make_context
from chevdioph.tables import _path, clear_memory, group_table, table_header


@pytest.fixture
def ctx():
    clear_memory()
    yield make_context("A2", "sl", "GF(2)")
    clear_memory()


def test_disk_cache_round_trip(ctx, tmp_path):
    first = group_table(ctx, cache_dir=tmp_path)
    path = _path(tmp_path, table_header(ctx))
    assert path.exists() and path.name.startswith("chevtab-")
    clear_memory()
    second = group_table(ctx, cache_dir=tmp_path)
    assert np.array_equal(first.elements, second.elements)


def test_corrupt_cache_is_recomputed(ctx, tmp_path):
    fresh = group_table(ctx, cache_dir=tmp_path)
    path = _path(tmp_path, table_header(ctx))
    with np.load(path) as data:
        parts = dict(data)
    parts["elements"] = parts["elements"][:100]  # truncated: no longer closed
    with open(path, "wb") as fh:
        np.savez(fh, **parts)
    clear_memory()
    assert np.array_equal(group_table(ctx, cache_dir=tmp_path).elements, fresh.elements)
    path.write_bytes(b"not an npz file")
    clear_memory()
    assert group_table(ctx, cache_dir=tmp_path).size == 168


def test_header_mismatch_is_ignored(ctx, tmp_path):
    group_table(ctx, cache_dir=tmp_path)
    other = make_context("C2", "sp", "GF(2)")
    # plant the A2 table under the C2 name
    _path(tmp_path, table_header(ctx)).rename(_path(tmp_path, table_header(other)))
    clear_memory()
    assert group_table(other, cache_dir=tmp_path).size == 720


def test_cap_applies_to_cached_tables(ctx, tmp_path):
    group_table(ctx, cache_dir=tmp_path)
    with pytest.raises(CapExceeded):
        group_table(ctx, cap=100)
    clear_memory()
    with pytest.raises(CapExceeded):
        group_table(ctx, cap=100, cache_dir=tmp_path)
