from __future__ import annotations

from fisec.ids import ID_RE, compress_id_list, natural_key


def test_id_pattern_accepts_declared_ids():
    for good in ("F-1", "IFB-2", "X_y-2", "EXTERNAL", "a"):
        assert ID_RE.match(good), good
    # dots only appear in generated instance ids, never in declarations
    for bad in ("", "1F", "-x", ".x", "_x", "F-1_IFB-2.1", "white space", "café"):
        assert not ID_RE.match(bad), bad


def test_natural_key_orders_numeric_runs_numerically():
    ids = ["SC-10", "SC-2", "SC-1"]
    assert sorted(ids, key=natural_key) == ["SC-1", "SC-2", "SC-10"]


def test_natural_key_orders_nested_instance_ids():
    ids = [
        "F-1_IFB-2.10",
        "F-1_IFB-2.2",
        "F-10_IFB-1",
        "F-2_IFB-1",
        "F-1_IFB-2",
    ]
    assert sorted(ids, key=natural_key) == [
        "F-1_IFB-2",
        "F-1_IFB-2.2",
        "F-1_IFB-2.10",
        "F-2_IFB-1",
        "F-10_IFB-1",
    ]


def test_compress_id_list_folds_shared_prefixes():
    ids = ["F-1_IFB-2.1_LS-2.1", "F-1_IFB-2.1_LS-2.2"]
    assert compress_id_list(ids) == "F-1_IFB-2.1_LS-2.1/2.2"


def test_compress_id_list_keeps_distinct_prefixes_apart():
    ids = ["F-1_IFB-2.1_LS-2.3", "F-4_IFB-2_LS-2"]
    assert compress_id_list(ids) == "F-1_IFB-2.1_LS-2.3, F-4_IFB-2_LS-2"


def test_compress_id_list_sorts_before_folding():
    ids = ["F-1_IFB-2.1_LS-2.2", "F-1_IFB-2.1_LS-2.10", "F-1_IFB-2.1_LS-2.1"]
    assert compress_id_list(ids) == "F-1_IFB-2.1_LS-2.1/2.2/2.10"


def test_compress_id_list_handles_singletons_and_empty():
    assert compress_id_list(["F-1_IFB-1_LS-1"]) == "F-1_IFB-1_LS-1"
    assert compress_id_list([]) == ""
