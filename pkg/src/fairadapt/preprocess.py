"""Documented ingestion transforms, applied only when explicitly invoked.

A recipe is a JSON object whose stages run in a fixed order:

1. ``drop``: list of columns to remove.
2. ``merge``: per column, a map from new level name to the old levels it
   absorbs, with an optional ``"_other"`` new level collecting every
   unlisted old level.
3. ``keep_rows``: per column, the list of values a row must have to survive.
4. ``match_subsample``: ``{"column", "keep_level", "subsample_level",
   "within", "seed"}`` — keep every row of the kept level and randomly
   subsample the other level so the two match counts within every value of
   the ``within`` column.

The bundled ``adult`` recipe reproduces the census-income cleanup used in
the experiments (column drops, work-class/marital-status/native-country
level merges, white-subpopulation filter and gender-age matched
subsampling).
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import DataError

__all__ = ["apply_recipe", "builtin_recipe", "ADULT_RECIPE"]

ADULT_RECIPE: dict = {
    "drop": ["relationship", "fnlwgt", "education", "capital-gain", "capital-loss"],
    "merge": {
        "workclass": {
            "Government": ["Federal-gov", "Local-gov", "State-gov"],
            "Self-Employed": ["Self-emp-inc", "Self-emp-not-inc"],
            "Private": ["Private"],
            "_other": "Other/Unknown",
        },
        "marital-status": {
            "Married": ["Married-civ-spouse", "Married-AF-spouse"],
            "_other": "Not-Married",
        },
        "native-country": {
            "US": ["United-States"],
            "_other": "Non-US",
        },
    },
    "keep_rows": {"race": ["White"]},
    "match_subsample": {
        "column": "sex",
        "keep_level": "Female",
        "subsample_level": "Male",
        "within": "age",
        "seed": 13,
    },
}


def builtin_recipe(name: str) -> dict:
    if name != "adult":
        raise DataError(f"unknown builtin recipe {name!r}")
    return json.loads(json.dumps(ADULT_RECIPE))


def _parse(csv_text: str) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("CSV is empty")
    rows = [[c.strip() for c in row] for row in reader if row]
    return header, rows


def _emit(header: list[str], rows: list[list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def apply_recipe(csv_text: str, meta_text: str, recipe: dict) -> tuple[str, str]:
    """Run the recipe stages; returns transformed (csv_text, meta_text)."""
    header, rows = _parse(csv_text)
    meta = json.loads(meta_text)
    columns: dict = meta.get("columns", {})

    for col in recipe.get("drop", ()):
        if col not in header:
            raise DataError(f"drop: column {col!r} not present")
        idx = header.index(col)
        header.pop(idx)
        for row in rows:
            row.pop(idx)
        columns.pop(col, None)

    for col, mapping in recipe.get("merge", {}).items():
        if col not in header:
            raise DataError(f"merge: column {col!r} not present")
        idx = header.index(col)
        other = mapping.get("_other")
        lookup: dict[str, str] = {}
        for new_level, old_levels in mapping.items():
            if new_level == "_other":
                continue
            for old in old_levels:
                lookup[old] = new_level
        new_levels = [lvl for lvl in mapping if lvl != "_other"]
        if other is not None and other not in new_levels:
            new_levels.append(other)
        for row in rows:
            val = row[idx]
            if val in lookup:
                row[idx] = lookup[val]
            elif other is not None:
                row[idx] = other
            else:
                raise DataError(f"merge: value {val!r} in {col!r} has no target level")
        if col in columns and "levels" in columns[col]:
            columns[col]["levels"] = new_levels

    for col, keep in recipe.get("keep_rows", {}).items():
        if col not in header:
            raise DataError(f"keep_rows: column {col!r} not present")
        idx = header.index(col)
        keep_set = {str(v) for v in keep}
        rows = [row for row in rows if row[idx] in keep_set]
        if col in columns and "levels" in columns[col]:
            columns[col]["levels"] = [l for l in columns[col]["levels"] if l in keep_set]

    ms = recipe.get("match_subsample")
    if ms:
        for key in ("column", "keep_level", "subsample_level", "within", "seed"):
            if key not in ms:
                raise DataError(f"match_subsample: missing {key!r}")
        col = ms["column"]
        within = ms["within"]
        if col not in header or within not in header:
            raise DataError("match_subsample: column not present")
        ci = header.index(col)
        wi = header.index(within)
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(int(ms["seed"])))
        )
        kept: list[list[str]] = []
        groups: dict[str, tuple[list[int], list[int]]] = {}
        for i, row in enumerate(rows):
            bucket = groups.setdefault(row[wi], ([], []))
            if row[ci] == ms["keep_level"]:
                bucket[0].append(i)
            elif row[ci] == ms["subsample_level"]:
                bucket[1].append(i)
        selected: set[int] = set()
        for value in sorted(groups):
            keep_idx, sub_idx = groups[value]
            selected.update(keep_idx)
            take = min(len(keep_idx), len(sub_idx))
            if take:
                chosen = rng.choice(len(sub_idx), size=take, replace=False)
                selected.update(sub_idx[j] for j in np.sort(chosen))
        kept = [row for i, row in enumerate(rows) if i in selected]
        rows = kept

    meta["columns"] = columns
    return _emit(header, rows), json.dumps(meta, indent=2)
