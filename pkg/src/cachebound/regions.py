"""Contention windows and contention regions.

Each reference can only be aged by remote accesses that fall between the
previous access to its address and the reference itself.  The window
[start, end] names the out-most regions where that is possible.  A
contention region (CR) then collects, per path position, the references a
remote access occurring there can affect; the CR sequence inherits the
path's temporal order and drives the dynamic program.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intra import CacClass
from .model import UrPath
from .refs import MemoryReference


@dataclass
class ContentionRegion:
    """References affectable by a remote access within `span` (a closed
    range of out-most region indices; wider than one after merging)."""

    index: int
    span: tuple[int, int]
    refs: list[MemoryReference]


def first_exposed_region(path: UrPath, ref: MemoryReference, cac: CacClass,
                         level: int) -> int:
    """Index of the out-most region right after the one holding the most
    recent prior access to the reference's address.

    For region-scope references the prior access sits in the home region
    itself (the previous iteration), so exposure starts at home.  Falls
    back to 1 when no prior access exists; such references carry an INF
    age and never enter a CR.
    """
    if ref.scope is not None:
        return ref.home_region
    prev = None
    for region in path.regions:
        if region.index >= ref.home_region:
            break
        for b in region.blocks():
            if b.address == ref.address and cac.reaches(b.id, level):
                prev = region.index
    return 1 if prev is None else prev + 1


def contention_window(path: UrPath, ref: MemoryReference, cac: CacClass,
                      level: int) -> tuple[int, int]:
    """The closed out-most-region range where the reference is exposed.

    Region-scope references reuse inside their home region, so they are
    exposed there alone.  A first access is exposed from the region after
    its previous access up to the home region when home loops, or up to
    the preceding region when it does not (the reuse ends on entry).
    """
    if ref.scope is not None:
        return ref.home_region, ref.home_region
    home = path.region(ref.home_region)
    start = first_exposed_region(path, ref, cac, level)
    end = ref.home_region - 1 if home.count == 1 else ref.home_region
    if start > end and end >= 1:
        # adjacent reuse: the previous access sits in the region right
        # before home, so the only exposure is the boundary between the
        # two; pin the window there so a remote segment can still reach it
        start = end = ref.home_region - 1
    return start, end


def assign_windows(path: UrPath, refsets, cac: CacClass, level: int):
    for refs in refsets.values():
        for ref in refs:
            ref.window_start, ref.window_end = contention_window(path, ref, cac, level)


def build_contention_regions(path: UrPath, refsets, assoc: int,
                             optimize: bool = True) -> list[ContentionRegion]:
    """The CR sequence for one path.

    A reference joins the CR of every position its window covers, provided
    some ordering lets it hit at all (min_age below the associativity; a
    reference that misses under every ordering cannot be made worse).
    With `optimize`, empty CRs are dropped and consecutive CRs with
    identical reference sets are merged; the optimized and raw sequences
    give identical analysis results.
    """
    all_refs = [r for x in sorted(refsets) for r in refsets[x]]
    raw = []
    for region in path.regions:
        x = region.index
        members = [
            r for r in all_refs
            if r.min_age < assoc and r.window_start <= x <= r.window_end
        ]
        raw.append(ContentionRegion(index=x, span=(x, x), refs=members))
    if not optimize:
        return raw
    out: list[ContentionRegion] = []
    for cr in raw:
        if not cr.refs:
            continue
        if out and _same_refs(out[-1].refs, cr.refs):
            out[-1] = ContentionRegion(
                index=out[-1].index,
                span=(out[-1].span[0], cr.span[1]),
                refs=out[-1].refs,
            )
        else:
            out.append(cr)
    for s, cr in enumerate(out, start=1):
        cr.index = s
    return out


def _same_refs(a, b):
    return len(a) == len(b) and all(x is y for x, y in zip(a, b))
