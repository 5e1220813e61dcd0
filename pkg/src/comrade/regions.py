"""Dynamic map partition driven by recorded player action points.

The map starts as one region. Every recorded point splits the region
containing it into two halves, cutting across the region's longer
dimension so regions stay near-square. A cell->id grid gives O(1)
lookups; a split only repaints the cells of the region being split,
which shrinks as the partition refines, so updates are amortized O(1)
under the point-driven workload.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .rng import Rng


@dataclass(frozen=True)
class Rect:
    x0: int
    y0: int
    x1: int  # exclusive
    y1: int  # exclusive

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    def to_dict(self, rid: int) -> dict:
        return {"id": rid, "x0": self.x0, "y0": self.y0, "x1": self.x1, "y1": self.y1}


class RegionSet:
    def __init__(self, map_width: int, map_height: int):
        if map_width <= 0 or map_height <= 0:
            raise ConfigurationError(
                f"map dimensions must be positive, got {map_width}x{map_height}"
            )
        self.map_width = map_width
        self.map_height = map_height
        self.rects: dict[int, Rect] = {0: Rect(0, 0, map_width, map_height)}
        self.grid = np.zeros((map_height, map_width), dtype=np.int64)
        self.ids: list[int] = [0]  # insertion order, stable for sampling
        self.next_id = 1
        self.split_count = 0

    def _check_bounds(self, x: int, y: int) -> None:
        if not (0 <= x < self.map_width and 0 <= y < self.map_height):
            raise DomainError(f"point ({x}, {y}) outside map")

    def record_action_point(self, x: int, y: int) -> int:
        """Split the region containing (x, y); return the id of the half
        containing the point. Saturated 1x1 regions are left alone."""
        self._check_bounds(x, y)
        rid = int(self.grid[y, x])
        rect = self.rects[rid]
        if rect.width == 1 and rect.height == 1:
            return rid
        # Cut across the longer dimension (square: cut width). Odd lengths
        # give the extra cell to the low-coordinate half.
        if rect.width >= rect.height:
            xm = rect.x0 + (rect.width + 1) // 2
            low = Rect(rect.x0, rect.y0, xm, rect.y1)
            high = Rect(xm, rect.y0, rect.x1, rect.y1)
        else:
            ym = rect.y0 + (rect.height + 1) // 2
            low = Rect(rect.x0, rect.y0, rect.x1, ym)
            high = Rect(rect.x0, ym, rect.x1, rect.y1)
        new_id = self.next_id
        self.next_id += 1
        # Low half keeps the parent id, so ids issued earlier stay valid.
        self.rects[rid] = low
        self.rects[new_id] = high
        self.grid[high.y0 : high.y1, high.x0 : high.x1] = new_id
        self.ids.append(new_id)
        self.split_count += 1
        return rid if low.contains(x, y) else new_id

    def lookup(self, x: int, y: int) -> int:
        self._check_bounds(x, y)
        return int(self.grid[y, x])

    def sample_region(self, rng: Rng) -> int:
        return self.ids[rng.randrange(len(self.ids))]

    def region_bounds(self, rid: int) -> Rect:
        try:
            return self.rects[rid]
        except KeyError:
            raise DomainError(f"unknown region id {rid}") from None

    def __len__(self) -> int:
        return len(self.rects)

    def dump(self) -> list[dict]:
        """JSON-friendly list of region rects, ordered by id."""
        return [self.rects[rid].to_dict(rid) for rid in sorted(self.rects)]
