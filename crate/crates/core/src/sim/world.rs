use serde::{Deserialize, Serialize};

/// Moore neighborhood offsets, in a fixed order so draws are reproducible.
pub const MOORE: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// Grid coordinate. `x` runs across the region split, `y` along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    /// Chebyshev distance; 1 means Moore neighbors.
    pub fn chebyshev(self, other: Cell) -> usize {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y))
    }
}

/// The two regions of the world, split vertically at `width / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    One,
    Two,
}

/// Bounded (non-toroidal) grid carrying the cumulative stigma field.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldGrid {
    width: usize,
    height: usize,
    stigma: Vec<f64>,
}

impl WorldGrid {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, stigma: vec![0.0; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub fn region(&self, cell: Cell) -> Region {
        if cell.x < self.width / 2 {
            Region::One
        } else {
            Region::Two
        }
    }

    /// Column range `[lo, hi)` occupied by a region.
    pub fn region_columns(&self, region: Region) -> std::ops::Range<usize> {
        match region {
            Region::One => 0..self.width / 2,
            Region::Two => self.width / 2..self.width,
        }
    }

    pub fn stigma(&self, cell: Cell) -> f64 {
        self.stigma[cell.y * self.width + cell.x]
    }

    pub fn stigma_field(&self) -> &[f64] {
        &self.stigma
    }

    /// Cell reached by moving `steps` cells along `offset`, or `None` if it leaves the grid.
    pub fn offset(&self, cell: Cell, (dx, dy): (isize, isize), steps: usize) -> Option<Cell> {
        let x = cell.x as isize + dx * steps as isize;
        let y = cell.y as isize + dy * steps as isize;
        if x < 0 || y < 0 {
            return None;
        }
        let c = Cell::new(x as usize, y as usize);
        self.contains(c).then_some(c)
    }

    /// Like [`offset`](Self::offset) but clamps each coordinate to the grid edge.
    pub fn offset_clamped(&self, cell: Cell, (dx, dy): (isize, isize), steps: usize) -> Cell {
        let x = (cell.x as isize + dx * steps as isize).clamp(0, self.width as isize - 1);
        let y = (cell.y as isize + dy * steps as isize).clamp(0, self.height as isize - 1);
        Cell::new(x as usize, y as usize)
    }

    /// In-grid Moore neighbors of `cell`, in [`MOORE`] order.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        MOORE.iter().filter_map(move |&d| self.offset(cell, d, 1))
    }

    /// Adds `center` at the arrest cell and `neighbor` at each in-grid Moore neighbor.
    pub fn bump_stigma(&mut self, cell: Cell, center: f64, neighbor: f64) {
        debug_assert!(self.contains(cell));
        let w = self.width;
        self.stigma[cell.y * w + cell.x] += center;
        for (dx, dy) in MOORE {
            if let Some(n) = self.offset(cell, (dx, dy), 1) {
                self.stigma[n.y * w + n.x] += neighbor;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_split_vertically() {
        let g = WorldGrid::new(50, 50);
        assert_eq!(g.region(Cell::new(24, 0)), Region::One);
        assert_eq!(g.region(Cell::new(25, 49)), Region::Two);
        assert_eq!(g.region_columns(Region::Two), 25..50);
    }

    #[test]
    fn bump_interior() {
        let mut g = WorldGrid::new(10, 10);
        g.bump_stigma(Cell::new(4, 4), 1.0, 0.5);
        let total: f64 = g.stigma_field().iter().sum();
        assert_eq!(g.stigma(Cell::new(4, 4)), 1.0);
        for n in g.clone().neighbors(Cell::new(4, 4)) {
            assert_eq!(g.stigma(n), 0.5);
        }
        assert_eq!(total, 1.0 + 8.0 * 0.5);
        assert_eq!(g.stigma(Cell::new(6, 4)), 0.0);
    }

    #[test]
    fn bump_corner_touches_three_neighbors() {
        let mut g = WorldGrid::new(10, 10);
        g.bump_stigma(Cell::new(0, 0), 1.0, 0.5);
        assert_eq!(g.stigma(Cell::new(0, 0)), 1.0);
        assert_eq!(g.stigma(Cell::new(1, 0)), 0.5);
        assert_eq!(g.stigma(Cell::new(0, 1)), 0.5);
        assert_eq!(g.stigma(Cell::new(1, 1)), 0.5);
        assert_eq!(g.stigma_field().iter().sum::<f64>(), 2.5);
    }

    #[test]
    fn bumps_are_additive() {
        let mut g = WorldGrid::new(10, 10);
        g.bump_stigma(Cell::new(3, 3), 1.0, 0.5);
        g.bump_stigma(Cell::new(3, 3), 1.0, 0.5);
        assert_eq!(g.stigma(Cell::new(3, 3)), 2.0);
        assert_eq!(g.stigma(Cell::new(2, 2)), 1.0);
    }

    #[test]
    fn clamped_offset_stays_inside() {
        let g = WorldGrid::new(10, 10);
        assert_eq!(g.offset_clamped(Cell::new(1, 8), (-1, 1), 3), Cell::new(0, 9));
        assert_eq!(g.offset(Cell::new(1, 8), (-1, 1), 3), None);
    }
}
