//! Grid geometry, generators, bonds and lattice configurations.
//!
//! A frame is tiled by an `n x n` grid. Every cell hosts one generator; the
//! generators of one frame form a [`Configuration`] whose connector graph is
//! always the 4-neighbourhood lattice. Spatial bonds are implied by grid
//! adjacency and only materialised by [`Configuration::spatial_bonds`].

use crate::error::{Error, Result};

/// Default energy carried by a spatial bond.
pub const SPATIAL_BOND_ENERGY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

/// Tiling of a `frame_width x frame_height` frame into `n x n` cells.
///
/// Interior cells are `floor(W / n) x floor(H / n)`; the last row and column
/// absorb the remainder so the cells cover the frame exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridGeometry {
    pub frame_width: usize,
    pub frame_height: usize,
    pub n: usize,
    pub cell_width: usize,
    pub cell_height: usize,
}

impl GridGeometry {
    pub fn new(frame_width: usize, frame_height: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGeometry(format!("grid side must be >= 2, got {n}")));
        }
        if frame_width < n || frame_height < n {
            return Err(Error::InvalidGeometry(format!(
                "frame {frame_width}x{frame_height} is smaller than a {n}x{n} grid"
            )));
        }
        Ok(GridGeometry {
            frame_width,
            frame_height,
            n,
            cell_width: frame_width / n,
            cell_height: frame_height / n,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.n * self.n
    }

    /// Top-left pixel of `cell`.
    pub fn offset(&self, cell: Cell) -> (usize, usize) {
        (cell.col * self.cell_width, cell.row * self.cell_height)
    }

    /// Pixel width of cells in column `col`.
    pub fn width_of_col(&self, col: usize) -> usize {
        if col + 1 == self.n {
            self.frame_width - col * self.cell_width
        } else {
            self.cell_width
        }
    }

    pub fn height_of_row(&self, row: usize) -> usize {
        if row + 1 == self.n {
            self.frame_height - row * self.cell_height
        } else {
            self.cell_height
        }
    }

    /// `(x, y, width, height)` of `cell` in pixels.
    pub fn cell_rect(&self, cell: Cell) -> (usize, usize, usize, usize) {
        let (x, y) = self.offset(cell);
        (x, y, self.width_of_col(cell.col), self.height_of_row(cell.row))
    }

    /// Cell containing pixel `(x, y)`. Coordinates outside the frame clamp
    /// to the border cells.
    pub fn cell_at(&self, x: usize, y: usize) -> Cell {
        Cell {
            row: (y / self.cell_height).min(self.n - 1),
            col: (x / self.cell_width).min(self.n - 1),
        }
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.n + cell.col
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index / self.n, index % self.n)
    }

    pub fn center_cell(&self) -> Cell {
        Cell::new(self.n / 2, self.n / 2)
    }

    /// Row-major iterator over all cells.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cell_count()).map(move |i| self.cell(i))
    }

    /// Number of 4-neighbours of `cell` inside the grid.
    pub fn spatial_degree(&self, cell: Cell) -> usize {
        let last = self.n - 1;
        [cell.row > 0, cell.row < last, cell.col > 0, cell.col < last]
            .iter()
            .filter(|&&b| b)
            .count()
    }
}

/// Shorthand for [`GridGeometry::new`].
pub fn build_geometry(frame_width: usize, frame_height: usize, n: usize) -> Result<GridGeometry> {
    GridGeometry::new(frame_width, frame_height, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondDirection {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondKind {
    Spatial,
    Temporal,
}

/// One end of a bond: a grid cell, `time_offset` frames in the past.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BondEnd {
    pub cell: Cell,
    pub time_offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub from: BondEnd,
    pub to: BondEnd,
    pub direction: BondDirection,
    pub kind: BondKind,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub row: usize,
    pub col: usize,
    pub features: Vec<f64>,
    /// Surprise energy, filled in by temporal aggregation.
    pub energy: f64,
    pub arity: usize,
}

impl Generator {
    pub fn cell(&self) -> Cell {
        Cell::new(self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Lattice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub geometry: GridGeometry,
    /// Row-major, `n * n` entries.
    pub generators: Vec<Generator>,
    pub topology: Topology,
    pub frame_index: u64,
}

impl Configuration {
    /// Builds a lattice configuration from row-major per-cell features.
    pub fn from_features(
        geometry: GridGeometry,
        frame_index: u64,
        features: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if features.len() != geometry.cell_count() {
            return Err(Error::Dimension {
                left: features.len(),
                right: geometry.cell_count(),
            });
        }
        let generators = features
            .into_iter()
            .enumerate()
            .map(|(i, features)| {
                let cell = geometry.cell(i);
                Generator {
                    row: cell.row,
                    col: cell.col,
                    features,
                    energy: 0.0,
                    arity: 0,
                }
            })
            .collect();
        Ok(lattice_bonds(Configuration {
            geometry,
            generators,
            topology: Topology::Lattice,
            frame_index,
        }))
    }

    pub fn generator(&self, cell: Cell) -> &Generator {
        &self.generators[self.geometry.index(cell)]
    }

    pub fn feature_dim(&self) -> usize {
        self.generators.first().map_or(0, |g| g.features.len())
    }

    /// Enumerates every spatial adjacency as an out-bond on the left/upper
    /// generator paired with an in-bond on the right/lower one.
    pub fn spatial_bonds(&self) -> Vec<Bond> {
        let g = &self.geometry;
        let mut bonds = Vec::with_capacity(4 * g.n * (g.n - 1));
        let end = |cell| BondEnd { cell, time_offset: 0 };
        for cell in g.cells() {
            let mut neighbours = [None, None];
            if cell.col + 1 < g.n {
                neighbours[0] = Some(Cell::new(cell.row, cell.col + 1));
            }
            if cell.row + 1 < g.n {
                neighbours[1] = Some(Cell::new(cell.row + 1, cell.col));
            }
            for other in neighbours.into_iter().flatten() {
                bonds.push(Bond {
                    from: end(cell),
                    to: end(other),
                    direction: BondDirection::Out,
                    kind: BondKind::Spatial,
                    energy: SPATIAL_BOND_ENERGY,
                });
                bonds.push(Bond {
                    from: end(cell),
                    to: end(other),
                    direction: BondDirection::In,
                    kind: BondKind::Spatial,
                    energy: SPATIAL_BOND_ENERGY,
                });
            }
        }
        bonds
    }
}

/// Attaches the lattice's spatial bonds, i.e. sets every generator's arity
/// to its 4-neighbour count.
pub fn lattice_bonds(mut config: Configuration) -> Configuration {
    let geometry = config.geometry;
    for g in &mut config.generators {
        g.arity = geometry.spatial_degree(g.cell());
    }
    config
}
