//! Square matrices whose rows and columns are labelled by concept ids.

use std::fmt;

use crate::fcm::ConceptId;

/// An N×N row-major matrix indexed by an ordered list of concept ids.
///
/// Row `i` / column `j` both refer to `ids[i]` / `ids[j]`, so the same
/// structure carries raw weights, fuzzified labels or surprise masks.
#[derive(Clone, PartialEq)]
pub struct ConceptMatrix<T> {
    ids: Vec<ConceptId>,
    cells: Vec<T>,
}

impl<T: Clone + Default> ConceptMatrix<T> {
    pub fn filled(ids: Vec<ConceptId>) -> Self {
        let n = ids.len();
        Self {
            ids,
            cells: vec![T::default(); n * n],
        }
    }

    /// Appends a concept with an empty row and column.
    pub(crate) fn push_concept(&mut self, id: ConceptId) {
        let n = self.ids.len();
        let mut cells = Vec::with_capacity((n + 1) * (n + 1));
        for row in 0..n {
            cells.extend_from_slice(&self.cells[row * n..(row + 1) * n]);
            cells.push(T::default());
        }
        cells.extend(std::iter::repeat_n(T::default(), n + 1));
        self.ids.push(id);
        self.cells = cells;
    }
}

impl<T> ConceptMatrix<T> {
    pub fn from_cells(ids: Vec<ConceptId>, cells: Vec<T>) -> Option<Self> {
        (cells.len() == ids.len() * ids.len()).then_some(Self { ids, cells })
    }

    pub fn dim(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[ConceptId] {
        &self.ids
    }

    pub fn index_of(&self, id: ConceptId) -> Option<usize> {
        self.ids.iter().position(|&c| c == id)
    }

    pub fn at(&self, row: usize, col: usize) -> &T {
        &self.cells[row * self.dim() + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut T {
        let n = self.dim();
        &mut self.cells[row * n + col]
    }

    pub fn get(&self, from: ConceptId, to: ConceptId) -> Option<&T> {
        Some(self.at(self.index_of(from)?, self.index_of(to)?))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        let n = self.dim().max(1);
        self.cells.chunks(n)
    }

    /// Iterates `(row, col, value)` over every cell.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let n = self.dim();
        self.cells.iter().enumerate().map(move |(k, v)| (k / n, k % n, v))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> ConceptMatrix<U> {
        ConceptMatrix {
            ids: self.ids.clone(),
            cells: self.cells.iter().map(&mut f).collect(),
        }
    }

    pub fn try_map<U, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<ConceptMatrix<U>, E> {
        Ok(ConceptMatrix {
            ids: self.ids.clone(),
            cells: self.cells.iter().map(f).collect::<Result<_, E>>()?,
        })
    }
}

impl<T: Clone> ConceptMatrix<T> {
    /// Keeps the rows and columns whose ids appear in `keep`, in the order
    /// given by `keep`.
    pub fn select(&self, keep: &[ConceptId]) -> Option<Self> {
        let idx: Vec<usize> = keep.iter().map(|&id| self.index_of(id)).collect::<Option<_>>()?;
        let mut cells = Vec::with_capacity(idx.len() * idx.len());
        for &r in &idx {
            for &c in &idx {
                cells.push(self.at(r, c).clone());
            }
        }
        Some(Self {
            ids: keep.to_vec(),
            cells,
        })
    }

    /// Same cells, relabelled with a new id list of equal length.
    pub fn relabel(&self, ids: Vec<ConceptId>) -> Option<Self> {
        (ids.len() == self.ids.len()).then(|| Self {
            ids,
            cells: self.cells.clone(),
        })
    }
}

impl<T: fmt::Display> fmt::Display for ConceptMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        let width = rendered.iter().map(|s| s.chars().count()).max().unwrap_or(1);
        let n = self.dim();
        for row in 0..n {
            f.write_str("[ ")?;
            for col in 0..n {
                write!(f, "{:>width$} ", rendered[row * n + col])?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for ConceptMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = if self.dim() == 0 {
            Vec::new()
        } else {
            self.cells.chunks(self.dim()).collect()
        };
        f.debug_struct("ConceptMatrix")
            .field("ids", &self.ids)
            .field("rows", &rows)
            .finish()
    }
}
