use serde::Serialize;

use super::refine::RefinedStructure;
use crate::docmodel::{join_text, OcrWord};
use crate::error::{Error, Result};
use crate::geometry::BBox;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub bbox: BBox,
    pub text: String,
    #[serde(skip)]
    pub words: Vec<OcrWord>,
}

impl Cell {
    fn empty(bbox: BBox) -> Self {
        Cell {
            bbox,
            text: String::new(),
            words: Vec::new(),
        }
    }
}

/// Rows × columns with derived cells. Spanning rows own a single
/// full-width cell; every other row has one cell per column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableGrid {
    pub table: BBox,
    pub rows: Vec<BBox>,
    pub columns: Vec<BBox>,
    pub header_rows: Vec<usize>,
    pub spanning_rows: Vec<usize>,
    pub cells: Vec<Vec<Cell>>,
    #[serde(skip)]
    pub unassigned: Vec<OcrWord>,
}

impl TableGrid {
    pub fn is_header(&self, row: usize) -> bool {
        self.header_rows.contains(&row)
    }

    pub fn is_spanning(&self, row: usize) -> bool {
        self.spanning_rows.contains(&row)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Text of cell `(row, col)`; empty when out of range.
    pub fn text(&self, row: usize, col: usize) -> &str {
        self.cells
            .get(row)
            .and_then(|r| r.get(col))
            .map_or("", |c| c.text.as_str())
    }

    /// Space-joined text of a whole row.
    pub fn row_text(&self, row: usize) -> String {
        self.cells[row]
            .iter()
            .map(|c| c.text.as_str())
            .filter(|t| !t.is_empty())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Matrix of cell texts; spanning rows are a single-element list.
    pub fn text_matrix(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|c| c.text.clone()).collect())
            .collect()
    }
}

/// Cell `(i, j)` is the intersection of row `i` and column `j`.
pub fn build_grid(s: &RefinedStructure) -> Result<TableGrid> {
    if s.rows.is_empty() || s.columns.is_empty() {
        return Err(Error::Unstructurable(format!(
            "{} rows × {} columns",
            s.rows.len(),
            s.columns.len()
        )));
    }
    let mut cells = Vec::with_capacity(s.rows.len());
    for (i, row) in s.rows.iter().enumerate() {
        if s.spanning_rows.contains(&i) {
            cells.push(vec![Cell::empty(*row)]);
            continue;
        }
        let mut line = Vec::with_capacity(s.columns.len());
        for (j, col) in s.columns.iter().enumerate() {
            let b = row
                .intersection(col)
                .filter(BBox::has_area)
                .ok_or_else(|| Error::Unstructurable(format!("row {i} and column {j} do not intersect")))?;
            line.push(Cell::empty(b));
        }
        cells.push(line);
    }
    Ok(TableGrid {
        table: s.table,
        rows: s.rows.clone(),
        columns: s.columns.clone(),
        header_rows: s.header_rows.clone(),
        spanning_rows: s.spanning_rows.clone(),
        cells,
        unassigned: Vec::new(),
    })
}

/// Assigns every word whose center lies in the table to the cell it
/// overlaps most; ties go to the leftmost, then topmost cell. Words touching
/// no cell are kept in `unassigned`.
pub fn assign_text(mut grid: TableGrid, words: &[OcrWord]) -> TableGrid {
    for w in words {
        let (cx, cy) = w.bbox.center();
        if !grid.table.contains_point(cx, cy) {
            continue;
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in grid.cells.iter().enumerate() {
            if row.first().is_some_and(|c| c.bbox.y2 < w.bbox.y1 || c.bbox.y1 > w.bbox.y2) {
                continue;
            }
            for (j, cell) in row.iter().enumerate() {
                let a = cell.bbox.intersection_area(&w.bbox);
                if a <= 0.0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj, ba)) => {
                        let cur = &grid.cells[bi][bj].bbox;
                        a > ba
                            || (a == ba
                                && (cell.bbox.x1, cell.bbox.y1) < (cur.x1, cur.y1))
                    }
                };
                if better {
                    best = Some((i, j, a));
                }
            }
        }
        match best {
            Some((i, j, _)) => grid.cells[i][j].words.push(w.clone()),
            None => grid.unassigned.push(w.clone()),
        }
    }
    for row in &mut grid.cells {
        for cell in row {
            cell.text = join_text(&cell.words);
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(rows: usize, cols: usize, spanning: Vec<usize>) -> RefinedStructure {
        let table = BBox::new(0.0, 0.0, 100.0 * cols as f64, 20.0 * rows as f64);
        RefinedStructure {
            table,
            rows: (0..rows)
                .map(|i| BBox::new(table.x1, 20.0 * i as f64, table.x2, 20.0 * (i + 1) as f64))
                .collect(),
            columns: (0..cols)
                .map(|j| BBox::new(100.0 * j as f64, table.y1, 100.0 * (j + 1) as f64, table.y2))
                .collect(),
            header_rows: vec![0],
            spanning_rows: spanning,
        }
    }

    #[test]
    fn cell_counts() {
        assert_eq!(build_grid(&structure(3, 2, vec![])).unwrap().cell_count(), 6);
        let g = build_grid(&structure(3, 2, vec![1])).unwrap();
        assert_eq!(g.cell_count(), 5);
        assert_eq!(g.cells[1].len(), 1);
        assert_eq!(g.cells[1][0].bbox, g.rows[1]);
        let one = build_grid(&structure(1, 1, vec![])).unwrap();
        assert_eq!(one.cells[0][0].bbox, one.table);
        assert!(build_grid(&structure(0, 2, vec![])).is_err());
    }

    #[test]
    fn word_assignment() {
        let g = build_grid(&structure(3, 2, vec![])).unwrap();
        let words = vec![
            OcrWord::new("center", BBox::new(130.0, 23.0, 170.0, 37.0), 0),
            // 60% in column 0, 40% in column 1
            OcrWord::new("straddle", BBox::new(70.0, 43.0, 120.0, 57.0), 0),
            OcrWord::new("outside", BBox::new(300.0, 3.0, 340.0, 17.0), 0),
        ];
        let g = assign_text(g, &words);
        assert_eq!(g.text(1, 1), "center");
        assert_eq!(g.text(2, 0), "straddle");
        assert_eq!(g.text(2, 1), "");
        assert!(g.unassigned.is_empty());
        let assigned: usize = g.cells.iter().flatten().map(|c| c.words.len()).sum();
        assert_eq!(assigned, 2);
    }

    #[test]
    fn word_in_table_but_no_cell_is_unassigned() {
        let mut s = structure(2, 2, vec![]);
        s.rows[1].y1 = 30.0;
        let g = build_grid(&s).unwrap();
        let g = assign_text(g, &[OcrWord::new("gap", BBox::new(10.0, 22.0, 40.0, 28.0), 0)]);
        assert_eq!(g.unassigned.len(), 1);
        assert!(g.cells.iter().flatten().all(|c| c.text.is_empty()));
    }

    #[test]
    fn equal_overlap_goes_left() {
        let g = build_grid(&structure(1, 2, vec![])).unwrap();
        let g = assign_text(g, &[OcrWord::new("mid", BBox::new(90.0, 3.0, 110.0, 17.0), 0)]);
        assert_eq!(g.text(0, 0), "mid");
    }
}
