use std::fmt::Write;

use super::grid::TableGrid;
use crate::geometry::BBox;

fn rect(out: &mut String, b: &BBox, class: &str) {
    let _ = writeln!(
        out,
        r#"  <rect class="{class}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
        b.x1,
        b.y1,
        b.width(),
        b.height()
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG overlay of one table in page coordinates: rows, columns, cells with
/// their text, and inferred row separators.
pub fn render_svg(grid: &TableGrid, separators: &[BBox], page_width: f64, page_height: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{page_width}" height="{page_height}" viewBox="0 0 {page_width} {page_height}">"#
    );
    out.push_str(
        "  <style>\n\
         \x20   rect { fill: none; stroke-width: 1 }\n\
         \x20   .table { stroke: black; stroke-width: 2 }\n\
         \x20   .row { stroke: #1f77b4 }\n\
         \x20   .header { fill: #1f77b4; fill-opacity: 0.15; stroke: #1f77b4 }\n\
         \x20   .spanning { fill: #ff7f0e; fill-opacity: 0.15; stroke: #ff7f0e }\n\
         \x20   .column { stroke: #2ca02c }\n\
         \x20   .cell { stroke: #d62728; stroke-dasharray: 2 2 }\n\
         \x20   .separator { stroke: #9467bd; stroke-dasharray: 6 3 }\n\
         \x20   text { font: 10px monospace; fill: #d62728 }\n\
         \x20 </style>\n",
    );
    rect(&mut out, &grid.table, "table");
    for (i, r) in grid.rows.iter().enumerate() {
        let class = if grid.is_spanning(i) {
            "spanning"
        } else if grid.is_header(i) {
            "header"
        } else {
            "row"
        };
        rect(&mut out, r, class);
    }
    for c in &grid.columns {
        rect(&mut out, c, "column");
    }
    for s in separators {
        rect(&mut out, s, "separator");
    }
    for cell in grid.cells.iter().flatten() {
        rect(&mut out, &cell.bbox, "cell");
        if !cell.text.is_empty() {
            let _ = writeln!(
                out,
                r#"  <text x="{:.2}" y="{:.2}">{}</text>"#,
                cell.bbox.x1 + 2.0,
                cell.bbox.y2 - 2.0,
                escape(&cell.text)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
