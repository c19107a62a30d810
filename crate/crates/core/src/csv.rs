//! Plain-text CSV for nodal fields.
//!
//! Full fields use the header `x1[,x2],xn,value`, cross-section fields
//! `x1[,x2],value`. Rows follow storage order (cross-section row-major,
//! axial index fastest). Every number is written with 17 significant digits,
//! so `f64` values round-trip exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, ReducedField};
use crate::scalar::Real;

fn header(grid: &Grid, with_xn: bool) -> String {
    let mut h = String::from("x1");
    if grid.d_cross() == 2 {
        h.push_str(",x2");
    }
    if with_xn {
        h.push_str(",xn");
    }
    h.push_str(",value\n");
    h
}

fn push_num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("writing to a String cannot fail");
}

pub fn field_to_csv<T: Real>(u: &Field<T>) -> String {
    let g = u.grid();
    let d = g.d_cross();
    let mut out = header(&g, true);
    for col in 0..g.n_columns() {
        let x = g.col_coords(col);
        for j in 0..g.n_axial() {
            for &xi in &x[..d] {
                push_num(&mut out, xi);
                out.push(',');
            }
            push_num(&mut out, g.xn(j));
            out.push(',');
            write!(out, "{:.16e}", u.at(col, j)).expect("writing to a String cannot fail");
            out.push('\n');
        }
    }
    out
}

pub fn reduced_to_csv<T: Real>(v: &ReducedField<T>) -> String {
    let g = v.grid();
    let d = g.d_cross();
    let mut out = header(&g, false);
    for (col, &val) in v.values().iter().enumerate() {
        let x = g.col_coords(col);
        for &xi in &x[..d] {
            push_num(&mut out, xi);
            out.push(',');
        }
        write!(out, "{val:.16e}").expect("writing to a String cannot fail");
        out.push('\n');
    }
    out
}

fn parse_values<T: Real>(text: &str, expected_header: &str, rows: usize) -> Result<Vec<T>> {
    let mut lines = text.lines();
    let head = lines.next().unwrap_or_default();
    if head.trim() != expected_header.trim() {
        return Err(Error::input(
            "csv",
            format!("expected header `{}`, got `{head}`", expected_header.trim()),
        ));
    }
    let mut values = Vec::with_capacity(rows);
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or_default();
        let x: f64 = last
            .trim()
            .parse()
            .map_err(|e| Error::input("csv", format!("row {}: {e}", k + 2)))?;
        values.push(T::lit(x));
    }
    Ok(values)
}

/// Reads the `value` column back into a field on `grid`.
pub fn field_from_csv<T: Real>(grid: Grid, text: &str) -> Result<Field<T>> {
    let v = parse_values(text, &header(&grid, true), grid.n_nodes())?;
    Field::from_values(grid, v)
}

pub fn reduced_from_csv<T: Real>(grid: Grid, text: &str) -> Result<ReducedField<T>> {
    let v = parse_values(text, &header(&grid, false), grid.n_columns())?;
    ReducedField::from_values(grid, v)
}
